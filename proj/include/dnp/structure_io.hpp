#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dnp/geometry.hpp"

namespace dnpgcn {

struct Residue {
  std::string name;  // three-letter code, e.g. "ALA"
  Vec3 c_alpha;
  std::optional<Vec3> carboxyl_c;
  char chain = ' ';
  int sequence_number = 0;
  char insertion_code = ' ';
};

struct PdbStructure {
  std::vector<Residue> residues;
  /// Residue groups dropped because they had no CA atom.
  std::size_t skipped_residues = 0;
};

/// Reads fixed-column ATOM records (first model only). One residue per
/// (chain, resSeq, iCode) in order of first appearance. Alternate locations
/// keep the highest occupancy, ties go to the first record. HETATM and any
/// other record types are ignored.
PdbStructure parse_pdb(std::string_view text);

struct Atom {
  std::string element;
  Vec3 position;
};

/// Heavy atoms only; bonds are unordered index pairs with i < j, sorted, unique.
struct SmallMolecule {
  std::vector<Atom> atoms;
  std::vector<std::pair<std::size_t, std::size_t>> bonds;
};

/// `{"atoms":[{"element":"C","xyz":[x,y,z]},...],"bonds":[[i,j],...]}` with
/// 0-based indices. Hydrogens and their bonds are dropped and the remaining
/// atoms reindexed.
SmallMolecule parse_molecule(std::string_view json_text);

/// Whole-file read; throws IoError naming the path.
std::string read_text_file(const std::filesystem::path& path);

/// Writes through a temporary sibling file and renames it into place.
void write_text_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace dnpgcn
