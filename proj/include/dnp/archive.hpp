#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "dnp/molgraph.hpp"

namespace dnpgcn {

nlohmann::json graph_to_json(const MolGraph& g);
/// Throws ParseError on a structurally invalid record.
MolGraph graph_from_json(const nlohmann::json& j);

/// Feature archive: one serialized MolGraph per line.
std::string write_archive(const std::vector<MolGraph>& graphs);
std::vector<MolGraph> read_archive(std::string_view text);

enum class StructureKind { Protein, Molecule };

struct ManifestEntry {
  std::filesystem::path path;  // resolved against the manifest's directory
  StructureKind kind = StructureKind::Molecule;
  int label = 0;
};

/// JSON lines: {"path": ..., "kind": "protein"|"molecule", "label": int}.
std::vector<ManifestEntry> parse_manifest(std::string_view text, const std::filesystem::path& base_dir);

/// Reads, parses and builds the graph for one manifest entry, featurized with `kind`.
MolGraph load_structure(const ManifestEntry& entry, DescriptorKind kind);

}  // namespace dnpgcn
