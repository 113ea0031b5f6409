#include "dnp/structure_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "json.hpp"

namespace dnpgcn {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// 1-based inclusive column range, clipped to the line.
std::string_view columns(std::string_view line, std::size_t first, std::size_t last) {
  if (line.size() < first) return {};
  return line.substr(first - 1, std::min(last, line.size()) - first + 1);
}

template <typename T>
std::optional<T> parse_number(std::string_view field) {
  field = trim(field);
  if (field.empty()) return std::nullopt;
  if (field.front() == '+') field.remove_prefix(1);
  T value{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) return std::nullopt;
  return value;
}

struct AtomCandidate {
  Vec3 position;
  double occupancy = -1.0;
};

struct ResidueAccumulator {
  std::string name;
  char chain = ' ';
  int sequence_number = 0;
  char insertion_code = ' ';
  std::optional<AtomCandidate> ca;
  std::optional<AtomCandidate> c;
};

void offer(std::optional<AtomCandidate>& slot, const AtomCandidate& candidate) {
  if (!slot || candidate.occupancy > slot->occupancy) slot = candidate;
}

}  // namespace

PdbStructure parse_pdb(std::string_view text) {
  using Key = std::tuple<char, int, char>;
  std::map<Key, std::size_t> index;
  std::vector<ResidueAccumulator> groups;

  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (line.substr(0, 6) == "ENDMDL") break;
    if (line.substr(0, 6) != "ATOM  ") continue;

    if (line.size() < 54) throw ParseError("ATOM record shorter than 54 columns", line_no);
    const auto x = parse_number<double>(columns(line, 31, 38));
    const auto y = parse_number<double>(columns(line, 39, 46));
    const auto z = parse_number<double>(columns(line, 47, 54));
    if (!x || !y || !z) throw ParseError("ATOM record has malformed coordinates", line_no);
    const auto seq = parse_number<int>(columns(line, 23, 26));
    if (!seq) throw ParseError("ATOM record has malformed residue sequence number", line_no);
    double occupancy = 1.0;
    if (line.size() >= 55) {
      const auto field = columns(line, 55, 60);
      if (!trim(field).empty()) {
        const auto occ = parse_number<double>(field);
        if (!occ) throw ParseError("ATOM record has malformed occupancy", line_no);
        occupancy = *occ;
      }
    }

    const std::string_view atom_name = trim(columns(line, 13, 16));
    const char chain = line[21];
    const char icode = line.size() >= 27 ? line[26] : ' ';
    const Key key{chain, *seq, icode};
    auto [it, inserted] = index.try_emplace(key, groups.size());
    if (inserted) {
      ResidueAccumulator acc;
      acc.name = std::string(trim(columns(line, 18, 20)));
      acc.chain = chain;
      acc.sequence_number = *seq;
      acc.insertion_code = icode;
      groups.push_back(std::move(acc));
    }
    ResidueAccumulator& acc = groups[it->second];
    const AtomCandidate candidate{{*x, *y, *z}, occupancy};
    if (atom_name == "CA") offer(acc.ca, candidate);
    else if (atom_name == "C") offer(acc.c, candidate);
  }

  PdbStructure out;
  for (auto& acc : groups) {
    if (!acc.ca) {
      ++out.skipped_residues;
      continue;
    }
    Residue r;
    r.name = std::move(acc.name);
    r.c_alpha = acc.ca->position;
    if (acc.c) r.carboxyl_c = acc.c->position;
    r.chain = acc.chain;
    r.sequence_number = acc.sequence_number;
    r.insertion_code = acc.insertion_code;
    out.residues.push_back(std::move(r));
  }
  return out;
}

namespace {

std::string canonical_element(std::string symbol) {
  symbol = std::string(trim(symbol));
  if (symbol.empty()) throw ParseError("atom with empty element symbol");
  for (auto& ch : symbol) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  symbol[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(symbol[0])));
  return symbol;
}

}  // namespace

SmallMolecule parse_molecule(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("molecule JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("atoms") || !doc["atoms"].is_array())
    throw ParseError("molecule JSON: missing \"atoms\" array");

  const auto& atoms = doc["atoms"];
  std::vector<Atom> all;
  all.reserve(atoms.size());
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    const auto& a = atoms[k];
    if (!a.is_object() || !a.contains("element") || !a["element"].is_string() ||
        !a.contains("xyz") || !a["xyz"].is_array() || a["xyz"].size() != 3)
      throw ParseError("molecule JSON: atom " + std::to_string(k) + " is malformed");
    for (const auto& c : a["xyz"])
      if (!c.is_number()) throw ParseError("molecule JSON: atom " + std::to_string(k) + " has non-numeric coordinates");
    Vec3 p{a["xyz"][0].get<double>(), a["xyz"][1].get<double>(), a["xyz"][2].get<double>()};
    if (!p.is_finite()) throw ParseError("molecule JSON: atom " + std::to_string(k) + " has non-finite coordinates");
    all.push_back({canonical_element(a["element"].get<std::string>()), p});
  }

  std::vector<std::pair<std::size_t, std::size_t>> raw_bonds;
  if (doc.contains("bonds")) {
    const auto& bonds = doc["bonds"];
    if (!bonds.is_array()) throw ParseError("molecule JSON: \"bonds\" must be an array");
    for (std::size_t k = 0; k < bonds.size(); ++k) {
      const auto& b = bonds[k];
      if (!b.is_array() || b.size() != 2 || !b[0].is_number_unsigned() || !b[1].is_number_unsigned())
        throw ParseError("molecule JSON: bond " + std::to_string(k) + " must be a pair of indices");
      const auto i = b[0].get<std::size_t>();
      const auto j = b[1].get<std::size_t>();
      if (i >= all.size() || j >= all.size())
        throw ParseError("molecule JSON: bond " + std::to_string(k) + " references atom " +
                         std::to_string(std::max(i, j)) + " of " + std::to_string(all.size()));
      if (i == j) throw ParseError("molecule JSON: bond " + std::to_string(k) + " is a self-bond");
      raw_bonds.emplace_back(i, j);
    }
  }

  SmallMolecule mol;
  std::vector<std::size_t> remap(all.size(), SIZE_MAX);
  for (std::size_t k = 0; k < all.size(); ++k) {
    if (all[k].element == "H") continue;
    remap[k] = mol.atoms.size();
    mol.atoms.push_back(all[k]);
  }
  std::set<std::pair<std::size_t, std::size_t>> unique;
  for (const auto& [i, j] : raw_bonds) {
    if (remap[i] == SIZE_MAX || remap[j] == SIZE_MAX) continue;
    unique.emplace(std::min(remap[i], remap[j]), std::max(remap[i], remap[j]));
  }
  mol.bonds.assign(unique.begin(), unique.end());
  return mol;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error reading " + path.string());
  return buf.str();
}

void write_text_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw IoError("error writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

}  // namespace dnpgcn
