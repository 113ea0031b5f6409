#include "dnp/archive.hpp"

namespace dnpgcn {

using nlohmann::json;

namespace {

json vec_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

Vec3 vec_from(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3 || !j[0].is_number() || !j[1].is_number() || !j[2].is_number())
    throw ParseError(std::string("graph record: ") + what + " must be 3 numbers");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("graph record: missing \"") + key + "\"");
  return j[key];
}

std::vector<double> numbers(const json& j, const char* what) {
  if (!j.is_array()) throw ParseError(std::string("graph record: ") + what + " must be an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& x : j) {
    if (!x.is_number()) throw ParseError(std::string("graph record: ") + what + " must hold numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

}  // namespace

json graph_to_json(const MolGraph& g) {
  json nodes = json::array();
  for (const auto& n : g.nodes) {
    const auto& dir = n.geometry.direction();
    nodes.push_back({{"features", n.features},
                     {"position", vec_json(n.geometry.position())},
                     {"direction", dir ? vec_json(*dir) : json(nullptr)}});
  }
  json edges = json::array();
  for (const auto& e : g.edges)
    edges.push_back({{"i", e.i}, {"j", e.j}, {"raw", e.raw}, {"encoded", e.encoded}});

  return {{"id", g.id},
          {"label", g.label ? json(*g.label) : json(nullptr)},
          {"group", g.group ? json(*g.group) : json(nullptr)},
          {"descriptor", std::string(to_string(g.descriptor))},
          {"distance_scale", g.distance_scale},
          {"nodes", std::move(nodes)},
          {"edges", std::move(edges)}};
}

MolGraph graph_from_json(const json& j) {
  MolGraph g;
  const auto& id = field(j, "id");
  if (!id.is_string()) throw ParseError("graph record: \"id\" must be a string");
  g.id = id.get<std::string>();
  for (const char* key : {"label", "group"}) {
    if (!j.contains(key) || j[key].is_null()) continue;
    if (!j[key].is_number_integer()) throw ParseError(std::string("graph record: \"") + key + "\" must be an integer");
    (std::string_view(key) == "label" ? g.label : g.group) = j[key].get<int>();
  }
  const auto& desc = field(j, "descriptor");
  if (!desc.is_string()) throw ParseError("graph record: \"descriptor\" must be a string");
  try {
    g.descriptor = parse_descriptor_kind(desc.get<std::string>());
  } catch (const ConfigError& e) {
    throw ParseError(std::string("graph record: ") + e.what());
  }
  const auto& scale = field(j, "distance_scale");
  if (!scale.is_number() || !(scale.get<double>() > 0.0))
    throw ParseError("graph record: \"distance_scale\" must be a positive number");
  g.distance_scale = scale.get<double>();

  const auto& nodes = field(j, "nodes");
  if (!nodes.is_array()) throw ParseError("graph record: \"nodes\" must be an array");
  for (const auto& n : nodes) {
    GraphNode node;
    node.features = numbers(field(n, "features"), "node features");
    const Vec3 pos = vec_from(field(n, "position"), "node position");
    const auto& dir = field(n, "direction");
    try {
      node.geometry = dir.is_null() ? DirectionalNode(pos) : DirectionalNode(pos, vec_from(dir, "node direction"));
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(std::string("graph record: ") + e.what());
    }
    g.nodes.push_back(std::move(node));
  }

  const auto& edges = field(j, "edges");
  if (!edges.is_array()) throw ParseError("graph record: \"edges\" must be an array");
  for (const auto& e : edges) {
    GraphEdge edge;
    const auto& i = field(e, "i");
    const auto& jj = field(e, "j");
    if (!i.is_number_unsigned() || !jj.is_number_unsigned())
      throw ParseError("graph record: edge endpoints must be non-negative integers");
    edge.i = i.get<std::size_t>();
    edge.j = jj.get<std::size_t>();
    if (edge.i >= edge.j || edge.j >= g.nodes.size())
      throw ParseError("graph record: edge (" + std::to_string(edge.i) + ", " + std::to_string(edge.j) +
                       ") needs i < j < node count");
    edge.raw = numbers(field(e, "raw"), "edge raw values");
    const auto enc = numbers(field(e, "encoded"), "edge encoding");
    if (enc.size() != kEdgeFeatureWidth) throw ParseError("graph record: edge encoding must have 4 values");
    std::copy(enc.begin(), enc.end(), edge.encoded.begin());
    g.edges.push_back(std::move(edge));
  }
  return g;
}

std::string write_archive(const std::vector<MolGraph>& graphs) {
  std::string out;
  for (const auto& g : graphs) {
    out += graph_to_json(g).dump();
    out += '\n';
  }
  return out;
}

std::vector<MolGraph> read_archive(std::string_view text) {
  std::vector<MolGraph> graphs;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    const std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      graphs.push_back(graph_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw ParseError(std::string("archive: ") + e.what(), line_no);
    } catch (const ParseError& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return graphs;
}

std::vector<ManifestEntry> parse_manifest(std::string_view text, const std::filesystem::path& base_dir) {
  std::vector<ManifestEntry> entries;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    const std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(std::string("manifest: ") + e.what(), line_no);
    }
    if (!rec.is_object() || !rec.contains("path") || !rec["path"].is_string())
      throw ParseError("manifest: record needs a string \"path\"", line_no);
    if (!rec.contains("kind") || !rec["kind"].is_string())
      throw ParseError("manifest: record needs a string \"kind\"", line_no);
    if (!rec.contains("label") || !rec["label"].is_number_integer())
      throw ParseError("manifest: record needs an integer \"label\"", line_no);

    ManifestEntry entry;
    std::filesystem::path p = rec["path"].get<std::string>();
    entry.path = p.is_absolute() ? p : base_dir / p;
    const auto kind = rec["kind"].get<std::string>();
    if (kind == "protein") entry.kind = StructureKind::Protein;
    else if (kind == "molecule") entry.kind = StructureKind::Molecule;
    else throw ParseError("manifest: unknown kind '" + kind + "' (expected protein or molecule)", line_no);
    entry.label = rec["label"].get<int>();
    if (entry.label < 0) throw ParseError("manifest: label must be non-negative", line_no);
    entries.push_back(std::move(entry));
  }
  return entries;
}

MolGraph load_structure(const ManifestEntry& entry, DescriptorKind kind) {
  const std::string text = read_text_file(entry.path);
  MolGraph g;
  try {
    if (entry.kind == StructureKind::Protein) {
      const auto pdb = parse_pdb(text);
      g = build_protein_graph(pdb.residues);
    } else {
      g = build_molecule_graph(parse_molecule(text));
    }
    g = featurize_edges(std::move(g), kind);
  } catch (const Error& e) {
    throw ParseError(entry.path.string() + ": " + e.what());
  }
  g.id = entry.path.filename().string();
  g.label = entry.label;
  return g;
}

}  // namespace dnpgcn
