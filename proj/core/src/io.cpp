#include "bnrefine/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "bnrefine/error.hpp"

namespace bnrefine::io {

using ordered_json = nlohmann::ordered_json;
using json = nlohmann::json;

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '_' || c == '.' || c == '-';
    if (!ok) return false;
  }
  return true;
}

namespace {

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError("byte " + std::to_string(e.byte), "malformed JSON");
  }
}

const json& member(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw ParseError(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(where, std::string("missing \"") + key + "\"");
  return *it;
}

std::string string_at(const json& v, const std::string& where) {
  if (!v.is_string()) throw ParseError(where, "expected a string");
  return v.get<std::string>();
}

double number_at(const json& v, const std::string& where) {
  if (!v.is_number()) throw ParseError(where, "expected a number");
  return v.get<double>();
}

void check_format(const json& doc, const char* format, int version) {
  const auto f = string_at(member(doc, "format", ""), "/format");
  if (f != format) throw ParseError("/format", "expected \"" + std::string(format) + "\", got \"" + f + "\"");
  const auto& v = member(doc, "version", "");
  if (!v.is_number_integer() || v.get<int>() != version)
    throw ParseError("/version", "unsupported version (expected " + std::to_string(version) + ")");
}

DomainSchema parse_variables(const json& vars, const std::string& where) {
  if (!vars.is_array()) throw ParseError(where, "expected an array of variables");
  std::vector<VariableSpec> specs;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    const std::string w = where + "/" + std::to_string(i);
    VariableSpec v;
    v.name = string_at(member(vars[i], "name", w), w + "/name");
    if (!is_identifier(v.name)) throw ParseError(w + "/name", "'" + v.name + "' is not an identifier");
    const auto& vals = member(vars[i], "values", w);
    if (!vals.is_array()) throw ParseError(w + "/values", "expected an array of labels");
    for (std::size_t k = 0; k < vals.size(); ++k) {
      auto label = string_at(vals[k], w + "/values/" + std::to_string(k));
      if (!is_identifier(label))
        throw ParseError(w + "/values/" + std::to_string(k), "'" + label + "' is not an identifier");
      v.values.push_back(std::move(label));
    }
    specs.push_back(std::move(v));
  }
  try {
    return DomainSchema(std::move(specs));
  } catch (const ConfigError& e) {
    throw ParseError(where, e.what());
  }
}

ordered_json variables_json(const DomainSchema& schema) {
  ordered_json vars = ordered_json::array();
  for (const auto& v : schema.variables()) {
    ordered_json o;
    o["name"] = v.name;
    o["values"] = v.values;
    vars.push_back(std::move(o));
  }
  return vars;
}

}  // namespace

NetworkSpec parse_spec(std::string_view text) {
  const json doc = parse_json(text);
  if (!doc.is_object()) throw ParseError("", "spec must be a JSON object");
  if (doc.contains("format")) check_format(doc, "bnrefine-spec", kSpecVersion);

  NetworkSpec spec;
  spec.schema = parse_variables(member(doc, "variables", ""), "/variables");

  double default_prior = 0.5;
  if (doc.contains("default_prior")) {
    default_prior = number_at(doc["default_prior"], "/default_prior");
    if (!(default_prior >= 0.0 && default_prior <= 1.0))
      throw ParseError("/default_prior", "must lie in [0,1]");
  }
  if (doc.contains("alpha")) {
    spec.config.alpha = number_at(doc["alpha"], "/alpha");
    if (!(spec.config.alpha > 0.0)) throw ParseError("/alpha", "must be positive");
  }
  spec.priors = ArcPriorMatrix(spec.schema.size(), default_prior);

  if (doc.contains("arcs")) {
    const auto& arcs = doc["arcs"];
    if (!arcs.is_array()) throw ParseError("/arcs", "expected an array");
    for (std::size_t i = 0; i < arcs.size(); ++i) {
      const std::string w = "/arcs/" + std::to_string(i);
      const auto from = string_at(member(arcs[i], "from", w), w + "/from");
      const auto to = string_at(member(arcs[i], "to", w), w + "/to");
      const double p = number_at(member(arcs[i], "prior", w), w + "/prior");
      const auto y = spec.schema.index_of(from);
      const auto x = spec.schema.index_of(to);
      if (!y) throw ParseError(w + "/from", "unknown variable '" + from + "'");
      if (!x) throw ParseError(w + "/to", "unknown variable '" + to + "'");
      if (*y >= *x)
        throw ParseError(w, "arc " + from + " -> " + to + " goes against the variable ordering");
      if (!(p >= 0.0 && p <= 1.0)) throw ParseError(w + "/prior", "must lie in [0,1]");
      if (spec.priors.has_entry(*y, *x))
        throw ParseError(w, "duplicate arc " + from + " -> " + to);
      spec.priors.set(*y, *x, p);
    }
  }
  return spec;
}

std::string print_spec(const NetworkSpec& spec) {
  ordered_json doc;
  doc["format"] = "bnrefine-spec";
  doc["version"] = kSpecVersion;
  doc["alpha"] = spec.config.alpha;
  doc["default_prior"] = spec.priors.default_prior();
  doc["variables"] = variables_json(spec.schema);
  ordered_json arcs = ordered_json::array();
  for (const auto& [key, p] : spec.priors.entries()) {
    ordered_json a;
    a["from"] = spec.schema.variable(key.first).name;
    a["to"] = spec.schema.variable(key.second).name;
    a["prior"] = p;
    arcs.push_back(std::move(a));
  }
  doc["arcs"] = std::move(arcs);
  return doc.dump(2) + "\n";
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  if (line.empty()) cells.emplace_back();
  return cells;
}

std::string where(std::size_t line, std::size_t column) {
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

}  // namespace

std::vector<Example> parse_csv(std::istream& in, const DomainSchema& schema) {
  std::string line;
  std::size_t lineno = 0;
  auto next_line = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };
  if (!next_line()) throw ParseError("line 1", "missing header row");
  if (lineno == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

  const auto header = split_line(line);
  std::vector<std::size_t> column_var(header.size());
  std::set<std::size_t> seen;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const auto v = schema.index_of(header[c]);
    if (!v) throw ParseError(where(1, c + 1), "unknown column '" + header[c] + "'");
    if (!seen.insert(*v).second) throw ParseError(where(1, c + 1), "duplicate column '" + header[c] + "'");
    column_var[c] = *v;
  }
  if (seen.size() != schema.size()) {
    for (std::size_t v = 0; v < schema.size(); ++v)
      if (!seen.contains(v))
        throw ParseError("line 1", "missing column '" + schema.variable(v).name + "'");
  }

  std::vector<Example> data;
  while (next_line()) {
    if (line.empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != header.size())
      throw ParseError("line " + std::to_string(lineno),
                       "expected " + std::to_string(header.size()) + " cells, found " +
                           std::to_string(cells.size()));
    Example ex;
    ex.values.assign(schema.size(), 0);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const std::size_t v = column_var[c];
      if (cells[c].empty())
        throw ParseError(where(lineno, c + 1), "missing value for '" + schema.variable(v).name + "'");
      const auto idx = schema.value_index(v, cells[c]);
      if (!idx)
        throw ParseError(where(lineno, c + 1), "unknown label '" + cells[c] + "' for '" +
                                                   schema.variable(v).name + "'");
      ex.values[v] = *idx;
    }
    data.push_back(std::move(ex));
  }
  return data;
}

std::vector<Example> load_csv(const std::filesystem::path& path, const DomainSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  return parse_csv(in, schema);
}

void write_csv(std::ostream& out, const DomainSchema& schema, std::span<const Example> data) {
  for (std::size_t v = 0; v < schema.size(); ++v) out << (v ? "," : "") << schema.variable(v).name;
  out << '\n';
  for (const auto& ex : data) {
    validate_example(schema, ex);
    for (std::size_t v = 0; v < schema.size(); ++v)
      out << (v ? "," : "") << schema.variable(v).values[ex[v]];
    out << '\n';
  }
}

std::string network_to_json(const ConcreteNetwork& network) {
  ordered_json doc;
  doc["format"] = "bnrefine-network";
  doc["version"] = kNetworkVersion;
  doc["variables"] = variables_json(network.schema());
  ordered_json nodes = ordered_json::array();
  for (std::size_t x = 0; x < network.size(); ++x) {
    ordered_json n;
    n["variable"] = network.schema().variable(x).name;
    std::vector<std::string> parents;
    for (std::size_t p : network.parents(x)) parents.push_back(network.schema().variable(p).name);
    n["parents"] = parents;
    ordered_json rows = ordered_json::array();
    const Cpt& t = network.cpt(x);
    for (std::size_t j = 0; j < t.num_configs; ++j) {
      auto r = t.row(j);
      rows.push_back(std::vector<double>(r.begin(), r.end()));
    }
    n["cpt"] = std::move(rows);
    nodes.push_back(std::move(n));
  }
  doc["nodes"] = std::move(nodes);
  return doc.dump(2) + "\n";
}

ConcreteNetwork network_from_json(std::string_view text) {
  const json doc = parse_json(text);
  check_format(doc, "bnrefine-network", kNetworkVersion);
  DomainSchema schema = parse_variables(member(doc, "variables", ""), "/variables");
  const auto& nodes = member(doc, "nodes", "");
  if (!nodes.is_array() || nodes.size() != schema.size())
    throw ParseError("/nodes", "expected one entry per variable");
  std::vector<std::vector<std::size_t>> parents(schema.size());
  std::vector<Cpt> cpts(schema.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string w = "/nodes/" + std::to_string(i);
    const auto name = string_at(member(nodes[i], "variable", w), w + "/variable");
    const auto x = schema.index_of(name);
    if (!x || *x != i) throw ParseError(w + "/variable", "nodes must follow the variable order");
    const auto& ps = member(nodes[i], "parents", w);
    if (!ps.is_array()) throw ParseError(w + "/parents", "expected an array");
    for (std::size_t k = 0; k < ps.size(); ++k) {
      const auto pname = string_at(ps[k], w + "/parents/" + std::to_string(k));
      const auto p = schema.index_of(pname);
      if (!p) throw ParseError(w + "/parents/" + std::to_string(k), "unknown variable '" + pname + "'");
      parents[i].push_back(*p);
    }
    const auto& rows = member(nodes[i], "cpt", w);
    if (!rows.is_array()) throw ParseError(w + "/cpt", "expected an array of rows");
    Cpt& t = cpts[i];
    t.arity = schema.arity(i);
    t.num_configs = rows.size();
    for (std::size_t j = 0; j < rows.size(); ++j) {
      const std::string rw = w + "/cpt/" + std::to_string(j);
      if (!rows[j].is_array() || rows[j].size() != t.arity)
        throw ParseError(rw, "expected " + std::to_string(t.arity) + " probabilities");
      for (std::size_t k = 0; k < t.arity; ++k) t.probs.push_back(number_at(rows[j][k], rw));
    }
  }
  try {
    return ConcreteNetwork(std::move(schema), std::move(parents), std::move(cpts));
  } catch (const StructuralError& e) {
    throw ParseError("/nodes", e.what());
  }
}

std::string smoothed_to_json(const SmoothedNetwork& smoothed) {
  const ConcreteNetwork net = smoothed.network();
  ordered_json doc = ordered_json::parse(network_to_json(net));
  doc["format"] = "bnrefine-network";
  for (std::size_t x = 0; x < smoothed.families.size(); ++x) {
    const auto& f = smoothed.families[x];
    auto& node = doc["nodes"][x];
    node["leaf_mass"] = f.mass;
    ordered_json arcs = ordered_json::object();
    for (const auto& [p, prob] : f.arc_probabilities) arcs[smoothed.schema.variable(p).name] = prob;
    node["arc_probabilities"] = std::move(arcs);
  }
  return doc.dump(2) + "\n";
}

std::string arcs_to_text(const ArcPosteriorMatrix& arcs, const DomainSchema& schema) {
  std::string out = "parent,child,posterior\n";
  char buf[64];
  for (const auto& [key, p] : arcs.entries) {
    std::snprintf(buf, sizeof buf, "%.6f", p);
    out += schema.variable(key.first).name + "," + schema.variable(key.second).name + "," + buf + "\n";
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error("cannot replace '" + path.string() + "'");
  }
}

}  // namespace bnrefine::io
