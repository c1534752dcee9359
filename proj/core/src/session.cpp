#include <json.hpp>

#include <algorithm>
#include <cmath>

#include "bnrefine/error.hpp"
#include "bnrefine/math.hpp"
#include "bnrefine/io.hpp"

namespace bnrefine {

using ordered_json = nlohmann::ordered_json;
using json = nlohmann::json;

namespace {

const char* status_name(NodeStatus s) {
  switch (s) {
    case NodeStatus::Alive: return "alive";
    case NodeStatus::Asleep: return "asleep";
    case NodeStatus::Dead: return "dead";
  }
  return "alive";
}

NodeStatus status_from(const std::string& s) {
  if (s == "alive") return NodeStatus::Alive;
  if (s == "asleep") return NodeStatus::Asleep;
  if (s == "dead") return NodeStatus::Dead;
  throw ParseError("", "unknown node status '" + s + "'");
}

}  // namespace

struct SessionAccess {
  static std::string save(const CombinedNetwork& net) {
    ordered_json doc;
    doc["format"] = "bnrefine-session";
    doc["version"] = io::kSessionVersion;
    doc["spec"] = ordered_json::parse(io::print_spec({net.schema(), net.priors(), net.config()}));
    doc["score_model"] = std::string(local::to_string(net.score_model()));
    doc["local_prior_scale"] = net.local_prior().scale;

    const auto& c = net.counters();
    doc["counters"] = {{"expansions", c.expansions},
                       {"nodes_created", c.nodes_created},
                       {"nodes_killed", c.nodes_killed},
                       {"dead_violations", c.dead_violations}};

    ordered_json examples = ordered_json::array();
    for (const auto& ex : net.example_log()) examples.push_back(ex.values);
    doc["examples"] = std::move(examples);

    ordered_json lattices = ordered_json::array();
    for (const auto& lat : net.lattices()) {
      ordered_json nodes = ordered_json::array();
      for (const auto& [bits, n] : lat.nodes()) {
        ordered_json o;
        o["bits"] = bits;
        o["status"] = status_name(n.status);
        o["open"] = n.expansion == Expansion::Open;
        o["expanded"] = n.expanded;
        o["synced_through"] = n.synced_through;
        o["log_prior"] = n.log_prior;
        o["log_ml"] = n.log_ml;
        o["log_score"] = n.log_score;
        ordered_json rows = ordered_json::array();
        for (const auto& [j, row] : n.counts.rows()) rows.push_back(ordered_json::array({j, row.counts}));
        o["counts"] = std::move(rows);
        if (n.model) {
          o["model"] = {{"kind", std::string(local::to_string(n.model->kind))},
                        {"coords", n.model->coords},
                        {"log_marginal", n.model->log_marginal}};
        }
        nodes.push_back(std::move(o));
      }
      lattices.push_back({{"variable", net.schema().variable(lat.variable()).name}, {"nodes", std::move(nodes)}});
    }
    doc["lattices"] = std::move(lattices);
    return doc.dump(1) + "\n";
  }

  static CombinedNetwork load(std::string_view text) {
    json doc;
    try {
      doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
      throw ParseError("byte " + std::to_string(e.byte), "corrupt session file");
    }
    try {
      return load_doc(doc);
    } catch (const json::exception& e) {
      throw ParseError("", std::string("corrupt session file: ") + e.what());
    }
  }

 private:
  // Stored scores are kept verbatim; they only have to agree with the counts.
  static void check_scores(const LatticeNode& n, const ParentLattice& lat, bool model_slot) {
    auto close = [](double a, double b) { return std::abs(a - b) <= 1e-6 * std::max(1.0, std::abs(b)); };
    if (!close(n.log_prior, lat.log_prior_of(n.bits)))
      throw ParseError("/lattices", "node log prior disagrees with the arc priors");
    if (!close(n.log_ml, log_marginal_likelihood(n.counts, n.alpha_x)))
      throw ParseError("/lattices", "node log marginal likelihood disagrees with its counts");
    const double active = model_slot && n.model ? n.model->log_marginal : n.log_ml;
    if (!close(n.log_score, n.log_prior + active))
      throw ParseError("/lattices", "node log score disagrees with its parts");
  }

  static CombinedNetwork load_doc(const json& doc) {
    if (!doc.is_object() || doc.value("format", "") != "bnrefine-session")
      throw ParseError("/format", "not a bnrefine session");
    if (doc.at("version").get<int>() != io::kSessionVersion)
      throw ParseError("/version", "unsupported session version");

    io::NetworkSpec spec = io::parse_spec(doc.at("spec").dump());
    CombinedNetwork net(spec.schema, spec.priors, spec.config);
    net.score_model_ = local::model_kind_from_string(doc.at("score_model").get<std::string>());
    net.local_prior_.scale = doc.at("local_prior_scale").get<double>();

    const auto& c = doc.at("counters");
    net.counters_.expansions = c.at("expansions").get<std::uint64_t>();
    net.counters_.nodes_created = c.at("nodes_created").get<std::uint64_t>();
    net.counters_.nodes_killed = c.at("nodes_killed").get<std::uint64_t>();
    net.counters_.dead_violations = c.at("dead_violations").get<std::uint64_t>();

    for (const auto& row : doc.at("examples")) {
      Example ex{row.get<std::vector<std::size_t>>()};
      validate_example(net.schema_, ex);
      net.log_.push_back(std::move(ex));
    }

    const auto& lats = doc.at("lattices");
    if (!lats.is_array() || lats.size() != net.schema_.size())
      throw ParseError("/lattices", "expected one lattice per variable");
    for (std::size_t x = 0; x < lats.size(); ++x) {
      const ParentLattice& fresh = net.lattices_[x];
      std::vector<LatticeNode> nodes;
      for (const auto& o : lats[x].at("nodes")) {
        LatticeNode n;
        n.bits = o.at("bits").get<ParentBits>();
        const ParentBits valid = fresh.candidates().size() >= 64
                                     ? ~ParentBits{0}
                                     : (ParentBits{1} << fresh.candidates().size()) - 1;
        if (n.bits & ~valid) throw ParseError("/lattices", "node outside the candidate space");
        n.parents = fresh.parents_of(n.bits);
        n.alpha_x = fresh.alpha_of(n.bits);
        n.status = status_from(o.at("status").get<std::string>());
        n.expansion = o.at("open").get<bool>() ? Expansion::Open : Expansion::Closed;
        n.expanded = o.at("expanded").get<bool>();
        n.synced_through = o.at("synced_through").get<std::size_t>();
        if (n.synced_through > net.log_.size())
          throw ParseError("/lattices", "node synced past the example log");
        n.log_prior = o.at("log_prior").get<double>();
        n.log_ml = o.at("log_ml").get<double>();
        n.log_score = o.at("log_score").get<double>();
        const auto idx = fresh.indexer_of(n.bits);
        n.counts = CountTable(fresh.child_arity(), idx.num_configs());
        for (const auto& r : o.at("counts"))
          n.counts.set_row(r.at(0).get<ConfigIndex>(), r.at(1).get<std::vector<std::uint64_t>>());
        if (n.counts.total() != n.synced_through)
          throw ParseError("/lattices", "node counts disagree with its sync point");
        if (o.contains("model")) {
          const auto& m = o.at("model");
          n.model = local::LocalModelScore{local::model_kind_from_string(m.at("kind").get<std::string>()),
                                           m.at("coords").get<std::vector<double>>(),
                                           m.at("log_marginal").get<double>()};
        }
        check_scores(n, fresh, net.uses_model_slot());
        nodes.push_back(std::move(n));
      }
      // Links are a function of the stored key set.
      for (auto& n : nodes) {
        for (const auto& other : nodes) {
          const ParentBits diff = n.bits ^ other.bits;
          if (diff == 0 || (diff & (diff - 1)) != 0) continue;
          ((other.bits & n.bits) == other.bits ? n.sub_links : n.super_links).push_back(other.bits);
        }
        std::sort(n.sub_links.begin(), n.sub_links.end());
        std::sort(n.super_links.begin(), n.super_links.end());
      }
      net.lattices_[x] = LatticeAccess::restore(x, net.schema_, net.priors_, net.config_, std::move(nodes));
    }
    return net;
  }
};

namespace io {

std::string session_to_json(const CombinedNetwork& net) { return SessionAccess::save(net); }

CombinedNetwork session_from_json(std::string_view text) { return SessionAccess::load(text); }

void save_session(const std::filesystem::path& path, const CombinedNetwork& net) {
  write_file_atomic(path, session_to_json(net));
}

CombinedNetwork load_session(const std::filesystem::path& path) {
  return session_from_json(read_file(path));
}

}  // namespace io
}  // namespace bnrefine
