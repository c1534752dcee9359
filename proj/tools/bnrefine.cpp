// bnrefine: command-line front end for sessions, search and queries.
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bnrefine/engine.hpp"
#include "bnrefine/io.hpp"
#include "bnrefine/local_models.hpp"
#include "bnrefine/oracle.hpp"
#include "bnrefine/query.hpp"
#include "bnrefine/sampler.hpp"

namespace {

using namespace bnrefine;

// Writes to `path` atomically, or to stdout when no path was given.
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    std::cout.flush();
  } else {
    io::write_file_atomic(path, text);
  }
}

io::GreyMapping mapping_from(const std::string& s) {
  return s == "log" ? io::GreyMapping::Log : io::GreyMapping::Linear;
}

struct InitArgs {
  std::string spec, out;
  double alpha = 0.0;
  double default_prior = 0.5;
  std::string model = "table";
};

struct SessionIo {
  std::string session, out;
  const std::string& target() const { return out.empty() ? session : out; }
};

struct RefineArgs {
  SessionIo files;
  SearchParams params;
  std::size_t budget = 0;
};

struct DotArgs {
  bool dot = false;
  std::string mapping = "linear";
  double threshold = 0.01;
  io::DotOptions options() const { return {mapping_from(mapping), threshold, 1e-3}; }
};

void add_dot_flags(CLI::App* cmd, DotArgs& d) {
  cmd->add_flag("--dot", d.dot, "Write Graphviz DOT instead of text");
  cmd->add_option("--grey-mapping", d.mapping, "Probability to grey level mapping")
      ->check(CLI::IsMember({"linear", "log"}));
  cmd->add_option("--threshold", d.threshold, "Omit arcs below this probability")
      ->check(CLI::Range(0.0, 1.0));
}

int run_init(const InitArgs& a, bool alpha_set, bool prior_set) {
  auto spec = io::parse_spec(io::read_file(a.spec));
  if (alpha_set) spec.config.alpha = a.alpha;
  if (prior_set) {
    // explicit entries survive a new default
    ArcPriorMatrix priors(spec.schema.size(), a.default_prior);
    for (const auto& [key, p] : spec.priors.entries()) priors.set(key.first, key.second, p);
    spec.priors = std::move(priors);
  }
  auto net = init(spec.schema, spec.priors, spec.config, local::model_kind_from_string(a.model));
  io::save_session(a.out, net);
  return 0;
}

int run_refine(RefineArgs& a, bool budget_set) {
  if (budget_set) a.params.budget = a.budget;
  auto net = io::load_session(a.files.session);
  const auto report = refine(net, a.params);
  io::save_session(a.files.target(), net);
  std::printf("expansions: %zu\n", report.expansions);
  std::printf("nodes_created: %zu\n", report.nodes_created);
  std::printf("nodes_killed: %zu\n", report.nodes_killed);
  std::printf("exhausted: %s\n", report.exhausted ? "true" : "false");
  std::printf("total_nodes: %zu\n", net.total_nodes());
  for (std::size_t x = 0; x < report.best_log_scores.size(); ++x)
    std::printf("best_log_score %s: %.10g\n", net.schema().variable(x).name.c_str(),
                report.best_log_scores[x]);
  return 0;
}

int run_oracle(const std::string& spec_path, const std::string& csv, const DotArgs& d,
               const std::string& out) {
  const auto spec = io::parse_spec(io::read_file(spec_path));
  const auto data = io::load_csv(csv, spec.schema);
  ArcPosteriorMatrix arcs;
  arcs.num_variables = spec.schema.size();
  for (std::size_t x = 0; x < spec.schema.size(); ++x) {
    const auto post = oracle::exhaustive_posterior(x, data, spec.priors, spec.config, spec.schema);
    for (std::size_t y = 0; y < x; ++y) arcs.entries[{y, x}] = oracle::exhaustive_arc_posterior(post, y);
  }
  emit(out, d.dot ? io::export_dot(arcs, spec.schema, d.options())
                  : io::arcs_to_text(arcs, spec.schema));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Incremental Bayesian network structure refinement"};
  app.name("bnrefine");
  app.require_subcommand(1);

  InitArgs init_args;
  auto* init_cmd = app.add_subcommand("init", "Create a session from a network spec");
  init_cmd->add_option("spec", init_args.spec, "Network spec file")->required()->check(CLI::ExistingFile);
  init_cmd->add_option("-o,--output", init_args.out, "Session file to write")->required();
  auto* alpha_opt = init_cmd->add_option("--alpha", init_args.alpha, "Equivalent sample size");
  auto* prior_opt =
      init_cmd->add_option("--default-prior", init_args.default_prior, "Prior for arcs without an entry")
          ->check(CLI::Range(0.0, 1.0));
  init_cmd->add_option("--model", init_args.model, "Local model used for scoring")
      ->check(CLI::IsMember({"table", "noisy-or", "logistic"}));

  SessionIo observe_args;
  std::string observe_csv;
  auto* observe_cmd = app.add_subcommand("observe", "Add a CSV dataset to a session");
  observe_cmd->add_option("session", observe_args.session)->required()->check(CLI::ExistingFile);
  observe_cmd->add_option("csv", observe_csv)->required()->check(CLI::ExistingFile);
  observe_cmd->add_option("-o,--output", observe_args.out, "Write here instead of in place");

  RefineArgs refine_args;
  auto* refine_cmd = app.add_subcommand("refine", "Run the beam search");
  refine_cmd->add_option("session", refine_args.files.session)->required()->check(CLI::ExistingFile);
  refine_cmd->add_option("-o,--output", refine_args.files.out, "Write here instead of in place");
  auto& sp = refine_args.params;
  refine_cmd->add_option("--c-alive", sp.c_alive, "Alive threshold C")->capture_default_str();
  refine_cmd->add_option("--d-open", sp.d_open, "Open threshold D")->capture_default_str();
  refine_cmd->add_option("--e-dead", sp.e_dead, "Dead threshold E")->capture_default_str();
  refine_cmd->add_option("--kappa", sp.dead_kappa, "Data required per cell before killing")
      ->capture_default_str();
  refine_cmd->add_option("--hysteresis", sp.hysteresis, "Demotion factor h in (0,1]")
      ->capture_default_str();
  auto* budget_opt = refine_cmd->add_option("--budget", refine_args.budget, "Expansion budget");

  std::string arcs_session, arcs_out;
  DotArgs arcs_dot;
  auto* arcs_cmd = app.add_subcommand("arcs", "Posterior probability of every arc");
  arcs_cmd->add_option("session", arcs_session)->required()->check(CLI::ExistingFile);
  arcs_cmd->add_option("-o,--output", arcs_out);
  add_dot_flags(arcs_cmd, arcs_dot);

  std::string smooth_session, smooth_out;
  std::uint64_t smooth_seed = 0;
  DotArgs smooth_dot;
  auto* smooth_cmd = app.add_subcommand("smooth", "Draw a smoothed network");
  smooth_cmd->add_option("session", smooth_session)->required()->check(CLI::ExistingFile);
  smooth_cmd->add_option("--seed", smooth_seed)->capture_default_str();
  smooth_cmd->add_option("-o,--output", smooth_out);
  add_dot_flags(smooth_cmd, smooth_dot);

  std::string map_session, map_out;
  auto* map_cmd = app.add_subcommand("map", "Export the highest-scoring network");
  map_cmd->add_option("session", map_session)->required()->check(CLI::ExistingFile);
  map_cmd->add_option("-o,--output", map_out);

  std::string gen_network, gen_out;
  std::size_t gen_n = 0;
  std::uint64_t gen_seed = 0;
  auto* gen_cmd = app.add_subcommand("generate", "Forward-sample a dataset from a network");
  gen_cmd->add_option("network", gen_network)->required()->check(CLI::ExistingFile);
  gen_cmd->add_option("-n,--count", gen_n)->required();
  gen_cmd->add_option("--seed", gen_seed)->capture_default_str();
  gen_cmd->add_option("-o,--output", gen_out);

  std::string ll_network, ll_csv;
  auto* ll_cmd = app.add_subcommand("loglik", "Log-likelihood of a dataset under a network");
  ll_cmd->add_option("network", ll_network)->required()->check(CLI::ExistingFile);
  ll_cmd->add_option("csv", ll_csv)->required()->check(CLI::ExistingFile);

  std::string oracle_spec, oracle_csv, oracle_out;
  DotArgs oracle_dot;
  auto* oracle_cmd = app.add_subcommand("oracle", "Exact arc posteriors by enumeration");
  oracle_cmd->add_option("spec", oracle_spec)->required()->check(CLI::ExistingFile);
  oracle_cmd->add_option("csv", oracle_csv)->required()->check(CLI::ExistingFile);
  oracle_cmd->add_option("-o,--output", oracle_out);
  add_dot_flags(oracle_cmd, oracle_dot);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    const std::string first = argc > 1 ? argv[1] : "";
    if (!first.empty() && first[0] != '-' && app.get_subcommand_no_throw(first) == nullptr)
      std::cerr << "error: unknown subcommand '" << first << "'\n\n" << app.help();
    else
      std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return e.get_exit_code() == 0 ? 2 : e.get_exit_code();
  }

  try {
    if (*init_cmd) return run_init(init_args, alpha_opt->count() > 0, prior_opt->count() > 0);

    if (*observe_cmd) {
      auto net = io::load_session(observe_args.session);
      const auto data = io::load_csv(observe_csv, net.schema());
      observe_batch(net, data);
      io::save_session(observe_args.target(), net);
      return 0;
    }

    if (*refine_cmd) return run_refine(refine_args, budget_opt->count() > 0);

    if (*arcs_cmd) {
      const auto net = io::load_session(arcs_session);
      const auto arcs = all_arc_posteriors(net);
      emit(arcs_out, arcs_dot.dot ? io::export_dot(arcs, net.schema(), arcs_dot.options())
                                  : io::arcs_to_text(arcs, net.schema()));
      return 0;
    }

    if (*smooth_cmd) {
      const auto net = io::load_session(smooth_session);
      const auto smoothed = sample_smoothed(net, smooth_seed);
      emit(smooth_out, smooth_dot.dot ? io::export_dot(smoothed, smooth_dot.options())
                                      : io::smoothed_to_json(smoothed));
      return 0;
    }

    if (*map_cmd) {
      emit(map_out, io::network_to_json(best_network(io::load_session(map_session))));
      return 0;
    }

    if (*gen_cmd) {
      const auto network = io::network_from_json(io::read_file(gen_network));
      const auto data = forward_sample(network, gen_n, gen_seed);
      std::ostringstream csv;
      io::write_csv(csv, network.schema(), data);
      emit(gen_out, csv.str());
      return 0;
    }

    if (*ll_cmd) {
      const auto network = io::network_from_json(io::read_file(ll_network));
      const auto data = io::load_csv(ll_csv, network.schema());
      std::printf("%.17g\n", loglik_dataset(network, data));
      return 0;
    }

    if (*oracle_cmd) return run_oracle(oracle_spec, oracle_csv, oracle_dot, oracle_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
