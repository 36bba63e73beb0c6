// Command-line front end: flat key=value configs, subcommand dispatch, CSV
// artifacts plus a manifest next to them. Every run is a pure function of
// (config, seed), so reruns produce byte-identical output trees.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hawkes/config.hpp"
#include "hawkes/csv.hpp"
#include "hawkes/errors.hpp"
#include "hawkes/estimators.hpp"
#include "hawkes/experiments.hpp"
#include "hawkes/graph.hpp"
#include "hawkes/rng.hpp"
#include "hawkes/simulator.hpp"
#include "hawkes/version.hpp"

namespace fs = std::filesystem;

namespace {

struct cli_state {
  std::string config_path;
  bool config_given = false;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out_dir = ".";
  std::vector<std::string> sets;
  std::string counts_path;  // estimate only
};

hawkes::run_config effective_config(const cli_state& state) {
  std::optional<std::string> path;
  if (state.config_given) path = state.config_path;
  std::optional<std::uint64_t> seed;
  if (state.seed_given) seed = state.seed;
  return hawkes::parse_config(path, state.sets, seed);
}

fs::path prepare_out_dir(const std::string& dir) {
  fs::path out(dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec)
    throw hawkes::io_error("cannot create output directory '" + dir + "': " + ec.message());
  return out;
}

hawkes::model_config to_model(const hawkes::run_config& cfg) {
  hawkes::model_config model;
  model.n = cfg.n;
  model.k = cfg.k;
  model.p = cfg.p;
  model.mu = cfg.mu;
  model.kern = hawkes::kernel{hawkes::exp_kernel{cfg.kernel_a, cfg.kernel_b}};
  model.mode = cfg.mode;
  model.horizon = cfg.horizon;
  model.q = cfg.q;
  model.replicas = cfg.replicas;
  model.seed = cfg.seed;
  model.threads = cfg.threads;
  return model;
}

void run_simulate(const hawkes::run_config& cfg, const fs::path& out) {
  hawkes::sim_config sim;
  sim.graph = hawkes::sample_graph(cfg.n, cfg.p, cfg.mode,
                                   hawkes::derive_seed(hawkes::derive_seed(cfg.seed, 1), 0));
  sim.mu = cfg.mu;
  sim.k = hawkes::kernel{hawkes::exp_kernel{cfg.kernel_a, cfg.kernel_b}};
  sim.horizon = cfg.horizon;
  sim.seed = hawkes::derive_seed(hawkes::derive_seed(cfg.seed, 2), 0);
  sim.max_events = cfg.max_events;
  auto log = hawkes::simulate_exponential(sim);
  hawkes::write_events_csv((out / "events.csv").string(), log);
  auto grid = cfg.horizon >= 2.0 ? hawkes::estimation_grid(cfg.horizon, cfg.q)
                                 : std::vector<double>{cfg.horizon};
  hawkes::write_counts_csv((out / "counts.csv").string(), hawkes::counts_on_grid(log, grid));
  hawkes::write_manifest((out / "manifest.txt").string(), cfg, "simulate");
}

void run_estimate(const hawkes::run_config& cfg, const cli_state& state, const fs::path& out) {
  auto counts = hawkes::read_counts_csv(state.counts_path);
  if (cfg.n != counts.n)
    throw hawkes::config_error("key N does not match the counts file population");
  auto rec = hawkes::estimate_p(counts, cfg.k, cfg.q);
  hawkes::csv_table table;
  table.header = "t,regime,E,V,W,U,P,mu_hat,lambda_hat,p_hat,low_count_flag,in_domain";
  table.rows.push_back({hawkes::format_number(rec.t), hawkes::regime_name(rec.regime),
                        hawkes::format_number(rec.e), hawkes::format_number(rec.v),
                        hawkes::format_number(rec.w), hawkes::format_number(rec.u),
                        hawkes::format_number(rec.p_sup), hawkes::format_number(rec.mu_hat),
                        hawkes::format_number(rec.lambda_hat), hawkes::format_number(rec.p_hat),
                        rec.low_count_flag ? "1" : "0", rec.in_domain ? "1" : "0"});
  hawkes::write_csv((out / "estimate.csv").string(), table);
  hawkes::write_manifest((out / "manifest.txt").string(), cfg, "estimate");
}

void run_mc(const hawkes::run_config& cfg, const fs::path& out) {
  if (!(cfg.horizon > 2.0)) throw hawkes::config_error("key T must exceed 2 for mc");
  int pts = cfg.grid_points;
  std::vector<double> grid;
  if (pts == 1) {
    grid = {cfg.horizon};
  } else {
    double start = std::max(2.0, cfg.horizon / pts);
    for (int j = 0; j < pts; ++j)
      grid.push_back(start + j * (cfg.horizon - start) / (pts - 1));
    grid.back() = cfg.horizon;
  }
  auto summary = hawkes::run_monte_carlo(to_model(cfg), grid);
  hawkes::csv_table table;
  table.header = "t,q25,q50,q75,good_fraction,replicas";
  for (std::size_t j = 0; j < summary.t.size(); ++j) {
    table.rows.push_back({hawkes::format_number(summary.t[j]),
                          hawkes::format_number(summary.q25[j]),
                          hawkes::format_number(summary.q50[j]),
                          hawkes::format_number(summary.q75[j]),
                          hawkes::format_number(summary.good_fraction[j]),
                          std::to_string(summary.replicas)});
  }
  hawkes::write_csv((out / "summary.csv").string(), table);
  hawkes::write_manifest((out / "manifest.txt").string(), cfg, "mc");
}

void run_limits(const hawkes::run_config& cfg, const fs::path& out) {
  double lambda = cfg.kernel_a / cfg.kernel_b;
  double lp = lambda * cfg.p;
  if (lp == 1.0) throw hawkes::domain_error("critical configuration: total_mass * p = 1");
  auto regime =
      lp < 1.0 ? hawkes::regime_kind::subcritical : hawkes::regime_kind::supercritical;
  auto res = hawkes::limit_quartiles(cfg.n, cfg.k, cfg.p, lambda, cfg.mu, cfg.mode, regime,
                                     cfg.replicas, cfg.seed, cfg.threads);
  hawkes::csv_table table;
  table.header = "q25,q50,q75,failures,replicas";
  table.rows.push_back({hawkes::format_number(res.q.q25), hawkes::format_number(res.q.q50),
                        hawkes::format_number(res.q.q75), std::to_string(res.failures),
                        std::to_string(res.replicas)});
  hawkes::write_csv((out / "limits.csv").string(), table);
  hawkes::write_manifest((out / "manifest.txt").string(), cfg, "limits");
}

void run_sweep(const hawkes::run_config& cfg, const fs::path& out) {
  auto rows = hawkes::delta_sweep(to_model(cfg), cfg.deltas);
  hawkes::csv_table table;
  table.header = "delta,q25,q50,q75";
  for (const auto& row : rows) {
    table.rows.push_back({hawkes::format_number(row.delta), hawkes::format_number(row.q.q25),
                          hawkes::format_number(row.q.q50), hawkes::format_number(row.q.q75)});
  }
  hawkes::write_csv((out / "sweep.csv").string(), table);
  hawkes::write_manifest((out / "manifest.txt").string(), cfg, "sweep");
}

void run_toy(const hawkes::run_config& cfg, const fs::path& out) {
  hawkes::toy_config toy;
  toy.gamma = cfg.gamma;
  toy.p = cfg.p;
  toy.n = cfg.n;
  toy.m_t = cfg.m_t;
  toy.replicas = cfg.replicas;
  toy.seed = cfg.seed;
  auto res = hawkes::gaussian_toy(toy);
  hawkes::csv_table table;
  table.header = "empirical_variance,formula_variance";
  table.rows.push_back({hawkes::format_number(res.empirical_variance),
                        hawkes::format_number(res.formula_variance)});
  hawkes::write_csv((out / "toy.csv").string(), table);
  hawkes::write_manifest((out / "manifest.txt").string(), cfg, "toy");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simulation and estimation toolkit for interacting counting processes"};
  app.set_version_flag("--version", hawkes::version_string);
  app.require_subcommand(1);

  cli_state state;
  auto* config_opt = app.add_option("--config", state.config_path, "flat key=value config file");
  auto* seed_opt = app.add_option("--seed", state.seed, "master seed override");
  app.add_option("--out", state.out_dir, "output directory (created if missing)");
  app.add_option("--set", state.sets, "config override key=value (repeatable)");

  auto* cmd_simulate =
      app.add_subcommand("simulate", "draw a graph and one event history, dump events and counts");
  auto* cmd_estimate = app.add_subcommand("estimate", "estimate parameters from a counts CSV");
  auto* counts_opt =
      cmd_estimate->add_option("--counts", state.counts_path, "counts CSV to estimate from")
          ->required();
  auto* cmd_mc = app.add_subcommand("mc", "replicated estimation error traces over a time grid");
  auto* cmd_limits = app.add_subcommand("limits", "graph-limit value distribution study");
  auto* cmd_sweep = app.add_subcommand("sweep", "window-width sensitivity study");
  auto* cmd_toy = app.add_subcommand("toy", "Gaussian moment-matching toy study");
  for (auto* sub : {cmd_simulate, cmd_estimate, cmd_mc, cmd_limits, cmd_sweep, cmd_toy})
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // help / version
    std::cerr << "error(config): " << e.what() << "\n";
    return 1;
  }
  state.config_given = config_opt->count() > 0;
  state.seed_given = seed_opt->count() > 0;
  (void)counts_opt;

  try {
    auto cfg = effective_config(state);
    auto out = prepare_out_dir(state.out_dir);
    if (app.got_subcommand(cmd_simulate)) {
      run_simulate(cfg, out);
    } else if (app.got_subcommand(cmd_estimate)) {
      run_estimate(cfg, state, out);
    } else if (app.got_subcommand(cmd_mc)) {
      run_mc(cfg, out);
    } else if (app.got_subcommand(cmd_limits)) {
      run_limits(cfg, out);
    } else if (app.got_subcommand(cmd_sweep)) {
      run_sweep(cfg, out);
    } else {
      run_toy(cfg, out);
    }
    return 0;
  } catch (const hawkes::error& e) {
    std::cerr << "error(" << hawkes::category_name(e.code()) << "): " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error(internal): " << e.what() << "\n";
    return 1;
  }
}
