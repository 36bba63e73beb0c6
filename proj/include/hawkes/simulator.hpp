#pragma once

// Event-level simulation of the N-dimensional counting system with intensity
// lambda_i(t) = mu + N^{-1} sum_j theta_ij int_0^{t-} phi(t-s) dZ_j(s),
// plus grid sampling of counts and a deterministic expected-count oracle.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <variant>
#include <vector>

#include "hawkes/errors.hpp"
#include "hawkes/graph.hpp"
#include "hawkes/kernel.hpp"
#include "hawkes/rng.hpp"

namespace hawkes {

struct sim_config {
  interaction_graph graph;
  double mu = 1.0;
  kernel k{exp_kernel{}};
  double horizon = 1.0;
  std::uint64_t seed = 0;
  std::size_t max_events = 10'000'000;  // explosion guard
};

struct event_log {
  double horizon = 0.0;
  std::vector<std::vector<double>> times;  // per individual, strictly increasing, in (0, T]
  std::size_t total_events = 0;
};

// Explosion guard tripped: carries whatever was simulated before the cap.
struct explosion_error : error {
  std::shared_ptr<event_log> partial;
  explosion_error(std::string msg, event_log&& log)
      : error(errc::convergence, std::move(msg)),
        partial(std::make_shared<event_log>(std::move(log))) {}
};

inline void validate(const sim_config& cfg) {
  if (cfg.graph.n < 1) throw domain_error("simulation needs at least one individual");
  if (!(cfg.mu > 0.0)) throw domain_error("baseline intensity must be positive");
  if (!(cfg.horizon > 0.0)) throw domain_error("horizon must be positive");
  if (cfg.max_events < 1) throw domain_error("event cap must be positive");
  validate(cfg.k);
}

namespace detail {

// in-neighbor lists: in_nbrs[j] = { i : theta_ij = 1 }, the individuals whose
// excitation jumps when j fires
inline std::vector<std::vector<int>> in_neighbors(const interaction_graph& g) {
  std::vector<std::vector<int>> nbrs(g.n);
  for (int j = 0; j < g.n; ++j)
    for (int i = 0; i < g.n; ++i)
      if (g(i, j)) nbrs[j].push_back(i);
  return nbrs;
}

inline double eval_kernel(const kernel& k, double t) {
  if (const auto* ek = std::get_if<exp_kernel>(&k)) return ek->a * std::exp(-ek->b * t);
  const auto& tk = std::get<tabulated_kernel>(k);
  return interp(tk.t, tk.phi, t);
}

}  // namespace detail

// Exact thinning for the exponential kernel. Per-individual excitation
// D_i(t) = sum_j theta_ij sum_{s in Z_j, s<t} a e^{-b(t-s)} decays by a shared
// factor between events, so the total intensity N mu + sum_i D_i(t)/N is
// non-increasing there and bounds itself for candidate draws. Excitations are
// stored at a fixed epoch scale (d[i] = D_i(t) e^{b(t-t0)}) so decay costs
// nothing; the epoch is rebased before e^{b(t-t0)} can overflow. Each
// candidate consumes draws in the order inter-arrival, acceptance, selection.
inline event_log simulate_exponential(const sim_config& cfg) {
  validate(cfg);
  const auto* ek = std::get_if<exp_kernel>(&cfg.k);
  if (!ek) throw domain_error("markovian simulation requires the exponential kernel");
  const int n = cfg.graph.n;
  const double a = ek->a, b = ek->b, mu = cfg.mu, horizon = cfg.horizon;

  auto in_nbrs = detail::in_neighbors(cfg.graph);
  event_log log;
  log.horizon = horizon;
  log.times.resize(n);
  rng gen(cfg.seed);

  std::vector<double> d(n, 0.0);  // excitation at epoch scale
  double epoch = 0.0;
  double clock = 0.0;
  double excite_sum = 0.0;  // sum_i D_i at the current clock

  while (true) {
    double bound = n * mu + excite_sum / n;
    double wait = gen.exponential(bound);
    double tc = clock + wait;
    if (tc > horizon) break;
    clock = tc;
    excite_sum *= std::exp(-b * wait);
    if (b * (clock - epoch) > 200.0) {
      double shrink = std::exp(-b * (clock - epoch));
      excite_sum = 0.0;
      for (int i = 0; i < n; ++i) {
        d[i] *= shrink;
        excite_sum += d[i];  // also resyncs the running sum
      }
      epoch = clock;
    }
    double total = n * mu + excite_sum / n;
    double accept = gen.uniform();
    if (accept * bound > total) continue;

    double decay = std::exp(-b * (clock - epoch));
    double target = gen.uniform() * total;
    double acc = 0.0;
    int sel = n - 1;  // guard against the running sum drifting below target
    for (int i = 0; i < n; ++i) {
      acc += mu + d[i] * decay / n;
      if (acc >= target) {
        sel = i;
        break;
      }
    }
    log.times[sel].push_back(clock);
    ++log.total_events;
    if (log.total_events > cfg.max_events)
      throw explosion_error("event cap exceeded: configuration is exploding", std::move(log));
    double boost = a / decay;  // a e^{+b(clock-epoch)}
    for (int i : in_nbrs[sel]) d[i] += boost;
    excite_sum += a * static_cast<double>(in_nbrs[sel].size());
  }
  return log;
}

// Thinning with the intensity recomputed from the full history at every
// candidate. Works for any non-increasing kernel; O(history) per candidate,
// so this is a small-scale cross-check tool, not the production path.
inline event_log simulate_thinning_general(const sim_config& cfg) {
  validate(cfg);
  if (const auto* tk = std::get_if<tabulated_kernel>(&cfg.k)) {
    for (std::size_t i = 1; i < tk->phi.size(); ++i)
      if (tk->phi[i] > tk->phi[i - 1])
        throw domain_error("general thinning requires a non-increasing kernel");
  }
  const int n = cfg.graph.n;
  const double mu = cfg.mu, horizon = cfg.horizon;

  event_log log;
  log.horizon = horizon;
  log.times.resize(n);
  rng gen(cfg.seed);

  // lambda_i(t) for all i: per-source excitation first, then one graph pass;
  // sources nobody listens to are skipped
  std::vector<bool> heard(n, false);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      if (cfg.graph(i, j)) {
        heard[j] = true;
        break;
      }
  std::vector<double> source(n), lambda(n);
  auto intensities = [&](double t) {
    for (int j = 0; j < n; ++j) {
      double e = 0.0;
      if (heard[j])
        for (double s : log.times[j])
          if (s < t) e += detail::eval_kernel(cfg.k, t - s);
      source[j] = e;
    }
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int j = 0; j < n; ++j)
        if (cfg.graph(i, j)) acc += source[j];
      lambda[i] = mu + acc / n;
    }
  };

  double clock = 0.0;
  while (true) {
    // the kernel is non-increasing, so lambda evaluated just after the last
    // event (epsilon late so phi(0) terms count) bounds the future total
    intensities(std::nextafter(clock, horizon + 1.0));
    double bound = 0.0;
    for (int i = 0; i < n; ++i) bound += lambda[i];
    double wait = gen.exponential(bound);
    double tc = clock + wait;
    if (tc > horizon) break;
    clock = tc;
    intensities(tc);
    double total = 0.0;
    for (int i = 0; i < n; ++i) total += lambda[i];
    double accept = gen.uniform();
    if (accept * bound > total) continue;

    double target = gen.uniform() * total;
    double acc = 0.0;
    int sel = n - 1;
    for (int i = 0; i < n; ++i) {
      acc += lambda[i];
      if (acc >= target) {
        sel = i;
        break;
      }
    }
    log.times[sel].push_back(clock);
    ++log.total_events;
    if (log.total_events > cfg.max_events)
      throw explosion_error("event cap exceeded: configuration is exploding", std::move(log));
  }
  return log;
}

struct counts_grid {
  std::vector<double> grid;          // increasing time points
  int n = 0;                         // individuals
  std::vector<std::int64_t> counts;  // row-major n x grid.size(), cumulative
  std::vector<double> mean;          // column mean per grid point

  std::int64_t at(int i, std::size_t k) const { return counts[i * grid.size() + k]; }
};

inline counts_grid counts_on_grid(const event_log& log, const std::vector<double>& grid) {
  if (grid.empty()) throw domain_error("grid must be non-empty");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (k > 0 && !(grid[k] > grid[k - 1])) throw domain_error("grid must be increasing");
    if (!(grid[k] >= 0.0)) throw domain_error("grid points must be nonnegative");
    if (grid[k] > log.horizon) throw domain_error("grid point beyond simulated horizon");
  }
  counts_grid out;
  out.grid = grid;
  out.n = static_cast<int>(log.times.size());
  out.counts.resize(static_cast<std::size_t>(out.n) * grid.size());
  out.mean.assign(grid.size(), 0.0);
  for (int i = 0; i < out.n; ++i) {
    const auto& times = log.times[i];
    for (std::size_t k = 0; k < grid.size(); ++k) {
      auto it = std::upper_bound(times.begin(), times.end(), grid[k]);
      out.counts[i * grid.size() + k] = it - times.begin();
    }
  }
  for (std::size_t k = 0; k < grid.size(); ++k) {
    double s = 0.0;
    for (int i = 0; i < out.n; ++i) s += static_cast<double>(out.counts[i * grid.size() + k]);
    out.mean[k] = s / out.n;
  }
  return out;
}

struct expected_counts {
  std::vector<double> grid;
  int n = 0;
  std::vector<double> values;  // row-major n x grid.size()

  double at(int i, std::size_t k) const { return values[i * grid.size() + k]; }
};

// Expected counts m(t) = E[Z(t)] for a fixed graph, from the closed ODE system
//   m' = mu 1 + g,   g' = a A (mu 1 + g) - b g,   m(0) = g(0) = 0,
// where g is the excitation part of the intensity. Classical 4th-order
// Runge-Kutta with a fixed step, subdivided so every grid point is hit exactly.
inline expected_counts conditional_mean_oracle(const interaction_graph& g, double mu,
                                               const kernel& k, const std::vector<double>& grid,
                                               double step = 1e-3) {
  if (g.n > 50) throw domain_error("expected-count oracle capped at 50 individuals");
  const auto* ek = std::get_if<exp_kernel>(&k);
  if (!ek) throw domain_error("expected-count oracle requires the exponential kernel");
  validate(*ek);
  if (!(mu > 0.0)) throw domain_error("baseline intensity must be positive");
  if (!(step > 0.0)) throw domain_error("step must be positive");
  if (grid.empty()) throw domain_error("grid must be non-empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0)) throw domain_error("grid points must be nonnegative");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw domain_error("grid must be increasing");
  }

  const int n = g.n;
  const double a = ek->a, b = ek->b;
  auto deriv_g = [&](const std::vector<double>& gv, std::vector<double>& out) {
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int j = 0; j < n; ++j)
        if (g(i, j)) acc += mu + gv[j];
      out[i] = a * acc / n - b * gv[i];
    }
  };

  expected_counts out;
  out.grid = grid;
  out.n = n;
  out.values.resize(static_cast<std::size_t>(n) * grid.size());

  std::vector<double> m(n, 0.0), gv(n, 0.0);
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  double t = 0.0;
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    double target = grid[idx];
    double span = target - t;
    if (span > 0.0) {
      int steps = std::max(1, static_cast<int>(std::ceil(span / step)));
      double h = span / steps;
      for (int s = 0; s < steps; ++s) {
        deriv_g(gv, k1);
        for (int i = 0; i < n; ++i) tmp[i] = gv[i] + 0.5 * h * k1[i];
        deriv_g(tmp, k2);
        for (int i = 0; i < n; ++i) tmp[i] = gv[i] + 0.5 * h * k2[i];
        deriv_g(tmp, k3);
        for (int i = 0; i < n; ++i) tmp[i] = gv[i] + h * k3[i];
        deriv_g(tmp, k4);
        // m' = mu + g: Simpson over the same internal stages
        for (int i = 0; i < n; ++i) {
          double g1 = gv[i];
          double g2 = gv[i] + 0.5 * h * k1[i];
          double g3 = gv[i] + 0.5 * h * k2[i];
          double g4 = gv[i] + h * k3[i];
          m[i] += h * (mu + (g1 + 2.0 * g2 + 2.0 * g3 + g4) / 6.0);
          gv[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
      }
      t = target;
    }
    for (int i = 0; i < n; ++i) out.values[i * grid.size() + idx] = m[i];
  }
  return out;
}

}  // namespace hawkes
