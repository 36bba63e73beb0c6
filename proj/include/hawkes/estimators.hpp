#pragma once

// Statistics computed from observed counts: the subcritical triple (E, V, W)
// on its window schedule, the supercritical pair (U, P), the regime detector,
// and the combined estimator that dispatches between them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "hawkes/errors.hpp"
#include "hawkes/inversion.hpp"
#include "hawkes/simulator.hpp"

namespace hawkes {

namespace detail {

// index of time x in the grid, tolerating float noise from grid construction
inline std::size_t grid_index(const counts_grid& counts, double x) {
  double tol = 1e-9 * std::max(1.0, std::abs(x));
  auto it = std::lower_bound(counts.grid.begin(), counts.grid.end(), x - tol);
  if (it == counts.grid.end() || std::abs(*it - x) > tol)
    throw domain_error("count grid is missing time " + std::to_string(x));
  return static_cast<std::size_t>(it - counts.grid.begin());
}

// mean count over the first k individuals at grid slot idx
inline double k_mean(const counts_grid& counts, int k, std::size_t idx) {
  double s = 0.0;
  for (int i = 0; i < k; ++i) s += static_cast<double>(counts.at(i, idx));
  return s / k;
}

inline void require_k(const counts_grid& counts, int k) {
  if (!(k >= 1 && k <= counts.n)) throw domain_error("observed count must lie in [1, n]");
}

}  // namespace detail

// E = (mean_K Z(2t) - mean_K Z(t)) / t
inline double estimator_E(const counts_grid& counts, double t, int k) {
  detail::require_k(counts, k);
  if (!(t > 0.0)) throw domain_error("anchor time must be positive");
  double zt = detail::k_mean(counts, k, detail::grid_index(counts, t));
  double z2t = detail::k_mean(counts, k, detail::grid_index(counts, 2.0 * t));
  return (z2t - zt) / t;
}

// V = (N/K) sum_{i<=K} (rate_i - E)^2 - (N/t) E, where rate_i is the per-
// individual increment rate over (t, 2t]; may be negative.
inline double estimator_V(const counts_grid& counts, double t, int k) {
  detail::require_k(counts, k);
  if (!(t > 0.0)) throw domain_error("anchor time must be positive");
  std::size_t it = detail::grid_index(counts, t);
  std::size_t i2t = detail::grid_index(counts, 2.0 * t);
  double e = estimator_E(counts, t, k);
  double s = 0.0;
  for (int i = 0; i < k; ++i) {
    double rate = static_cast<double>(counts.at(i, i2t) - counts.at(i, it)) / t;
    s += (rate - e) * (rate - e);
  }
  double n = counts.n;
  return n / k * s - n / t * e;
}

struct zw_estimates {
  double z_delta = 0.0;
  double z_2delta = 0.0;
  double w = 0.0;
};

// Z_D = (N/t) sum over D-windows of (mean_K increment - D E)^2 for windows
// covering (t, 2t]; computed for D = delta and D = 2 delta, W = 2 Z_{2D} - Z_D.
inline zw_estimates estimator_ZW(const counts_grid& counts, double t, int k, double delta,
                                 double e_rate) {
  detail::require_k(counts, k);
  if (!(t > 0.0)) throw domain_error("anchor time must be positive");
  if (!(delta > 0.0)) throw domain_error("window must be positive");
  double half = t / (2.0 * delta);
  double m = std::round(half);
  if (!(m >= 1.0) || std::abs(half - m) > 1e-9 * std::max(1.0, half))
    throw domain_error("window does not divide the anchor: t/(2 delta) must be a positive integer");

  double n = counts.n;
  auto z_for = [&](double width) {
    // windows (t + (j-1) width, t + j width] for j = 1 .. t/width
    long long count = static_cast<long long>(std::round(t / width));
    double prev = detail::k_mean(counts, k, detail::grid_index(counts, t));
    double s = 0.0;
    for (long long j = 1; j <= count; ++j) {
      double cur = detail::k_mean(counts, k, detail::grid_index(counts, t + j * width));
      double diff = cur - prev - width * e_rate;
      s += diff * diff;
      prev = cur;
    }
    return n / t * s;
  };

  zw_estimates out;
  out.z_delta = z_for(delta);
  out.z_2delta = z_for(2.0 * delta);
  out.w = 2.0 * out.z_2delta - out.z_delta;
  return out;
}

// Delta_t = t / (2 floor(t^{1 - 4/(q+1)})); guarantees t/(2 Delta) is a
// positive integer.
inline double delta_schedule(double t, int q) {
  if (!(t >= 1.0)) throw domain_error("window schedule needs t >= 1");
  if (!(q > 3)) throw domain_error("window schedule needs moment order q > 3");
  double m = std::floor(std::pow(t, 1.0 - 4.0 / (q + 1.0)));
  if (!(m >= 1.0)) throw domain_error("window schedule degenerate: t too small for this q");
  return t / (2.0 * m);
}

// Time lattice the subcritical statistics need for data on [0, horizon]:
// anchor t = horizon/2, points t + j delta for j = 0 .. t/delta. The last
// point is pinned to the horizon so downstream consumers can rely on it.
inline std::vector<double> estimation_grid(double horizon, int q) {
  double t = horizon / 2.0;
  double delta = delta_schedule(t, q);
  auto count = static_cast<long long>(std::round(t / delta));
  std::vector<double> grid(static_cast<std::size_t>(count) + 1);
  for (long long j = 0; j <= count; ++j) grid[static_cast<std::size_t>(j)] = t + j * delta;
  grid.back() = horizon;
  return grid;
}

struct sub_estimates {
  double t = 0.0;      // anchor: data window is [t, 2t]
  double delta = 0.0;  // schedule window
  int k = 0;
  int n = 0;
  double e = 0.0;
  double v = 0.0;
  double z_delta = 0.0;
  double z_2delta = 0.0;
  double w = 0.0;
};

// All subcritical statistics at anchor t = T/2, where T is the last grid time.
inline sub_estimates sub_statistics(const counts_grid& counts, int k, int q) {
  detail::require_k(counts, k);
  if (counts.grid.empty()) throw domain_error("count grid is empty");
  double t = counts.grid.back() / 2.0;
  sub_estimates out;
  out.t = t;
  out.delta = delta_schedule(t, q);
  out.k = k;
  out.n = counts.n;
  out.e = estimator_E(counts, t, k);
  out.v = estimator_V(counts, t, k);
  auto zw = estimator_ZW(counts, t, k, out.delta, out.e);
  out.z_delta = zw.z_delta;
  out.z_2delta = zw.z_2delta;
  out.w = zw.w;
  return out;
}

namespace detail {

// shared inversion step: strict inversion inside D, else the always-evaluable
// connectivity component alone
inline param_estimate invert_triple(double u, double v, double w_signed, double correction) {
  double w_arg = std::abs(w_signed - correction);
  if (w_arg == 0.0)
    throw domain_error("dispersion statistic degenerate: corrected W vanished exactly");
  if (w_arg > u && u > 0.0 && v >= 0.0) return invert_phi(u, v, w_arg);
  param_estimate out;
  out.p_hat = phi3(u, v, w_arg);
  return out;
}

}  // namespace detail

// Composition at anchor T/2: full (mu, Lambda, p) estimates when the moment
// triple lies in the inversion domain, the p component alone otherwise.
inline param_estimate estimate_subcritical(const counts_grid& counts, int k, int q) {
  sub_estimates s = sub_statistics(counts, k, q);
  double correction = (static_cast<double>(s.n) - s.k) / s.k * s.e;
  return detail::invert_triple(s.e, s.v, s.w, correction);
}

struct sup_estimates {
  double u = 0.0;
  double p = 0.0;
  double mean_count = 0.0;
  bool low_count_flag = false;
};

// U = [(N/K) sum_{i<=K} ((Z_i - mean)/mean)^2 - N/mean] when the mean count is
// positive (0 otherwise); P = 1/(U+1) when U >= 0 (0 otherwise).
inline sup_estimates estimator_U_and_P(const counts_grid& counts, double t, int k) {
  detail::require_k(counts, k);
  std::size_t idx = detail::grid_index(counts, t);
  double zbar = detail::k_mean(counts, k, idx);
  sup_estimates out;
  out.mean_count = zbar;
  out.low_count_flag = zbar < 10.0;
  double n = counts.n;
  if (zbar > 0.0) {
    double s = 0.0;
    for (int i = 0; i < k; ++i) {
      double dev = (static_cast<double>(counts.at(i, idx)) - zbar) / zbar;
      s += dev * dev;
    }
    out.u = n / k * s - n / zbar;
  }
  out.p = out.u >= 0.0 ? 1.0 / (out.u + 1.0) : 0.0;
  return out;
}

inline sup_estimates estimator_U_and_P(const counts_grid& counts, int k) {
  if (counts.grid.empty()) throw domain_error("count grid is empty");
  return estimator_U_and_P(counts, counts.grid.back(), k);
}

enum class regime_kind { subcritical, supercritical };

inline const char* regime_name(regime_kind r) {
  return r == regime_kind::supercritical ? "supercritical" : "subcritical";
}

struct regime_decision {
  regime_kind regime = regime_kind::subcritical;
  double log_mean_count = 0.0;
  double threshold = 0.0;  // (log t)^2
};

// Supercritical iff log(mean count) > (log t)^2; ties and zero counts fall to
// subcritical (log 0 treated as -infinity).
inline regime_decision detect_regime(double mean_count, double t) {
  if (!(t > 1.0)) throw domain_error("regime detection needs t > 1");
  if (!(mean_count >= 0.0)) throw domain_error("mean count must be nonnegative");
  regime_decision out;
  double lt = std::log(t);
  out.threshold = lt * lt;
  out.log_mean_count =
      mean_count > 0.0 ? std::log(mean_count) : -std::numeric_limits<double>::infinity();
  out.regime = out.log_mean_count > out.threshold ? regime_kind::supercritical
                                                  : regime_kind::subcritical;
  return out;
}

struct estimate_record {
  double t = 0.0;
  regime_kind regime = regime_kind::subcritical;
  double e = 0.0;
  double v = 0.0;
  double w = 0.0;      // signed, before the absolute-value correction
  double u = 0.0;
  double p_sup = 0.0;
  double mu_hat = 0.0;
  double lambda_hat = 0.0;
  double p_hat = 0.0;
  bool low_count_flag = false;
  bool in_domain = false;
};

// Combined estimator over counts on [0, T] with T the last grid time: detect
// the regime from the full-population mean at T, then fill the corresponding
// branch. The supercritical pair is cheap and diagnostic, so it is always
// reported; the subcritical statistics are computed only when that branch is
// selected (they need the window lattice).
inline estimate_record estimate_p(const counts_grid& counts, int k, int q) {
  detail::require_k(counts, k);
  if (counts.grid.empty()) throw domain_error("count grid is empty");
  double horizon = counts.grid.back();
  estimate_record rec;
  rec.t = horizon;
  regime_decision dec = detect_regime(counts.mean.back(), horizon);
  rec.regime = dec.regime;
  sup_estimates sup = estimator_U_and_P(counts, horizon, k);
  rec.u = sup.u;
  rec.p_sup = sup.p;
  rec.low_count_flag = sup.low_count_flag;
  if (dec.regime == regime_kind::supercritical) {
    rec.p_hat = sup.p;
    return rec;
  }
  sub_estimates s = sub_statistics(counts, k, q);
  rec.e = s.e;
  rec.v = s.v;
  rec.w = s.w;
  double correction = (static_cast<double>(s.n) - s.k) / s.k * s.e;
  param_estimate inv = detail::invert_triple(s.e, s.v, s.w, correction);
  rec.mu_hat = inv.mu_hat;
  rec.lambda_hat = inv.lambda_hat;
  rec.p_hat = inv.p_hat;
  rec.in_domain = inv.in_domain;
  return rec;
}

}  // namespace hawkes
