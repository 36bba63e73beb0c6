#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "errors.hpp"

namespace hawkes {

// phi(t) = a * exp(-b t), a > 0, b > 0
struct exp_kernel {
  double a = 1.0;
  double b = 1.0;
};

// phi sampled at increasing nodes starting at 0, linear in between, zero
// beyond the last node. Values must be nonnegative.
struct tabulated_kernel {
  std::vector<double> t;
  std::vector<double> phi;
};

using kernel = std::variant<exp_kernel, tabulated_kernel>;

inline void validate(const exp_kernel& k) {
  if (!(k.a > 0.0) || !(k.b > 0.0))
    throw domain_error("exponential kernel requires a > 0 and b > 0");
}

inline void validate(const tabulated_kernel& k) {
  if (k.t.size() != k.phi.size() || k.t.size() < 2)
    throw domain_error("tabulated kernel needs matching grids with at least 2 nodes");
  if (k.t.front() != 0.0)
    throw domain_error("tabulated kernel grid must start at 0");
  for (std::size_t i = 1; i < k.t.size(); ++i)
    if (!(k.t[i] > k.t[i - 1]))
      throw domain_error("tabulated kernel grid must be strictly increasing");
  for (double v : k.phi)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw domain_error("tabulated kernel values must be finite and nonnegative");
}

inline void validate(const kernel& k) {
  std::visit([](const auto& kk) { validate(kk); }, k);
}

namespace detail {

// linear interpolation on the kernel grid; zero outside [0, t.back()]
inline double interp(const std::vector<double>& t, const std::vector<double>& y, double x) {
  if (x < t.front() || x > t.back()) return 0.0;
  auto it = std::upper_bound(t.begin(), t.end(), x);
  if (it == t.begin()) return y.front();
  if (it == t.end()) return y.back();
  std::size_t hi = static_cast<std::size_t>(it - t.begin());
  std::size_t lo = hi - 1;
  double w = (x - t[lo]) / (t[hi] - t[lo]);
  return y[lo] + w * (y[hi] - y[lo]);
}

inline double trapezoid(const std::vector<double>& t, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) s += 0.5 * (y[i] + y[i - 1]) * (t[i] - t[i - 1]);
  return s;
}

// One trapezoidal convolution step on the kernel grid:
// (f * phi)(t_i) = integral over [0, t_i] of f(t_i - s) phi(s) ds.
inline std::vector<double> conv_once(const std::vector<double>& grid,
                                     const std::vector<double>& f,
                                     const std::vector<double>& phi) {
  const std::size_t m = grid.size();
  std::vector<double> out(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const double ti = grid[i];
    double acc = 0.0;
    double prev_s = grid[0];
    double prev_h = interp(grid, f, ti - prev_s) * phi[0];
    for (std::size_t j = 1; j <= i; ++j) {
      double s = grid[j];
      double h = interp(grid, f, ti - s) * phi[j];
      acc += 0.5 * (h + prev_h) * (s - prev_s);
      prev_s = s;
      prev_h = h;
    }
    out[i] = acc;
  }
  return out;
}

// phi^{*n} sampled on the kernel's own grid, by iterated trapezoidal
// convolution. Support beyond the grid is truncated (documented limitation of
// the tabulated variant).
inline std::vector<double> conv_table(const tabulated_kernel& k, int n) {
  std::vector<double> cur = k.phi;
  for (int step = 1; step < n; ++step) cur = conv_once(k.t, cur, k.phi);
  return cur;
}

}  // namespace detail

// Lambda = integral of phi
inline double total_mass(const kernel& k) {
  validate(k);
  if (const auto* e = std::get_if<exp_kernel>(&k)) return e->a / e->b;
  const auto& tk = std::get<tabulated_kernel>(k);
  return detail::trapezoid(tk.t, tk.phi);
}

// kappa = Lambda^{-1} * integral of s phi(s)
inline double mean_delay(const kernel& k) {
  validate(k);
  if (const auto* e = std::get_if<exp_kernel>(&k)) return 1.0 / e->b;
  const auto& tk = std::get<tabulated_kernel>(k);
  std::vector<double> sy(tk.t.size());
  for (std::size_t i = 0; i < tk.t.size(); ++i) sy[i] = tk.t[i] * tk.phi[i];
  double first_moment = detail::trapezoid(tk.t, sy);
  // Convergence diagnostic: the last decile of the grid span must not carry
  // a visible share of the first moment.
  double span = tk.t.back() - tk.t.front();
  double cut = tk.t.back() - 0.1 * span;
  double tail = 0.0;
  for (std::size_t i = 1; i < tk.t.size(); ++i) {
    if (tk.t[i] <= cut) continue;
    double lo = std::max(cut, tk.t[i - 1]);
    double w = (tk.t[i] - lo) / (tk.t[i] - tk.t[i - 1]);
    tail += 0.5 * (sy[i] + sy[i - 1]) * (tk.t[i] - tk.t[i - 1]) * w;
  }
  if (first_moment <= 0.0)
    throw domain_error("mean_delay: zero first moment");
  if (tail > 0.01 * first_moment)
    throw domain_error("mean_delay: first-moment integral has not converged on the grid");
  return first_moment / total_mass(k);
}

// alpha0 > 0 solving p * integral e^{-alpha0 t} phi(t) dt = 1; needs p*Lambda > 1
inline double growth_exponent(const kernel& k, double p) {
  validate(k);
  const double lam = total_mass(k);
  if (!(p * lam > 1.0))
    throw domain_error("growth_exponent: subcritical input (p*Lambda <= 1)");
  if (const auto* e = std::get_if<exp_kernel>(&k)) return p * e->a - e->b;

  const auto& tk = std::get<tabulated_kernel>(k);
  auto laplace_gap = [&](double alpha) {
    std::vector<double> y(tk.t.size());
    for (std::size_t i = 0; i < tk.t.size(); ++i)
      y[i] = std::exp(-alpha * tk.t[i]) * tk.phi[i];
    return p * detail::trapezoid(tk.t, y) - 1.0;
  };
  // laplace_gap(0) = p*Lambda - 1 > 0 and the transform is strictly
  // decreasing, so double until the sign flips, then bisect.
  double lo = 0.0;
  double hi = std::max(1e-6, p * tk.phi.front());
  int guard = 0;
  while (laplace_gap(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (++guard > 200) throw convergence_error("growth_exponent: no bracket found");
  }
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    double g = laplace_gap(mid);
    if (std::abs(g) < 1e-13) return mid;
    (g > 0.0 ? lo : hi) = mid;
    if (hi - lo < 1e-15 * std::max(1.0, hi)) break;
  }
  return 0.5 * (lo + hi);
}

// phi^{*n}(t) pointwise, n >= 1
inline double convolution_power(const kernel& k, int n, double t) {
  validate(k);
  if (n < 1)
    throw domain_error("convolution_power: n = 0 is the Dirac convention, not a pointwise value");
  if (t < 0.0) throw domain_error("convolution_power: t must be nonnegative");
  if (const auto* e = std::get_if<exp_kernel>(&k)) {
    if (t == 0.0) return n == 1 ? e->a : 0.0;
    // a^n t^{n-1} e^{-bt} / (n-1)!
    return std::exp(n * std::log(e->a) + (n - 1) * std::log(t) - e->b * t -
                    std::lgamma(static_cast<double>(n)));
  }
  const auto& tk = std::get<tabulated_kernel>(k);
  auto table = detail::conv_table(tk, n);
  return detail::interp(tk.t, table, t);
}

// sum_{n >= 1} rho^n phi^{*n}(t)
inline double weighted_series(const kernel& k, double rho, double t) {
  validate(k);
  if (rho < 0.0) throw domain_error("weighted_series: rho must be nonnegative");
  if (t < 0.0) throw domain_error("weighted_series: t must be nonnegative");
  if (rho == 0.0) return 0.0;
  if (const auto* e = std::get_if<exp_kernel>(&k))
    return rho * e->a * std::exp(-(e->b - rho * e->a) * t);

  const auto& tk = std::get<tabulated_kernel>(k);
  double sum = 0.0;
  double weight = 1.0;
  std::vector<double> table = tk.phi;
  for (int n = 1; n <= 400; ++n) {
    weight *= rho;
    if (n > 1) table = detail::conv_once(tk.t, table, tk.phi);
    double term = weight * detail::interp(tk.t, table, t);
    sum += term;
    if (n >= 2 && term <= 1e-14 * sum) return sum;
  }
  if (sum == 0.0) return 0.0;
  throw convergence_error("weighted_series: truncation did not converge within 400 terms");
}

// Lambda, kappa and (when p*Lambda > 1) alpha0, bundled for reporting.
struct kernel_moments {
  double total_mass = 0.0;
  double mean_delay = 0.0;
  std::optional<double> growth_exponent;
  double p_used = 0.0;
};

inline kernel_moments compute_moments(const kernel& k, std::optional<double> p = std::nullopt) {
  kernel_moments m;
  m.total_mass = total_mass(k);
  m.mean_delay = mean_delay(k);
  if (p && *p * m.total_mass > 1.0) {
    m.growth_exponent = growth_exponent(k, *p);
    m.p_used = *p;
  }
  return m;
}

}  // namespace hawkes
