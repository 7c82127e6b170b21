// Copyright 2026 The sirstat Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "sirstat/error.hpp"

namespace sirstat {

struct RootResult {
  double x = 0.0;
  int iterations = 0;
};

/// Safeguarded Newton on a sign-changing bracket: a Newton step is taken when
/// it stays inside the current bracket, otherwise the bracket is bisected.
/// `f(lo)` and `f(hi)` must have opposite signs.
template <typename F, typename DF>
RootResult find_root(F&& f, DF&& df, double lo, double hi, double x_tol, int max_iter = 200) {
  double f_lo = f(lo);
  double f_hi = f(hi);
  if (f_lo == 0.0) return {lo, 0};
  if (f_hi == 0.0) return {hi, 0};
  if (std::isnan(f_lo) || std::isnan(f_hi) || std::signbit(f_lo) == std::signbit(f_hi)) {
    fail(ErrorKind::root_not_found, "bracket does not change sign");
  }
  double x = 0.5 * (lo + hi);
  for (int it = 1; it <= max_iter; ++it) {
    const double fx = f(x);
    if (fx == 0.0) return {x, it};
    if (std::signbit(fx) == std::signbit(f_lo)) {
      lo = x;
      f_lo = fx;
    } else {
      hi = x;
    }
    const double d = df(x);
    double next = (d != 0.0 && std::isfinite(d)) ? x - fx / d : std::numeric_limits<double>::quiet_NaN();
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - x);
    x = next;
    if (step <= x_tol || hi - lo <= x_tol) return {x, it};
  }
  return {x, max_iter};
}

/// Plain bisection; returns the midpoint of the final bracket.
template <typename F>
RootResult bisect(F&& f, double lo, double hi, double x_tol, int max_iter = 400) {
  const double f_lo = f(lo);
  const double f_hi = f(hi);
  if (f_lo == 0.0) return {lo, 0};
  if (f_hi == 0.0) return {hi, 0};
  if (std::signbit(f_lo) == std::signbit(f_hi)) fail(ErrorKind::root_not_found, "bracket does not change sign");
  const bool lo_negative = f_lo < 0.0;
  int it = 0;
  while (hi - lo > x_tol && it < max_iter) {
    ++it;
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return {mid, it};
    if ((fm < 0.0) == lo_negative) lo = mid;
    else hi = mid;
  }
  return {0.5 * (lo + hi), it};
}

namespace detail {
template <typename DF>
double numeric_derivative(DF&& df, double x) {
  const double h = 1e-7 * std::max(std::abs(x), 1e-300);
  return (df(x + h) - df(x - h)) / (2.0 * h);
}
}  // namespace detail

/// Root of a derivative on a bracket; its own derivative is approximated by a
/// central difference for the Newton polish.
template <typename DF>
RootResult bisect_then_newton(DF&& df, double lo, double hi, double x_tol) {
  return find_root(df, [&](double x) { return detail::numeric_derivative(df, x); }, lo, hi, x_tol);
}

struct MaximumResult {
  double x = 0.0;
  double value = -std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool at_boundary = false;
};

/// Global maximization of a smooth objective on (lo, hi) with lo > 0: the
/// derivative is scanned on a log-spaced grid, every + to - crossing is
/// refined by `find_root`, and the best local maximum wins.
template <typename F, typename DF>
MaximumResult maximize_on_log_grid(F&& f, DF&& df, double lo, double hi, double rel_tol, int points = 4000) {
  require(lo > 0.0 && hi > lo, ErrorKind::invalid_argument, "maximize_on_log_grid needs 0 < lo < hi");
  std::vector<double> grid(static_cast<std::size_t>(points));
  const double log_lo = std::log(lo);
  const double log_hi = std::log(hi);
  for (int i = 0; i < points; ++i) grid[i] = std::exp(log_lo + (log_hi - log_lo) * i / (points - 1));
  grid.front() = lo;
  grid.back() = hi;

  MaximumResult best;
  auto consider = [&](double x, int iters, bool boundary) {
    const double v = f(x);
    if (std::isfinite(v) && v > best.value) best = {x, v, iters, boundary};
  };

  double d_prev = df(grid[0]);
  if (std::isfinite(d_prev) && d_prev < 0.0) consider(grid[0], 0, true);
  for (int i = 1; i < points; ++i) {
    const double d = df(grid[i]);
    if (std::isfinite(d_prev) && std::isfinite(d) && d_prev > 0.0 && d <= 0.0) {
      const double tol = rel_tol * grid[i];
      const RootResult r = d == 0.0 ? RootResult{grid[i], 0}
                                    : bisect_then_newton(df, grid[i - 1], grid[i], tol);
      consider(r.x, r.iterations, false);
    }
    d_prev = d;
  }
  if (std::isfinite(d_prev) && d_prev > 0.0) consider(grid.back(), 0, true);
  if (!std::isfinite(best.value)) fail(ErrorKind::root_not_found, "objective has no finite maximum on the bracket");
  return best;
}

// ---------------------------------------------------------------------------
// Sample statistics.

inline double mean(std::span<const double> xs) {
  if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

/// Unbiased sample variance (two-pass).
inline double variance(std::span<const double> xs) {
  if (xs.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return ss / static_cast<double>(xs.size() - 1);
}

/// Quantile by linear interpolation between order statistics.
inline double quantile(std::span<const double> xs, double q) {
  if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

inline double median(std::span<const double> xs) { return quantile(xs, 0.5); }

inline double correlation(std::span<const double> xs, std::span<const double> ys) {
  require(xs.size() == ys.size(), ErrorKind::invalid_argument, "correlation needs equal lengths");
  if (xs.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double mx = mean(xs);
  const double my = mean(ys);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

/// Moment skewness g1 = m3 / m2^(3/2).
inline double skewness(std::span<const double> xs) {
  if (xs.size() < 3) return std::numeric_limits<double>::quiet_NaN();
  const double m = mean(xs);
  double m2 = 0.0, m3 = 0.0;
  for (double x : xs) {
    const double d = x - m;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= static_cast<double>(xs.size());
  m3 /= static_cast<double>(xs.size());
  if (m2 == 0.0) return 0.0;
  return m3 / std::pow(m2, 1.5);
}

/// Kolmogorov-Smirnov distance between a sample and a continuous CDF.
template <class Cdf>
double ks_statistic(std::span<const double> xs, Cdf&& cdf) {
  require(!xs.empty(), ErrorKind::invalid_argument, "ks_statistic needs a nonempty sample");
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

/// Asymptotic P[D_n > d] from the Kolmogorov series, with Stephens'
/// small-sample correction of the argument.
inline double ks_pvalue(double d, std::size_t n) {
  const double rn = std::sqrt(static_cast<double>(n));
  const double x = (rn + 0.12 + 0.11 / rn) * d;
  if (x < 0.2) return 1.0;
  double p = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    p += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace sirstat
