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

// Estimators of (a, c, R0 = a/c) from aggregate SIR counts.
//
// The log-likelihood separates as L(a, c) = L1(a) + L2(c): the first row of
// the observed transition table only involves a, the second only c. Five
// versions of (L1, L2) are provided:
//
//   binomial-ml          the exact chain-binomial likelihood
//   poisson-aml          Binomial(N, p) ~ Poisson(Np); closed form
//   gaussian-aml         Binomial(N, p) ~ Normal(Np, Np(1-p))
//   unfeasible-gaussian  Gaussian with the variance frozen at the empirical
//                        frequency, i.e. a GLS estimator; closed form
//   poisson-gaussian     Normal(Np, Np); roots of quadratics
//
// With p2 = N2(t-1)/n, p12 = N12(t)/N1(t-1), p23 = N23(t)/N2(t-1).

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sirstat/error.hpp"
#include "sirstat/numerics.hpp"
#include "sirstat/sir.hpp"

namespace sirstat {

/// Per-day entries of the observed transition table (one row of Table-style
/// counts per day t = 1..T).
struct DayCounts {
  std::int64_t t = 0;
  Count n1_prev = 0;
  Count n2_prev = 0;
  Count n12 = 0;
  Count n23 = 0;
  Count n11 = 0;  // stayed susceptible = N1(t)
  Count n22 = 0;  // stayed infected
  double p2_prev = 0.0;
  double p12 = std::numeric_limits<double>::quiet_NaN();  // undefined when N1(t-1) = 0
  double p23 = std::numeric_limits<double>::quiet_NaN();  // undefined when N2(t-1) = 0

  bool no_susceptibles() const { return n1_prev == 0; }
  bool no_infected() const { return n2_prev == 0; }
};

struct SufficientStats {
  Count n = 0;
  std::vector<DayCounts> days;

  std::int64_t T() const { return static_cast<std::int64_t>(days.size()); }

  Count sum_n12() const {
    Count s = 0;
    for (const auto& d : days) s += d.n12;
    return s;
  }
  Count sum_n23() const {
    Count s = 0;
    for (const auto& d : days) s += d.n23;
    return s;
  }
  Count sum_n2_prev() const {
    Count s = 0;
    for (const auto& d : days) s += d.n2_prev;
    return s;
  }
  /// Sum of N1(t-1) N2(t-1), accumulated in double (products overflow int64
  /// for very large populations).
  double sum_n1n2_prev() const {
    double s = 0.0;
    for (const auto& d : days) s += static_cast<double>(d.n1_prev) * static_cast<double>(d.n2_prev);
    return s;
  }
  /// Sum of N1(t-1) p2(t-1), the Poisson exposure for a.
  double exposure_a() const { return sum_n1n2_prev() / static_cast<double>(n); }

  /// Number of days flagged because N1(t-1) = 0 or N2(t-1) = 0.
  std::int64_t flagged_days() const {
    std::int64_t k = 0;
    for (const auto& d : days) k += d.no_susceptibles() || d.no_infected();
    return k;
  }
};

/// Statistics over days [first_day, last_day] of a path (1-based, inclusive).
inline SufficientStats build_stats(const CountPath& path, std::int64_t first_day, std::int64_t last_day) {
  validate_path(path);
  require(first_day >= 1 && last_day <= path.days() && first_day <= last_day + 1, ErrorKind::invalid_argument,
          "day range outside the path");
  SufficientStats s;
  s.n = path.population();
  for (std::int64_t k = first_day; k <= last_day; ++k) {
    const auto& prev = path.states[static_cast<std::size_t>(k - 1)];
    const auto& tr = path.transitions[static_cast<std::size_t>(k - 1)];
    DayCounts d;
    d.t = tr.t;
    d.n1_prev = prev.n1;
    d.n2_prev = prev.n2;
    d.n12 = tr.n12;
    d.n23 = tr.n23;
    d.n11 = prev.n1 - tr.n12;
    d.n22 = prev.n2 - tr.n23;
    d.p2_prev = static_cast<double>(prev.n2) / static_cast<double>(s.n);
    if (prev.n1 > 0) d.p12 = static_cast<double>(tr.n12) / static_cast<double>(prev.n1);
    if (prev.n2 > 0) d.p23 = static_cast<double>(tr.n23) / static_cast<double>(prev.n2);
    s.days.push_back(d);
  }
  return s;
}

inline SufficientStats build_stats(const CountPath& path) { return build_stats(path, 1, path.days()); }

// ---------------------------------------------------------------------------

enum class Method { binomial_ml, poisson_aml, gaussian_aml, unfeasible_gaussian, poisson_gaussian };

inline constexpr Method all_methods[] = {Method::binomial_ml, Method::poisson_aml, Method::gaussian_aml,
                                         Method::unfeasible_gaussian, Method::poisson_gaussian};

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::binomial_ml: return "binomial-ml";
    case Method::poisson_aml: return "poisson-aml";
    case Method::gaussian_aml: return "gaussian-aml";
    case Method::unfeasible_gaussian: return "unfeasible-gaussian";
    case Method::poisson_gaussian: return "poisson-gaussian";
  }
  return "unknown";
}

inline Method parse_method(std::string_view name) {
  for (Method m : all_methods) {
    if (to_string(m) == name) return m;
  }
  fail(ErrorKind::invalid_argument, "unknown estimation method '" + std::string(name) + "'");
}

namespace fit_flag {
inline constexpr unsigned no_infections = 1u << 0;     // sum N12 = 0, a_hat = 0
inline constexpr unsigned r0_infinite = 1u << 1;       // sum N23 = 0 (c_hat = 0)
inline constexpr unsigned days_skipped = 1u << 2;      // some days carry no information
inline constexpr unsigned variance_undefined = 1u << 3;
inline constexpr unsigned boundary = 1u << 4;          // maximum on the edge of the parameter space
inline constexpr unsigned failed = 1u << 5;            // estimation error (rolling fits only)

inline std::string describe(unsigned flags) {
  static constexpr std::pair<unsigned, std::string_view> names[] = {
      {no_infections, "no-infections"}, {r0_infinite, "r0-infinite"}, {days_skipped, "days-skipped"},
      {variance_undefined, "variance-undefined"}, {boundary, "boundary"}, {failed, "failed"}};
  std::string out;
  for (const auto& [bit, name] : names) {
    if (flags & bit) {
      if (!out.empty()) out += '|';
      out += name;
    }
  }
  return out;
}
}  // namespace fit_flag

struct FitResult {
  Method method = Method::binomial_ml;
  std::int64_t T = 0;  // last day used
  double a_hat = std::numeric_limits<double>::quiet_NaN();
  double c_hat = std::numeric_limits<double>::quiet_NaN();
  double r0_hat = std::numeric_limits<double>::quiet_NaN();
  double var_a = std::numeric_limits<double>::quiet_NaN();
  double var_c = std::numeric_limits<double>::quiet_NaN();
  unsigned flags = 0;
  int iterations = 0;
  std::string error;

  bool has(unsigned flag) const { return (flags & flag) != 0; }
  bool r0_infinite() const { return has(fit_flag::r0_infinite); }
};

namespace detail {

inline std::int64_t last_day(const SufficientStats& s) { return s.days.empty() ? 0 : s.days.back().t; }

inline void finish_ratio(FitResult& r) {
  if (r.c_hat == 0.0) {
    r.flags |= fit_flag::r0_infinite;
    r.r0_hat = std::numeric_limits<double>::infinity();
  } else {
    r.r0_hat = r.a_hat / r.c_hat;
  }
}

inline double max_p2(const SufficientStats& s) {
  double m = 0.0;
  for (const auto& d : s.days) {
    if (d.n1_prev > 0) m = std::max(m, d.p2_prev);
  }
  return m;
}

inline void require_recovery_exposure(const SufficientStats& s) {
  if (s.sum_n2_prev() <= 0) fail(ErrorKind::not_estimable, "no infected individuals in the sample: c is not identified");
}

}  // namespace detail

/// Exact maximum likelihood. c_hat = sum N23 / sum N2(t-1); a_hat solves
///   sum N12 / a - sum N11 p2 / (1 - a p2) = 0
/// on (0, 1 / max p2), where the score decreases monotonically.
inline FitResult fit_binomial_ml(const SufficientStats& s) {
  detail::require_recovery_exposure(s);
  FitResult r;
  r.method = Method::binomial_ml;
  r.T = detail::last_day(s);
  if (s.flagged_days() > 0) r.flags |= fit_flag::days_skipped;

  r.c_hat = static_cast<double>(s.sum_n23()) / static_cast<double>(s.sum_n2_prev());

  const Count s12 = s.sum_n12();
  if (s12 == 0) {
    r.a_hat = 0.0;
    r.flags |= fit_flag::no_infections;
  } else {
    const double sum12 = static_cast<double>(s12);
    auto score = [&](double a) {
      double g = sum12 / a;
      for (const auto& d : s.days) {
        if (d.n11 > 0 && d.p2_prev > 0.0) g -= static_cast<double>(d.n11) * d.p2_prev / (1.0 - a * d.p2_prev);
      }
      return g;
    };
    auto score_slope = [&](double a) {
      double h = -sum12 / (a * a);
      for (const auto& d : s.days) {
        if (d.n11 > 0 && d.p2_prev > 0.0) {
          const double q = 1.0 - a * d.p2_prev;
          h -= static_cast<double>(d.n11) * d.p2_prev * d.p2_prev / (q * q);
        }
      }
      return h;
    };
    const double hi = 1.0 / detail::max_p2(s);
    const double scale = sum12 / s.exposure_a();
    const RootResult root = find_root(score, score_slope, 0.0, hi, 1e-12 * scale);
    r.a_hat = root.x;
    r.iterations = root.iterations;
  }
  detail::finish_ratio(r);
  return r;
}

/// Plug-in variances from the observed information of the binomial
/// likelihood: 1 / (sum N11 p2^2 / (1 - a p2)^2 + sum N12 / a^2) for a and
/// c(1 - c) / sum N2(t-1) for c.
inline std::pair<double, double> var_binomial_ml(const SufficientStats& s, FitResult& fit) {
  double var_a = std::numeric_limits<double>::quiet_NaN();
  if (fit.a_hat > 0.0) {
    double info = static_cast<double>(s.sum_n12()) / (fit.a_hat * fit.a_hat);
    for (const auto& d : s.days) {
      const double q = 1.0 - fit.a_hat * d.p2_prev;
      info += static_cast<double>(d.n11) * d.p2_prev * d.p2_prev / (q * q);
    }
    var_a = 1.0 / info;
  } else {
    fit.flags |= fit_flag::variance_undefined;
  }
  const double var_c = fit.c_hat * (1.0 - fit.c_hat) / static_cast<double>(s.sum_n2_prev());
  if (var_c == 0.0) fit.flags |= fit_flag::variance_undefined;
  fit.var_a = var_a;
  fit.var_c = var_c;
  return {var_a, var_c};
}

/// Closed-form Poisson AML:
///   a_P = n sum N12 / sum N1(t-1) N2(t-1),  c_P = sum N23 / sum N2(t-1).
/// Variances are sandwich estimates (score outer product over squared
/// Hessian) since the Poisson likelihood is misspecified for binomial data.
inline FitResult fit_poisson_aml(const SufficientStats& s) {
  const double exposure = s.sum_n1n2_prev();
  if (!(exposure > 0.0)) fail(ErrorKind::not_estimable, "sum N1(t-1) N2(t-1) is zero: a is not identified");
  detail::require_recovery_exposure(s);
  FitResult r;
  r.method = Method::poisson_aml;
  r.T = detail::last_day(s);
  if (s.flagged_days() > 0) r.flags |= fit_flag::days_skipped;

  const Count s12 = s.sum_n12();
  const Count s23 = s.sum_n23();
  r.a_hat = static_cast<double>(s.n) * static_cast<double>(s12) / exposure;
  r.c_hat = static_cast<double>(s23) / static_cast<double>(s.sum_n2_prev());
  if (s12 == 0) r.flags |= fit_flag::no_infections;
  detail::finish_ratio(r);

  if (r.a_hat > 0.0) {
    double outer = 0.0;
    for (const auto& d : s.days) {
      const double score = static_cast<double>(d.n12) / r.a_hat - static_cast<double>(d.n1_prev) * d.p2_prev;
      outer += score * score;
    }
    const double hessian = static_cast<double>(s12) / (r.a_hat * r.a_hat);
    r.var_a = outer / (hessian * hessian);
  }
  if (r.c_hat > 0.0) {
    double outer = 0.0;
    for (const auto& d : s.days) {
      const double score = static_cast<double>(d.n23) / r.c_hat - static_cast<double>(d.n2_prev);
      outer += score * score;
    }
    const double hessian = static_cast<double>(s23) / (r.c_hat * r.c_hat);
    r.var_c = outer / (hessian * hessian);
  }
  if (!(r.a_hat > 0.0) || !(r.c_hat > 0.0)) r.flags |= fit_flag::variance_undefined;
  return r;
}

namespace detail {

/// One Gaussian term with mean m = theta * scale and variance m(1 - m) / size:
///   -1/2 log(m(1 - m)) - 1/2 size (phat - m)^2 / (m(1 - m)).
struct GaussianTerm {
  double size;   // N1(t-1) or N2(t-1)
  double phat;   // p12 or p23
  double scale;  // p2(t-1) or 1

  double value(double theta) const {
    const double m = theta * scale;
    const double v = m * (1.0 - m);
    const double e = phat - m;
    return -0.5 * std::log(v) - 0.5 * size * e * e / v;
  }
  double derivative(double theta) const {
    const double m = theta * scale;
    const double v = m * (1.0 - m);
    const double e = phat - m;
    const double dv = 1.0 - 2.0 * m;
    return scale * (-0.5 * dv / v + size * e / v + 0.5 * size * e * e * dv / (v * v));
  }
};

inline MaximumResult maximize_gaussian(const std::vector<GaussianTerm>& terms, double hi) {
  auto f = [&](double x) {
    double v = 0.0;
    for (const auto& t : terms) v += t.value(x);
    return v;
  };
  auto df = [&](double x) {
    double v = 0.0;
    for (const auto& t : terms) v += t.derivative(x);
    return v;
  };
  return maximize_on_log_grid(f, df, hi * 1e-12, hi * (1.0 - 1e-12), 1e-10);
}

}  // namespace detail

/// Gaussian AML, maximized numerically (separately in a and c).
/// Only days with N1(t-1) > 0 and N2(t-1) > 0 carry observations for a, and
/// only days with N2(t-1) > 0 for c.
inline FitResult fit_gaussian_aml(const SufficientStats& s) {
  detail::require_recovery_exposure(s);
  FitResult r;
  r.method = Method::gaussian_aml;
  r.T = detail::last_day(s);
  if (s.flagged_days() > 0) r.flags |= fit_flag::days_skipped;

  std::vector<detail::GaussianTerm> a_terms, c_terms;
  for (const auto& d : s.days) {
    if (d.n1_prev > 0 && d.n2_prev > 0) a_terms.push_back({static_cast<double>(d.n1_prev), d.p12, d.p2_prev});
    if (d.n2_prev > 0) c_terms.push_back({static_cast<double>(d.n2_prev), d.p23, 1.0});
  }
  if (a_terms.empty()) fail(ErrorKind::not_estimable, "no day with both susceptibles and infected");

  if (s.sum_n12() == 0) {
    r.a_hat = 0.0;
    r.flags |= fit_flag::no_infections | fit_flag::boundary;
  } else {
    const auto best = detail::maximize_gaussian(a_terms, 1.0 / detail::max_p2(s));
    r.a_hat = best.x;
    r.iterations += best.iterations;
    if (best.at_boundary) r.flags |= fit_flag::boundary;
  }
  if (s.sum_n23() == 0) {
    r.c_hat = 0.0;
    r.flags |= fit_flag::boundary;
  } else {
    const auto best = detail::maximize_gaussian(c_terms, 1.0);
    r.c_hat = best.x;
    r.iterations += best.iterations;
    if (best.at_boundary) r.flags |= fit_flag::boundary;
  }
  detail::finish_ratio(r);
  return r;
}

/// Unfeasible Gaussian (GLS) estimator, variances frozen at p(1 - p):
///   a_UG = sum N1 p2 / (1 - p12) / sum N1 p2^2 / (p12 (1 - p12)),
///   c_UG = sum N2 / (1 - p23) / sum N2 / (p23 (1 - p23)),
/// over the days where the frozen variance is positive (others are dropped).
inline FitResult fit_unfeasible_gaussian(const SufficientStats& s) {
  FitResult r;
  r.method = Method::unfeasible_gaussian;
  r.T = detail::last_day(s);

  double num_a = 0.0, den_a = 0.0, num_c = 0.0, den_c = 0.0;
  std::int64_t used_a = 0, used_c = 0;
  for (const auto& d : s.days) {
    if (d.n1_prev > 0 && d.p2_prev > 0.0 && d.p12 > 0.0 && d.p12 < 1.0) {
      const double w = static_cast<double>(d.n1_prev) / (d.p12 * (1.0 - d.p12));
      num_a += w * d.p12 * d.p2_prev;
      den_a += w * d.p2_prev * d.p2_prev;
      ++used_a;
    }
    if (d.n2_prev > 0 && d.p23 > 0.0 && d.p23 < 1.0) {
      const double w = static_cast<double>(d.n2_prev) / (d.p23 * (1.0 - d.p23));
      num_c += w * d.p23;
      den_c += w;
      ++used_c;
    }
  }
  if (used_a == 0) fail(ErrorKind::not_estimable, "no day with 0 < p12 < 1: a_UG is not estimable");
  if (used_c == 0) fail(ErrorKind::not_estimable, "no day with 0 < p23 < 1: c_UG is not estimable");
  if (used_a < s.T() || used_c < s.T()) r.flags |= fit_flag::days_skipped;
  r.a_hat = num_a / den_a;
  r.c_hat = num_c / den_c;
  detail::finish_ratio(r);
  return r;
}

/// Positive root of A x^2 + T x - B = 0, written to avoid cancellation.
inline double positive_quadratic_root(double A, double T, double B) {
  if (B == 0.0) return 0.0;
  const double disc = T * T + 4.0 * A * B;
  if (!(A > 0.0) || !(B > 0.0) || !(disc >= 0.0)) fail(ErrorKind::root_not_found, "quadratic has no positive root");
  return 2.0 * B / (T + std::sqrt(disc));
}

/// Poisson/Gaussian AML, variance Np. Setting the derivative of
///   -1/2 sum log(a p2) - 1/2 sum N1 (p12 - a p2)^2 / (a p2)
/// to zero gives (sum N1 p2) a^2 + T a - sum N1 p12^2 / p2 = 0, and likewise
/// (sum N2) c^2 + T c - sum N2 p23^2 = 0 for c.
inline FitResult fit_poisson_gaussian(const SufficientStats& s) {
  detail::require_recovery_exposure(s);
  FitResult r;
  r.method = Method::poisson_gaussian;
  r.T = detail::last_day(s);
  if (s.flagged_days() > 0) r.flags |= fit_flag::days_skipped;

  double A = 0.0, B = 0.0, C = 0.0, D = 0.0;
  double days_a = 0.0, days_c = 0.0;
  for (const auto& d : s.days) {
    if (d.n1_prev > 0 && d.n2_prev > 0) {
      A += static_cast<double>(d.n1_prev) * d.p2_prev;
      B += static_cast<double>(d.n1_prev) * d.p12 * d.p12 / d.p2_prev;
      days_a += 1.0;
    }
    if (d.n2_prev > 0) {
      C += static_cast<double>(d.n2_prev);
      D += static_cast<double>(d.n2_prev) * d.p23 * d.p23;
      days_c += 1.0;
    }
  }
  if (days_a == 0.0) fail(ErrorKind::not_estimable, "no day with both susceptibles and infected");
  r.a_hat = positive_quadratic_root(A, days_a, B);
  r.c_hat = positive_quadratic_root(C, days_c, D);
  if (r.a_hat == 0.0) r.flags |= fit_flag::no_infections;
  detail::finish_ratio(r);
  return r;
}

inline FitResult fit(const SufficientStats& s, Method method) {
  switch (method) {
    case Method::binomial_ml: {
      FitResult r = fit_binomial_ml(s);
      var_binomial_ml(s, r);
      return r;
    }
    case Method::poisson_aml: return fit_poisson_aml(s);
    case Method::gaussian_aml: return fit_gaussian_aml(s);
    case Method::unfeasible_gaussian: return fit_unfeasible_gaussian(s);
    case Method::poisson_gaussian: return fit_poisson_gaussian(s);
  }
  fail(ErrorKind::invalid_argument, "unknown method");
}

/// Like fit(), but estimation errors become a FitResult flagged `failed`.
inline FitResult try_fit(const SufficientStats& s, Method method) {
  try {
    return fit(s, method);
  } catch (const Error& e) {
    FitResult r;
    r.method = method;
    r.T = detail::last_day(s);
    r.flags = fit_flag::failed;
    r.error = e.what();
    return r;
  }
}

struct PoissonT1Moments {
  double mean_a, var_a, mean_c, var_c;
};

/// Exact moments of (a_P, c_P) at T = 1 when N12(1) and N23(1) are Poisson
/// given the initial counts.
inline PoissonT1Moments poisson_t1_moments(const ModelParams& params, Count n1_0, Count n2_0) {
  require(n1_0 > 0 && n2_0 > 0, ErrorKind::invalid_argument, "T=1 moments need N1(0) > 0 and N2(0) > 0");
  const double n = static_cast<double>(params.n);
  return {params.a, params.a * n / (static_cast<double>(n1_0) * static_cast<double>(n2_0)), params.c,
          params.c / static_cast<double>(n2_0)};
}

/// Expanding windows use every day from the outbreak; fixed windows the last
/// `window` days.
struct RollingMode {
  std::int64_t window = 0;  // 0 means expanding

  static RollingMode expanding() { return {0}; }
  static RollingMode fixed(std::int64_t w) {
    require(w >= 1, ErrorKind::invalid_argument, "rolling window must be >= 1");
    return {w};
  }
};

/// One fit per end day t = 1..T. Days on which the estimator fails are
/// returned with the `failed` flag rather than aborting the series.
inline std::vector<FitResult> rolling_fit(const CountPath& path, Method method, RollingMode mode) {
  validate_path(path);
  std::vector<FitResult> out;
  out.reserve(static_cast<std::size_t>(path.days()));
  for (std::int64_t t = 1; t <= path.days(); ++t) {
    const std::int64_t first = mode.window == 0 ? 1 : std::max<std::int64_t>(1, t - mode.window + 1);
    out.push_back(try_fit(build_stats(path, first, t), method));
  }
  return out;
}

}  // namespace sirstat
