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

// CSV writers and readers for every file format the toolkit emits.
//
// Fields never contain commas or quotes (flag sets are '|'-joined), so the
// dialect is plain comma splitting. Doubles use the shortest decimal that
// round-trips; infinities print as inf / -inf and NaN as nan. Empty cells
// read back as NaN.

#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "sirstat/bayes.hpp"
#include "sirstat/epiestim.hpp"
#include "sirstat/error.hpp"
#include "sirstat/estimators.hpp"
#include "sirstat/mechanistic.hpp"
#include "sirstat/montecarlo.hpp"
#include "sirstat/reproduction.hpp"
#include "sirstat/sir.hpp"

namespace sirstat::csv {

// ---------------------------------------------------------------------------
// Cells.

inline std::string format(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string format(std::int64_t v) { return std::to_string(v); }

inline double parse_double(std::string_view s) {
  if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    fail(ErrorKind::io, "not a number: '" + std::string(s) + "'");
  }
  return v;
}

inline std::int64_t parse_int(std::string_view s) {
  std::int64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    fail(ErrorKind::io, "not an integer: '" + std::string(s) + "'");
  }
  return v;
}

/// Inverse of a flag describer: looks each '|'-separated name up among the
/// single-bit descriptions.
template <class Describe>
unsigned parse_flags(std::string_view s, Describe&& describe) {
  unsigned flags = 0;
  while (!s.empty()) {
    const auto bar = s.find('|');
    const auto name = s.substr(0, bar);
    if (name.empty()) fail(ErrorKind::io, "empty flag name");
    bool found = false;
    for (unsigned bit = 0; bit < 32 && !found; ++bit) {
      if (describe(1u << bit) == name) {
        flags |= 1u << bit;
        found = true;
      }
    }
    if (!found) fail(ErrorKind::io, "unknown flag '" + std::string(name) + "'");
    s = bar == std::string_view::npos ? std::string_view{} : s.substr(bar + 1);
  }
  return flags;
}

// ---------------------------------------------------------------------------
// Tables.

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const {
    for (std::size_t k = 0; k < header.size(); ++k) {
      if (header[k] == name) return k;
    }
    fail(ErrorKind::io, "missing column '" + std::string(name) + "'");
  }
};

inline void write(std::ostream& out, const Table& t) {
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k) out << ',';
      out << cells[k];
    }
    out << '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
  if (!out) fail(ErrorKind::io, "CSV write failed");
}

inline std::string to_string(const Table& t) {
  std::ostringstream s;
  write(s, t);
  return s.str();
}

inline std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  for (;;) {
    const auto comma = line.find(',');
    out.emplace_back(line.substr(0, comma));
    if (comma == std::string_view::npos) return out;
    line.remove_prefix(comma + 1);
  }
}

inline Table read(std::istream& in) {
  Table t;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split(line);
    if (first) {
      t.header = std::move(cells);
      first = false;
      continue;
    }
    if (cells.size() != t.header.size()) {
      fail(ErrorKind::io, "row " + std::to_string(t.rows.size() + 1) + " has " + std::to_string(cells.size()) +
                              " cells, header has " + std::to_string(t.header.size()));
    }
    t.rows.push_back(std::move(cells));
  }
  if (first) fail(ErrorKind::io, "empty CSV input");
  return t;
}

inline Table parse(std::string_view text) {
  std::istringstream s{std::string(text)};
  return read(s);
}

inline void expect_header(const Table& t, const std::vector<std::string>& header) {
  if (t.header != header) {
    std::string want;
    for (const auto& h : header) want += (want.empty() ? "" : ",") + h;
    fail(ErrorKind::io, "unexpected CSV header, expected " + want);
  }
}

// ---------------------------------------------------------------------------
// CountPath: t,N1,N2,N3,N12,N23 (transition cells empty on day 0).

inline const std::vector<std::string> path_header{"t", "N1", "N2", "N3", "N12", "N23"};

inline void append_path_rows(Table& t, const CountPath& path, const std::string* prefix = nullptr) {
  for (std::size_t k = 0; k < path.states.size(); ++k) {
    const auto& s = path.states[k];
    std::vector<std::string> row;
    if (prefix) row.push_back(*prefix);
    row.insert(row.end(), {format(s.t), format(s.n1), format(s.n2), format(s.n3)});
    if (k == 0) {
      row.insert(row.end(), {"", ""});
    } else {
      row.insert(row.end(), {format(path.transitions[k - 1].n12), format(path.transitions[k - 1].n23)});
    }
    t.rows.push_back(std::move(row));
  }
}

inline Table path_table(const CountPath& path) {
  Table t{path_header, {}};
  append_path_rows(t, path);
  return t;
}

inline CountPath path_from_rows(const Table& t, std::size_t first_col, const std::vector<std::size_t>& rows) {
  CountPath path;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = t.rows[rows[i]];
    path.states.push_back({parse_int(r[first_col]), parse_int(r[first_col + 1]), parse_int(r[first_col + 2]),
                           parse_int(r[first_col + 3])});
    if (i > 0) path.transitions.push_back({path.states.back().t, parse_int(r[first_col + 4]), parse_int(r[first_col + 5])});
  }
  if (path.states.empty()) fail(ErrorKind::io, "count path has no rows");
  validate_path(path);
  return path;
}

inline CountPath path_from_table(const Table& t) {
  expect_header(t, path_header);
  std::vector<std::size_t> rows(t.rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) rows[k] = k;
  return path_from_rows(t, 0, rows);
}

// Two-group paths: group,t,N1,N2,N3,N12,N23 with group in {1, 2}.

inline Table group_paths_table(const std::array<CountPath, 2>& groups) {
  Table t{{"group"}, {}};
  t.header.insert(t.header.end(), path_header.begin(), path_header.end());
  for (int g = 0; g < 2; ++g) {
    const std::string label = std::to_string(g + 1);
    append_path_rows(t, groups[g], &label);
  }
  return t;
}

inline std::array<CountPath, 2> group_paths_from_table(const Table& t) {
  std::vector<std::string> header{"group"};
  header.insert(header.end(), path_header.begin(), path_header.end());
  expect_header(t, header);
  std::array<std::vector<std::size_t>, 2> rows;
  for (std::size_t k = 0; k < t.rows.size(); ++k) {
    const auto g = parse_int(t.rows[k][0]);
    if (g != 1 && g != 2) fail(ErrorKind::io, "group must be 1 or 2");
    rows[static_cast<std::size_t>(g - 1)].push_back(k);
  }
  return {path_from_rows(t, 1, rows[0]), path_from_rows(t, 1, rows[1])};
}

// ---------------------------------------------------------------------------
// Fits: method,T,a_hat,c_hat,r0_hat,var_a,var_c,flags.

inline Table fits_table(const std::vector<FitResult>& fits) {
  Table t{{"method", "T", "a_hat", "c_hat", "r0_hat", "var_a", "var_c", "flags"}, {}};
  for (const auto& f : fits) {
    t.rows.push_back({std::string(to_string(f.method)), format(f.T), format(f.a_hat), format(f.c_hat), format(f.r0_hat),
                      format(f.var_a), format(f.var_c), fit_flag::describe(f.flags)});
  }
  return t;
}

inline std::vector<FitResult> fits_from_table(const Table& t) {
  expect_header(t, fits_table({}).header);
  std::vector<FitResult> out;
  for (const auto& r : t.rows) {
    FitResult f;
    f.method = parse_method(r[0]);
    f.T = parse_int(r[1]);
    f.a_hat = parse_double(r[2]);
    f.c_hat = parse_double(r[3]);
    f.r0_hat = parse_double(r[4]);
    f.var_a = parse_double(r[5]);
    f.var_c = parse_double(r[6]);
    f.flags = parse_flags(r[7], fit_flag::describe);
    out.push_back(f);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reproduction ratios: t,R_effective,R_basic,H,S.

struct RzeroRow {
  std::int64_t t = 0;
  double effective = 0.0, basic = 0.0;
  std::int64_t H = 0, S = 0;
  friend bool operator==(const RzeroRow&, const RzeroRow&) = default;
};

inline Table rzero_table(const RzeroSeries& series) {
  Table t{{"t", "R_effective", "R_basic", "H", "S"}, {}};
  for (std::size_t k = 0; k < series.t.size(); ++k) {
    t.rows.push_back({format(series.t[k]), format(series.values[k].effective), format(series.values[k].basic),
                      format(series.config.horizon), format(series.config.replications)});
  }
  return t;
}

inline std::vector<RzeroRow> rzero_from_table(const Table& t) {
  expect_header(t, {"t", "R_effective", "R_basic", "H", "S"});
  std::vector<RzeroRow> out;
  for (const auto& r : t.rows) {
    out.push_back({parse_int(r[0]), parse_double(r[1]), parse_double(r[2]), parse_int(r[3]), parse_int(r[4])});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Mechanistic trajectory: t,x,y,z.

inline Table trajectory_table(const std::vector<MechanisticState>& traj) {
  Table t{{"t", "x", "y", "z"}, {}};
  for (std::size_t k = 0; k < traj.size(); ++k) {
    t.rows.push_back({format(static_cast<std::int64_t>(k)), format(traj[k].x), format(traj[k].y), format(traj[k].z)});
  }
  return t;
}

inline std::vector<MechanisticState> trajectory_from_table(const Table& t) {
  expect_header(t, {"t", "x", "y", "z"});
  std::vector<MechanisticState> out;
  for (const auto& r : t.rows) out.push_back({parse_double(r[1]), parse_double(r[2]), parse_double(r[3])});
  return out;
}

// ---------------------------------------------------------------------------
// Instantaneous R: t,raw_ratio,posterior_mean,posterior_shape,posterior_rate,flags.

inline Table instant_table(const std::vector<InstantEstimate>& est) {
  Table t{{"t", "raw_ratio", "posterior_mean", "posterior_shape", "posterior_rate", "flags"}, {}};
  for (const auto& e : est) {
    t.rows.push_back({format(e.t), format(e.raw_ratio), format(e.posterior_mean), format(e.posterior_shape),
                      format(e.posterior_rate), instant_flag::describe(e.flags)});
  }
  return t;
}

/// The total infectiousness Lambda(t) is not stored and reads back as zero.
inline std::vector<InstantEstimate> instant_from_table(const Table& t) {
  expect_header(t, instant_table({}).header);
  std::vector<InstantEstimate> out;
  for (const auto& r : t.rows) {
    InstantEstimate e;
    e.t = parse_int(r[0]);
    e.raw_ratio = parse_double(r[1]);
    e.posterior_mean = parse_double(r[2]);
    e.posterior_shape = parse_double(r[3]);
    e.posterior_rate = parse_double(r[4]);
    e.flags = parse_flags(r[5], instant_flag::describe);
    out.push_back(e);
  }
  return out;
}

// ---------------------------------------------------------------------------
// AR: H,R_ar,gamma_1..gamma_Hmax (cells past a row's own H are empty).

inline Table ar_table(const std::vector<ArEstimate>& est) {
  std::int64_t hmax = 0;
  for (const auto& e : est) hmax = std::max(hmax, e.H);
  Table t{{"H", "R_ar"}, {}};
  for (std::int64_t s = 1; s <= hmax; ++s) t.header.push_back("gamma_" + std::to_string(s));
  for (const auto& e : est) {
    std::vector<std::string> row{format(e.H), format(e.r_ar)};
    for (std::int64_t s = 1; s <= hmax; ++s) row.push_back(s <= e.H ? format(e.gamma[static_cast<std::size_t>(s - 1)]) : "");
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline std::vector<ArEstimate> ar_from_table(const Table& t) {
  if (t.header.size() < 2 || t.header[0] != "H" || t.header[1] != "R_ar") fail(ErrorKind::io, "not an AR table");
  std::vector<ArEstimate> out;
  for (const auto& r : t.rows) {
    ArEstimate e;
    e.H = parse_int(r[0]);
    e.r_ar = parse_double(r[1]);
    if (e.H < 1 || static_cast<std::size_t>(e.H) + 2 > r.size()) fail(ErrorKind::io, "AR row has too few lag cells");
    for (std::int64_t s = 1; s <= e.H; ++s) e.gamma.push_back(parse_double(r[static_cast<std::size_t>(s + 1)]));
    out.push_back(std::move(e));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Posterior: nu_a,lambda_a,nu_c,lambda_c,r0_mean,r0_q05,r0_q50,r0_q95,flags.

inline Table posterior_table(const std::vector<PosteriorSummary>& rows) {
  Table t{{"nu_a", "lambda_a", "nu_c", "lambda_c", "r0_mean", "r0_q05", "r0_q50", "r0_q95", "flags"}, {}};
  for (const auto& s : rows) {
    t.rows.push_back({format(s.post.a.shape), format(s.post.a.rate), format(s.post.c.shape), format(s.post.c.rate),
                      format(s.r0_mean), format(s.r0_q05), format(s.r0_q50), format(s.r0_q95), s.flags()});
  }
  return t;
}

inline std::vector<PosteriorSummary> posterior_from_table(const Table& t) {
  expect_header(t, posterior_table({}).header);
  std::vector<PosteriorSummary> out;
  for (const auto& r : t.rows) {
    PosteriorSummary s;
    s.post = {{parse_double(r[0]), parse_double(r[1])}, {parse_double(r[2]), parse_double(r[3])}};
    s.r0_mean = parse_double(r[4]);
    s.r0_q05 = parse_double(r[5]);
    s.r0_q50 = parse_double(r[6]);
    s.r0_q95 = parse_double(r[7]);
    if (r[8] != "" && r[8] != "mean_undefined") fail(ErrorKind::io, "unknown posterior flag '" + r[8] + "'");
    s.mean_defined = r[8].empty();
    out.push_back(s);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Summary tables: N2_0,T,a,c,R0,mean,var,median,rho,flagged.

struct SummaryRow {
  Count n2_0 = 0;
  std::int64_t T = 0;
  double a = 0, c = 0, r0 = 0, mean = 0, var = 0, median = 0, rho = 0;
  std::int64_t flagged = 0;
  friend bool operator==(const SummaryRow&, const SummaryRow&) = default;
};

inline SummaryRow summary_row(const McDesign& d, const SummaryStats& s, Estimand e) {
  const auto& m = s.of(e);
  return {d.n2_0, d.T, d.a, d.c, d.r0(), m.mean, m.var, m.median, s.rho, s.flagged};
}

inline Table summary_table_csv(const std::vector<SummaryRow>& rows) {
  Table t{{"N2_0", "T", "a", "c", "R0", "mean", "var", "median", "rho", "flagged"}, {}};
  for (const auto& r : rows) {
    t.rows.push_back({format(r.n2_0), format(r.T), format(r.a), format(r.c), format(r.r0), format(r.mean),
                      format(r.var), format(r.median), format(r.rho), format(r.flagged)});
  }
  return t;
}

inline std::vector<SummaryRow> summary_rows_from_table(const Table& t) {
  expect_header(t, summary_table_csv({}).header);
  std::vector<SummaryRow> out;
  for (const auto& r : t.rows) {
    out.push_back({parse_int(r[0]), parse_int(r[1]), parse_double(r[2]), parse_double(r[3]), parse_double(r[4]),
                   parse_double(r[5]), parse_double(r[6]), parse_double(r[7]), parse_double(r[8]), parse_int(r[9])});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Histogram: bin_left,bin_right,density.

inline Table histogram_table(const Histogram& h) {
  Table t{{"bin_left", "bin_right", "density"}, {}};
  for (std::size_t k = 0; k < h.density.size(); ++k) {
    t.rows.push_back({format(h.edges[k]), format(h.edges[k + 1]), format(h.density[k])});
  }
  return t;
}

/// Skewness is not stored and reads back as zero.
inline Histogram histogram_from_table(const Table& t) {
  expect_header(t, {"bin_left", "bin_right", "density"});
  Histogram h;
  for (std::size_t k = 0; k < t.rows.size(); ++k) {
    if (k == 0) h.edges.push_back(parse_double(t.rows[k][0]));
    h.edges.push_back(parse_double(t.rows[k][1]));
    h.density.push_back(parse_double(t.rows[k][2]));
  }
  return h;
}

// ---------------------------------------------------------------------------
// Comparison series: t followed by one column per estimator.

inline Table comparison_table(const ComparisonSeries& s) {
  Table t{{"t"}, {}};
  for (const auto& named : s.series) t.header.push_back(named.name);
  for (std::size_t k = 0; k < s.t.size(); ++k) {
    std::vector<std::string> row{format(s.t[k])};
    for (const auto& named : s.series) row.push_back(format(named.values[k]));
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace sirstat::csv
