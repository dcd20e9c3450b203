#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "threadlens/records.hpp"

namespace threadlens {

struct CcdfPoint {
  double value = 0.0;
  double fraction = 0.0;
};

struct CcdfCurve {
  std::vector<CcdfPoint> points;  // one per distinct value, ascending
  std::size_t total_n = 0;
};

// Fraction of samples >= v at every distinct v. Requires positive samples.
inline Result<CcdfCurve> ccdf(std::vector<double> values) {
  if (values.empty()) return make_error(Errc::empty_input, "ccdf of empty sample");
  for (double v : values)
    if (!std::isfinite(v) || v <= 0.0)
      return make_error(Errc::nonpositive_value, "ccdf requires positive finite samples");
  std::sort(values.begin(), values.end());
  CcdfCurve out;
  out.total_n = values.size();
  const double n = static_cast<double>(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i == 0 || values[i] != values[i - 1])
      out.points.push_back({values[i], static_cast<double>(values.size() - i) / n});
  }
  return out;
}

struct BinSpec {
  enum class Kind { linear, logarithmic };
  Kind kind = Kind::logarithmic;
  double width = 1.0;  // linear bin width
  double ratio = 1.3;  // logarithmic edge ratio

  static BinSpec linear(double width) { return {Kind::linear, width, 0.0}; }
  static BinSpec logarithmic(double ratio = 1.3) { return {Kind::logarithmic, 0.0, ratio}; }
};

struct DistributionSummary {
  std::vector<double> bin_edges;  // size counts.size()+1, strictly ascending
  std::vector<std::uint64_t> counts;
  std::uint64_t total_n = 0;
  BinSpec binning;
};

namespace detail {

// Edges covering [min(values), max(values)] with the last edge strictly
// beyond the maximum, so every value lands in a half-open [lo, hi) bin.
// Logarithmic specs get a [0, first-power) bucket prepended when zeros are
// present; negative values are rejected for logarithmic binning.
inline Result<std::vector<double>> build_edges(const std::vector<double>& values,
                                               const BinSpec& spec) {
  double mn = values[0], mx = values[0], mnpos = 0.0;
  bool have_pos = false;
  for (double v : values) {
    if (!std::isfinite(v))
      return make_error(Errc::invalid_param, "non-finite sample");
    mn = std::min(mn, v);
    mx = std::max(mx, v);
    if (v > 0.0 && (!have_pos || v < mnpos)) {
      mnpos = v;
      have_pos = true;
    }
  }
  std::vector<double> edges;
  if (spec.kind == BinSpec::Kind::linear) {
    if (!(spec.width > 0.0) || !std::isfinite(spec.width))
      return make_error(Errc::invalid_param, "linear bin width must be > 0");
    const double base = std::floor(mn / spec.width) * spec.width;
    edges.push_back(base);
    for (std::uint64_t k = 1; edges.back() <= mx; ++k)
      edges.push_back(base + static_cast<double>(k) * spec.width);
  } else {
    if (!(spec.ratio > 1.0) || !std::isfinite(spec.ratio))
      return make_error(Errc::invalid_param, "logarithmic ratio must be > 1");
    if (mn < 0.0)
      return make_error(Errc::invalid_param,
                                             "logarithmic binning requires nonnegative values");
    if (!have_pos) {
      edges = {0.0, 1.0};
      return edges;
    }
    double k0 = std::floor(std::log(mnpos) / std::log(spec.ratio));
    while (std::pow(spec.ratio, k0) > mnpos) k0 -= 1.0;
    while (std::pow(spec.ratio, k0 + 1.0) <= mnpos) k0 += 1.0;
    for (double k = k0;; k += 1.0) {
      double e = std::pow(spec.ratio, k);
      if (!edges.empty() && e <= edges.back())  // guard against pow plateaus
        e = std::nextafter(edges.back(), std::numeric_limits<double>::infinity());
      edges.push_back(e);
      if (e > mx) break;
    }
    if (mn == 0.0) edges.insert(edges.begin(), 0.0);
  }
  return edges;
}

inline std::size_t edge_bin(const std::vector<double>& edges, double v) {
  auto it = std::upper_bound(edges.begin(), edges.end(), v);
  std::size_t idx = static_cast<std::size_t>(it - edges.begin());
  if (idx == 0) return 0;
  idx -= 1;
  const std::size_t nb = edges.size() - 1;
  return idx >= nb ? nb - 1 : idx;
}

}  // namespace detail

inline Result<DistributionSummary> make_histogram(const std::vector<double>& values,
                                                  BinSpec spec) {
  if (values.empty())
    return make_error(Errc::empty_input, "histogram of empty sample");
  auto edges = detail::build_edges(values, spec);
  if (!edges.ok()) return edges.error();
  DistributionSummary out;
  out.bin_edges = std::move(*edges);
  out.counts.assign(out.bin_edges.size() - 1, 0);
  out.total_n = values.size();
  out.binning = spec;
  for (double v : values) ++out.counts[detail::edge_bin(out.bin_edges, v)];
  return out;
}

enum class TailFamily { powerlaw, lognormal };

inline const char* tail_family_name(TailFamily f) {
  return f == TailFamily::powerlaw ? "powerlaw" : "lognormal";
}

struct TailFit {
  TailFamily family = TailFamily::powerlaw;
  double exponent_or_mu = 0.0;  // alpha for powerlaw, mu for lognormal
  double sigma = 0.0;           // lognormal only
  double xmin = 0.0;
  double std_error = 0.0;
  double ks_stat = 0.0;
  std::size_t n_tail = 0;
};

namespace detail {

// Max deviation between the empirical step CDF and a model CDF, evaluated
// at both corners of every step. xs must be sorted ascending.
template <class ModelCdf>
double ks_statistic(std::span<const double> xs, ModelCdf cdf) {
  const double m = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max(d, f - static_cast<double>(i) / m);
    d = std::max(d, static_cast<double>(i + 1) / m - f);
  }
  return std::clamp(d, 0.0, 1.0);
}

// tail must be sorted ascending and contain only values >= xmin.
inline Result<TailFit> fit_powerlaw_sorted_tail(std::span<const double> tail, double xmin) {
  if (tail.size() < 2)
    return make_error(Errc::too_few_samples, "need at least 2 samples at or above xmin");
  if (tail.back() == xmin)
    return make_error(Errc::degenerate_tail, "all tail samples equal xmin");
  double s = 0.0;
  for (double v : tail) s += std::log(v / xmin);
  const double n = static_cast<double>(tail.size());
  const double alpha = 1.0 + n / s;
  TailFit fit;
  fit.family = TailFamily::powerlaw;
  fit.exponent_or_mu = alpha;
  fit.xmin = xmin;
  fit.std_error = (alpha - 1.0) / std::sqrt(n);
  fit.ks_stat = ks_statistic(tail, [&](double x) { return 1.0 - std::pow(x / xmin, 1.0 - alpha); });
  fit.n_tail = tail.size();
  return fit;
}

}  // namespace detail

// Continuous power-law MLE on the samples >= xmin:
// alpha = 1 + n / sum(ln(x_i/xmin)), std error (alpha-1)/sqrt(n).
inline Result<TailFit> fit_powerlaw_mle(const std::vector<double>& values, double xmin) {
  if (!(xmin > 0.0) || !std::isfinite(xmin))
    return make_error(Errc::invalid_param, "xmin must be positive and finite");
  std::vector<double> tail;
  for (double v : values) {
    if (!std::isfinite(v)) return make_error(Errc::invalid_param, "non-finite sample");
    if (v >= xmin) tail.push_back(v);
  }
  std::sort(tail.begin(), tail.end());
  return detail::fit_powerlaw_sorted_tail(tail, xmin);
}

struct ScanOptions {
  std::size_t max_candidates = 200;     // cap applied above distinct_threshold
  std::size_t distinct_threshold = 10'000;
};

// Evaluates the power-law fit at candidate xmin values (every distinct value,
// quantile-thinned above the threshold) and keeps the minimum-KS fit; ties go
// to the smaller xmin.
inline Result<TailFit> scan_xmin_ks(const std::vector<double>& values, ScanOptions opts = {}) {
  std::vector<double> sorted(values);
  for (double v : sorted)
    if (!std::isfinite(v) || v <= 0.0)
      return make_error(Errc::nonpositive_value, "scan requires positive finite samples");
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> distinct;
  for (std::size_t i = 0; i < sorted.size(); ++i)
    if (i == 0 || sorted[i] != sorted[i - 1]) distinct.push_back(sorted[i]);
  if (distinct.size() < 10)
    return make_error(Errc::too_few_distinct,
                               "xmin scan needs at least 10 distinct values, got " +
                                   std::to_string(distinct.size()));
  std::vector<double> candidates;
  if (distinct.size() > opts.distinct_threshold && opts.max_candidates > 1) {
    candidates.reserve(opts.max_candidates);
    const std::size_t d = distinct.size() - 1;
    for (std::size_t j = 0; j < opts.max_candidates; ++j) {
      const double c = distinct[j * d / (opts.max_candidates - 1)];
      if (candidates.empty() || candidates.back() != c) candidates.push_back(c);
    }
  } else {
    candidates = distinct;
  }

  bool found = false;
  TailFit best;
  for (double c : candidates) {
    auto lo = std::lower_bound(sorted.begin(), sorted.end(), c);
    auto fit = detail::fit_powerlaw_sorted_tail(
        std::span<const double>(&*lo, static_cast<std::size_t>(sorted.end() - lo)), c);
    if (!fit.ok()) continue;
    if (!found || fit->ks_stat < best.ks_stat) {
      best = *fit;
      found = true;
    }
  }
  if (!found)
    return make_error(Errc::degenerate_tail, "no candidate xmin produced a valid fit");
  return best;
}

// Lognormal MLE over the whole (positive) sample: mu = mean of ln x,
// sigma = population standard deviation of ln x.
inline Result<TailFit> fit_lognormal_mle(const std::vector<double>& values) {
  if (values.size() < 2)
    return make_error(Errc::too_few_samples, "need at least 2 samples");
  std::vector<double> sorted(values);
  for (double v : sorted)
    if (!std::isfinite(v) || v <= 0.0)
      return make_error(Errc::nonpositive_value, "lognormal requires positive samples");
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() == sorted.back())
    return make_error(Errc::zero_variance, "all samples equal");
  std::vector<double> logs(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) logs[i] = std::log(sorted[i]);
  const double n = static_cast<double>(logs.size());
  double mu = 0.0;
  for (double l : logs) mu += l;
  mu /= n;
  double var = 0.0;
  for (double l : logs) var += (l - mu) * (l - mu);
  var /= n;
  const double sigma = std::sqrt(var);
  TailFit fit;
  fit.family = TailFamily::lognormal;
  fit.exponent_or_mu = mu;
  fit.sigma = sigma;
  fit.xmin = sorted.front();
  fit.std_error = sigma / std::sqrt(n);
  fit.ks_stat = detail::ks_statistic(std::span<const double>(sorted), [&](double x) {
    return 0.5 * std::erfc(-(std::log(x) - mu) / (sigma * std::sqrt(2.0)));
  });
  fit.n_tail = sorted.size();
  return fit;
}

// Discrete power-law MLE (optional mode for integer-valued samples):
// maximizes -n ln zeta(alpha, xmin) - alpha sum(ln x_i) over alpha, with the
// Hurwitz zeta evaluated by Euler-Maclaurin summation. The continuous
// estimator remains the default everywhere.
namespace detail {

inline double hurwitz_zeta(double alpha, double q) {
  constexpr int kDirect = 64;
  double s = 0.0;
  for (int k = 0; k < kDirect; ++k) s += std::pow(q + k, -alpha);
  const double t = q + kDirect;
  s += std::pow(t, 1.0 - alpha) / (alpha - 1.0);
  s += 0.5 * std::pow(t, -alpha);
  s += alpha * std::pow(t, -alpha - 1.0) / 12.0;
  s -= alpha * (alpha + 1.0) * (alpha + 2.0) * std::pow(t, -alpha - 3.0) / 720.0;
  return s;
}

}  // namespace detail

inline Result<TailFit> fit_powerlaw_discrete(const std::vector<double>& values, double xmin) {
  if (!(xmin >= 1.0) || !std::isfinite(xmin))
    return make_error(Errc::invalid_param, "discrete fit needs xmin >= 1");
  std::vector<double> tail;
  for (double v : values) {
    if (!std::isfinite(v)) return make_error(Errc::invalid_param, "non-finite sample");
    if (v >= xmin) tail.push_back(v);
  }
  std::sort(tail.begin(), tail.end());
  if (tail.size() < 2)
    return make_error(Errc::too_few_samples, "need at least 2 samples at or above xmin");
  if (tail.back() == xmin)
    return make_error(Errc::degenerate_tail, "all tail samples equal xmin");
  const double n = static_cast<double>(tail.size());
  double sum_log = 0.0;
  for (double v : tail) sum_log += std::log(v);

  const auto neg_loglik = [&](double a) {
    return n * std::log(detail::hurwitz_zeta(a, xmin)) + a * sum_log;
  };
  // Golden-section minimum of the negative log-likelihood.
  double lo = 1.000001, hi = 12.0;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
  double fc = neg_loglik(c), fd = neg_loglik(d);
  for (int it = 0; it < 200 && (hi - lo) > 1e-9; ++it) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - gr * (hi - lo);
      fc = neg_loglik(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + gr * (hi - lo);
      fd = neg_loglik(d);
    }
  }
  const double alpha = (lo + hi) / 2.0;

  const double h = 1e-4;
  const double ddl = (neg_loglik(alpha + h) - 2.0 * neg_loglik(alpha) + neg_loglik(alpha - h)) /
                     (h * h);
  TailFit fit;
  fit.family = TailFamily::powerlaw;
  fit.exponent_or_mu = alpha;
  fit.xmin = xmin;
  fit.std_error = ddl > 0.0 ? 1.0 / std::sqrt(ddl) : 0.0;
  const double z0 = detail::hurwitz_zeta(alpha, xmin);
  fit.ks_stat = detail::ks_statistic(std::span<const double>(tail), [&](double x) {
    return 1.0 - detail::hurwitz_zeta(alpha, std::floor(x) + 1.0) / z0;
  });
  fit.n_tail = tail.size();
  return fit;
}

struct DensityGrid {
  std::vector<double> x_edges, y_edges;
  std::vector<std::uint64_t> counts;  // row-major, index = ix * (y bins) + iy
  std::vector<double> col_mean_y;     // mean of raw y per x bin (0 when empty)
  std::vector<std::uint64_t> col_count;
  std::uint64_t total_n = 0;

  std::size_t nx() const { return x_edges.size() - 1; }
  std::size_t ny() const { return y_edges.size() - 1; }
  std::uint64_t at(std::size_t ix, std::size_t iy) const { return counts[ix * ny() + iy]; }
};

// Joint counts over (x, y) pairs plus the per-x-bin average of raw y values.
// Column sums run in input order, so a fixed input order fixes the output.
inline Result<DensityGrid> density_grid_2d(const std::vector<std::pair<double, double>>& pairs,
                                           BinSpec xspec, BinSpec yspec) {
  if (pairs.empty())
    return make_error(Errc::empty_input, "density grid of empty sample");
  std::vector<double> xs(pairs.size()), ys(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    xs[i] = pairs[i].first;
    ys[i] = pairs[i].second;
  }
  auto xe = detail::build_edges(xs, xspec);
  if (!xe.ok()) return xe.error();
  auto ye = detail::build_edges(ys, yspec);
  if (!ye.ok()) return ye.error();

  DensityGrid g;
  g.x_edges = std::move(*xe);
  g.y_edges = std::move(*ye);
  const std::size_t nx = g.nx(), ny = g.ny();
  g.counts.assign(nx * ny, 0);
  g.col_count.assign(nx, 0);
  std::vector<double> col_sum(nx, 0.0);
  for (const auto& [x, y] : pairs) {
    const std::size_t ix = detail::edge_bin(g.x_edges, x);
    const std::size_t iy = detail::edge_bin(g.y_edges, y);
    ++g.counts[ix * ny + iy];
    ++g.col_count[ix];
    col_sum[ix] += y;
  }
  g.col_mean_y.assign(nx, 0.0);
  for (std::size_t i = 0; i < nx; ++i)
    if (g.col_count[i] > 0) g.col_mean_y[i] = col_sum[i] / static_cast<double>(g.col_count[i]);
  g.total_n = pairs.size();
  return g;
}

}  // namespace threadlens
