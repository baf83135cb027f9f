#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <vector>

#include "rparp/errors.hpp"
#include "rparp/rng.hpp"

namespace rparp {

inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

inline double norm_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
}

// One-sample Kolmogorov-Smirnov statistic against a continuous CDF.
inline double ks_statistic(std::vector<double> sample,
                           const std::function<double(double)>& cdf) {
  if (sample.empty()) throw validation_error("ks_statistic: empty sample");
  std::sort(sample.begin(), sample.end());
  const auto n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
  }
  return d;
}

// Asymptotic Kolmogorov survival function with Stephens' small-sample
// correction; good to a few percent for n >= 10.
inline double ks_pvalue(std::size_t n, double statistic) {
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * statistic;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-12) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

// Mid-ranks (ties averaged), 1-based.
inline std::vector<double> ranks(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> r(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && x[idx[j + 1]] == x[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 2) throw validation_error("pearson: need two equal-length samples");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

inline double spearman_rho(const std::vector<double>& x, const std::vector<double>& y) {
  return pearson(ranks(x), ranks(y));
}

// Two-sided permutation p-value for Spearman's rho; permutes y.
inline double spearman_perm_pvalue(const std::vector<double>& x,
                                   const std::vector<double>& y, RngStream& rng,
                                   int n_perm = 200) {
  const double observed = std::abs(spearman_rho(x, y));
  const std::vector<double> rx = ranks(x);
  std::vector<double> ry = ranks(y);
  int hits = 0;
  for (int b = 0; b < n_perm; ++b) {
    for (std::size_t i = ry.size(); i > 1; --i)
      std::swap(ry[i - 1], ry[rng.below(i)]);
    if (std::abs(pearson(rx, ry)) >= observed) ++hits;
  }
  return static_cast<double>(hits + 1) / static_cast<double>(n_perm + 1);
}

// Interpolated empirical quantile with plotting positions i/(n+1) on the
// sorted sample; clamps outside [1/(n+1), n/(n+1)].
inline double quantile_sorted(const std::vector<double>& sorted, double p) {
  const std::size_t n = sorted.size();
  if (n == 0) throw validation_error("quantile_sorted: empty sample");
  const double np1 = static_cast<double>(n + 1);
  if (p <= 1.0 / np1) return sorted.front();
  if (p >= static_cast<double>(n) / np1) return sorted.back();
  const double pos = p * np1;  // in (1, n)
  const auto lo = static_cast<std::size_t>(pos);
  const double w = pos - static_cast<double>(lo);
  return sorted[lo - 1] * (1.0 - w) + sorted[lo] * w;
}

}  // namespace rparp
