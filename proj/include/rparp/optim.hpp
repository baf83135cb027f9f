#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "rparp/errors.hpp"

namespace rparp {

struct NelderMeadResult {
  std::vector<double> x;
  double value = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
  std::vector<double> best_trace;  // best objective value after each iteration
};

struct NelderMeadOptions {
  int max_iters = 2000;
  double f_tol = 1e-12;
  double x_tol = 1e-10;
  double initial_step = 0.25;
};

// Standard Nelder-Mead simplex minimization. The objective may return +inf to
// reject a point (used for hard parameter bounds).
inline NelderMeadResult nelder_mead(
    const std::function<double(const std::vector<double>&)>& fn,
    std::vector<double> x0, const NelderMeadOptions& opts = {}) {
  const std::size_t n = x0.size();
  if (n == 0) throw validation_error("nelder_mead: empty start point");

  std::vector<std::vector<double>> simplex(n + 1, x0);
  for (std::size_t i = 0; i < n; ++i) {
    simplex[i + 1][i] += (x0[i] != 0.0 ? opts.initial_step * std::abs(x0[i]) + opts.initial_step
                                       : opts.initial_step);
  }
  std::vector<double> fvals(n + 1);
  for (std::size_t i = 0; i <= n; ++i) fvals[i] = fn(simplex[i]);

  NelderMeadResult res;
  auto order = [&] {
    std::vector<std::size_t> idx(n + 1);
    for (std::size_t i = 0; i <= n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fvals[a] < fvals[b]; });
    std::vector<std::vector<double>> s2;
    std::vector<double> f2;
    for (auto i : idx) {
      s2.push_back(simplex[i]);
      f2.push_back(fvals[i]);
    }
    simplex = std::move(s2);
    fvals = std::move(f2);
  };

  constexpr double rho = 1.0, chi = 2.0, psi = 0.5, sigma = 0.5;
  for (int iter = 0; iter < opts.max_iters; ++iter) {
    order();
    res.best_trace.push_back(fvals[0]);
    res.iterations = iter + 1;

    double fspread = std::abs(fvals[n] - fvals[0]);
    double xspread = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t v = 1; v <= n; ++v)
        xspread = std::max(xspread, std::abs(simplex[v][i] - simplex[0][i]));
    if (fspread <= opts.f_tol && xspread <= opts.x_tol) {
      res.converged = true;
      break;
    }

    std::vector<double> centroid(n, 0.0);
    for (std::size_t v = 0; v < n; ++v)
      for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[v][i] / static_cast<double>(n);

    auto blend = [&](double t) {
      std::vector<double> p(n);
      for (std::size_t i = 0; i < n; ++i) p[i] = centroid[i] + t * (centroid[i] - simplex[n][i]);
      return p;
    };

    const auto xr = blend(rho);
    const double fr = fn(xr);
    if (fr < fvals[0]) {
      const auto xe = blend(rho * chi);
      const double fe = fn(xe);
      if (fe < fr) {
        simplex[n] = xe;
        fvals[n] = fe;
      } else {
        simplex[n] = xr;
        fvals[n] = fr;
      }
    } else if (fr < fvals[n - 1]) {
      simplex[n] = xr;
      fvals[n] = fr;
    } else {
      const bool outside = fr < fvals[n];
      const auto xc = blend(outside ? psi * rho : -psi);
      const double fc = fn(xc);
      if (fc < std::min(fr, fvals[n])) {
        simplex[n] = xc;
        fvals[n] = fc;
      } else {
        // shrink toward the best vertex
        for (std::size_t v = 1; v <= n; ++v) {
          for (std::size_t i = 0; i < n; ++i)
            simplex[v][i] = simplex[0][i] + sigma * (simplex[v][i] - simplex[0][i]);
          fvals[v] = fn(simplex[v]);
        }
      }
    }
  }
  order();
  res.x = simplex[0];
  res.value = fvals[0];
  if (!std::isfinite(res.value))
    throw numeric_error("nelder_mead: objective not finite at best point");
  return res;
}

}  // namespace rparp
