#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "rparp/csv.hpp"
#include "rparp/errors.hpp"
#include "rparp/geometry.hpp"
#include "rparp/optim.hpp"
#include "rparp/stats.hpp"

namespace rparp {

// ---------------------------------------------------------------------------
// Generalized Pareto distribution for threshold excesses
// ---------------------------------------------------------------------------

inline double gpd_cdf(double x, double scale, double shape) {
  if (x <= 0.0) return 0.0;
  if (std::abs(shape) < 1e-12) return 1.0 - std::exp(-x / scale);
  const double t = 1.0 + shape * x / scale;
  if (t <= 0.0) return 1.0;  // beyond the upper endpoint (shape < 0)
  return 1.0 - std::pow(t, -1.0 / shape);
}

inline double gpd_quantile(double p, double scale, double shape) {
  if (p < 0.0 || p >= 1.0) throw validation_error("gpd_quantile: p must be in [0,1)");
  if (std::abs(shape) < 1e-12) return -scale * std::log1p(-p);
  return scale / shape * (std::pow(1.0 - p, -shape) - 1.0);
}

// Negative log-likelihood of excesses under GPD(scale, shape).
inline double gpd_nll(const std::vector<double>& excesses, double scale, double shape) {
  if (!(scale > 0.0)) return std::numeric_limits<double>::infinity();
  double nll = 0.0;
  if (std::abs(shape) < 1e-10) {
    for (double x : excesses) nll += std::log(scale) + x / scale;
    return nll;
  }
  for (double x : excesses) {
    const double t = 1.0 + shape * x / scale;
    if (t <= 0.0) return std::numeric_limits<double>::infinity();
    nll += std::log(scale) + (1.0 + 1.0 / shape) * std::log(t);
  }
  return nll;
}

namespace detail {

// Few damped Newton steps in (log scale, shape) on finite-difference
// derivatives; tightens the simplex solution so the gradient at the optimum
// is numerically zero.
inline void gpd_polish(const std::vector<double>& excesses, double& log_scale,
                       double& shape) {
  auto nll = [&](double ls, double xi) { return gpd_nll(excesses, std::exp(ls), xi); };
  const double h = 1e-6;
  for (int it = 0; it < 40; ++it) {
    const double f0 = nll(log_scale, shape);
    const double g0 = (nll(log_scale + h, shape) - nll(log_scale - h, shape)) / (2 * h);
    const double g1 = (nll(log_scale, shape + h) - nll(log_scale, shape - h)) / (2 * h);
    if (std::hypot(g0, g1) < 1e-9) break;
    const double h00 = (nll(log_scale + h, shape) - 2 * f0 + nll(log_scale - h, shape)) / (h * h);
    const double h11 = (nll(log_scale, shape + h) - 2 * f0 + nll(log_scale, shape - h)) / (h * h);
    const double h01 = (nll(log_scale + h, shape + h) - nll(log_scale + h, shape - h) -
                        nll(log_scale - h, shape + h) + nll(log_scale - h, shape - h)) /
                       (4 * h * h);
    const double det = h00 * h11 - h01 * h01;
    double d0, d1;
    if (det > 0.0 && h00 > 0.0) {
      d0 = (h11 * g0 - h01 * g1) / det;
      d1 = (h00 * g1 - h01 * g0) / det;
    } else {  // fall back to gradient descent
      d0 = g0;
      d1 = g1;
    }
    double step = 1.0;
    bool moved = false;
    while (step > 1e-8) {
      const double ls = log_scale - step * d0;
      const double xi = shape - step * d1;
      if (xi > -0.99 && xi < 5.0 && nll(ls, xi) < f0) {
        log_scale = ls;
        shape = xi;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
}

}  // namespace detail

struct GpdFit {
  double scale = 1.0;
  double shape = 0.0;
  double nll = 0.0;
  bool boundary = false;  // shape pinned near -0.99
};

// MLE over (log scale, shape) with simplex restarts and a Newton polish.
// shape is constrained to (-0.99, 5).
inline GpdFit fit_gpd_mle(const std::vector<double>& excesses) {
  if (excesses.size() < 10)
    throw validation_error("fit_gpd_mle: need at least 10 excesses, got " +
                           std::to_string(excesses.size()));
  double mean = 0.0;
  for (double x : excesses) {
    if (!(x > 0.0)) throw validation_error("fit_gpd_mle: excesses must be > 0");
    mean += x;
  }
  mean /= static_cast<double>(excesses.size());
  double var = 0.0;
  for (double x : excesses) var += (x - mean) * (x - mean);
  var /= static_cast<double>(excesses.size() - 1);
  if (var == 0.0) throw validation_error("fit_gpd_mle: degenerate sample (all excesses equal)");

  auto objective = [&](const std::vector<double>& p) {
    const double shape = p[1];
    if (shape <= -0.99 || shape >= 5.0) return std::numeric_limits<double>::infinity();
    return gpd_nll(excesses, std::exp(p[0]), shape);
  };

  // moment start plus two fixed perturbations
  const double r = mean * mean / var;
  const double xi_mom = std::clamp(0.5 * (1.0 - r), -0.9, 4.5);
  const double sigma_mom = std::max(mean * (1.0 - xi_mom), 1e-10);
  const std::vector<std::vector<double>> starts = {
      {std::log(sigma_mom), xi_mom},
      {std::log(mean), 0.05},
      {std::log(0.5 * mean), 0.4},
  };

  NelderMeadResult best;
  bool have = false;
  NelderMeadOptions opts;
  opts.max_iters = 500;
  for (const auto& s : starts) {
    const auto r2 = nelder_mead(objective, s, opts);
    if (!have || r2.value < best.value) {
      best = r2;
      have = true;
    }
  }
  if (!have || !std::isfinite(best.value))
    throw numeric_error("fit_gpd_mle: optimizer failed to find a finite optimum");

  double log_scale = best.x[0];
  double shape = best.x[1];
  detail::gpd_polish(excesses, log_scale, shape);

  GpdFit fit;
  fit.scale = std::exp(log_scale);
  fit.shape = shape;
  fit.nll = gpd_nll(excesses, fit.scale, fit.shape);
  fit.boundary = shape < -0.95;
  return fit;
}

// ---------------------------------------------------------------------------
// Per-site semiparametric marginal model
// ---------------------------------------------------------------------------

// Empirical body (plotting positions rank/(n+1), linear interpolation) with a
// GPD tail anchored continuously at the q-quantile. When gpd_tail is false the
// empirical CDF is used throughout.
struct MarginalModel {
  std::string site_id;
  double q = 0.95;
  double threshold = 0.0;  // u, the empirical q-quantile
  double gpd_scale = std::numeric_limits<double>::quiet_NaN();
  double gpd_shape = std::numeric_limits<double>::quiet_NaN();
  bool gpd_tail = true;
  std::vector<double> body;  // sorted sample

  std::size_t sample_size() const { return body.size(); }
};

namespace detail {

inline double empirical_cdf_sorted(const std::vector<double>& s, double x) {
  const std::size_t n = s.size();
  const double np1 = static_cast<double>(n + 1);
  if (x < s.front()) return 1.0 / np1;
  if (x >= s.back()) return static_cast<double>(n) / np1;
  // j = last index with s[j] <= x
  const auto it = std::upper_bound(s.begin(), s.end(), x);
  const auto j = static_cast<std::size_t>(it - s.begin()) - 1;
  if (s[j] == x) return static_cast<double>(j + 1) / np1;
  const double w = (x - s[j]) / (s[j + 1] - s[j]);
  return (static_cast<double>(j + 1) + w) / np1;
}

inline double empirical_quantile_sorted(const std::vector<double>& s, double p) {
  return quantile_sorted(s, p);
}

}  // namespace detail

enum class MarginMode { GpdTail, EmpiricalOnly };

inline MarginalModel fit_marginal_model(std::vector<double> values, double q,
                                        MarginMode mode, const std::string& site_id) {
  values.erase(std::remove_if(values.begin(), values.end(),
                              [](double v) { return std::isnan(v); }),
               values.end());
  if (values.size() < 2)
    throw validation_error("fit_marginal_model: site " + site_id + " has too few values");
  if (!(q > 0.0 && q < 1.0)) throw validation_error("fit_marginal_model: q must be in (0,1)");
  std::sort(values.begin(), values.end());

  MarginalModel m;
  m.site_id = site_id;
  m.q = q;
  m.body = std::move(values);
  m.threshold = detail::empirical_quantile_sorted(m.body, q);
  m.gpd_tail = (mode == MarginMode::GpdTail);

  if (m.gpd_tail) {
    std::vector<double> excesses;
    for (double v : m.body)
      if (v > m.threshold) excesses.push_back(v - m.threshold);
    if (excesses.size() < 10)
      throw validation_error("fit_marginal_model: site " + site_id + " has only " +
                             std::to_string(excesses.size()) +
                             " excesses above its q-quantile (need 10)");
    const GpdFit fit = fit_gpd_mle(excesses);
    m.gpd_scale = fit.scale;
    m.gpd_shape = fit.shape;
  }
  return m;
}

// F(x): empirical below u, GPD tail above (continuous at u by construction).
inline double semiparametric_cdf(const MarginalModel& m, double x) {
  if (!m.gpd_tail || x <= m.threshold) return detail::empirical_cdf_sorted(m.body, x);
  const double tail = gpd_cdf(x - m.threshold, m.gpd_scale, m.gpd_shape);
  return 1.0 - (1.0 - m.q) * (1.0 - tail);
}

inline double semiparametric_quantile(const MarginalModel& m, double p) {
  if (!(p > 0.0 && p < 1.0))
    throw validation_error("semiparametric_quantile: p must be in (0,1)");
  if (!m.gpd_tail || p <= m.q) return detail::empirical_quantile_sorted(m.body, p);
  const double tail_p = 1.0 - (1.0 - p) / (1.0 - m.q);
  return m.threshold + gpd_quantile(tail_p, m.gpd_scale, m.gpd_shape);
}

// z = 1/(1 - F(x)) >= 1; the standard-Pareto scale used for dependence work.
inline double to_standard_pareto(const MarginalModel& m, double x) {
  const double f = semiparametric_cdf(m, x);
  return 1.0 / (1.0 - f);
}

inline double from_standard_pareto(const MarginalModel& m, double z) {
  if (z < 1.0) throw validation_error("from_standard_pareto: z must be >= 1");
  const double p = 1.0 - 1.0 / z;
  if (p <= 0.0) return m.body.front();
  return semiparametric_quantile(m, p);
}

inline DataMatrix standardize_matrix(const DataMatrix& data,
                                     const std::vector<MarginalModel>& models) {
  if (models.size() != data.cols())
    throw validation_error("standardize_matrix: one marginal model per column required");
  DataMatrix out = data;
  for (std::size_t j = 0; j < data.cols(); ++j) {
    if (models[j].site_id != data.site_ids[j])
      throw validation_error("standardize_matrix: model/column order mismatch at " +
                             data.site_ids[j]);
    for (std::size_t i = 0; i < data.rows(); ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      const auto jj = static_cast<Eigen::Index>(j);
      if (!std::isnan(data.values(ii, jj)))
        out.values(ii, jj) = to_standard_pareto(models[j], data.values(ii, jj));
    }
  }
  return out;
}

// Fits every column; collects per-site failures into a single error message.
inline std::vector<MarginalModel> fit_all_margins(const DataMatrix& data, double q,
                                                  MarginMode mode) {
  std::vector<MarginalModel> models;
  std::string failures;
  for (std::size_t j = 0; j < data.cols(); ++j) {
    std::vector<double> column(data.rows());
    for (std::size_t i = 0; i < data.rows(); ++i)
      column[i] = data.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    try {
      models.push_back(fit_marginal_model(std::move(column), q, mode, data.site_ids[j]));
    } catch (const validation_error& e) {
      failures += failures.empty() ? e.what() : std::string("; ") + e.what();
    }
  }
  if (!failures.empty()) throw validation_error("margin fitting failed: " + failures);
  return models;
}

// ---------------------------------------------------------------------------
// Serialization: id,q,u,sigma,xi plus a companion body file (id,value)
// ---------------------------------------------------------------------------

inline void save_margins(const std::vector<MarginalModel>& models, const std::string& path,
                         const std::string& body_path,
                         const std::string& header_comment = "") {
  csv::Writer w(path);
  if (!header_comment.empty()) w.comment(header_comment);
  w.row({"id", "q", "u", "sigma", "xi"});
  for (const auto& m : models)
    w.row({m.site_id, csv::format(m.q), csv::format(m.threshold),
           m.gpd_tail ? csv::format(m.gpd_scale) : "NA",
           m.gpd_tail ? csv::format(m.gpd_shape) : "NA"});

  csv::Writer b(body_path);
  if (!header_comment.empty()) b.comment(header_comment);
  b.row({"id", "value"});
  for (const auto& m : models)
    for (double v : m.body) b.row({m.site_id, csv::format(v)});
}

inline std::vector<MarginalModel> load_margins(const std::string& path,
                                               const std::string& body_path) {
  csv::Reader reader(path);
  std::vector<std::string> fields;
  if (!reader.next(fields) || fields.size() != 5 || fields[0] != "id")
    throw parse_error("margins file header must be id,q,u,sigma,xi");
  std::vector<MarginalModel> models;
  while (reader.next(fields)) {
    if (fields.size() != 5) throw parse_error("expected 5 fields", reader.line_no);
    MarginalModel m;
    m.site_id = fields[0];
    m.q = csv::parse_double(fields[1], reader.line_no);
    m.threshold = csv::parse_double(fields[2], reader.line_no);
    if (csv::is_missing(fields[3])) {
      m.gpd_tail = false;
    } else {
      m.gpd_tail = true;
      m.gpd_scale = csv::parse_double(fields[3], reader.line_no);
      m.gpd_shape = csv::parse_double(fields[4], reader.line_no);
    }
    models.push_back(std::move(m));
  }

  csv::Reader body(body_path);
  if (!body.next(fields) || fields.size() != 2 || fields[0] != "id")
    throw parse_error("margins body file header must be id,value");
  while (body.next(fields)) {
    if (fields.size() != 2) throw parse_error("expected 2 fields", body.line_no);
    bool matched = false;
    for (auto& m : models)
      if (m.site_id == fields[0]) {
        m.body.push_back(csv::parse_double(fields[1], body.line_no));
        matched = true;
        break;
      }
    if (!matched) throw validation_error("body file references unknown site " + fields[0]);
  }
  for (auto& m : models) {
    if (m.body.empty())
      throw validation_error("no body sample for site " + m.site_id);
    std::sort(m.body.begin(), m.body.end());
  }
  return models;
}

}  // namespace rparp
