#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "rparp/errors.hpp"
#include "rparp/geometry.hpp"
#include "rparp/stats.hpp"

namespace rparp {

// Parametric semivariogram. gamma is interpreted as a SEMIvariogram
// throughout: Var(G(s1) - G(s2)) = 2 gamma(h). Power is the fractional
// Brownian family (h/beta)^alpha; BoundedExponential saturates at sill alpha.
struct VariogramModel {
  enum class Family { Power, BoundedExponential };

  Family family = Family::Power;
  double beta = 1.0;   // scale (length units)
  double alpha = 1.0;  // Power: shape in (0,2); BoundedExponential: sill > 0

  void validate() const {
    if (!(beta > 0.0)) throw validation_error("variogram: beta must be > 0");
    if (family == Family::Power) {
      if (!(alpha > 0.0 && alpha < 2.0))
        throw validation_error("variogram: Power alpha must lie in (0,2)");
    } else {
      if (!(alpha > 0.0)) throw validation_error("variogram: sill must be > 0");
    }
  }

  static Family family_from_string(const std::string& name) {
    if (name == "power") return Family::Power;
    if (name == "boundedexp") return Family::BoundedExponential;
    throw validation_error("unknown variogram family: " + name +
                           " (expected 'power' or 'boundedexp')");
  }

  std::string family_name() const {
    return family == Family::Power ? "power" : "boundedexp";
  }
};

inline double semivariogram(const VariogramModel& model, double h) {
  if (h < 0.0) throw validation_error("semivariogram: negative distance");
  if (h == 0.0) return 0.0;
  switch (model.family) {
    case VariogramModel::Family::Power:
      return std::pow(h / model.beta, model.alpha);
    case VariogramModel::Family::BoundedExponential:
      return model.alpha * (1.0 - std::exp(-h / model.beta));
  }
  return 0.0;
}

inline Eigen::MatrixXd gamma_matrix(const VariogramModel& model, const SiteSet& sites) {
  model.validate();
  const Eigen::MatrixXd dist = pairwise_distances(sites);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(dist.rows(), dist.cols());
  for (Eigen::Index i = 0; i < dist.rows(); ++i)
    for (Eigen::Index j = i + 1; j < dist.cols(); ++j) {
      g(i, j) = semivariogram(model, dist(i, j));
      g(j, i) = g(i, j);
    }
  return g;
}

// Covariance of the Gaussian increments (G(s_i) - G(s_anchor))_{i != anchor}:
// entry (i,j) = gamma(s_i,s_a) + gamma(s_j,s_a) - gamma(s_i,s_j).
struct AnchoredSigma {
  std::size_t anchor = 0;
  Eigen::MatrixXd matrix;                 // (D-1) x (D-1)
  std::vector<std::size_t> site_index;    // library row -> original site index
};

inline AnchoredSigma anchored_sigma_from_gamma(const Eigen::MatrixXd& gamma,
                                               std::size_t anchor) {
  const auto d = static_cast<std::size_t>(gamma.rows());
  if (d < 2) throw validation_error("anchored_sigma: need at least two sites");
  if (anchor >= d) throw validation_error("anchored_sigma: anchor index out of range");

  AnchoredSigma out;
  out.anchor = anchor;
  out.matrix.resize(static_cast<Eigen::Index>(d - 1), static_cast<Eigen::Index>(d - 1));
  out.site_index.reserve(d - 1);
  for (std::size_t i = 0; i < d; ++i)
    if (i != anchor) out.site_index.push_back(i);

  const auto a = static_cast<Eigen::Index>(anchor);
  for (std::size_t i = 0; i < d - 1; ++i) {
    const auto si = static_cast<Eigen::Index>(out.site_index[i]);
    for (std::size_t j = i; j < d - 1; ++j) {
      const auto sj = static_cast<Eigen::Index>(out.site_index[j]);
      const double v = gamma(si, a) + gamma(sj, a) - gamma(si, sj);
      out.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
      out.matrix(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
    }
  }
  return out;
}

inline AnchoredSigma anchored_sigma(const VariogramModel& model, const SiteSet& sites,
                                    std::size_t anchor) {
  return anchored_sigma_from_gamma(gamma_matrix(model, sites), anchor);
}

// Pairwise extremal coefficient of the Brown-Resnick model,
// theta(h) = 2 Phi(sqrt(gamma(h)/2)), in [1,2).
inline double extremal_coefficient_pair(const VariogramModel& model, double h) {
  return 2.0 * norm_cdf(std::sqrt(semivariogram(model, h) / 2.0));
}

// Limiting extremogram chi(h) = 2 - theta(h); 1 at h=0, decreasing with h.
inline double theoretical_chi(const VariogramModel& model, double h) {
  return 2.0 - extremal_coefficient_pair(model, h);
}

}  // namespace rparp
