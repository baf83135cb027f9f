#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "rparp/errors.hpp"
#include "rparp/rng.hpp"
#include "rparp/variogram.hpp"

namespace rparp {

// Lower-triangular Cholesky factor of an anchored increment covariance,
// with the diagonal jitter that was needed to make it numerically PSD.
struct CholFactor {
  Eigen::MatrixXd lower;
  double jitter = 0.0;

  Eigen::Index dim() const { return lower.rows(); }
};

// Cholesky with a jitter ladder: try eps*I for eps = 0, 1e-12, ..., 1e-6
// (growing by 10x); give up beyond 1e-6.
inline CholFactor factor(const AnchoredSigma& sigma) {
  const Eigen::MatrixXd& m = sigma.matrix;
  if (m.rows() != m.cols()) throw validation_error("factor: matrix not square");
  if (!m.isApprox(m.transpose(), 1e-12))
    throw validation_error("factor: matrix not symmetric");

  double eps = 0.0;
  while (true) {
    Eigen::MatrixXd trial = m;
    if (eps > 0.0) trial.diagonal().array() += eps;
    Eigen::LLT<Eigen::MatrixXd> llt(trial);
    if (llt.info() == Eigen::Success) {
      CholFactor f;
      f.lower = llt.matrixL();
      f.jitter = eps;
      return f;
    }
    if (eps == 0.0)
      eps = 1e-12;
    else if (eps < 1e-6)
      eps *= 10.0;
    else
      throw numeric_error("NotPSD: anchored covariance not PSD after max jitter 1e-6");
  }
}

// W = L * N with N iid standard normal, so Cov(W) = Sigma (+ jitter).
inline Eigen::VectorXd sample_anchored_increments(const CholFactor& f, RngStream& rng) {
  Eigen::VectorXd n(f.dim());
  for (Eigen::Index i = 0; i < n.size(); ++i) n(i) = rng.normal();
  return f.lower.template triangularView<Eigen::Lower>() * n;
}

}  // namespace rparp
