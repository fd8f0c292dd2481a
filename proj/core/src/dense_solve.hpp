#pragma once

#include <Eigen/Dense>

#include "antflow/errors.hpp"

namespace antflow::detail {

// Dense LU with partial pivoting. A matrix this small is either comfortably
// conditioned or genuinely singular, so a residual check is enough to tell.
inline Eigen::VectorXd solve_dense(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  if (a.rows() == 0) return Eigen::VectorXd(0);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  Eigen::VectorXd x = lu.solve(b);
  const double scale = a.cwiseAbs().maxCoeff() * x.cwiseAbs().maxCoeff() + b.cwiseAbs().maxCoeff();
  if (!x.allFinite() || (a * x - b).cwiseAbs().maxCoeff() > 1e-12 * (scale > 0 ? scale : 1.0))
    throw DisconnectedError("singular linear system");
  return x;
}

}  // namespace antflow::detail
