#pragma once

#include <Eigen/Core>
#include <Eigen/SVD>

#include <cstddef>
#include <span>
#include <stdexcept>

#include "scga/errors.hpp"

namespace scga {

using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, 3>;

inline PointMatrix to_point_matrix(std::span<const Eigen::Vector3d> points) {
  PointMatrix m(static_cast<Eigen::Index>(points.size()), 3);
  for (std::size_t i = 0; i < points.size(); ++i)
    m.row(static_cast<Eigen::Index>(i)) = points[i].transpose();
  return m;
}

inline PointMatrix mean_centered(const PointMatrix& m) {
  return m.rowwise() - m.colwise().mean();
}

/// Optimal proper rotation R minimizing sum ||after_i - R * before_i||^2
/// over mean-centered correspondence matrices (rows are points).
///
/// SVD of the cross-covariance H = before^T * after = U S V^T gives
/// R = V * diag(1, 1, d) * U^T with d = sign(det(V U^T)); the diag factor
/// keeps det(R) = +1 when the best orthogonal map would be a reflection.
///
/// Throws std::domain_error for non-centered input and degenerate_error
/// when the cross-covariance is rank-deficient (collinear points).
inline Eigen::Matrix3d kabsch_rotation(const PointMatrix& before,
                                       const PointMatrix& after) {
  if (before.rows() != after.rows())
    throw std::domain_error("kabsch_rotation: row count mismatch");
  if (before.rows() < 3)
    throw std::domain_error("kabsch_rotation: need at least 3 points");
  const double extent =
      std::max({1.0, before.cwiseAbs().maxCoeff(), after.cwiseAbs().maxCoeff()});
  const double center_tol = 1e-9 * extent;
  if (before.colwise().mean().cwiseAbs().maxCoeff() > center_tol ||
      after.colwise().mean().cwiseAbs().maxCoeff() > center_tol)
    throw std::domain_error("kabsch_rotation: input is not mean-centered");

  const Eigen::Matrix3d cross = before.transpose() * after;
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(
      cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Vector3d s = svd.singularValues();
  if (!(s[1] > 1e-12 * std::max(s[0], 1e-300)))
    throw degenerate_error(
        "kabsch_rotation: rank-deficient cross-covariance (collinear points)");

  Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
  d(2, 2) = (svd.matrixV() * svd.matrixU().transpose()).determinant() < 0.0
                ? -1.0
                : 1.0;
  return svd.matrixV() * d * svd.matrixU().transpose();
}

}  // namespace scga
