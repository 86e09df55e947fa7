#pragma once

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace scga {

/// Ordered 3D point set with per-point positive masses (default 1).
///
/// Point order is preserved by every operation in the library so that
/// synthetic ground-truth correspondences stay valid.
struct PointCloud {
  std::vector<Eigen::Vector3d> points;
  std::vector<double> masses;

  PointCloud() = default;

  explicit PointCloud(std::vector<Eigen::Vector3d> pts)
      : points(std::move(pts)), masses(points.size(), 1.0) {}

  PointCloud(std::vector<Eigen::Vector3d> pts, std::vector<double> m)
      : points(std::move(pts)), masses(std::move(m)) {}

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }

  double total_mass() const {
    double sum = 0.0;
    for (double m : masses) sum += m;
    return sum;
  }

  /// Throws std::domain_error if the cloud violates its invariants
  /// (non-empty, masses aligned and positive, coordinates finite).
  void validate() const {
    if (points.empty()) throw std::domain_error("point cloud is empty");
    if (masses.size() != points.size())
      throw std::domain_error("mass list length does not match point count");
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (!points[i].allFinite())
        throw std::domain_error("non-finite coordinate at point " +
                                std::to_string(i));
      if (!(masses[i] > 0.0) || !std::isfinite(masses[i]))
        throw std::domain_error("non-positive mass at point " +
                                std::to_string(i));
    }
  }
};

/// Mass-weighted mean position: sum(m_i * r_i) / sum(m_i).
inline Eigen::Vector3d center_of_mass(const PointCloud& cloud) {
  if (cloud.empty())
    throw std::domain_error("center_of_mass: empty point cloud");
  Eigen::Vector3d weighted = Eigen::Vector3d::Zero();
  double mass = 0.0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    weighted += cloud.masses[i] * cloud.points[i];
    mass += cloud.masses[i];
  }
  return weighted / mass;
}

/// Biased covariance (1/M) * sum (r_i - mean)(r_i - mean)^T over the plain
/// (unweighted) mean. Only eigenvalue ratios matter downstream, so the
/// normalizer is fixed for determinism rather than significance.
inline Eigen::Matrix3d covariance(const PointCloud& cloud) {
  if (cloud.size() < 2)
    throw std::domain_error("covariance: need at least 2 points");
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& p : cloud.points) mean += p;
  mean /= static_cast<double>(cloud.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : cloud.points) {
    const Eigen::Vector3d d = p - mean;
    cov += d * d.transpose();
  }
  return cov / static_cast<double>(cloud.size());
}

/// Axis-aligned bounding box.
struct Aabb {
  Eigen::Vector3d min;
  Eigen::Vector3d max;

  Eigen::Vector3d center() const { return 0.5 * (min + max); }
  Eigen::Vector3d extents() const { return max - min; }
  double diagonal() const { return (max - min).norm(); }

  /// Box grown about its center: extents scaled by (1 + margin).
  Aabb expanded(double margin) const {
    const Eigen::Vector3d c = center();
    const Eigen::Vector3d half = 0.5 * (1.0 + margin) * extents();
    return {c - half, c + half};
  }
};

inline Aabb bounding_box(const PointCloud& cloud) {
  if (cloud.empty()) throw std::domain_error("bounding_box: empty point cloud");
  Aabb box{cloud.points.front(), cloud.points.front()};
  for (const auto& p : cloud.points) {
    box.min = box.min.cwiseMin(p);
    box.max = box.max.cwiseMax(p);
  }
  return box;
}

/// Eigen-decomposition of a symmetric PSD matrix, reported SVD-style.
/// Eigenvalues are sorted descending and clamped at zero; eigenvector signs
/// follow a fixed convention (first nonzero component positive), so results
/// are deterministic. For symmetric PSD input, u == v and
/// u * diag(eigenvalues) * v^T reconstructs the matrix.
struct PrincipalAxes {
  Eigen::Matrix3d u;
  Eigen::Vector3d eigenvalues;
  Eigen::Matrix3d v;
};

inline PrincipalAxes principal_axes(const Eigen::Matrix3d& cov) {
  const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale)
    throw std::domain_error("principal_axes: matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
  if (solver.info() != Eigen::Success)
    throw std::domain_error("principal_axes: eigendecomposition failed");

  PrincipalAxes axes;
  // Eigen reports ascending order; flip to descending.
  for (int k = 0; k < 3; ++k) {
    axes.eigenvalues[k] = std::max(0.0, solver.eigenvalues()[2 - k]);
    Eigen::Vector3d vec = solver.eigenvectors().col(2 - k);
    for (int c = 0; c < 3; ++c) {
      if (std::abs(vec[c]) > 1e-12) {
        if (vec[c] < 0.0) vec = -vec;
        break;
      }
    }
    axes.u.col(k) = vec;
  }
  axes.v = axes.u;
  return axes;
}

/// Largest covariance eigenvalue (eX / eY in the scale model).
inline double largest_eigenvalue(const Eigen::Matrix3d& cov) {
  return principal_axes(cov).eigenvalues[0];
}

}  // namespace scga
