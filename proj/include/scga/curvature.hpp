#pragma once

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <atomic>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "scga/parallel.hpp"
#include "scga/point_cloud.hpp"
#include "scga/spatial_index.hpp"

namespace scga {

/// Per-point curvature values aligned with a cloud, plus the neighborhood
/// radius they were computed at. sparse_count reports how many points had
/// fewer than 4 in-radius neighbors and were assigned curvature 0.
struct CurvatureField {
  std::vector<double> values;
  double radius = 0.0;
  std::size_t sparse_count = 0;
};

/// Default neighborhood radius: sqrt of the cloud's largest covariance
/// eigenvalue. Scales linearly with the cloud and is rotation-invariant.
inline double neighborhood_radius(const PointCloud& cloud) {
  const double e = largest_eigenvalue(covariance(cloud));
  if (!(e > 0.0))
    throw std::domain_error("neighborhood_radius: degenerate cloud");
  return std::sqrt(e);
}

/// Surface variation per point: with local covariance eigenvalues
/// l0 <= l1 <= l2 over the in-radius neighborhood, curvature is
/// l0 / (l0 + l1 + l2), in [0, 1/3]. Zero on planes, ~1/3 for isotropic
/// scatter. Points with fewer than 4 neighbors (self included) get 0.
inline CurvatureField estimate_curvature(const PointCloud& cloud,
                                         const SpatialIndex& index,
                                         double radius) {
  if (!(radius > 0.0))
    throw std::domain_error("estimate_curvature: radius must be positive");
  if (index.size() != cloud.size())
    throw std::domain_error("estimate_curvature: index/cloud size mismatch");

  CurvatureField field;
  field.radius = radius;
  field.values.assign(cloud.size(), 0.0);
  std::atomic<std::size_t> sparse{0};

  detail::parallel_chunks(cloud.size(), [&](std::size_t begin,
                                            std::size_t end) {
    std::vector<std::size_t> neighbors;
    std::size_t local_sparse = 0;
    for (std::size_t i = begin; i < end; ++i) {
      index.radius_neighbors(cloud.points[i], radius, neighbors);
      if (neighbors.size() < 4) {
        ++local_sparse;
        continue;
      }
      Eigen::Vector3d mean = Eigen::Vector3d::Zero();
      for (std::size_t j : neighbors) mean += cloud.points[j];
      mean /= static_cast<double>(neighbors.size());
      Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
      for (std::size_t j : neighbors) {
        const Eigen::Vector3d d = cloud.points[j] - mean;
        cov += d * d.transpose();
      }
      cov /= static_cast<double>(neighbors.size());
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver;
      solver.compute(cov, Eigen::EigenvaluesOnly);
      const double l0 = std::max(0.0, solver.eigenvalues()[0]);
      const double sum = std::max(0.0, solver.eigenvalues().sum());
      field.values[i] = sum > 0.0 ? l0 / sum : 0.0;
    }
    sparse.fetch_add(local_sparse, std::memory_order_relaxed);
  });

  field.sparse_count = sparse.load();
  return field;
}

/// RBF shape similarity of two curvature values: exp(-|a_x - a_y|^2 / s^2).
inline double similarity(double a_x, double a_y, double sigma) {
  if (!(sigma > 0.0))
    throw std::domain_error("similarity: sigma must be positive");
  const double d = a_x - a_y;
  return std::exp(-(d * d) / (sigma * sigma));
}

/// Weighting applied to the similarity inside the force law.
enum class GMode {
  plain,               ///< g(s) = s: equal weight to all local shapes
  curvature_weighted,  ///< g(s) = a_x * a_y * s: favors non-planar shapes
};

inline double shape_weight(double a_x, double a_y, double sigma, GMode mode) {
  const double s = similarity(a_x, a_y, sigma);
  return mode == GMode::plain ? s : a_x * a_y * s;
}

}  // namespace scga
