#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "scga/point_cloud.hpp"
#include "scga/rng.hpp"
#include "scga/transform.hpp"

namespace scga {

// ---------------------------------------------------------------------------
// Procedural proxy shapes
// ---------------------------------------------------------------------------

enum class ShapeKind {
  sphere_blob,     ///< uniform samples on a unit sphere
  two_lobe,        ///< small lobe offset atop a large lobe (bunny proxy)
  humanoid_proxy,  ///< ellipsoid torso, head, arms, legs
  plane_patch,     ///< uniform samples on a square patch of z = 0
  box_blob,        ///< uniform samples in a solid box (structured outlier)
};

inline ShapeKind shape_kind_from_string(const std::string& name) {
  if (name == "sphere-blob") return ShapeKind::sphere_blob;
  if (name == "two-lobe") return ShapeKind::two_lobe;
  if (name == "humanoid-proxy") return ShapeKind::humanoid_proxy;
  if (name == "plane-patch") return ShapeKind::plane_patch;
  if (name == "box-blob") return ShapeKind::box_blob;
  throw std::domain_error("unknown shape kind: " + name);
}

namespace detail {

inline Eigen::Vector3d unit_sphere_sample(Rng& rng) {
  for (;;) {
    const Eigen::Vector3d v(rng.normal(), rng.normal(), rng.normal());
    const double n = v.norm();
    if (n > 1e-12) return v / n;
  }
}

inline void append_sphere(std::vector<Eigen::Vector3d>& out, std::size_t count,
                          const Eigen::Vector3d& center, double radius,
                          Rng& rng) {
  for (std::size_t i = 0; i < count; ++i)
    out.push_back(center + radius * unit_sphere_sample(rng));
}

inline void append_ellipsoid(std::vector<Eigen::Vector3d>& out,
                             std::size_t count, const Eigen::Vector3d& center,
                             const Eigen::Vector3d& semi_axes, Rng& rng) {
  for (std::size_t i = 0; i < count; ++i) {
    const Eigen::Vector3d u = unit_sphere_sample(rng);
    out.push_back(center + semi_axes.cwiseProduct(u));
  }
}

/// Splits n into parts proportional to the weights; earlier parts absorb
/// the rounding remainder.
inline std::vector<std::size_t> partition_counts(
    std::size_t n, std::span<const double> weights) {
  std::vector<std::size_t> counts(weights.size(), 0);
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    counts[i] = static_cast<std::size_t>(
        std::floor(weights[i] * static_cast<double>(n)));
    assigned += counts[i];
  }
  for (std::size_t i = 0; assigned < n; i = (i + 1) % counts.size()) {
    ++counts[i];
    ++assigned;
  }
  return counts;
}

}  // namespace detail

namespace detail {

struct ShapePart {
  Eigen::Vector3d center;
  Eigen::Vector3d semi_axes;
  double weight;
};

inline PointCloud sample_parts(std::size_t n, Rng& rng,
                               std::span<const ShapePart> parts) {
  std::vector<double> weights;
  for (const auto& p : parts) weights.push_back(p.weight);
  const auto counts = partition_counts(n, weights);
  std::vector<Eigen::Vector3d> pts;
  pts.reserve(n);
  for (std::size_t k = 0; k < parts.size(); ++k)
    append_ellipsoid(pts, counts[k], parts[k].center, parts[k].semi_axes, rng);
  return PointCloud(std::move(pts));
}

// Sitting-bunny layout: body lobe, head lobe on top, ear rods above the
// head, paw and leg rods at the base. The distinctly sized appendages give
// the cloud well-separated curvature classes on non-collinear centroids,
// which is what makes a big rotation recoverable; a bare two-sphere union
// is axially symmetric and leaves one rotational degree of freedom loose.
inline const ShapePart kTwoLobeParts[] = {
    {{0.0, 0.0, 0.0}, {0.62, 0.45, 0.80}, 0.40},     // body
    {{0.42, 0.0, 0.92}, {0.26, 0.24, 0.26}, 0.12},   // head
    {{0.50, 0.16, 1.52}, {0.09, 0.09, 0.42}, 0.05},  // ears
    {{0.50, -0.16, 1.52}, {0.09, 0.09, 0.42}, 0.05},
    {{0.45, 0.40, -0.95}, {0.11, 0.11, 0.40}, 0.095},  // front paws
    {{0.45, -0.40, -0.95}, {0.11, 0.11, 0.40}, 0.095},
    {{-0.45, 0.42, -0.90}, {0.14, 0.14, 0.50}, 0.095},  // hind legs
    {{-0.45, -0.42, -0.90}, {0.14, 0.14, 0.50}, 0.095},
};

inline const ShapePart kHumanoidParts[] = {
    {{0.0, 0.0, 0.0}, {0.35, 0.22, 0.62}, 0.34},      // torso
    {{0.0, 0.0, 0.95}, {0.22, 0.22, 0.22}, 0.10},     // head
    {{0.52, 0.0, 0.10}, {0.10, 0.10, 0.45}, 0.09},    // arms
    {{-0.52, 0.0, 0.10}, {0.10, 0.10, 0.45}, 0.09},
    {{0.20, 0.0, -1.15}, {0.13, 0.13, 0.55}, 0.19},   // legs
    {{-0.20, 0.0, -1.15}, {0.13, 0.13, 0.55}, 0.19},
};

}  // namespace detail

/// Procedurally generated stand-ins for the scan datasets.
inline PointCloud make_shape(ShapeKind kind, std::size_t n, Rng& rng) {
  if (n < 10) throw std::domain_error("make_shape: need at least 10 points");
  std::vector<Eigen::Vector3d> pts;
  pts.reserve(n);
  switch (kind) {
    case ShapeKind::sphere_blob:
      detail::append_sphere(pts, n, Eigen::Vector3d::Zero(), 1.0, rng);
      break;
    case ShapeKind::two_lobe:
      return detail::sample_parts(n, rng, detail::kTwoLobeParts);
    case ShapeKind::humanoid_proxy:
      return detail::sample_parts(n, rng, detail::kHumanoidParts);
    case ShapeKind::plane_patch:
      for (std::size_t i = 0; i < n; ++i)
        pts.emplace_back(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), 0.0);
      break;
    case ShapeKind::box_blob:
      for (std::size_t i = 0; i < n; ++i)
        pts.emplace_back(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5),
                         rng.uniform(-0.5, 0.5));
      break;
  }
  return PointCloud(std::move(pts));
}

// ---------------------------------------------------------------------------
// Random transforms
// ---------------------------------------------------------------------------

struct TransformRanges {
  Eigen::Vector3d max_rotation_deg = Eigen::Vector3d::Zero();
  double max_translation = 0.0;  ///< absolute, per component
  std::pair<double, double> scale_range = {1.0, 1.0};
};

/// Per-axis rotation angles and translation components drawn uniformly
/// within their ranges; scale uniform in its range. Zero ranges give the
/// exact identity. The rotation is composed as Rz * Ry * Rx and is always
/// proper.
inline RigidTransform random_rigid_transform(Rng& rng,
                                             const TransformRanges& ranges) {
  if ((ranges.max_rotation_deg.array() < 0).any() ||
      ranges.max_translation < 0 || !(ranges.scale_range.first > 0.0) ||
      ranges.scale_range.second < ranges.scale_range.first)
    throw std::domain_error("random_rigid_transform: invalid ranges");
  const double rx = rng.uniform(-ranges.max_rotation_deg.x(),
                                ranges.max_rotation_deg.x());
  const double ry = rng.uniform(-ranges.max_rotation_deg.y(),
                                ranges.max_rotation_deg.y());
  const double rz = rng.uniform(-ranges.max_rotation_deg.z(),
                                ranges.max_rotation_deg.z());
  RigidTransform t;
  t.rotation = euler_xyz_rotation_deg(rx, ry, rz);
  for (int c = 0; c < 3; ++c)
    t.translation[c] =
        rng.uniform(-ranges.max_translation, ranges.max_translation);
  t.scale = rng.uniform(ranges.scale_range.first, ranges.scale_range.second);
  return t;
}

// ---------------------------------------------------------------------------
// Ground truth bookkeeping
// ---------------------------------------------------------------------------

/// Which template points correspond to real reference points, and where the
/// template truly came from. reference_index[i] is the reference point that
/// template point i corresponds to, or -1 for appended outliers. The map
/// survives composition of corruptions.
struct GroundTruth {
  RigidTransform true_transform;
  std::vector<std::ptrdiff_t> reference_index;

  static GroundTruth identity_map(std::size_t n,
                                  const RigidTransform& transform) {
    GroundTruth truth;
    truth.true_transform = transform;
    truth.reference_index.resize(n);
    std::iota(truth.reference_index.begin(), truth.reference_index.end(), 0);
    return truth;
  }

  std::vector<std::size_t> inlier_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < reference_index.size(); ++i)
      if (reference_index[i] >= 0) out.push_back(i);
    return out;
  }

  std::vector<std::pair<std::size_t, std::size_t>> correspondence_pairs()
      const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < reference_index.size(); ++i)
      if (reference_index[i] >= 0)
        out.emplace_back(i, static_cast<std::size_t>(reference_index[i]));
    return out;
  }
};

struct CorruptedCloud {
  PointCloud cloud;
  GroundTruth truth;
};

// ---------------------------------------------------------------------------
// Corruptions
// ---------------------------------------------------------------------------

/// Appends round(fraction * N) points drawn uniformly in the cloud's
/// bounding box expanded by 10%. Appended points carry unit mass and are
/// excluded from the inlier bookkeeping.
inline CorruptedCloud add_uniform_outliers(const PointCloud& cloud,
                                           const GroundTruth& truth,
                                           double fraction, Rng& rng) {
  if (!(fraction >= 0.0 && fraction <= 1.0))
    throw std::domain_error("add_uniform_outliers: fraction must be in [0,1]");
  const auto count = static_cast<std::size_t>(
      std::llround(fraction * static_cast<double>(cloud.size())));
  const Aabb box = bounding_box(cloud).expanded(0.10);
  CorruptedCloud out{cloud, truth};
  for (std::size_t k = 0; k < count; ++k) {
    Eigen::Vector3d p;
    for (int c = 0; c < 3; ++c) p[c] = rng.uniform(box.min[c], box.max[c]);
    out.cloud.points.push_back(p);
    out.cloud.masses.push_back(1.0);
    out.truth.reference_index.push_back(-1);
  }
  return out;
}

/// Appends round(fraction * N) points drawn from a Gaussian with the
/// cloud's mean and covariance.
inline CorruptedCloud add_gaussian_outliers(const PointCloud& cloud,
                                            const GroundTruth& truth,
                                            double fraction, Rng& rng) {
  if (!(fraction >= 0.0 && fraction <= 1.0))
    throw std::domain_error(
        "add_gaussian_outliers: fraction must be in [0,1]");
  const auto count = static_cast<std::size_t>(
      std::llround(fraction * static_cast<double>(cloud.size())));
  CorruptedCloud out{cloud, truth};
  if (count == 0) return out;

  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& p : cloud.points) mean += p;
  mean /= static_cast<double>(cloud.size());
  const PrincipalAxes axes = principal_axes(covariance(cloud));
  const Eigen::Matrix3d sqrt_cov =
      axes.u * axes.eigenvalues.cwiseSqrt().asDiagonal();

  for (std::size_t k = 0; k < count; ++k) {
    const Eigen::Vector3d z(rng.normal(), rng.normal(), rng.normal());
    out.cloud.points.push_back(mean + sqrt_cov * z);
    out.cloud.masses.push_back(1.0);
    out.truth.reference_index.push_back(-1);
  }
  return out;
}

/// Appends a coherent extra shape: the outlier cloud resampled (with
/// replacement) to round(mass_ratio * N) points, centered one host
/// bounding-box width away along +x.
inline CorruptedCloud add_structured_outlier(const PointCloud& cloud,
                                             const GroundTruth& truth,
                                             const PointCloud& shape,
                                             double mass_ratio, Rng& rng) {
  if (!(mass_ratio > 0.0))
    throw std::domain_error(
        "add_structured_outlier: mass ratio must be positive");
  shape.validate();
  const auto count = static_cast<std::size_t>(
      std::llround(mass_ratio * static_cast<double>(cloud.size())));
  CorruptedCloud out{cloud, truth};
  if (count == 0) return out;

  const Aabb host_box = bounding_box(cloud);
  const Eigen::Vector3d offset =
      host_box.center() + Eigen::Vector3d(host_box.extents().x(), 0.0, 0.0);
  Eigen::Vector3d shape_mean = Eigen::Vector3d::Zero();
  for (const auto& p : shape.points) shape_mean += p;
  shape_mean /= static_cast<double>(shape.size());

  for (std::size_t k = 0; k < count; ++k) {
    auto pick = static_cast<std::size_t>(
        rng.uniform() * static_cast<double>(shape.size()));
    pick = std::min(pick, shape.size() - 1);
    out.cloud.points.push_back(shape.points[pick] - shape_mean + offset);
    out.cloud.masses.push_back(1.0);
    out.truth.reference_index.push_back(-1);
  }
  return out;
}

/// Removes the round(fraction * N) points nearest to the seed point: a
/// spatially contiguous hole ("consecutive points" read geometrically,
/// since storage order is scanner-dependent). Distance ties resolve by
/// index; survivors keep their relative order.
inline CorruptedCloud delete_region(const PointCloud& cloud,
                                    const GroundTruth& truth, double fraction,
                                    std::size_t seed_point_index) {
  if (!(fraction >= 0.0) || fraction >= 1.0)
    throw std::domain_error("delete_region: fraction must be in [0,1)");
  if (seed_point_index >= cloud.size())
    throw std::domain_error("delete_region: seed index out of range");
  if (truth.reference_index.size() != cloud.size())
    throw std::domain_error("delete_region: ground-truth length mismatch");
  const auto count = static_cast<std::size_t>(
      std::llround(fraction * static_cast<double>(cloud.size())));

  std::vector<std::size_t> order(cloud.size());
  std::iota(order.begin(), order.end(), 0);
  const Eigen::Vector3d seed = cloud.points[seed_point_index];
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     const double da = (cloud.points[a] - seed).squaredNorm();
                     const double db = (cloud.points[b] - seed).squaredNorm();
                     if (da != db) return da < db;
                     return a < b;
                   });
  std::vector<bool> removed(cloud.size(), false);
  for (std::size_t k = 0; k < count; ++k) removed[order[k]] = true;

  CorruptedCloud out;
  out.truth.true_transform = truth.true_transform;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (removed[i]) continue;
    out.cloud.points.push_back(cloud.points[i]);
    out.cloud.masses.push_back(cloud.masses[i]);
    out.truth.reference_index.push_back(truth.reference_index[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Error metric
// ---------------------------------------------------------------------------

/// Root-mean-square error over index-aligned inlier correspondences:
/// sqrt(mean over inliers of ||registered_i - target_i||^2).
inline double rmse(const PointCloud& registered, const PointCloud& target,
                   std::span<const std::size_t> inliers) {
  if (inliers.empty()) throw std::domain_error("rmse: empty inlier set");
  double sum = 0.0;
  for (std::size_t i : inliers) {
    if (i >= registered.size() || i >= target.size())
      throw std::domain_error("rmse: inlier index out of range");
    sum += (registered.points[i] - target.points[i]).squaredNorm();
  }
  return std::sqrt(sum / static_cast<double>(inliers.size()));
}

/// RMSE of a registered template against the reference over the ground
/// truth correspondence map.
inline double rmse(const PointCloud& registered, const PointCloud& reference,
                   const GroundTruth& truth) {
  const auto pairs = truth.correspondence_pairs();
  if (pairs.empty()) throw std::domain_error("rmse: empty inlier set");
  double sum = 0.0;
  for (const auto& [ti, ri] : pairs)
    sum += (registered.points[ti] - reference.points[ri]).squaredNorm();
  return std::sqrt(sum / static_cast<double>(pairs.size()));
}

}  // namespace scga
