#pragma once

#include <Eigen/Core>
#include <Eigen/SVD>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "scga/point_cloud.hpp"

namespace scga {

inline bool is_rotation(const Eigen::Matrix3d& m, double tol = 1e-9) {
  const Eigen::Matrix3d gram = m.transpose() * m;
  return (gram - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() <= tol &&
         std::abs(m.determinant() - 1.0) <= tol;
}

/// Similarity transform: uniform scale, proper rotation, translation.
/// Applied to a cloud it acts about the cloud's center of mass:
///   p -> scale * rotation * (p - com) + com + translation.
struct RigidTransform {
  Eigen::Matrix3d rotation{Eigen::Matrix3d::Identity()};
  Eigen::Vector3d translation{Eigen::Vector3d::Zero()};
  double scale{1.0};

  static RigidTransform identity() { return {}; }

  bool is_identity() const {
    return rotation == Eigen::Matrix3d::Identity() &&
           translation == Eigen::Vector3d::Zero() && scale == 1.0;
  }

  void validate(double tol = 1e-9) const {
    if (!is_rotation(rotation, tol))
      throw std::domain_error("transform rotation is not orthonormal");
    if (!(scale > 0.0) || !std::isfinite(scale))
      throw std::domain_error("transform scale must be positive and finite");
    if (!translation.allFinite())
      throw std::domain_error("transform translation is not finite");
  }
};

/// Rotation angle in radians from the trace of a rotation matrix.
inline double rotation_angle_rad(const Eigen::Matrix3d& r) {
  const double c = std::clamp((r.trace() - 1.0) / 2.0, -1.0, 1.0);
  return std::acos(c);
}

inline double rotation_angle_deg(const Eigen::Matrix3d& r) {
  return rotation_angle_rad(r) * 180.0 / std::numbers::pi;
}

/// Nearest proper rotation under the Frobenius norm (SVD projection).
inline Eigen::Matrix3d orthonormalized(const Eigen::Matrix3d& m) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(
      m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d r = svd.matrixU() * svd.matrixV().transpose();
  if (r.determinant() < 0.0) {
    Eigen::Matrix3d flip = Eigen::Matrix3d::Identity();
    flip(2, 2) = -1.0;
    r = svd.matrixU() * flip * svd.matrixV().transpose();
  }
  return r;
}

/// Rodrigues rotation about a (non-zero) axis.
inline Eigen::Matrix3d axis_angle_rotation(const Eigen::Vector3d& axis,
                                           double radians) {
  const double n = axis.norm();
  if (!(n > 0.0)) throw std::domain_error("axis_angle_rotation: zero axis");
  const Eigen::Vector3d u = axis / n;
  Eigen::Matrix3d k;
  k << 0, -u.z(), u.y(), u.z(), 0, -u.x(), -u.y(), u.x(), 0;
  return Eigen::Matrix3d::Identity() + std::sin(radians) * k +
         (1.0 - std::cos(radians)) * k * k;
}

/// R = Rz * Ry * Rx from per-axis angles in degrees.
inline Eigen::Matrix3d euler_xyz_rotation_deg(double rx_deg, double ry_deg,
                                              double rz_deg) {
  const double to_rad = std::numbers::pi / 180.0;
  const Eigen::Matrix3d rx =
      axis_angle_rotation(Eigen::Vector3d::UnitX(), rx_deg * to_rad);
  const Eigen::Matrix3d ry =
      axis_angle_rotation(Eigen::Vector3d::UnitY(), ry_deg * to_rad);
  const Eigen::Matrix3d rz =
      axis_angle_rotation(Eigen::Vector3d::UnitZ(), rz_deg * to_rad);
  return rz * ry * rx;
}

/// Applies scale, then rotation about the cloud's center of mass, then
/// restores the center and adds the translation. Masses are unchanged.
/// An exact identity transform returns the points bitwise unchanged.
inline PointCloud apply_transform(const PointCloud& cloud,
                                  const RigidTransform& t) {
  t.validate();
  cloud.validate();
  if (t.is_identity()) return cloud;
  const Eigen::Vector3d com = center_of_mass(cloud);
  PointCloud out = cloud;
  for (auto& p : out.points)
    p = t.scale * (t.rotation * (p - com)) + com + t.translation;
  return out;
}

}  // namespace scga
