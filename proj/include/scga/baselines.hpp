#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "scga/engine.hpp"
#include "scga/errors.hpp"
#include "scga/kabsch.hpp"
#include "scga/parallel.hpp"
#include "scga/point_cloud.hpp"
#include "scga/spatial_index.hpp"
#include "scga/transform.hpp"

namespace scga {

/// Classic gravitational-approach parameters. The source method leaves all
/// of them free; these defaults make GA competitive on easy scenarios so
/// comparisons against it are honest.
struct GAConfig {
  double g = 10000.0;
  std::optional<double> epsilon;  ///< softening length; empty = 1% of the
                                  ///< reference bounding-box diagonal
  double eta = 0.5;               ///< friction coefficient
  int iterations = 400;
  double time_step = 1.0;
  bool with_scale = false;  ///< per-iteration positional scale estimate
  std::optional<double> convergence_tol;  ///< empty = 1e-6 * diagonal

  void validate() const {
    if (!(g > 0.0)) throw std::domain_error("ga config: G must be positive");
    if (epsilon && !(*epsilon > 0.0))
      throw std::domain_error("ga config: epsilon must be positive");
    if (!(eta >= 0.0)) throw std::domain_error("ga config: eta must be >= 0");
    if (iterations < 0)
      throw std::domain_error("ga config: iteration budget must be >= 0");
    if (!(time_step > 0.0))
      throw std::domain_error("ga config: time step must be positive");
  }
};

/// Softened inverse-square attraction with friction:
///   f_i = -G * m_i * sum_j m_j * (y_i - x_j) / (||y_i - x_j||^2 + eps^2)^(3/2)
///         - eta * v_i.
/// Matches the shape-weighted force with g = m_i * m_j and
/// h(d) = d / (d^2 + eps^2)^(3/2). Coincident pairs contribute zero
/// gravity; the softening keeps near-contact forces finite. cfg.g and
/// cfg.epsilon are used as given (epsilon must be resolved; 0 is allowed
/// here, unlike in the registrar config).
inline ForceField ga_force(const PointCloud& templ, const PointCloud& reference,
                           const GAConfig& cfg,
                           std::span<const Eigen::Vector3d> velocities) {
  if (templ.empty() || reference.empty())
    throw std::domain_error("ga_force: clouds must be non-empty");
  if (!velocities.empty() && velocities.size() != templ.size())
    throw std::domain_error("ga_force: velocity list length mismatch");
  const double eps = cfg.epsilon.value_or(0.0);
  const double eps2 = eps * eps;

  ForceField field;
  field.per_point.assign(templ.size(), Eigen::Vector3d::Zero());
  const std::size_t n = reference.size();

  detail::parallel_chunks(templ.size(), [&](std::size_t begin,
                                            std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const Eigen::Vector3d& y = templ.points[i];
      Eigen::Vector3d f = Eigen::Vector3d::Zero();
      for (std::size_t j = 0; j < n; ++j) {
        const Eigen::Vector3d diff = y - reference.points[j];
        const double d2 = diff.squaredNorm();
        if (d2 == 0.0) continue;
        const double denom = std::pow(d2 + eps2, 1.5);
        f -= reference.masses[j] / denom * diff;
      }
      f *= cfg.g * templ.masses[i];
      if (!velocities.empty()) f -= cfg.eta * velocities[i];
      field.per_point[i] = f;
    }
  });

  for (const auto& f : field.per_point) field.net += f;
  return field;
}

namespace detail {

/// Mean pair magnitude of the GA kernel at the given pose, used to
/// normalize the configured G into an effective constant (same device as
/// the shape-constrained engine; see resolve_force_denominator).
inline double ga_mean_pair_weight(const PointCloud& templ,
                                  const PointCloud& reference, double eps) {
  const double eps2 = eps * eps;
  std::vector<double> row_sums(templ.size(), 0.0);
  parallel_chunks(templ.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < reference.size(); ++j) {
        const double d2 =
            (templ.points[i] - reference.points[j]).squaredNorm();
        sum += templ.masses[i] * reference.masses[j] * std::sqrt(d2) /
               std::pow(d2 + eps2, 1.5);
      }
      row_sums[i] = sum;
    }
  });
  double total = 0.0;
  for (double s : row_sums) total += s;
  return total /
         (static_cast<double>(templ.size()) * static_cast<double>(reference.size()));
}

/// Initial relative step gain of the GA loop at the default G.
inline constexpr double kGaStepGain = 0.1;

}  // namespace detail

/// Classic GA registration: inverse-square force, Newtonian displacement,
/// Kabsch rotation from the per-point moved positions, optional positional
/// scale (ratio of centered spreads after/before the move). The effective
/// constant is normalized at the initial pose only, so the method keeps
/// its characteristic force growth (and overshoot) near convergence.
inline RegistrationResult ga_register(const PointCloud& reference,
                                      const PointCloud& templ,
                                      const GAConfig& cfg,
                                      const TraceTruth* truth = nullptr) {
  cfg.validate();
  reference.validate();
  templ.validate();
  if (reference.size() < 3 || templ.size() < 3)
    throw std::domain_error("ga_register: clouds need at least 3 points");

  const double diagonal = bounding_box(reference).diagonal();
  const double tol = cfg.convergence_tol.value_or(1e-6 * diagonal);
  const double eps = cfg.epsilon.value_or(0.01 * diagonal);

  GAConfig effective = cfg;
  effective.epsilon = eps;
  const double w0 = detail::ga_mean_pair_weight(templ, reference, eps);
  effective.g = (cfg.g / detail::kScheduleNorm) * detail::kGaStepGain *
                diagonal /
                (static_cast<double>(reference.size()) * std::max(w0, 1e-300));

  const Eigen::Vector3d original_com = center_of_mass(templ);
  RegistrationState state;
  state.current = templ;
  std::vector<Eigen::Vector3d> velocities(templ.size(),
                                          Eigen::Vector3d::Zero());

  RegistrationResult result;
  const double dt = cfg.time_step;

  for (int t = 0; t < cfg.iterations; ++t) {
    const ForceField forces =
        ga_force(state.current, reference, effective, velocities);
    const Eigen::Vector3d d = displacement(
        forces.net, state.current.total_mass(), state.velocity, dt);

    const std::size_t m = state.current.size();
    PointMatrix before(static_cast<Eigen::Index>(m), 3);
    PointMatrix after(static_cast<Eigen::Index>(m), 3);
    for (std::size_t i = 0; i < m; ++i) {
      before.row(static_cast<Eigen::Index>(i)) =
          state.current.points[i].transpose();
      after.row(static_cast<Eigen::Index>(i)) =
          (state.current.points[i] +
           forces.per_point[i] * (dt * dt / state.current.masses[i]))
              .transpose();
    }
    const PointMatrix before_c = mean_centered(before);
    const PointMatrix after_c = mean_centered(after);
    const Eigen::Matrix3d rot = kabsch_rotation(before_c, after_c);

    double c = 1.0;
    if (cfg.with_scale) {
      const double before_norm = before_c.norm();
      if (!(before_norm > 0.0))
        throw degenerate_error("ga_register: degenerate template spread");
      c = after_c.norm() / before_norm;
    }

    const Eigen::Vector3d mu = center_of_mass(state.current);
    std::vector<Eigen::Vector3d> previous = state.current.points;
    for (auto& p : state.current.points) p = rot * (c * (p - mu)) + mu + d;

    for (std::size_t i = 0; i < m; ++i)
      velocities[i] = (state.current.points[i] - previous[i]) / dt;
    state.velocity = d / dt;

    const Eigen::Vector3d step_t = mu + d - c * (rot * mu);
    state.rotation = rot * state.rotation;
    state.translation = c * (rot * state.translation) + step_t;
    state.scale *= c;
    if ((state.rotation.transpose() * state.rotation -
         Eigen::Matrix3d::Identity())
            .cwiseAbs()
            .maxCoeff() > 1e-9)
      state.rotation = orthonormalized(state.rotation);

    TraceRecord rec;
    rec.iteration = t;
    rec.g = cfg.g;
    rec.displacement_norm = d.norm();
    rec.rotation_delta_deg = rotation_angle_deg(rot);
    rec.scale = c;
    if (truth) rec.rmse = detail::trace_rmse(state.current, *truth);
    result.trace.push_back(rec);
    ++state.iteration;
    const double spin_motion = rec.rotation_delta_deg *
                               (std::numbers::pi / 180.0) *
                               detail::rms_radius(state.current);
    const double scale_motion =
        std::abs(rec.scale - 1.0) * detail::rms_radius(state.current);
    if (rec.displacement_norm < tol && spin_motion < tol &&
        scale_motion < tol) {
      result.converged = true;
      break;
    }
  }

  result.iterations_run = state.iteration;
  result.transform.rotation = orthonormalized(state.rotation);
  result.transform.scale = state.scale;
  result.transform.translation = state.scale * (state.rotation * original_com) +
                                 state.translation - original_com;
  return result;
}

/// Plain point-to-point ICP: nearest-neighbor correspondences against the
/// reference, Kabsch alignment, repeat until the mean-squared correspondence
/// distance improves by less than tol or the budget runs out. No trimming
/// or robust kernels.
inline RegistrationResult icp_register(const PointCloud& reference,
                                       const PointCloud& templ,
                                       int max_iterations, double tol,
                                       const TraceTruth* truth = nullptr) {
  reference.validate();
  templ.validate();
  if (max_iterations < 0)
    throw std::domain_error("icp_register: iteration budget must be >= 0");
  if (!(tol >= 0.0)) throw std::domain_error("icp_register: tol must be >= 0");
  if (reference.size() < 3 || templ.size() < 3)
    throw std::domain_error("icp_register: clouds need at least 3 points");

  const SpatialIndex reference_index(reference);
  const Eigen::Vector3d original_com = center_of_mass(templ);

  PointCloud current = templ;
  Eigen::Matrix3d acc_rot = Eigen::Matrix3d::Identity();
  Eigen::Vector3d acc_t = Eigen::Vector3d::Zero();

  RegistrationResult result;
  double prev_mse = std::numeric_limits<double>::infinity();

  for (int t = 0; t < max_iterations; ++t) {
    const std::size_t m = current.size();
    std::vector<std::size_t> nn(m);
    detail::parallel_chunks(m, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i)
        nn[i] = reference_index.nearest(current.points[i]);
    });

    double mse = 0.0;
    PointMatrix before(static_cast<Eigen::Index>(m), 3);
    PointMatrix after(static_cast<Eigen::Index>(m), 3);
    for (std::size_t i = 0; i < m; ++i) {
      const Eigen::Vector3d& target = reference.points[nn[i]];
      mse += (current.points[i] - target).squaredNorm();
      before.row(static_cast<Eigen::Index>(i)) =
          current.points[i].transpose();
      after.row(static_cast<Eigen::Index>(i)) = target.transpose();
    }
    mse /= static_cast<double>(m);

    Eigen::Matrix3d rot;
    try {
      rot = kabsch_rotation(mean_centered(before), mean_centered(after));
    } catch (const degenerate_error&) {
      throw degenerate_error("icp_register: degenerate correspondence set");
    }
    const Eigen::Vector3d mean_before = before.colwise().mean();
    const Eigen::Vector3d mean_after = after.colwise().mean();
    const Eigen::Vector3d t_vec = mean_after - rot * mean_before;

    for (auto& p : current.points) p = rot * p + t_vec;
    acc_rot = rot * acc_rot;
    acc_t = rot * acc_t + t_vec;

    TraceRecord rec;
    rec.iteration = t;
    rec.g = 0.0;
    rec.displacement_norm = (mean_after - mean_before).norm();
    rec.rotation_delta_deg = rotation_angle_deg(rot);
    rec.scale = 1.0;
    if (truth) rec.rmse = detail::trace_rmse(current, *truth);
    result.trace.push_back(rec);
    result.iterations_run = t + 1;

    if (prev_mse - mse < tol) {
      result.converged = true;
      break;
    }
    prev_mse = mse;
  }

  result.transform.rotation = orthonormalized(acc_rot);
  result.transform.scale = 1.0;
  result.transform.translation =
      acc_rot * original_com + acc_t - original_com;
  return result;
}

}  // namespace scga
