#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "scga/curvature.hpp"
#include "scga/errors.hpp"
#include "scga/kabsch.hpp"
#include "scga/parallel.hpp"
#include "scga/point_cloud.hpp"
#include "scga/spatial_index.hpp"
#include "scga/transform.hpp"

namespace scga {

enum class ScaleMode { off, sqrt_ratio, literal_ratio };

/// All tunables of the shape-constrained registrar. Defaults follow the
/// recommended settings: G1 = 10000 and a 400-iteration budget, unit point
/// mass, zero initial velocity, unit time step, p = 1 (force proportional
/// to distance), equal weighting of local shapes.
struct RegistrationConfig {
  double p = 1.0;                    ///< distance exponent, >= 1
  std::optional<double> sigma;       ///< RBF spread; empty = auto (std of
                                     ///< the reference curvature values)
  GMode g_mode = GMode::plain;
  double g1 = 10000.0;               ///< schedule base constant
  int iterations = 400;              ///< iteration budget E
  double time_step = 1.0;
  ScaleMode scale_mode = ScaleMode::off;
  int pyramid_levels = 3;
  std::optional<double> convergence_tol;  ///< displacement-norm early stop;
                                          ///< empty = 1e-6 * reference
                                          ///< bounding-box diagonal
  bool momentum = false;             ///< keep d/dt as next velocity instead
                                     ///< of resetting it to zero
  bool deterministic = true;         ///< fixed summation order (always on;
                                     ///< recorded so outputs can echo it)
  std::uint64_t seed = 0;            ///< echoed into outputs

  void validate() const {
    if (!(p >= 1.0)) throw std::domain_error("config: p must be >= 1");
    if (sigma && !(*sigma > 0.0))
      throw std::domain_error("config: sigma must be positive");
    if (!(g1 > 0.0)) throw std::domain_error("config: G1 must be positive");
    if (iterations < 0)
      throw std::domain_error("config: iteration budget must be >= 0");
    if (!(time_step > 0.0))
      throw std::domain_error("config: time step must be positive");
    if (pyramid_levels < 1)
      throw std::domain_error("config: pyramid levels must be >= 1");
    if (convergence_tol && !(*convergence_tol >= 0.0))
      throw std::domain_error("config: convergence tolerance must be >= 0");
  }
};

/// One row of the per-iteration trace.
struct TraceRecord {
  int iteration = 0;
  double g = 0.0;                   ///< schedule value G(t) (0 for ICP)
  double displacement_norm = 0.0;   ///< ||d|| of the rigid-body update
  double rotation_delta_deg = 0.0;  ///< angle of this iteration's rotation
  double scale = 1.0;               ///< scale factor applied this iteration
  double rmse = std::numeric_limits<double>::quiet_NaN();  ///< vs ground
                                                           ///< truth if known
};

using IterationTrace = std::vector<TraceRecord>;

struct RegistrationResult {
  RigidTransform transform;  ///< maps the original template onto the reference
                             ///< (apply_transform semantics, about the
                             ///< original template's center of mass)
  IterationTrace trace;
  int iterations_run = 0;
  bool converged = false;    ///< displacement dropped below tolerance
};

/// Known correspondence for RMSE tracing: template point pairs.first must
/// land on target->points[pairs.second].
struct TraceTruth {
  const PointCloud* target = nullptr;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
};

/// Monotone distance kernel h(d) = d^p with p >= 1.
inline double distance_kernel(double dist, double p) {
  if (!(p >= 1.0)) throw std::domain_error("distance_kernel: p must be >= 1");
  if (!(dist >= 0.0))
    throw std::domain_error("distance_kernel: distance must be >= 0");
  if (p == 1.0) return dist;
  if (p == 2.0) return dist * dist;
  return std::pow(dist, p);
}

/// Parameters of one force evaluation. g is the (already resolved)
/// gravitational constant multiplying the sum.
struct ForceLaw {
  double g = 1.0;
  double sigma = 1.0;
  double p = 1.0;
  GMode mode = GMode::plain;
};

struct ForceField {
  std::vector<Eigen::Vector3d> per_point;
  Eigen::Vector3d net = Eigen::Vector3d::Zero();
};

/// Shape-weighted attraction of every template point toward the reference:
///   f_i = -G * sum_j g(s_ij) * h(||y_i - x_j||) * n_ij,
/// with n_ij the unit vector from x_j to y_i, so the force points from the
/// template toward the reference. Coincident pairs contribute zero.
/// Per-point sums run in a fixed index order, so results are deterministic
/// under any parallel schedule.
inline ForceField total_force(const PointCloud& templ,
                              const CurvatureField& curv_templ,
                              const PointCloud& reference,
                              const CurvatureField& curv_ref,
                              const ForceLaw& law) {
  if (curv_templ.values.size() != templ.size() ||
      curv_ref.values.size() != reference.size())
    throw std::domain_error("total_force: curvature field length mismatch");
  if (!(law.sigma > 0.0))
    throw std::domain_error("total_force: sigma must be positive");
  if (!(law.p >= 1.0)) throw std::domain_error("total_force: p must be >= 1");

  const std::size_t m = templ.size();
  const std::size_t n = reference.size();
  ForceField field;
  field.per_point.assign(m, Eigen::Vector3d::Zero());

  const double inv_sigma2 = 1.0 / (law.sigma * law.sigma);
  const bool weighted = law.mode == GMode::curvature_weighted;

  detail::parallel_chunks(m, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const Eigen::Vector3d& y = templ.points[i];
      const double a_y = curv_templ.values[i];
      Eigen::Vector3d f = Eigen::Vector3d::Zero();
      for (std::size_t j = 0; j < n; ++j) {
        const Eigen::Vector3d diff = y - reference.points[j];
        const double dist = diff.norm();
        if (dist == 0.0) continue;
        const double a_x = curv_ref.values[j];
        const double da = a_x - a_y;
        double g = std::exp(-(da * da) * inv_sigma2);
        if (weighted) g *= a_x * a_y;
        // h(d) * n_ij = d^p * diff / d = d^(p-1) * diff
        double hn;
        if (law.p == 1.0)
          hn = 1.0;
        else if (law.p == 2.0)
          hn = dist;
        else
          hn = std::pow(dist, law.p - 1.0);
        f -= g * hn * diff;
      }
      field.per_point[i] = law.g * f;
    }
  });

  for (const auto& f : field.per_point) field.net += f;
  return field;
}

/// Newtonian rigid-body displacement: d = (f/m * dt + v) * dt.
inline Eigen::Vector3d displacement(const Eigen::Vector3d& net_force,
                                    double total_mass,
                                    const Eigen::Vector3d& velocity,
                                    double time_step) {
  if (!(total_mass > 0.0))
    throw std::domain_error("displacement: total mass must be positive");
  if (!(time_step > 0.0))
    throw std::domain_error("displacement: time step must be positive");
  return (net_force / total_mass * time_step + velocity) * time_step;
}

/// Scale factor from the largest covariance eigenvalues eX (reference) and
/// eY (template). literal_ratio returns eX/eY; sqrt_ratio returns
/// sqrt(eX/eY), which recovers the true uniform scale factor because
/// covariance eigenvalues grow quadratically with scale. Both are invariant
/// to rotation and translation of either cloud.
inline double estimate_scale(const PointCloud& reference,
                             const PointCloud& templ, ScaleMode mode) {
  if (mode == ScaleMode::off)
    throw std::domain_error("estimate_scale: mode must select a ratio");
  const double e_ref = largest_eigenvalue(covariance(reference));
  const double e_templ = largest_eigenvalue(covariance(templ));
  if (!(e_templ > 0.0))
    throw std::domain_error("estimate_scale: degenerate template cloud");
  const double ratio = e_ref / e_templ;
  return mode == ScaleMode::literal_ratio ? ratio : std::sqrt(ratio);
}

/// Iteration-dependent gravitational constant:
///   G(t) = 0.1*G1 + 0.9*G1 / (1 + exp(-(t - E/2))).
/// Monotone non-decreasing in t and bounded in [0.1*G1, G1]; larger steps
/// are driven near convergence where the distance kernel has shrunk.
inline double gravitational_schedule(int t, double g1, int e) {
  if (t < 0) throw std::domain_error("gravitational_schedule: t must be >= 0");
  if (!(g1 > 0.0))
    throw std::domain_error("gravitational_schedule: G1 must be positive");
  if (e < 1) throw std::domain_error("gravitational_schedule: E must be >= 1");
  const double x = static_cast<double>(t) - static_cast<double>(e) / 2.0;
  return 0.1 * g1 + 0.9 * g1 / (1.0 + std::exp(-x));
}

/// Coarse-to-fine parameters: neighborhood radius and RBF spread halve at
/// each pyramid level.
struct LevelSchedule {
  double radius = 0.0;
  double sigma = 0.0;
};

inline LevelSchedule pyramid_schedule(int level, int levels,
                                      double base_radius, double base_sigma) {
  if (level < 0 || level >= levels)
    throw std::domain_error("pyramid_schedule: level out of range");
  const double factor = std::ldexp(1.0, -level);  // 2^-level
  return {base_radius * factor, base_sigma * factor};
}

/// Mutable loop state: current template positions, iteration counter,
/// rigid-body velocity, and the accumulated similarity transform in affine
/// form p -> scale * rotation * p + translation.
struct RegistrationState {
  PointCloud current;
  int iteration = 0;
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
  double scale = 1.0;
  double pending_scale = 1.0;  ///< level-start scale correction, consumed by
                               ///< the next step and then reset to 1
};

/// Level-resolved inputs to one iteration.
struct LevelContext {
  const CurvatureField* reference_curvature = nullptr;
  const CurvatureField* template_curvature = nullptr;
  double sigma = 1.0;
  /// Divisor turning the raw schedule value G(t) into the effective force
  /// constant; see resolve_force_denominator.
  double force_denominator = 1.0;
};

namespace detail {

/// Mean shape weight over the full template x reference pair grid, plus the
/// fraction of template points holding at least one confident match
/// (similarity >= 0.9 against some reference point).
struct PairWeightStats {
  double mean_weight = 0.0;
  double confident_fraction = 0.0;
};

inline PairWeightStats pair_weight_stats(const CurvatureField& curv_templ,
                                         const CurvatureField& curv_ref,
                                         double sigma, GMode mode) {
  const std::size_t m = curv_templ.values.size();
  const std::size_t n = curv_ref.values.size();
  if (m == 0 || n == 0) return {};
  const double inv_sigma2 = 1.0 / (sigma * sigma);
  std::vector<double> row_sums(m, 0.0);
  std::vector<double> row_best(m, 0.0);
  parallel_chunks(m, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const double a_y = curv_templ.values[i];
      double sum = 0.0;
      double best = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double a_x = curv_ref.values[j];
        const double da = a_x - a_y;
        const double s = std::exp(-(da * da) * inv_sigma2);
        best = std::max(best, s);
        sum += mode == GMode::curvature_weighted ? a_x * a_y * s : s;
      }
      row_sums[i] = sum;
      row_best[i] = best;
    }
  });
  PairWeightStats stats;
  double total = 0.0;
  std::size_t confident = 0;
  for (std::size_t i = 0; i < m; ++i) {
    total += row_sums[i];
    if (row_best[i] >= 0.9) ++confident;
  }
  stats.mean_weight =
      total / (static_cast<double>(m) * static_cast<double>(n));
  stats.confident_fraction =
      static_cast<double>(confident) / static_cast<double>(m);
  return stats;
}

inline double mean_pair_weight(const CurvatureField& curv_templ,
                               const CurvatureField& curv_ref, double sigma,
                               GMode mode) {
  return pair_weight_stats(curv_templ, curv_ref, sigma, mode).mean_weight;
}

/// The paper quotes G1 = 10000 for a working configuration but leaves the
/// force normalization unstated; summing Eq.-style pair forces directly
/// would scale the step with the reference size and the weight magnitude.
/// The engine therefore divides G(t) by
///   (10000 / 0.5) * N * mean_pair_weight * diagonal^(p-1),
/// which makes the default schedule act as a dimensionless step-gain ramp
/// from 0.05 to 0.5, independent of cloud size, weight scale, and units.
inline constexpr double kScheduleNorm = 10000.0;

/// Terminal step gain of the ramp. Must stay well below 1: at gain 1 the
/// per-point offsets reach their full pull targets and the rotation
/// extraction can lock onto 180-degree flips.
inline constexpr double kMaxStepGain = 0.5;

inline double resolve_force_denominator(std::size_t reference_size,
                                        double mean_weight, double diagonal,
                                        double p) {
  const double weight_floor = 1e-300;
  const double w = std::max(mean_weight, weight_floor);
  const double d_pow =
      p == 1.0 ? 1.0 : std::pow(std::max(diagonal, weight_floor), p - 1.0);
  return (kScheduleNorm / kMaxStepGain) * static_cast<double>(reference_size) *
         w * d_pow;
}

}  // namespace detail

/// One registration iteration: schedule value, shape-weighted forces,
/// Newtonian displacement, Kabsch rotation from the per-point force
/// offsets, optional pending scale, and the state update
///   y <- R * (c * (y - mu)) + mu + d.
/// Masses are unchanged; the accumulated transform is composed and the
/// rotation re-orthonormalized if drift exceeds 1e-9.
inline TraceRecord scga_step(RegistrationState& state,
                             const PointCloud& reference,
                             const LevelContext& ctx,
                             const RegistrationConfig& cfg) {
  if (state.iteration >= cfg.iterations)
    throw std::domain_error("scga_step: iteration budget exhausted");

  const double g_raw =
      gravitational_schedule(state.iteration, cfg.g1, cfg.iterations);
  const ForceLaw law{g_raw / ctx.force_denominator, ctx.sigma, cfg.p,
                     cfg.g_mode};
  const ForceField forces = total_force(state.current, *ctx.template_curvature,
                                        reference, *ctx.reference_curvature,
                                        law);

  const double dt = cfg.time_step;
  const Eigen::Vector3d d =
      displacement(forces.net, state.current.total_mass(), state.velocity, dt);

  // Rotation from the flow of per-point force offsets.
  const std::size_t m = state.current.size();
  PointMatrix before(static_cast<Eigen::Index>(m), 3);
  PointMatrix after(static_cast<Eigen::Index>(m), 3);
  for (std::size_t i = 0; i < m; ++i) {
    const Eigen::Vector3d& y = state.current.points[i];
    const Eigen::Vector3d moved =
        y + forces.per_point[i] * (dt * dt / state.current.masses[i]);
    before.row(static_cast<Eigen::Index>(i)) = y.transpose();
    after.row(static_cast<Eigen::Index>(i)) = moved.transpose();
  }
  const Eigen::Matrix3d rot =
      kabsch_rotation(mean_centered(before), mean_centered(after));

  const double c = state.pending_scale;
  state.pending_scale = 1.0;

  const Eigen::Vector3d mu = center_of_mass(state.current);
  for (auto& p : state.current.points) p = rot * (c * (p - mu)) + mu + d;

  state.velocity = cfg.momentum ? (d / dt).eval() : Eigen::Vector3d::Zero();

  // Compose: step(p) = c*R*p + (mu + d - c*R*mu).
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
  rec.iteration = state.iteration;
  rec.g = g_raw;
  rec.displacement_norm = d.norm();
  rec.rotation_delta_deg = rotation_angle_deg(rot);
  rec.scale = c;
  ++state.iteration;
  return rec;
}

namespace detail {

/// Mean nearest-neighbor distance over a deterministic subsample of at most
/// 64 points; rigid-invariant and scale-covariant. Used to keep pyramid
/// radii above the sampling density (a neighborhood below the point spacing
/// has no curvature signal).
inline double mean_nn_distance(const PointCloud& cloud) {
  const std::size_t n = cloud.size();
  if (n < 2) return 0.0;
  const std::size_t step = std::max<std::size_t>(1, n / 64);
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; i += step, ++count) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      best = std::min(best, (cloud.points[i] - cloud.points[j]).squaredNorm());
    }
    sum += std::sqrt(best);
  }
  return sum / static_cast<double>(count);
}

inline double rms_radius(const PointCloud& cloud) {
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& p : cloud.points) mean += p;
  mean /= static_cast<double>(cloud.size());
  double sum = 0.0;
  for (const auto& p : cloud.points) sum += (p - mean).squaredNorm();
  return std::sqrt(sum / static_cast<double>(cloud.size()));
}

inline double trace_rmse(const PointCloud& current, const TraceTruth& truth) {
  if (truth.pairs.empty()) return std::numeric_limits<double>::quiet_NaN();
  double sum = 0.0;
  for (const auto& [ti, ri] : truth.pairs)
    sum += (current.points[ti] - truth.target->points[ri]).squaredNorm();
  return std::sqrt(sum / static_cast<double>(truth.pairs.size()));
}

/// Splits the iteration budget evenly across levels; earlier levels absorb
/// the remainder.
inline std::vector<int> level_shares(int iterations, int levels) {
  std::vector<int> shares(static_cast<std::size_t>(levels), 0);
  const int base = iterations / levels;
  const int rem = iterations % levels;
  for (int l = 0; l < levels; ++l)
    shares[static_cast<std::size_t>(l)] = base + (l < rem ? 1 : 0);
  return shares;
}

}  // namespace detail

/// Registers the template onto the reference with the shape-constrained
/// gravitational loop. Runs the pyramid schedule (radius and sigma halving
/// per level, iterations split evenly, radii floored at the sampling
/// density), recomputing curvature once per level: rigid motion leaves
/// curvature invariant, and the level radii are derived per cloud so the
/// values also survive the scale correction.
///
/// Returns the accumulated transform mapping the original template onto the
/// reference. Budget exhaustion is a normal exit; `converged` reports
/// whether the displacement norm dropped below the tolerance.
inline RegistrationResult scga_register(const PointCloud& reference,
                                        const PointCloud& templ,
                                        const RegistrationConfig& cfg,
                                        const TraceTruth* truth = nullptr) {
  cfg.validate();
  reference.validate();
  templ.validate();
  if (reference.size() < 3 || templ.size() < 3)
    throw std::domain_error("scga_register: clouds need at least 3 points");

  const double diagonal = bounding_box(reference).diagonal();
  const double tol = cfg.convergence_tol.value_or(1e-6 * diagonal);

  const double e_ref = largest_eigenvalue(covariance(reference));
  if (!(e_ref > 0.0))
    throw degenerate_error("scga_register: degenerate reference cloud");
  const double base_radius_ref = std::sqrt(e_ref);

  const SpatialIndex reference_index(reference);
  const Eigen::Vector3d original_com = center_of_mass(templ);

  RegistrationState state;
  state.current = templ;

  RegistrationResult result;
  result.trace.reserve(static_cast<std::size_t>(cfg.iterations));

  const std::vector<int> shares =
      detail::level_shares(cfg.iterations, cfg.pyramid_levels);
  std::optional<double> sigma_base = cfg.sigma;

  // Level radii halve from sqrt(largest eigenvalue) but never drop below
  // the sampling density of the cloud they serve.
  const double radius_floor_ref =
      detail::kRadiusFloorFactor * detail::mean_nn_distance(reference);

  for (int level = 0; level < cfg.pyramid_levels; ++level) {
    if (shares[static_cast<std::size_t>(level)] == 0) continue;

    const double level_factor = std::ldexp(1.0, -level);
    const double radius_ref =
        std::max(base_radius_ref * level_factor, radius_floor_ref);
    const CurvatureField curv_ref =
        estimate_curvature(reference, reference_index, radius_ref);

    // Template neighborhoods must cover the same physical extent as the
    // reference ones or the curvature values stop being comparable, so the
    // template radius is the reference radius divided by the scale
    // correction (for clean scaled clouds this reduces to the template's
    // own sqrt-eigenvalue; unlike that eigenvalue it is robust to
    // outliers and missing regions).
    double scale_correction = 1.0;
    if (cfg.scale_mode != ScaleMode::off)
      scale_correction =
          estimate_scale(reference, state.current, ScaleMode::sqrt_ratio);
    const SpatialIndex template_index(state.current);
    const double radius_templ =
        std::max(base_radius_ref * level_factor / scale_correction,
                 3.0 * detail::mean_nn_distance(state.current));
    const CurvatureField curv_templ =
        estimate_curvature(state.current, template_index, radius_templ);

    // Auto spread: std of the reference curvature values at this level's
    // radius. The spread of the (clean) reference field widens as the
    // radius shrinks toward the sampling scale, so matching stays as wide
    // as the value noise at every level; a fixed base spread halved per
    // level goes deaf on noisy data. Explicit spreads follow the halving
    // schedule. Feature-less clouds fall back to 1.
    double sigma_level;
    if (sigma_base) {
      sigma_level = *sigma_base * level_factor;
    } else {
      double mean = 0.0;
      for (double v : curv_ref.values) mean += v;
      mean /= static_cast<double>(curv_ref.values.size());
      double var = 0.0;
      for (double v : curv_ref.values) var += (v - mean) * (v - mean);
      var /= static_cast<double>(curv_ref.values.size());
      const double sd = std::sqrt(var);
      sigma_level = sd > 1e-12 ? sd : 1.0;
    }
    // On the last level, if most template points still hold a near-exact
    // counterpart at a 1000x sharper spread (true for rigid copies, partial
    // overlaps, and appended-outlier inliers whose neighborhoods stayed
    // clean - curvature is rigid-invariant, so twins agree to machine
    // precision), the level locks onto those twins. That cancels the
    // equilibrium bias that one-sided unmatched regions exert, which a
    // gradual spread schedule can never fully remove.
    if (level == cfg.pyramid_levels - 1 && cfg.pyramid_levels > 1) {
      const double sigma_lock = sigma_level * 1e-3;
      const auto lock_stats = detail::pair_weight_stats(
          curv_templ, curv_ref, sigma_lock, cfg.g_mode);
      if (lock_stats.confident_fraction >= 0.5) sigma_level = sigma_lock;
    }

    const auto stats = detail::pair_weight_stats(curv_templ, curv_ref,
                                                 sigma_level, cfg.g_mode);
    LevelContext ctx;
    ctx.reference_curvature = &curv_ref;
    ctx.template_curvature = &curv_templ;
    ctx.sigma = sigma_level;
    ctx.force_denominator = detail::resolve_force_denominator(
        reference.size(), stats.mean_weight, diagonal, cfg.p);

    if (cfg.scale_mode != ScaleMode::off)
      state.pending_scale =
          estimate_scale(reference, state.current, cfg.scale_mode);

    for (int k = 0; k < shares[static_cast<std::size_t>(level)]; ++k) {
      TraceRecord rec = scga_step(state, reference, ctx, cfg);
      if (truth) rec.rmse = detail::trace_rmse(state.current, *truth);
      result.trace.push_back(rec);
      // The iteration is stationary only when translation, rotation, and
      // scale all moved the points by less than the tolerance; a pure
      // rotational misalignment has ||d|| near zero, so testing the
      // displacement alone would exit long before the pose settles.
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
      result.converged = false;
    }
  }

  result.iterations_run = state.iteration;
  result.transform.rotation = orthonormalized(state.rotation);
  result.transform.scale = state.scale;
  result.transform.translation = state.scale * (state.rotation * original_com) +
                                 state.translation - original_com;
  return result;
}

}  // namespace scga
