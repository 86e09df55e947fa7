#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "scga/baselines.hpp"
#include "scga/engine.hpp"
#include "scga/point_cloud.hpp"
#include "scga/rng.hpp"
#include "scga/synthesis.hpp"
#include "scga/transform.hpp"

namespace scga {

enum class NoiseKind { gaussian, uniform };

inline const char* to_string(NoiseKind kind) {
  return kind == NoiseKind::gaussian ? "gaussian" : "uniform";
}

/// Sweep definition for the unstructured-outlier comparison protocol:
/// for every (noise type, fraction, trial), draw a random similarity
/// transform, corrupt the transformed template, and register it back with
/// each algorithm. The whole table is a pure function of the master seed.
struct ProtocolSpec {
  ShapeKind shape = ShapeKind::two_lobe;
  std::size_t point_count = 150;
  std::vector<NoiseKind> noise_types = {NoiseKind::gaussian,
                                        NoiseKind::uniform};
  std::vector<double> fractions = {0.05, 0.10, 0.20, 0.40, 0.50};
  int trials = 50;
  std::vector<std::string> algorithms = {"scga", "ga", "icp"};
  Eigen::Vector3d max_rotation_deg = {50.0, 50.0, 50.0};
  double translation_frac = 0.2;  ///< of the reference bounding-box diagonal
  std::uint64_t master_seed = 1;
  bool zero_runtime = false;  ///< write runtime_ms as 0 (deterministic mode)

  RegistrationConfig scga_config;
  GAConfig ga_config;
  int icp_max_iterations = 100;
  std::optional<double> icp_tol;  ///< empty = 1e-12 * diagonal^2

  void validate() const {
    if (trials < 1) throw std::domain_error("protocol: trials must be >= 1");
    if (noise_types.empty() || fractions.empty() || algorithms.empty())
      throw std::domain_error("protocol: empty sweep dimension");
    for (const auto& a : algorithms)
      if (a != "scga" && a != "ga" && a != "icp")
        throw std::domain_error("protocol: unknown algorithm: " + a);
  }
};

struct ResultRow {
  std::string noise_type;
  double fraction = 0.0;
  int trial = 0;
  std::string algorithm;
  double rmse = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
  double runtime_ms = 0.0;
  bool failed = false;  ///< registrar raised; rmse is NaN
};

struct Scenario {
  PointCloud reference;
  PointCloud template_cloud;
  GroundTruth truth;
};

/// One protocol scenario: reference shape, randomly transformed template,
/// outliers appended to the template.
inline Scenario make_protocol_scenario(const ProtocolSpec& spec,
                                       NoiseKind noise, double fraction,
                                       Rng& rng) {
  Scenario scenario;
  scenario.reference = make_shape(spec.shape, spec.point_count, rng);

  TransformRanges ranges;
  ranges.max_rotation_deg = spec.max_rotation_deg;
  ranges.max_translation =
      spec.translation_frac * bounding_box(scenario.reference).diagonal();
  const RigidTransform t = random_rigid_transform(rng, ranges);

  PointCloud templ = apply_transform(scenario.reference, t);
  GroundTruth truth = GroundTruth::identity_map(templ.size(), t);

  CorruptedCloud corrupted =
      noise == NoiseKind::gaussian
          ? add_gaussian_outliers(templ, truth, fraction, rng)
          : add_uniform_outliers(templ, truth, fraction, rng);
  scenario.template_cloud = std::move(corrupted.cloud);
  scenario.truth = std::move(corrupted.truth);
  return scenario;
}

/// Runs one algorithm on a scenario and reports the inlier RMSE of the
/// registered template against the reference.
inline ResultRow run_algorithm(const std::string& algorithm,
                               const Scenario& scenario,
                               const ProtocolSpec& spec) {
  ResultRow row;
  row.algorithm = algorithm;
  const auto start = std::chrono::steady_clock::now();
  try {
    RegistrationResult result;
    if (algorithm == "scga") {
      result = scga_register(scenario.reference, scenario.template_cloud,
                             spec.scga_config);
    } else if (algorithm == "ga") {
      result = ga_register(scenario.reference, scenario.template_cloud,
                           spec.ga_config);
    } else if (algorithm == "icp") {
      const double tol = spec.icp_tol.value_or(
          1e-12 * std::pow(bounding_box(scenario.reference).diagonal(), 2));
      result = icp_register(scenario.reference, scenario.template_cloud,
                            spec.icp_max_iterations, tol);
    } else {
      throw std::domain_error("unknown algorithm: " + algorithm);
    }
    const PointCloud registered =
        apply_transform(scenario.template_cloud, result.transform);
    row.rmse = rmse(registered, scenario.reference, scenario.truth);
    row.iterations = result.iterations_run;
  } catch (const degenerate_error&) {
    row.failed = true;
  } catch (const std::domain_error&) {
    row.failed = true;
  }
  const auto stop = std::chrono::steady_clock::now();
  row.runtime_ms =
      spec.zero_runtime
          ? 0.0
          : std::chrono::duration<double, std::milli>(stop - start).count();
  return row;
}

/// Full sweep. Each (noise type, fraction, trial) cell owns a seed derived
/// from the master seed, so the table is reproducible and insensitive to
/// execution order; every algorithm sees the same scenario within a cell.
inline std::vector<ResultRow> run_protocol(const ProtocolSpec& spec) {
  spec.validate();
  std::vector<ResultRow> rows;
  rows.reserve(spec.noise_types.size() * spec.fractions.size() *
               static_cast<std::size_t>(spec.trials) * spec.algorithms.size());

  for (std::size_t ni = 0; ni < spec.noise_types.size(); ++ni) {
    for (std::size_t fi = 0; fi < spec.fractions.size(); ++fi) {
      for (int trial = 0; trial < spec.trials; ++trial) {
        const std::uint64_t cell_seed = Rng::derive(
            Rng::derive(Rng::derive(spec.master_seed, ni), fi),
            static_cast<std::uint64_t>(trial));
        Rng rng(cell_seed);
        const Scenario scenario = make_protocol_scenario(
            spec, spec.noise_types[ni], spec.fractions[fi], rng);
        for (const auto& algorithm : spec.algorithms) {
          ResultRow row = run_algorithm(algorithm, scenario, spec);
          row.noise_type = to_string(spec.noise_types[ni]);
          row.fraction = spec.fractions[fi];
          row.trial = trial;
          rows.push_back(std::move(row));
        }
      }
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Reporting
// ---------------------------------------------------------------------------

namespace detail {

inline std::string format_double(double v, const char* fmt = "%.9g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

}  // namespace detail

inline void write_results_csv(std::ostream& os,
                              std::span<const ResultRow> rows) {
  os << "noise_type,fraction,trial,algorithm,rmse,iterations,runtime_ms\n";
  for (const auto& row : rows) {
    os << row.noise_type << ',' << detail::format_double(row.fraction) << ','
       << row.trial << ',' << row.algorithm << ','
       << detail::format_double(row.rmse) << ',' << row.iterations << ','
       << detail::format_double(row.runtime_ms, "%.3f") << '\n';
  }
}

struct SummaryRow {
  std::string noise_type;
  double fraction = 0.0;
  std::string algorithm;
  double mean_rmse = std::numeric_limits<double>::quiet_NaN();
  double std_rmse = std::numeric_limits<double>::quiet_NaN();
  int trials = 0;
  int failures = 0;
};

/// Per-cell mean and standard deviation over successful trials, in sweep
/// order.
inline std::vector<SummaryRow> summarize_results(
    std::span<const ResultRow> rows) {
  std::vector<SummaryRow> summary;
  std::map<std::tuple<std::string, double, std::string>, std::size_t> slots;
  for (const auto& row : rows) {
    const auto key = std::make_tuple(row.noise_type, row.fraction,
                                     row.algorithm);
    auto it = slots.find(key);
    if (it == slots.end()) {
      slots.emplace(key, summary.size());
      summary.push_back(
          {row.noise_type, row.fraction, row.algorithm, 0.0, 0.0, 0, 0});
      it = slots.find(key);
    }
    SummaryRow& cell = summary[it->second];
    ++cell.trials;
    if (row.failed)
      ++cell.failures;
    else
      cell.mean_rmse += row.rmse;  // accumulate; finalized below
  }
  for (auto& cell : summary) {
    const int ok = cell.trials - cell.failures;
    cell.mean_rmse =
        ok > 0 ? cell.mean_rmse / ok : std::numeric_limits<double>::quiet_NaN();
  }
  // Second pass for the standard deviation.
  for (const auto& row : rows) {
    if (row.failed) continue;
    const auto key = std::make_tuple(row.noise_type, row.fraction,
                                     row.algorithm);
    SummaryRow& cell = summary[slots[key]];
    const double d = row.rmse - cell.mean_rmse;
    cell.std_rmse += d * d;
  }
  for (auto& cell : summary) {
    const int ok = cell.trials - cell.failures;
    cell.std_rmse = ok > 0 ? std::sqrt(cell.std_rmse / ok)
                           : std::numeric_limits<double>::quiet_NaN();
  }
  return summary;
}

inline void print_summary(std::ostream& os, std::span<const SummaryRow> rows) {
  os << "noise_type  fraction  algorithm  mean_rmse    std_rmse     failures\n";
  for (const auto& r : rows) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-10s  %-8.3g  %-9s  %-11.5g  %-11.5g  %d\n",
                  r.noise_type.c_str(), r.fraction, r.algorithm.c_str(),
                  r.mean_rmse, r.std_rmse, r.failures);
    os << buf;
  }
}

}  // namespace scga
