#ifndef KRONRED_COMPARE_HPP
#define KRONRED_COMPARE_HPP

#include <map>
#include <vector>

#include <Eigen/Dense>

#include "kronred/integrate.hpp"
#include "kronred/reduction.hpp"

namespace kronred {

/// How trajectories are compared: which species are observed and on which
/// common time grid both solutions are resampled.
struct ComparisonSpec {
  std::vector<int> observed;
  std::vector<double> grid;
  double denom_floor = 1e-9;  // floor on the L2 denominator
};

/// Uniform grid 0..t_end with the given number of points.
std::vector<double> uniform_grid(double t_end, int points = 201);

struct SpeciesMetrics {
  int species = -1;
  double rel_l2 = 0.0;
  double max_abs = 0.0;
  double steady_state_dev = 0.0;
};

struct Metrics {
  std::vector<SpeciesMetrics> per_species;
  double aggregate = 0.0;  // max over observed species of rel_l2
};

/// Resamples both trajectories on spec.grid and scores the observed species.
/// Throws GridCoverageError when a non-converged trajectory ends before the
/// grid does, ModelError for an empty/invalid observation list.
Metrics compare(const Trajectory& full, const Trajectory& reduced, const ComparisonSpec& spec);

/// Residual threshold below which a state counts as an equilibrium.
inline constexpr double kEquilibriumTol = 1e-6;

struct PulseResult {
  Trajectory full;
  Trajectory reduced;
  Metrics metrics;
};

/// Verifies pre_state is an equilibrium of the full model, applies the
/// overrides at t = 0, then integrates both models and compares. Observed
/// species that the reduction froze are dropped from the metrics. Throws
/// NotAtEquilibriumError, ModelError (negative override), and propagates
/// integration errors.
PulseResult pulse_experiment(const Network& net, const StoichiometryView& view,
                             const ReducedNetwork& reduced, const Eigen::VectorXd& pre_state,
                             const std::map<int, double>& overrides, const SolverConfig& cfg,
                             ComparisonSpec spec);

}  // namespace kronred

#endif  // KRONRED_COMPARE_HPP
