#ifndef KRONRED_INTEGRATE_HPP
#define KRONRED_INTEGRATE_HPP

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace kronred {

struct SolverConfig {
  double rtol = 1e-6;
  double atol = 1e-9;
  double h_init = 0.0;  // 0 selects the step automatically
  double h_min = 0.0;   // 0 derives a floor from the horizon
  double t_end = 10.0;
  long max_steps = 1000000;
  bool detect_steady = true;
};

/// dx(t, x, out): derivative written into out (preallocated, size m).
using RhsFn = std::function<void(double, const Eigen::VectorXd&, Eigen::VectorXd&)>;

/// Adaptive solution record. Stores the derivative at every accepted point,
/// which makes cubic Hermite resampling exact to the solver's own accuracy.
struct Trajectory {
  enum class Status { Converged, ReachedHorizon, Failed };

  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  std::vector<Eigen::VectorXd> derivs;
  Status status = Status::Failed;
  std::string reason;  // set when status == Failed

  struct Stats {
    long accepted = 0;
    long rejected = 0;
    long rhs_evals = 0;
  } stats;

  const Eigen::VectorXd& final_state() const { return states.back(); }
  double final_time() const { return times.back(); }

  /// Cubic Hermite interpolation at t. Times past the end are allowed only
  /// for converged runs (the steady state extends flat); otherwise throws
  /// GridCoverageError.
  Eigen::VectorXd sample(double t) const;
};

/// Embedded 5(4) Runge-Kutta pair with PI step-size control. A step whose
/// accepted state would have a negative component is retried with half the
/// step; once the step falls below the floor the run fails (NonPositivity).
/// Steady state is declared when |rhs|_inf <= 10*atol on three consecutive
/// accepted steps. Throws ModelError for invalid config/state;
/// SingularBlockError from the rhs propagates.
Trajectory integrate(const RhsFn& rhs, const Eigen::VectorXd& x0, const SolverConfig& cfg);

}  // namespace kronred

#endif  // KRONRED_INTEGRATE_HPP
