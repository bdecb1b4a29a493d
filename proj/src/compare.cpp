#include "kronred/compare.hpp"

#include <algorithm>
#include <cmath>

#include "kronred/errors.hpp"
#include "kronred/kinetics.hpp"

namespace kronred {

std::vector<double> uniform_grid(double t_end, int points) {
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i) g[i] = t_end * i / (points - 1);
  return g;
}

Metrics compare(const Trajectory& full, const Trajectory& reduced, const ComparisonSpec& spec) {
  if (spec.observed.empty()) throw ModelError("no observed species");
  if (spec.grid.empty()) throw ModelError("empty comparison grid");
  const int m = static_cast<int>(full.states.front().size());
  for (int sp : spec.observed)
    if (sp < 0 || sp >= m) throw ModelError("observed species index out of range");

  const size_t g = spec.grid.size();
  Eigen::MatrixXd xf(g, m), xr(g, m);
  for (size_t i = 0; i < g; ++i) {
    xf.row(i) = full.sample(spec.grid[i]).transpose();
    xr.row(i) = reduced.sample(spec.grid[i]).transpose();
  }

  Metrics out;
  for (int sp : spec.observed) {
    SpeciesMetrics sm;
    sm.species = sp;
    double num = (xf.col(sp) - xr.col(sp)).norm();
    double den = std::max(xf.col(sp).norm(), spec.denom_floor);
    sm.rel_l2 = num / den;
    sm.max_abs = (xf.col(sp) - xr.col(sp)).cwiseAbs().maxCoeff();
    sm.steady_state_dev = std::abs(full.final_state()[sp] - reduced.final_state()[sp]);
    out.aggregate = std::max(out.aggregate, sm.rel_l2);
    out.per_species.push_back(sm);
  }
  return out;
}

PulseResult pulse_experiment(const Network& net, const StoichiometryView& view,
                             const ReducedNetwork& reduced, const Eigen::VectorXd& pre_state,
                             const std::map<int, double>& overrides, const SolverConfig& cfg,
                             ComparisonSpec spec) {
  double residual = full_rhs(net, view, pre_state).lpNorm<Eigen::Infinity>();
  if (residual > kEquilibriumTol) throw NotAtEquilibriumError(residual);

  Eigen::VectorXd x0 = pre_state;
  for (const auto& [sp, v] : overrides) {
    if (sp < 0 || sp >= net.species_count()) throw ModelError("override species out of range");
    if (!(v >= 0)) throw ModelError("override must be nonnegative");
    x0[sp] = v;
  }

  KineticsEval kin(net, view);
  ReducedEval red(reduced);

  PulseResult result;
  result.full = integrate(
      [&kin](double t, const Eigen::VectorXd& x, Eigen::VectorXd& dx) { kin.full_rhs(t, x, dx); },
      x0, cfg);
  if (result.full.status == Trajectory::Status::Failed)
    throw IntegrationError("full model: " + result.full.reason);
  result.reduced = integrate(
      [&red](double t, const Eigen::VectorXd& x, Eigen::VectorXd& dx) { red.rhs(t, x, dx); },
      x0, cfg);
  if (result.reduced.status == Trajectory::Status::Failed)
    throw IntegrationError("reduced model: " + result.reduced.reason);

  std::vector<int> observed;
  for (int sp : spec.observed)
    if (!reduced.frozen_values.count(sp)) observed.push_back(sp);
  spec.observed = observed;
  if (spec.grid.empty()) spec.grid = uniform_grid(cfg.t_end);

  result.metrics = compare(result.full, result.reduced, spec);
  return result;
}

}  // namespace kronred
