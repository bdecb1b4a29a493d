#include "kronred/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kronred/errors.hpp"

namespace kronred {

namespace {

// Dormand-Prince 5(4) tableau. b is the 5th-order weight row (also the last
// stage row, so the pair is first-same-as-last); e = b - b_hat feeds the
// error estimate directly.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

struct Stepper {
  const RhsFn& rhs;
  const SolverConfig& cfg;
  long& evals;
  int n;
  Eigen::VectorXd k1, k2, k3, k4, k5, k6, k7, ytmp, ynew, yerr;

  Stepper(const RhsFn& f, const SolverConfig& c, long& ev, int dim)
      : rhs(f), cfg(c), evals(ev), n(dim) {
    for (auto* v : {&k1, &k2, &k3, &k4, &k5, &k6, &k7, &ytmp, &ynew, &yerr}) v->resize(n);
  }

  void eval(double t, const Eigen::VectorXd& y, Eigen::VectorXd& out) {
    rhs(t, y, out);
    ++evals;
  }

  // One trial step from (t, y) with derivative k1 already evaluated.
  // Returns the scaled error norm, or NaN when a stage produced a non-finite
  // derivative (treated as a rejection by the caller).
  double attempt(double t, double h, const Eigen::VectorXd& y) {
    try {
      ytmp = y + h * (a21 * k1);
      eval(t + c2 * h, ytmp, k2);
      ytmp = y + h * (a31 * k1 + a32 * k2);
      eval(t + c3 * h, ytmp, k3);
      ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
      eval(t + c4 * h, ytmp, k4);
      ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
      eval(t + c5 * h, ytmp, k5);
      ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
      eval(t + h, ytmp, k6);
      ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      eval(t + h, ynew, k7);
      yerr = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    } catch (const NonFiniteRhsError&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      double sc = cfg.atol + cfg.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      double q = yerr[i] / sc;
      sum += q * q;
    }
    return std::sqrt(sum / n);
  }
};

double weighted_rms(const Eigen::VectorXd& v, const Eigen::VectorXd& ref,
                    const SolverConfig& cfg) {
  double sum = 0.0;
  for (int i = 0; i < v.size(); ++i) {
    double sc = cfg.atol + cfg.rtol * std::abs(ref[i]);
    double q = v[i] / sc;
    sum += q * q;
  }
  return std::sqrt(sum / v.size());
}

double initial_step(Stepper& st, const Eigen::VectorXd& y0, const Eigen::VectorXd& f0,
                    const SolverConfig& cfg) {
  double span = cfg.t_end;
  double d0 = weighted_rms(y0, y0, cfg);
  double d1 = weighted_rms(f0, y0, cfg);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, span);
  double d2 = 0.0;
  try {
    st.ytmp = y0 + h0 * f0;
    st.eval(h0, st.ytmp, st.k2);
    d2 = weighted_rms(st.k2 - f0, y0, cfg) / h0;
  } catch (const NonFiniteRhsError&) {
    return std::max(1e-10 * span, h0 * 1e-3);
  }
  double dm = std::max(d1, d2);
  double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
  return std::min({100.0 * h0, h1, span});
}

}  // namespace

Eigen::VectorXd Trajectory::sample(double t) const {
  if (times.empty()) throw GridCoverageError("empty trajectory");
  double t0 = times.front(), t1 = times.back();
  double slack = 1e-12 * std::max(1.0, std::abs(t1));
  if (t < t0 - slack) throw GridCoverageError("sample time precedes trajectory start");
  if (t > t1 + slack) {
    if (status == Status::Converged) return states.back();
    throw GridCoverageError("sample time exceeds trajectory end");
  }
  t = std::clamp(t, t0, t1);
  auto it = std::upper_bound(times.begin(), times.end(), t);
  size_t hi = std::min<size_t>(times.size() - 1, it - times.begin());
  if (hi == 0) return states.front();
  size_t lo = hi - 1;
  double h = times[hi] - times[lo];
  if (h <= 0) return states[hi];
  double s = (t - times[lo]) / h;
  double s2 = s * s, s3 = s2 * s;
  double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
  double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
  return h00 * states[lo] + h10 * h * derivs[lo] + h01 * states[hi] + h11 * h * derivs[hi];
}

Trajectory integrate(const RhsFn& rhs, const Eigen::VectorXd& x0, const SolverConfig& cfg) {
  if (!(cfg.rtol > 0) || !(cfg.atol > 0)) throw ModelError("tolerances must be positive");
  if (!(cfg.t_end > 0)) throw ModelError("horizon must be positive");
  if (cfg.h_min > 0 && cfg.h_init > 0 && cfg.h_min >= cfg.h_init)
    throw ModelError("h_min must be below h_init");
  for (int i = 0; i < x0.size(); ++i)
    if (!(x0[i] >= 0) || !std::isfinite(x0[i]))
      throw ModelError("initial state must be finite and nonnegative");

  Trajectory traj;
  Stepper st(rhs, cfg, traj.stats.rhs_evals, static_cast<int>(x0.size()));

  double t = 0.0;
  Eigen::VectorXd y = x0;
  st.eval(t, y, st.k1);

  traj.times.push_back(t);
  traj.states.push_back(y);
  traj.derivs.push_back(st.k1);

  double h_floor = cfg.h_min > 0 ? cfg.h_min : 1e-14 * cfg.t_end;
  double h = cfg.h_init > 0 ? cfg.h_init : initial_step(st, y, st.k1, cfg);
  h = std::clamp(h, h_floor, cfg.t_end);

  constexpr double safety = 0.9, beta = 0.04, expo1 = 0.2 - beta * 0.75;
  constexpr double facmin = 0.2;
  double facmax = 5.0;
  double facold = 1e-4;
  int steady_run = 0;

  for (long step = 0; step < cfg.max_steps; ++step) {
    bool last = false;
    if (t + h >= cfg.t_end) {
      h = cfg.t_end - t;
      last = true;
    }

    double err = st.attempt(t, h, y);

    bool nonfinite = !std::isfinite(err);
    bool negative = false;
    if (!nonfinite)
      for (int i = 0; i < st.n; ++i)
        if (st.ynew[i] < 0) negative = true;

    if (nonfinite || negative) {
      ++traj.stats.rejected;
      h *= 0.5;
      facmax = 1.0;
      if (h < h_floor) {
        traj.status = Trajectory::Status::Failed;
        traj.reason = nonfinite ? "StepUnderflow" : "NonPositivity";
        return traj;
      }
      continue;
    }

    double fac11 = std::pow(err, expo1);
    if (err <= 1.0) {
      t += h;
      y = st.ynew;
      std::swap(st.k1, st.k7);  // first-same-as-last
      ++traj.stats.accepted;
      traj.times.push_back(t);
      traj.states.push_back(y);
      traj.derivs.push_back(st.k1);

      if (cfg.detect_steady) {
        steady_run = st.k1.lpNorm<Eigen::Infinity>() <= 10.0 * cfg.atol ? steady_run + 1 : 0;
        if (steady_run >= 3) {
          traj.status = Trajectory::Status::Converged;
          return traj;
        }
      }
      if (last) {
        traj.status = Trajectory::Status::ReachedHorizon;
        return traj;
      }

      double fac = fac11 / std::pow(facold, beta);
      fac = std::clamp(fac / safety, 1.0 / facmax, 1.0 / facmin);
      h = h / fac;
      facold = std::max(err, 1e-4);
      facmax = 5.0;
    } else {
      ++traj.stats.rejected;
      h = h / std::min(1.0 / facmin, fac11 / safety);
      facmax = 1.0;
      if (h < h_floor) {
        traj.status = Trajectory::Status::Failed;
        traj.reason = "StepUnderflow";
        return traj;
      }
    }
  }

  traj.status = Trajectory::Status::Failed;
  traj.reason = "MaxStepsExceeded";
  return traj;
}

}  // namespace kronred
