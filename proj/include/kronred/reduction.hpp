#ifndef KRONRED_REDUCTION_HPP
#define KRONRED_REDUCTION_HPP

#include <map>
#include <vector>

#include <Eigen/Dense>

#include "kronred/json_io.hpp"
#include "kronred/kinetics.hpp"
#include "kronred/network.hpp"
#include "kronred/stoichiometry.hpp"

namespace kronred {

/// Condition estimate above which the eliminated block is declared singular.
inline constexpr double kConditionLimit = 1e12;

/// Result of eliminating the removed complexes at one state: the Schur
/// complement of the eliminated block in L, the mapped boundary flux, and the
/// condition estimate of the solve.
struct SchurEval {
  Eigen::MatrixXd L_hat;
  Eigen::VectorXd P_vb;
  double condition_estimate = 1.0;
  Eigen::VectorXd x;
};

/// A planned complex deletion. Species appearing only in removed complexes
/// lose their dynamics and stay pinned at the reference-state values.
struct ReducedNetwork {
  const Network* parent = nullptr;
  const StoichiometryView* view = nullptr;
  std::vector<int> kept;
  std::vector<int> removed;
  Eigen::MatrixXi Z_hat;
  std::vector<int> constant_species;
  std::map<int, double> frozen_values;
  Eigen::VectorXd x_ref;

  int kept_count() const { return static_cast<int>(kept.size()); }
};

/// Partitions the complexes, derives Z_hat and the constant species, and
/// checks that the eliminated block is invertible at x_ref. Throws
/// EmptyKeptSetError, SingularBlockError, or ModelError (bad indices,
/// nonpositive frozen value).
ReducedNetwork plan_reduction(const Network& net, const StoichiometryView& view,
                              const std::vector<int>& removed, const Eigen::VectorXd& x_ref);

/// Schur complement kernel: L_hat = L11 - L12 L22^{-1} L21 and
/// P_vb = vb1 - L12 L22^{-1} vb2, via one partial-pivoted factorization of
/// L22. kept/removed index into rows/columns of L. Throws SingularBlockError
/// when the condition estimate exceeds the limit.
SchurEval schur_complement(const Eigen::MatrixXd& L, const std::vector<int>& kept,
                           const std::vector<int>& removed, const Eigen::VectorXd& vb,
                           double condition_limit = kConditionLimit);

/// Applies the flux map P = [I  -L12 L22^{-1}] to a full c-vector.
Eigen::VectorXd apply_flux_map(const Eigen::MatrixXd& L, const std::vector<int>& kept,
                               const std::vector<int>& removed, const Eigen::VectorXd& y,
                               double condition_limit = kConditionLimit);

/// Per-thread evaluator of the reduced dynamics. Pins frozen species into a
/// private copy of the state before every evaluation, so passing the live
/// integration state is safe even though its frozen components never move
/// (their Z_hat rows are zero).
class ReducedEval {
 public:
  explicit ReducedEval(const ReducedNetwork& reduced);

  const ReducedNetwork& reduced() const { return *red_; }

  /// State with frozen species overwritten by their pinned values.
  const Eigen::VectorXd& pin(const Eigen::VectorXd& x);

  SchurEval schur(const Eigen::VectorXd& x);

  /// dx = Z_hat * (P_vb - L_hat * kept-monomials). Throws SingularBlockError
  /// or NonFiniteRhsError.
  void rhs(double t, const Eigen::VectorXd& x, Eigen::VectorXd& dx);

 private:
  const ReducedNetwork* red_;
  KineticsEval kin_;
  Eigen::MatrixXd Zhat_d_;
  Eigen::VectorXd x_pin_;
  Eigen::VectorXd mon_kept_;
};

/// Convenience single-shot reduced derivative.
Eigen::VectorXd reduced_rhs(const ReducedNetwork& reduced, const Eigen::VectorXd& x,
                            double t = 0.0);

/// Rebuilds the eliminated coordinates w2 from the kept monomials, then
/// checks that the imposed stationarity of the eliminated block holds and
/// that the surviving block reproduces the Schur-complement dynamics.
/// Returns the max residual (an algebraic identity, so ~machine epsilon).
double auxiliary_consistency(const Network& net, const StoichiometryView& view,
                             const std::vector<int>& removed, const Eigen::VectorXd& x);

/// Plan serialization: kept/removed complex names, frozen values and the
/// reference state keyed by species name.
Json plan_to_json(const ReducedNetwork& reduced);
ReducedNetwork plan_from_json(const Network& net, const StoichiometryView& view, const Json& j);

/// Parameters of the two-step reversible enzyme chain
/// X1+X2 <-> X3+X4 <-> X5+X6 (twelve in total).
struct MmChainParams {
  double k1f = 1, k1r = 1, k2f = 1, k2r = 1;
  double km11 = 1, km12 = 1, km13 = 1, km14 = 1;
  double km23 = 1, km24 = 1, km25 = 1, km26 = 1;
};

/// Builds the chain as a Network (two reversible mm reactions).
Network mm_chain_network(const MmChainParams& p);

/// The collapsed one-step law obtained by eliminating the middle complex
/// with x3, x4 frozen: v = (kf x1 x2 - kr x5 x6) /
/// (1 + x1/km1 + x2/km2 + x5/km5 + x6/km6). Six parameters.
struct CollapsedMmRate {
  double kf = 0, kr = 0, km1 = 0, km2 = 0, km5 = 0, km6 = 0;
  static constexpr int parameter_count = 6;

  double value(double x1, double x2, double x5, double x6) const {
    return (kf * x1 * x2 - kr * x5 * x6) / (1 + x1 / km1 + x2 / km2 + x5 / km5 + x6 / km6);
  }
};

/// Closed-form collapse of the chain: the exact net rate is
/// (k1f k2f x1 x2 - k1r k2r x5 x6) / (k2f p1(x) + k1r p2(x)); freezing x3, x4
/// makes the denominator affine in the outer species, and normalizing its
/// constant term to 1 yields the six effective parameters.
CollapsedMmRate collapse_mm_chain(const MmChainParams& p, double x3_ref, double x4_ref);

/// The un-normalized closed form at a full state (x3, x4 taken from x).
double mm_chain_net_rate(const MmChainParams& p, const Eigen::VectorXd& x);

}  // namespace kronred

#endif  // KRONRED_REDUCTION_HPP
