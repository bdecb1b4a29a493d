#ifndef KRONRED_KINETICS_HPP
#define KRONRED_KINETICS_HPP

#include <Eigen/Dense>

#include "kronred/network.hpp"
#include "kronred/stoichiometry.hpp"

namespace kronred {

/// Weighted adjacency and Laplacian of the complex graph at one state.
/// A(head, tail) = k * d(x) per directed edge, parallel edges summed;
/// L = Delta - A with Delta the diagonal of column sums, so ones^T L = 0.
struct LaplacianEval {
  Eigen::MatrixXd A;
  Eigen::MatrixXd L;
  Eigen::VectorXd x;
};

/// prod_i x_i^{Z_{i,complex}} by repeated multiplication; zero exponents are
/// skipped, so 0^0 contributes 1 and no log/exp is involved.
double monomial(const StoichiometryView& view, int complex_index, const Eigen::VectorXd& x);

/// All complex monomials at x, length c.
Eigen::VectorXd monomial_vector(const StoichiometryView& view, const Eigen::VectorXd& x);

/// One-directional flux k * d(x) * monomial(tail, x).
double edge_rate(const Network& net, const StoichiometryView& view, const DirectedEdge& edge,
                 const Eigen::VectorXd& x);

/// Forward minus reverse flux of a reaction (reverse term 0 if irreversible).
double net_reaction_rate(const Network& net, const StoichiometryView& view, int reaction_index,
                         const Eigen::VectorXd& x);

LaplacianEval laplacian(const Network& net, const StoichiometryView& view,
                        const Eigen::VectorXd& x);

/// In/outflow per complex, length c; zero where no boundary flux is attached.
Eigen::VectorXd boundary_vector(const Network& net, const Eigen::VectorXd& x);

/// Reusable evaluation workspace: one instance per thread, no shared state.
/// Owns preallocated buffers and the float copy of Z so the hot path
/// allocates nothing.
class KineticsEval {
 public:
  KineticsEval(const Network& net, const StoichiometryView& view);

  const Network& network() const { return *net_; }
  const StoichiometryView& view() const { return *view_; }
  const Eigen::MatrixXd& Zd() const { return Zd_; }

  const Eigen::VectorXd& monomials(const Eigen::VectorXd& x);
  const Eigen::VectorXd& boundary(const Eigen::VectorXd& x);
  const LaplacianEval& laplacian_at(const Eigen::VectorXd& x);

  /// dx = Z * (v_b(x) - L(x) * monomials(x)). The time argument is accepted
  /// for step-input scenarios but rate laws do not depend on it. Throws
  /// NonFiniteRhsError naming the first non-finite component.
  void full_rhs(double t, const Eigen::VectorXd& x, Eigen::VectorXd& dx);

 private:
  const Network* net_;
  const StoichiometryView* view_;
  Eigen::MatrixXd Zd_;
  Eigen::VectorXd mon_;
  Eigen::VectorXd vb_;
  Eigen::VectorXd flux_;
  LaplacianEval lap_;
};

/// Convenience single-shot evaluation (allocates a workspace internally).
Eigen::VectorXd full_rhs(const Network& net, const StoichiometryView& view,
                         const Eigen::VectorXd& x, double t = 0.0);

}  // namespace kronred

#endif  // KRONRED_KINETICS_HPP
