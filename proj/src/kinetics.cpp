#include "kronred/kinetics.hpp"

#include <cmath>

#include "kronred/errors.hpp"

namespace kronred {

double monomial(const StoichiometryView& view, int complex_index, const Eigen::VectorXd& x) {
  double p = 1.0;
  for (int i = 0; i < view.Z.rows(); ++i) {
    int e = view.Z(i, complex_index);
    for (int q = 0; q < e; ++q) p *= x[i];
  }
  return p;
}

Eigen::VectorXd monomial_vector(const StoichiometryView& view, const Eigen::VectorXd& x) {
  Eigen::VectorXd m(view.complex_count());
  for (int c = 0; c < view.complex_count(); ++c) m[c] = monomial(view, c, x);
  return m;
}

double edge_rate(const Network& net, const StoichiometryView& view, const DirectedEdge& edge,
                 const Eigen::VectorXd& x) {
  const RateLaw& law = net.reactions[edge.reaction].law;
  return edge.k / law.denominator.value(x) * monomial(view, edge.tail, x);
}

double net_reaction_rate(const Network& net, const StoichiometryView& view, int reaction_index,
                         const Eigen::VectorXd& x) {
  double v = 0.0;
  for (const auto& e : view.edges)
    if (e.reaction == reaction_index) v += e.reverse ? -edge_rate(net, view, e, x)
                                                     : edge_rate(net, view, e, x);
  return v;
}

static void laplacian_into(const Network& net, const StoichiometryView& view,
                           const Eigen::VectorXd& x, LaplacianEval& out) {
  const int c = view.complex_count();
  out.A.setZero(c, c);
  for (const auto& e : view.edges) {
    const RateLaw& law = net.reactions[e.reaction].law;
    out.A(e.head, e.tail) += e.k / law.denominator.value(x);
  }
  out.L = -out.A;
  for (int s = 0; s < c; ++s) out.L(s, s) = out.A.col(s).sum();
  out.x = x;
}

LaplacianEval laplacian(const Network& net, const StoichiometryView& view,
                        const Eigen::VectorXd& x) {
  LaplacianEval ev;
  laplacian_into(net, view, x, ev);
  return ev;
}

Eigen::VectorXd boundary_vector(const Network& net, const Eigen::VectorXd& x) {
  Eigen::VectorXd vb = Eigen::VectorXd::Zero(net.complex_count());
  for (const auto& b : net.boundary) vb[b.complex] += b.value_at(x);
  return vb;
}

KineticsEval::KineticsEval(const Network& net, const StoichiometryView& view)
    : net_(&net), view_(&view), Zd_(view.Z.cast<double>()) {
  const int c = view.complex_count();
  mon_.resize(c);
  vb_.resize(c);
  flux_.resize(c);
  lap_.A.resize(c, c);
  lap_.L.resize(c, c);
}

const Eigen::VectorXd& KineticsEval::monomials(const Eigen::VectorXd& x) {
  for (int c = 0; c < view_->complex_count(); ++c) mon_[c] = monomial(*view_, c, x);
  return mon_;
}

const Eigen::VectorXd& KineticsEval::boundary(const Eigen::VectorXd& x) {
  vb_.setZero();
  for (const auto& b : net_->boundary) vb_[b.complex] += b.value_at(x);
  return vb_;
}

const LaplacianEval& KineticsEval::laplacian_at(const Eigen::VectorXd& x) {
  laplacian_into(*net_, *view_, x, lap_);
  return lap_;
}

void KineticsEval::full_rhs(double /*t*/, const Eigen::VectorXd& x, Eigen::VectorXd& dx) {
  monomials(x);
  boundary(x);
  laplacian_at(x);
  flux_.noalias() = vb_ - lap_.L * mon_;
  dx.noalias() = Zd_ * flux_;
  for (int i = 0; i < dx.size(); ++i)
    if (!std::isfinite(dx[i])) throw NonFiniteRhsError(i);
}

Eigen::VectorXd full_rhs(const Network& net, const StoichiometryView& view,
                         const Eigen::VectorXd& x, double t) {
  KineticsEval eval(net, view);
  Eigen::VectorXd dx(net.species_count());
  eval.full_rhs(t, x, dx);
  return dx;
}

}  // namespace kronred
