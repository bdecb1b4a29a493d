#include "kronred/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "kronred/errors.hpp"

namespace kronred {

namespace {

Eigen::MatrixXd pick(const Eigen::MatrixXd& M, const std::vector<int>& rows,
                     const std::vector<int>& cols) {
  Eigen::MatrixXd out(rows.size(), cols.size());
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < cols.size(); ++j) out(i, j) = M(rows[i], cols[j]);
  return out;
}

Eigen::VectorXd pick(const Eigen::VectorXd& v, const std::vector<int>& idx) {
  Eigen::VectorXd out(idx.size());
  for (size_t i = 0; i < idx.size(); ++i) out[i] = v[idx[i]];
  return out;
}

struct Partitioned {
  Eigen::MatrixXd L11, L12, L21, L22;
  Eigen::VectorXd vb1, vb2;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  double condition = 1.0;
};

Partitioned factor_block(const Eigen::MatrixXd& L, const std::vector<int>& kept,
                         const std::vector<int>& removed, const Eigen::VectorXd& vb,
                         double condition_limit) {
  Partitioned p;
  p.L11 = pick(L, kept, kept);
  p.L12 = pick(L, kept, removed);
  p.L21 = pick(L, removed, kept);
  p.L22 = pick(L, removed, removed);
  p.vb1 = pick(vb, kept);
  p.vb2 = pick(vb, removed);
  if (!removed.empty()) {
    p.lu.compute(p.L22);
    double rcond = p.lu.rcond();
    p.condition = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
    if (!(p.condition <= condition_limit)) throw SingularBlockError(p.condition);
  }
  return p;
}

}  // namespace

SchurEval schur_complement(const Eigen::MatrixXd& L, const std::vector<int>& kept,
                           const std::vector<int>& removed, const Eigen::VectorXd& vb,
                           double condition_limit) {
  SchurEval ev;
  if (removed.empty()) {
    ev.L_hat = pick(L, kept, kept);
    ev.P_vb = pick(vb, kept);
    ev.condition_estimate = 1.0;
    return ev;
  }
  Partitioned p = factor_block(L, kept, removed, vb, condition_limit);
  ev.L_hat.noalias() = p.L11 - p.L12 * p.lu.solve(p.L21);
  ev.P_vb.noalias() = p.vb1 - p.L12 * p.lu.solve(p.vb2);
  ev.condition_estimate = p.condition;
  return ev;
}

Eigen::VectorXd apply_flux_map(const Eigen::MatrixXd& L, const std::vector<int>& kept,
                               const std::vector<int>& removed, const Eigen::VectorXd& y,
                               double condition_limit) {
  if (removed.empty()) return pick(y, kept);
  Partitioned p = factor_block(L, kept, removed, y, condition_limit);
  return p.vb1 - p.L12 * p.lu.solve(p.vb2);
}

ReducedNetwork plan_reduction(const Network& net, const StoichiometryView& view,
                              const std::vector<int>& removed, const Eigen::VectorXd& x_ref) {
  const int c = view.complex_count();
  if (x_ref.size() != view.species_count())
    throw ModelError("reference state has wrong dimension");

  std::set<int> removed_set;
  for (int r : removed) {
    if (r < 0 || r >= c) throw ModelError("removed complex index out of range");
    if (!removed_set.insert(r).second) throw ModelError("duplicate removed complex index");
  }
  if (static_cast<int>(removed_set.size()) == c) throw EmptyKeptSetError();

  ReducedNetwork red;
  red.parent = &net;
  red.view = &view;
  red.removed.assign(removed_set.begin(), removed_set.end());
  for (int i = 0; i < c; ++i)
    if (!removed_set.count(i)) red.kept.push_back(i);

  red.Z_hat.resize(view.species_count(), red.kept_count());
  for (int j = 0; j < red.kept_count(); ++j) red.Z_hat.col(j) = view.Z.col(red.kept[j]);

  for (int i = 0; i < view.species_count(); ++i)
    if ((red.Z_hat.row(i).array() == 0).all()) red.constant_species.push_back(i);

  red.x_ref = x_ref;
  for (int sp : red.constant_species) {
    if (!(x_ref[sp] > 0.0))
      throw ModelError("frozen species " + net.species[sp].name +
                       " needs a positive reference value");
    red.frozen_values[sp] = x_ref[sp];
  }

  LaplacianEval lap = laplacian(net, view, x_ref);
  schur_complement(lap.L, red.kept, red.removed, boundary_vector(net, x_ref));
  return red;
}

ReducedEval::ReducedEval(const ReducedNetwork& reduced)
    : red_(&reduced),
      kin_(*reduced.parent, *reduced.view),
      Zhat_d_(reduced.Z_hat.cast<double>()),
      mon_kept_(reduced.kept_count()) {}

const Eigen::VectorXd& ReducedEval::pin(const Eigen::VectorXd& x) {
  x_pin_ = x;
  for (const auto& [sp, v] : red_->frozen_values) x_pin_[sp] = v;
  return x_pin_;
}

SchurEval ReducedEval::schur(const Eigen::VectorXd& x) {
  pin(x);
  const LaplacianEval& lap = kin_.laplacian_at(x_pin_);
  SchurEval ev = schur_complement(lap.L, red_->kept, red_->removed, kin_.boundary(x_pin_));
  ev.x = x_pin_;
  return ev;
}

void ReducedEval::rhs(double /*t*/, const Eigen::VectorXd& x, Eigen::VectorXd& dx) {
  SchurEval ev = schur(x);
  for (int j = 0; j < red_->kept_count(); ++j)
    mon_kept_[j] = monomial(*red_->view, red_->kept[j], x_pin_);
  dx.noalias() = Zhat_d_ * (ev.P_vb - ev.L_hat * mon_kept_);
  for (int i = 0; i < dx.size(); ++i)
    if (!std::isfinite(dx[i])) throw NonFiniteRhsError(i);
}

Eigen::VectorXd reduced_rhs(const ReducedNetwork& reduced, const Eigen::VectorXd& x, double t) {
  ReducedEval eval(reduced);
  Eigen::VectorXd dx(reduced.view->species_count());
  eval.rhs(t, x, dx);
  return dx;
}

double auxiliary_consistency(const Network& net, const StoichiometryView& view,
                             const std::vector<int>& removed, const Eigen::VectorXd& x) {
  std::set<int> removed_set(removed.begin(), removed.end());
  std::vector<int> kept;
  for (int i = 0; i < view.complex_count(); ++i)
    if (!removed_set.count(i)) kept.push_back(i);
  std::vector<int> rem(removed_set.begin(), removed_set.end());

  LaplacianEval lap = laplacian(net, view, x);
  Eigen::VectorXd vb = boundary_vector(net, x);
  Eigen::VectorXd w1(kept.size());
  for (size_t j = 0; j < kept.size(); ++j) w1[j] = monomial(view, kept[j], x);

  if (rem.empty()) return 0.0;

  Partitioned p = factor_block(lap.L, kept, rem, vb, kConditionLimit);
  Eigen::VectorXd w2 = p.lu.solve(p.vb2 - p.L21 * w1);
  double r_stationary = (p.vb2 - p.L21 * w1 - p.L22 * w2).lpNorm<Eigen::Infinity>();

  Eigen::VectorXd y1dot_aux = p.vb1 - p.L11 * w1 - p.L12 * w2;
  SchurEval ev = schur_complement(lap.L, kept, rem, vb);
  double r_reduced = (y1dot_aux - (ev.P_vb - ev.L_hat * w1)).lpNorm<Eigen::Infinity>();
  return std::max(r_stationary, r_reduced);
}

Json plan_to_json(const ReducedNetwork& red) {
  const Network& net = *red.parent;
  Json j;
  j["removed"] = Json::array();
  for (int c : red.removed) j["removed"].push_back(net.complex_name(c));
  j["kept"] = Json::array();
  for (int c : red.kept) j["kept"].push_back(net.complex_name(c));
  j["frozen"] = Json::object();
  for (const auto& [sp, v] : red.frozen_values) j["frozen"][net.species[sp].name] = v;
  j["x_ref"] = Json::object();
  for (const auto& s : net.species) j["x_ref"][s.name] = red.x_ref[s.index];
  return j;
}

ReducedNetwork plan_from_json(const Network& net, const StoichiometryView& view, const Json& j) {
  try {
    std::vector<int> removed;
    for (const auto& name : j.at("removed")) {
      int c = net.complex_by_name(name.get<std::string>());
      if (c < 0) throw ModelError("plan removes unknown complex '" + name.get<std::string>() + "'");
      removed.push_back(c);
    }
    Eigen::VectorXd x_ref = Eigen::VectorXd::Ones(net.species_count());
    if (j.contains("x_ref"))
      for (const auto& [name, v] : j.at("x_ref").items()) {
        int sp = net.find_species(name);
        if (sp < 0) throw ModelError("plan reference state names unknown species '" + name + "'");
        x_ref[sp] = v.get<double>();
      }
    return plan_reduction(net, view, removed, x_ref);
  } catch (const Json::exception& e) {
    throw ModelError(std::string("malformed plan JSON: ") + e.what());
  }
}

Network mm_chain_network(const MmChainParams& p) {
  Network net;
  for (int i = 1; i <= 6; ++i) net.add_species("X" + std::to_string(i));
  int c1 = net.intern_complex({{0, 1}, {1, 1}});
  int c2 = net.intern_complex({{2, 1}, {3, 1}});
  int c3 = net.intern_complex({{4, 1}, {5, 1}});

  RateLaw law1;
  law1.kind = LawKind::MichaelisMenten;
  law1.k_forward = p.k1f;
  law1.k_reverse = p.k1r;
  law1.km = {{0, p.km11}, {1, p.km12}, {2, p.km13}, {3, p.km14}};
  net.add_reaction("r1", c1, c2, law1);

  RateLaw law2;
  law2.kind = LawKind::MichaelisMenten;
  law2.k_forward = p.k2f;
  law2.k_reverse = p.k2r;
  law2.km = {{2, p.km23}, {3, p.km24}, {4, p.km25}, {5, p.km26}};
  net.add_reaction("r2", c2, c3, law2);

  net.validate();
  return net;
}

double mm_chain_net_rate(const MmChainParams& p, const Eigen::VectorXd& x) {
  double p1 = (1 + x[0] / p.km11 + x[1] / p.km12) * (1 + x[2] / p.km13 + x[3] / p.km14);
  double p2 = (1 + x[2] / p.km23 + x[3] / p.km24) * (1 + x[4] / p.km25 + x[5] / p.km26);
  return (p.k1f * p.k2f * x[0] * x[1] - p.k1r * p.k2r * x[4] * x[5]) /
         (p.k2f * p1 + p.k1r * p2);
}

CollapsedMmRate collapse_mm_chain(const MmChainParams& p, double x3_ref, double x4_ref) {
  double g1 = 1 + x3_ref / p.km13 + x4_ref / p.km14;
  double g2 = 1 + x3_ref / p.km23 + x4_ref / p.km24;
  double c0 = p.k2f * g1 + p.k1r * g2;
  CollapsedMmRate out;
  out.kf = p.k1f * p.k2f / c0;
  out.kr = p.k1r * p.k2r / c0;
  out.km1 = p.km11 * c0 / (p.k2f * g1);
  out.km2 = p.km12 * c0 / (p.k2f * g1);
  out.km5 = p.km25 * c0 / (p.k1r * g2);
  out.km6 = p.km26 * c0 / (p.k1r * g2);
  return out;
}

}  // namespace kronred
