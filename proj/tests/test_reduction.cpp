#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "kronred/errors.hpp"
#include "kronred/kinetics.hpp"
#include "kronred/parser.hpp"
#include "kronred/reduction.hpp"
#include "kronred/stoichiometry.hpp"
#include "support/generator.hpp"

using namespace kronred;

namespace {

std::vector<int> complement(int n, const std::vector<int>& removed) {
  std::set<int> rem(removed.begin(), removed.end());
  std::vector<int> kept;
  for (int i = 0; i < n; ++i)
    if (!rem.count(i)) kept.push_back(i);
  return kept;
}

// Positions of `want` (global indices) inside the sorted index list `within`.
std::vector<int> positions(const std::vector<int>& within, const std::vector<int>& want) {
  std::vector<int> out;
  for (int w : want) {
    auto it = std::find(within.begin(), within.end(), w);
    REQUIRE(it != within.end());
    out.push_back(static_cast<int>(it - within.begin()));
  }
  return out;
}

MmChainParams random_chain_params(testgen::NetworkGenerator& gen) {
  MmChainParams p;
  p.k1f = gen.rand_real(0.5, 2.0);
  p.k1r = gen.rand_real(0.5, 2.0);
  p.k2f = gen.rand_real(0.5, 2.0);
  p.k2r = gen.rand_real(0.5, 2.0);
  p.km11 = gen.rand_real(0.5, 2.0);
  p.km12 = gen.rand_real(0.5, 2.0);
  p.km13 = gen.rand_real(0.5, 2.0);
  p.km14 = gen.rand_real(0.5, 2.0);
  p.km23 = gen.rand_real(0.5, 2.0);
  p.km24 = gen.rand_real(0.5, 2.0);
  p.km25 = gen.rand_real(0.5, 2.0);
  p.km26 = gen.rand_real(0.5, 2.0);
  return p;
}

}  // namespace

TEST_CASE("schur complement of the enzyme chain at the all-ones state") {
  Network net = mm_chain_network(MmChainParams{});
  StoichiometryView view = build_stoichiometry(net);
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(6);
  LaplacianEval lap = laplacian(net, view, ones);

  Eigen::MatrixXd L(3, 3);
  double w = 1.0 / 9;
  L << w, -w, 0,
      -w, 2 * w, -w,
       0, -w, w;
  CHECK((lap.L - L).cwiseAbs().maxCoeff() <= 1e-16);

  SchurEval ev = schur_complement(lap.L, {0, 2}, {1}, Eigen::VectorXd::Zero(3));
  Eigen::MatrixXd want(2, 2);
  want << 1.0 / 18, -1.0 / 18,
         -1.0 / 18, 1.0 / 18;
  CHECK((ev.L_hat - want).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(ev.P_vb.cwiseAbs().maxCoeff() == 0.0);
  CHECK(ev.condition_estimate >= 1.0);
  CHECK(ev.condition_estimate < 1e3);
}

TEST_CASE("empty removal is the identity") {
  Network net = mm_chain_network(MmChainParams{});
  StoichiometryView view = build_stoichiometry(net);
  Eigen::VectorXd x(6);
  x << 2, 1, 0.5, 3, 1, 4;
  LaplacianEval lap = laplacian(net, view, x);
  Eigen::VectorXd vb = Eigen::VectorXd::LinSpaced(3, 0.1, 0.3);
  SchurEval ev = schur_complement(lap.L, {0, 1, 2}, {}, vb);
  CHECK(ev.L_hat == lap.L);
  CHECK(ev.P_vb == vb);
  CHECK(ev.condition_estimate == 1.0);
}

TEST_CASE("eliminating the downstream complex of a reversible pair leaves no flux") {
  Network net = parse_network("reaction r1: A <-> B ; massaction kf=2 kr=0.7\n");
  StoichiometryView view = build_stoichiometry(net);
  Eigen::VectorXd x = Eigen::VectorXd::Ones(2);
  LaplacianEval lap = laplacian(net, view, x);
  SchurEval ev = schur_complement(lap.L, {0}, {1}, Eigen::VectorXd::Zero(2));
  REQUIRE(ev.L_hat.rows() == 1);
  CHECK(std::abs(ev.L_hat(0, 0)) <= 1e-15);
}

TEST_CASE("removing a terminal sink is singular") {
  Network net = parse_network("reaction r1: A -> B ; massaction kf=1\n");
  StoichiometryView view = build_stoichiometry(net);
  LaplacianEval lap = laplacian(net, view, Eigen::VectorXd::Ones(2));
  CHECK_THROWS_AS(schur_complement(lap.L, {0}, {1}, Eigen::VectorXd::Zero(2)),
                  SingularBlockError);
  try {
    schur_complement(lap.L, {0}, {1}, Eigen::VectorXd::Zero(2));
  } catch (const SingularBlockError& e) {
    CHECK(e.condition() > kConditionLimit);
  }
}

TEST_CASE("plan_reduction validates its inputs") {
  Network net = mm_chain_network(MmChainParams{});
  StoichiometryView view = build_stoichiometry(net);
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(6);
  CHECK_THROWS_AS(plan_reduction(net, view, {1}, Eigen::VectorXd::Ones(5)), ModelError);
  CHECK_THROWS_AS(plan_reduction(net, view, {3}, ones), ModelError);
  CHECK_THROWS_AS(plan_reduction(net, view, {-1}, ones), ModelError);
  CHECK_THROWS_AS(plan_reduction(net, view, {1, 1}, ones), ModelError);
  CHECK_THROWS_AS(plan_reduction(net, view, {0, 1, 2}, ones), EmptyKeptSetError);
  Eigen::VectorXd bad = ones;
  bad[2] = 0.0;  // frozen species X3 must stay positive
  CHECK_THROWS_AS(plan_reduction(net, view, {1}, bad), ModelError);
}

TEST_CASE("plan of the enzyme chain freezes the eliminated pair") {
  Network net = mm_chain_network(MmChainParams{});
  StoichiometryView view = build_stoichiometry(net);
  Eigen::VectorXd x_ref(6);
  x_ref << 1, 1, 0.25, 4, 1, 1;
  ReducedNetwork red = plan_reduction(net, view, {1}, x_ref);

  CHECK(red.kept == std::vector<int>{0, 2});
  CHECK(red.removed == std::vector<int>{1});
  CHECK(red.Z_hat.col(0) == view.Z.col(0));
  CHECK(red.Z_hat.col(1) == view.Z.col(2));
  CHECK(red.constant_species == std::vector<int>{2, 3});
  REQUIRE(red.frozen_values.size() == 2);
  CHECK(red.frozen_values.at(2) == 0.25);
  CHECK(red.frozen_values.at(3) == 4.0);
}

TEST_CASE("frozen species are pinned regardless of the supplied state") {
  Network net = mm_chain_network(MmChainParams{});
  StoichiometryView view = build_stoichiometry(net);
  Eigen::VectorXd x_ref = Eigen::VectorXd::Ones(6);
  ReducedNetwork red = plan_reduction(net, view, {1}, x_ref);

  Eigen::VectorXd a(6), b(6);
  a << 2, 2, 1, 1, 1, 1;
  b << 2, 2, 77, 0.001, 1, 1;  // junk in the frozen slots
  Eigen::VectorXd da = reduced_rhs(red, a);
  Eigen::VectorXd db = reduced_rhs(red, b);
  CHECK((da - db).cwiseAbs().maxCoeff() == 0.0);
  // Frozen rows of Z_hat are zero, so their derivatives vanish identically.
  CHECK(da[2] == 0.0);
  CHECK(da[3] == 0.0);
}

TEST_CASE("reduced chain matches the collapsed closed form") {
  testgen::NetworkGenerator gen(505);
  for (int rep = 0; rep < 100; ++rep) {
    MmChainParams p = random_chain_params(gen);
    Network net = mm_chain_network(p);
    StoichiometryView view = build_stoichiometry(net);

    Eigen::VectorXd x = gen.random_state(6);
    CollapsedMmRate law = collapse_mm_chain(p, x[2], x[3]);
    CHECK(CollapsedMmRate::parameter_count == 6);

    double closed = law.value(x[0], x[1], x[4], x[5]);
    double direct = mm_chain_net_rate(p, x);
    CHECK(closed == doctest::Approx(direct).epsilon(1e-12));

    ReducedNetwork red = plan_reduction(net, view, {1}, x);
    ReducedEval eval(red);
    SchurEval ev = eval.schur(x);
    Eigen::VectorXd mon(2);
    mon << x[0] * x[1], x[4] * x[5];
    Eigen::VectorXd flux = ev.P_vb - ev.L_hat * mon;
    // Flux into the substrate complex is minus the chain rate.
    CHECK(-flux[0] == doctest::Approx(closed).epsilon(1e-12));
    CHECK(flux[1] == doctest::Approx(closed).epsilon(1e-12));

    Eigen::VectorXd dx = reduced_rhs(red, x);
    CHECK(dx[0] == doctest::Approx(-closed).epsilon(1e-12));
    CHECK(dx[1] == doctest::Approx(-closed).epsilon(1e-12));
    CHECK(dx[4] == doctest::Approx(closed).epsilon(1e-12));
    CHECK(dx[5] == doctest::Approx(closed).epsilon(1e-12));
  }
}

TEST_CASE("collapsed parameters at the reference point") {
  CollapsedMmRate law = collapse_mm_chain(MmChainParams{}, 1.0, 1.0);
  CHECK(law.kf == doctest::Approx(1.0 / 6).epsilon(1e-15));
  CHECK(law.kr == doctest::Approx(1.0 / 6).epsilon(1e-15));
  CHECK(law.km1 == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(law.km2 == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(law.km5 == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(law.km6 == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(law.value(1, 1, 1, 1) == doctest::Approx(0.0));
  CHECK(law.value(2, 2, 1, 1) == doctest::Approx(1.0 / 8).epsilon(1e-14));
}

TEST_CASE("reduced laplacians stay laplacians") {
  testgen::NetworkGenerator gen(606);
  int done = 0;
  while (done < 60) {
    Network net = gen.random_network();
    StoichiometryView view = build_stoichiometry(net);
    std::vector<int> removed = gen.random_removal(view);
    if (removed.empty()) continue;
    ++done;
    std::vector<int> kept = complement(view.complex_count(), removed);

    Eigen::VectorXd x = gen.random_state(net.species_count());
    LaplacianEval lap = laplacian(net, view, x);
    SchurEval ev = schur_complement(lap.L, kept, removed, boundary_vector(net, x));

    double scale = std::max(1.0, lap.L.cwiseAbs().maxCoeff());
    Eigen::RowVectorXd colsum =
        Eigen::RowVectorXd::Ones(ev.L_hat.rows()) * ev.L_hat;
    CHECK(colsum.cwiseAbs().maxCoeff() <= 1e-12 * scale);
    for (int i = 0; i < ev.L_hat.rows(); ++i) {
      CHECK(ev.L_hat(i, i) > 0.0);
      for (int j = 0; j < ev.L_hat.cols(); ++j)
        if (i != j) CHECK(ev.L_hat(i, j) <= 1e-12 * scale);
    }
    CHECK(ev.condition_estimate >= 1.0);
    CHECK(ev.condition_estimate <= kConditionLimit);
  }
}

TEST_CASE("eliminated and mapped forms of the reduced derivative agree") {
  testgen::NetworkGenerator gen(707);
  int done = 0;
  while (done < 60) {
    Network net = gen.random_network();
    StoichiometryView view = build_stoichiometry(net);
    std::vector<int> removed = gen.random_removal(view);
    if (removed.empty()) continue;
    ++done;

    Eigen::VectorXd x = gen.random_state(net.species_count());
    ReducedNetwork red = plan_reduction(net, view, removed, x);
    ReducedEval eval(red);
    SchurEval ev = eval.schur(x);

    Eigen::VectorXd mon_kept(red.kept_count());
    for (int j = 0; j < red.kept_count(); ++j) mon_kept[j] = monomial(view, red.kept[j], x);
    Eigen::VectorXd form_a = red.Z_hat.cast<double>() * (ev.P_vb - ev.L_hat * mon_kept);

    LaplacianEval lap = laplacian(net, view, x);
    Eigen::VectorXd full_flux =
        boundary_vector(net, x) - lap.L * monomial_vector(view, x);
    Eigen::VectorXd form_b =
        red.Z_hat.cast<double>() * apply_flux_map(lap.L, red.kept, red.removed, full_flux);

    double scale = std::max(1.0, full_flux.cwiseAbs().maxCoeff());
    CHECK((form_a - form_b).cwiseAbs().maxCoeff() <= 1e-12 * scale);
  }
}

TEST_CASE("two-stage elimination composes") {
  testgen::NetworkGenerator gen(808);
  int done = 0;
  while (done < 60) {
    Network net = gen.random_network();
    StoichiometryView view = build_stoichiometry(net);
    std::vector<int> removed = gen.random_removal(view);
    if (removed.size() < 2) continue;
    ++done;

    std::vector<int> r1, r2;
    for (size_t i = 0; i < removed.size(); ++i)
      (i % 2 ? r2 : r1).push_back(removed[i]);

    const int c = view.complex_count();
    std::vector<int> kept_final = complement(c, removed);
    std::vector<int> kept_mid = complement(c, r1);

    Eigen::VectorXd x = gen.random_state(net.species_count());
    LaplacianEval lap = laplacian(net, view, x);
    Eigen::VectorXd vb = boundary_vector(net, x);

    SchurEval direct = schur_complement(lap.L, kept_final, removed, vb);
    SchurEval stage1 = schur_complement(lap.L, kept_mid, r1, vb);
    SchurEval stage2 = schur_complement(stage1.L_hat, positions(kept_mid, kept_final),
                                        positions(kept_mid, r2), stage1.P_vb);

    double scale = std::max(1.0, lap.L.cwiseAbs().maxCoeff());
    CHECK((direct.L_hat - stage2.L_hat).cwiseAbs().maxCoeff() <= 1e-11 * scale);
    double vscale = std::max(1.0, vb.cwiseAbs().maxCoeff());
    CHECK((direct.P_vb - stage2.P_vb).cwiseAbs().maxCoeff() <= 1e-11 * vscale);
  }
}

TEST_CASE("imposed stationarity of the eliminated block is consistent") {
  testgen::NetworkGenerator gen(909);
  int done = 0;
  while (done < 40) {
    Network net = gen.random_network();
    StoichiometryView view = build_stoichiometry(net);
    std::vector<int> removed = gen.random_removal(view);
    if (removed.empty()) continue;
    ++done;
    Eigen::VectorXd x = gen.random_state(net.species_count());
    Eigen::VectorXd mon = monomial_vector(view, x);
    double scale = std::max(1.0, mon.cwiseAbs().maxCoeff() *
                                     laplacian(net, view, x).L.cwiseAbs().maxCoeff());
    CHECK(auxiliary_consistency(net, view, removed, x) <= 1e-12 * scale);
  }
  Network chain = mm_chain_network(MmChainParams{});
  StoichiometryView view = build_stoichiometry(chain);
  Eigen::VectorXd x(6);
  x << 2, 2, 1, 1, 1, 1;
  CHECK(auxiliary_consistency(chain, view, {1}, x) <= 1e-14);
}

TEST_CASE("plan serialization round-trips") {
  Network net = mm_chain_network(MmChainParams{});
  StoichiometryView view = build_stoichiometry(net);
  Eigen::VectorXd x_ref(6);
  x_ref << 2, 1, 0.25, 4, 1, 0.5;
  ReducedNetwork red = plan_reduction(net, view, {1}, x_ref);

  Json j = plan_to_json(red);
  CHECK(j["removed"][0] == "X3+X4");
  CHECK(j["kept"][0] == "X1+X2");
  CHECK(j["kept"][1] == "X5+X6");
  CHECK(j["frozen"]["X3"] == 0.25);
  CHECK(j["frozen"]["X4"] == 4.0);

  ReducedNetwork again = plan_from_json(net, view, j);
  CHECK(again.kept == red.kept);
  CHECK(again.removed == red.removed);
  CHECK(again.Z_hat == red.Z_hat);
  CHECK(again.frozen_values == red.frozen_values);
  CHECK(again.x_ref == red.x_ref);

  Json bad = j;
  bad["removed"][0] = "X9+X9";
  CHECK_THROWS_AS(plan_from_json(net, view, bad), ModelError);
}
