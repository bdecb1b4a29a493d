#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kronred/compare.hpp"
#include "kronred/errors.hpp"
#include "kronred/integrate.hpp"
#include "kronred/json_io.hpp"
#include "kronred/kinetics.hpp"
#include "kronred/network.hpp"
#include "kronred/parser.hpp"
#include "kronred/reduction.hpp"
#include "kronred/scan.hpp"
#include "kronred/stoichiometry.hpp"

namespace {

using namespace kronred;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Manifest {
  std::string network;
  std::string plan;
  std::vector<std::string> remove;
  std::map<std::string, double> x0;
  double x0_default = 1.0;
  std::map<std::string, double> pulse_scale;
  std::map<std::string, double> pulse_set;
  bool equilibrate = false;
  double equilibrate_t_end = 1000.0;
  SolverConfig solver;
  std::vector<std::string> observed;
  std::vector<std::string> candidates;
  int budget = 0;
  int threads = 0;
  std::string out = "out";
  long seed = 0;
};

std::map<std::string, double> named_values(const Json& j) {
  std::map<std::string, double> out;
  for (const auto& [name, v] : j.items()) out[name] = v.get<double>();
  return out;
}

Manifest load_manifest(const std::string& path) {
  Json j = Json::parse(read_text_file(path), nullptr, false);
  if (j.is_discarded()) throw ModelError("malformed manifest JSON in '" + path + "'");
  Manifest mf;
  try {
    mf.network = j.value("network", std::string());
    mf.plan = j.value("plan", std::string());
    if (j.contains("remove"))
      for (const auto& r : j.at("remove")) mf.remove.push_back(r.get<std::string>());
    if (j.contains("x0")) mf.x0 = named_values(j.at("x0"));
    mf.x0_default = j.value("x0_default", 1.0);
    if (j.contains("pulse_scale")) mf.pulse_scale = named_values(j.at("pulse_scale"));
    if (j.contains("pulse_set")) mf.pulse_set = named_values(j.at("pulse_set"));
    mf.equilibrate = j.value("equilibrate", false);
    mf.equilibrate_t_end = j.value("equilibrate_t_end", 1000.0);
    if (j.contains("solver")) {
      const Json& s = j.at("solver");
      mf.solver.rtol = s.value("rtol", mf.solver.rtol);
      mf.solver.atol = s.value("atol", mf.solver.atol);
      mf.solver.t_end = s.value("t_end", mf.solver.t_end);
      mf.solver.h_init = s.value("h_init", mf.solver.h_init);
      mf.solver.h_min = s.value("h_min", mf.solver.h_min);
      mf.solver.max_steps = s.value("max_steps", mf.solver.max_steps);
      mf.solver.detect_steady = s.value("detect_steady", mf.solver.detect_steady);
    }
    if (j.contains("observed"))
      for (const auto& o : j.at("observed")) mf.observed.push_back(o.get<std::string>());
    if (j.contains("candidates"))
      for (const auto& c : j.at("candidates")) mf.candidates.push_back(c.get<std::string>());
    mf.budget = j.value("budget", 0);
    mf.threads = j.value("threads", 0);
    mf.out = j.value("out", mf.out);
    mf.seed = j.value("seed", 0L);
  } catch (const Json::exception& e) {
    throw ModelError(std::string("malformed manifest field: ") + e.what());
  }
  return mf;
}

Eigen::VectorXd build_x0(const Network& net, const Manifest& mf) {
  Eigen::VectorXd x0 = Eigen::VectorXd::Constant(net.species_count(), mf.x0_default);
  for (const auto& [name, v] : mf.x0) {
    int sp = net.find_species(name);
    if (sp < 0) throw ModelError("initial state names unknown species '" + name + "'");
    x0[sp] = v;
  }
  for (int i = 0; i < x0.size(); ++i)
    if (!(x0[i] >= 0) || !std::isfinite(x0[i]))
      throw ModelError("negative initial concentration for species '" + net.species[i].name +
                       "'");
  return x0;
}

std::vector<int> observed_indices(const Network& net, const std::vector<std::string>& names) {
  std::vector<int> out;
  if (names.empty()) {
    for (int i = 0; i < net.species_count(); ++i) out.push_back(i);
    return out;
  }
  for (const auto& n : names) {
    int sp = net.find_species(n);
    if (sp < 0) throw ModelError("observed list names unknown species '" + n + "'");
    out.push_back(sp);
  }
  return out;
}

std::vector<int> complex_indices(const Network& net, const std::vector<std::string>& names) {
  std::vector<int> out;
  for (const auto& n : names) {
    int c = net.complex_by_name(n);
    if (c < 0) throw ModelError("unknown complex '" + n + "'");
    out.push_back(c);
  }
  return out;
}

std::string status_string(const Trajectory& t) {
  switch (t.status) {
    case Trajectory::Status::Converged: return "converged";
    case Trajectory::Status::ReachedHorizon: return "reached-horizon";
    default: return "failed(" + t.reason + ")";
  }
}

std::string trajectory_csv(const Network& net, const Trajectory& traj) {
  std::string out = "t";
  for (const auto& s : net.species) out += "," + s.name;
  out += "\n";
  for (size_t i = 0; i < traj.times.size(); ++i) {
    out += fmt17(traj.times[i]);
    for (int sp = 0; sp < net.species_count(); ++sp) out += "," + fmt17(traj.states[i][sp]);
    out += "\n";
  }
  return out;
}

Json metrics_json(const Network& net, const Metrics& m, const SolverConfig& cfg, long seed) {
  Json j;
  j["aggregate"] = m.aggregate;
  j["per_species"] = Json::array();
  for (const auto& sm : m.per_species) {
    Json e;
    e["species"] = net.species[sm.species].name;
    e["rel_l2"] = sm.rel_l2;
    e["max_abs"] = sm.max_abs;
    e["steady_state_dev"] = sm.steady_state_dev;
    j["per_species"].push_back(e);
  }
  j["solver"] = {{"rtol", cfg.rtol}, {"atol", cfg.atol}, {"t_end", cfg.t_end}};
  j["seed"] = seed;
  return j;
}

void write_plot_csvs(const Network& net, const std::string& dir, const std::vector<int>& observed,
                     const std::vector<double>& grid, const Trajectory& full,
                     const Trajectory& reduced) {
  for (int sp : observed) {
    std::string csv = "t,full,reduced\n";
    for (double t : grid) {
      csv += fmt17(t);
      csv += "," + fmt17(full.sample(t)[sp]);
      csv += "," + fmt17(reduced.sample(t)[sp]);
      csv += "\n";
    }
    write_text_file(dir + "/plot_" + net.species[sp].name + ".csv", csv);
  }
}

ReducedNetwork load_plan(const Network& net, const StoichiometryView& view, const Manifest& mf,
                         const Eigen::VectorXd& x_ref) {
  if (!mf.plan.empty()) {
    Json j = Json::parse(read_text_file(mf.plan), nullptr, false);
    if (j.is_discarded()) throw ModelError("malformed plan JSON in '" + mf.plan + "'");
    return plan_from_json(net, view, j);
  }
  if (mf.remove.empty()) throw ModelError("no reduction given: set \"plan\" or \"remove\"");
  return plan_reduction(net, view, complex_indices(net, mf.remove), x_ref);
}

int cmd_info(const std::string& network_path) {
  Network net = load_network_file(network_path);
  StoichiometryView view = build_stoichiometry(net);
  auto basis = conservation_basis(view);

  std::printf("m=%d c=%d r=%d linkage_classes=%d\n", view.species_count(), view.complex_count(),
              view.edge_count(), view.linkage_classes);
  std::printf("rank_S=%d conservation_dim=%d\n", exact_rank(view.S),
              static_cast<int>(basis.size()));
  std::printf("complexes:\n");
  for (int ci = 0; ci < net.complex_count(); ++ci)
    std::printf("  [%d] %s\n", ci, net.complex_name(ci).c_str());
  std::printf("reactions:\n");
  for (const auto& r : net.reactions) {
    std::string kr = r.reversible ? " kr=" + format_double(r.law.k_reverse) : "";
    std::printf("  %s: %s %s %s (%s kf=%s%s)\n", r.id.c_str(),
                net.complex_name(r.substrate).c_str(), r.reversible ? "<->" : "->",
                net.complex_name(r.product).c_str(),
                r.law.kind == LawKind::MassAction ? "massaction" : "mm",
                format_double(r.law.k_forward).c_str(), kr.c_str());
  }
  if (!net.boundary.empty()) {
    std::printf("boundary:\n");
    for (const auto& b : net.boundary) {
      if (b.form == BoundaryFlux::Form::Constant)
        std::printf("  %s: constant %s\n", net.complex_name(b.complex).c_str(),
                    format_double(b.value).c_str());
      else
        std::printf("  %s: linear %s %s\n", net.complex_name(b.complex).c_str(),
                    net.species[b.species].name.c_str(), format_double(b.gain).c_str());
    }
  }
  return 0;
}

int cmd_reduce(const Manifest& mf, const std::vector<std::string>& remove_names,
               const std::map<std::string, double>& x_ref_entries) {
  Network net = load_network_file(mf.network);
  StoichiometryView view = build_stoichiometry(net);

  Eigen::VectorXd x_ref = Eigen::VectorXd::Ones(net.species_count());
  for (const auto& [name, v] : x_ref_entries) {
    int sp = net.find_species(name);
    if (sp < 0) throw ModelError("reference state names unknown species '" + name + "'");
    x_ref[sp] = v;
  }

  ReducedNetwork red;
  if (!remove_names.empty())
    red = plan_reduction(net, view, complex_indices(net, remove_names), x_ref);
  else {
    Manifest with_plan = mf;
    with_plan.remove.clear();
    red = load_plan(net, view, with_plan, x_ref);
  }

  SchurEval ev = ReducedEval(red).schur(red.x_ref);

  auto join = [&](const std::vector<int>& cs) {
    std::string s;
    for (int c : cs) s += (s.empty() ? "" : ", ") + net.complex_name(c);
    return s;
  };
  std::printf("kept: %s\n", join(red.kept).c_str());
  std::printf("removed: %s\n", join(red.removed).c_str());
  std::string frozen;
  for (int sp : red.constant_species)
    frozen += (frozen.empty() ? "" : ", ") + net.species[sp].name;
  std::printf("constant_species: %s\n", frozen.empty() ? "(none)" : frozen.c_str());
  std::printf("condition_estimate: %s\n", fmt17(ev.condition_estimate).c_str());

  write_text_file(mf.out + "/plan.json", plan_to_json(red).dump(2) + "\n");
  std::printf("wrote %s/plan.json\n", mf.out.c_str());
  return 0;
}

int cmd_simulate(const Manifest& mf) {
  Network net = load_network_file(mf.network);
  StoichiometryView view = build_stoichiometry(net);
  Eigen::VectorXd x0 = build_x0(net, mf);

  KineticsEval kin(net, view);
  Trajectory full = integrate(
      [&kin](double t, const Eigen::VectorXd& x, Eigen::VectorXd& dx) { kin.full_rhs(t, x, dx); },
      x0, mf.solver);
  write_text_file(mf.out + "/full.csv", trajectory_csv(net, full));
  std::printf("full: status=%s points=%zu accepted=%ld rejected=%ld rhs_evals=%ld\n",
              status_string(full).c_str(), full.times.size(), full.stats.accepted,
              full.stats.rejected, full.stats.rhs_evals);

  bool failed = full.status == Trajectory::Status::Failed;
  if (!mf.plan.empty() || !mf.remove.empty()) {
    ReducedNetwork red = load_plan(net, view, mf, x0);
    ReducedEval eval(red);
    Trajectory reduced = integrate(
        [&eval](double t, const Eigen::VectorXd& x, Eigen::VectorXd& dx) { eval.rhs(t, x, dx); },
        x0, mf.solver);
    write_text_file(mf.out + "/reduced.csv", trajectory_csv(net, reduced));
    std::printf("reduced: status=%s points=%zu accepted=%ld rejected=%ld rhs_evals=%ld\n",
                status_string(reduced).c_str(), reduced.times.size(), reduced.stats.accepted,
                reduced.stats.rejected, reduced.stats.rhs_evals);
    failed = failed || reduced.status == Trajectory::Status::Failed;
  }
  return failed ? 4 : 0;
}

int cmd_compare(const Manifest& mf) {
  Network net = load_network_file(mf.network);
  StoichiometryView view = build_stoichiometry(net);
  Eigen::VectorXd x0 = build_x0(net, mf);
  std::vector<int> observed = observed_indices(net, mf.observed);

  bool pulse = mf.equilibrate || !mf.pulse_scale.empty() || !mf.pulse_set.empty();

  Trajectory full, reduced;
  Metrics metrics;
  std::vector<double> grid = uniform_grid(mf.solver.t_end);
  ReducedNetwork red;

  if (pulse) {
    Eigen::VectorXd pre_state = x0;
    if (mf.equilibrate) {
      KineticsEval kin(net, view);
      SolverConfig pre_cfg = mf.solver;
      pre_cfg.t_end = mf.equilibrate_t_end;
      pre_cfg.detect_steady = true;
      Trajectory eq = integrate([&kin](double t, const Eigen::VectorXd& x,
                                       Eigen::VectorXd& dx) { kin.full_rhs(t, x, dx); },
                                x0, pre_cfg);
      if (eq.status == Trajectory::Status::Failed)
        throw IntegrationError("equilibration: " + eq.reason);
      pre_state = eq.final_state();
    }
    red = load_plan(net, view, mf, pre_state);

    std::map<int, double> overrides;
    for (const auto& [name, v] : mf.pulse_set) {
      int sp = net.find_species(name);
      if (sp < 0) throw ModelError("pulse names unknown species '" + name + "'");
      overrides[sp] = v;
    }
    for (const auto& [name, factor] : mf.pulse_scale) {
      int sp = net.find_species(name);
      if (sp < 0) throw ModelError("pulse names unknown species '" + name + "'");
      overrides[sp] = pre_state[sp] * factor;
    }

    ComparisonSpec spec;
    spec.observed = observed;
    spec.grid = grid;
    spec.denom_floor = mf.solver.atol;
    PulseResult result =
        pulse_experiment(net, view, red, pre_state, overrides, mf.solver, spec);
    full = std::move(result.full);
    reduced = std::move(result.reduced);
    metrics = std::move(result.metrics);
  } else {
    red = load_plan(net, view, mf, x0);
    KineticsEval kin(net, view);
    full = integrate([&kin](double t, const Eigen::VectorXd& x,
                            Eigen::VectorXd& dx) { kin.full_rhs(t, x, dx); },
                     x0, mf.solver);
    if (full.status == Trajectory::Status::Failed)
      throw IntegrationError("full model: " + full.reason);
    ReducedEval eval(red);
    reduced = integrate([&eval](double t, const Eigen::VectorXd& x,
                                Eigen::VectorXd& dx) { eval.rhs(t, x, dx); },
                        x0, mf.solver);
    if (reduced.status == Trajectory::Status::Failed)
      throw IntegrationError("reduced model: " + reduced.reason);

    ComparisonSpec spec;
    spec.grid = grid;
    spec.denom_floor = mf.solver.atol;
    for (int sp : observed)
      if (!red.frozen_values.count(sp)) spec.observed.push_back(sp);
    metrics = compare(full, reduced, spec);
  }

  write_text_file(mf.out + "/metrics.json",
                  metrics_json(net, metrics, mf.solver, mf.seed).dump(2) + "\n");
  std::vector<int> plotted;
  for (const auto& sm : metrics.per_species) plotted.push_back(sm.species);
  write_plot_csvs(net, mf.out, plotted, grid, full, reduced);
  std::printf("aggregate=%s\n", fmt17(metrics.aggregate).c_str());
  std::printf("wrote %s/metrics.json and %zu plot files\n", mf.out.c_str(), plotted.size());
  return 0;
}

int cmd_scan(const Manifest& mf) {
  Network net = load_network_file(mf.network);
  StoichiometryView view = build_stoichiometry(net);
  Eigen::VectorXd x0 = build_x0(net, mf);
  if (mf.candidates.empty()) throw ModelError("scan needs a non-empty candidate list");
  std::vector<int> candidates = complex_indices(net, mf.candidates);
  int budget = mf.budget > 0 ? mf.budget : std::min<int>(4, candidates.size());

  ScanOptions opts;
  opts.solver = mf.solver;
  opts.threads = mf.threads;
  opts.observed = observed_indices(net, mf.observed);

  std::vector<ScanEntry> ranking = scan_candidates(net, view, x0, candidates, budget, opts);

  Json j;
  j["budget"] = budget;
  j["seed"] = mf.seed;
  j["ranking"] = Json::array();
  for (const auto& e : ranking) {
    Json je;
    je["removed"] = Json::array();
    for (int c : e.removed) je["removed"].push_back(net.complex_name(c));
    je["feasible"] = e.feasible;
    if (e.feasible)
      je["score"] = e.score;
    else
      je["reason"] = e.reason;
    j["ranking"].push_back(je);
  }
  write_text_file(mf.out + "/scan.json", j.dump(2) + "\n");

  for (size_t i = 0; i < ranking.size() && i < 5; ++i) {
    const auto& e = ranking[i];
    std::string names;
    for (int c : e.removed) names += (names.empty() ? "" : " + ") + net.complex_name(c);
    if (e.feasible)
      std::printf("%zu. {%s} score=%s\n", i + 1, names.c_str(), fmt17(e.score).c_str());
    else
      std::printf("%zu. {%s} infeasible: %s\n", i + 1, names.c_str(), e.reason.c_str());
  }
  std::printf("wrote %s/scan.json (%zu subsets)\n", mf.out.c_str(), ranking.size());
  return 0;
}

int failure_exit(const std::exception& e) {
  std::cerr << "error: " << e.what() << "\n";
  if (dynamic_cast<const SingularBlockError*>(&e)) return 3;
  if (dynamic_cast<const IntegrationError*>(&e)) return 4;
  if (dynamic_cast<const NonFiniteRhsError*>(&e)) return 4;
  if (dynamic_cast<const GridCoverageError*>(&e)) return 4;
  if (dynamic_cast<const IoError*>(&e)) return 5;
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"reaction network construction, Kron reduction, and validation"};
  app.require_subcommand(1);

  std::string manifest_path, network_flag, plan_flag, out_flag, observed_flag;
  double rtol_flag = 0, atol_flag = 0, t_end_flag = 0;
  long seed_flag = 0;
  std::vector<std::string> remove_names;
  std::vector<std::string> x_ref_pairs;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--network", network_flag, "network file (.dsl or .json)");
    sub->add_option("--plan", plan_flag, "reduction plan JSON");
    sub->add_option("--out", out_flag, "output directory");
    sub->add_option("--rtol", rtol_flag, "relative tolerance");
    sub->add_option("--atol", atol_flag, "absolute tolerance");
    sub->add_option("--t-end", t_end_flag, "integration horizon");
    sub->add_option("--seed", seed_flag, "seed recorded in outputs");
    sub->add_option("--observed", observed_flag, "comma-separated species names");
  };

  CLI::App* info = app.add_subcommand("info", "structural report of a network");
  info->add_option("--network", network_flag, "network file")->required();

  CLI::App* reduce = app.add_subcommand("reduce", "plan a complex deletion");
  add_common(reduce);
  reduce->add_option("--remove", remove_names, "complex to delete (repeatable)");
  reduce->add_option("--x-ref", x_ref_pairs, "reference value NAME=VALUE (repeatable)");

  CLI::App* simulate = app.add_subcommand("simulate", "integrate full (and reduced) model");
  simulate->add_option("--manifest", manifest_path, "run manifest JSON");
  add_common(simulate);

  CLI::App* compare_cmd = app.add_subcommand("compare", "full-vs-reduced comparison metrics");
  compare_cmd->add_option("--manifest", manifest_path, "run manifest JSON");
  add_common(compare_cmd);

  CLI::App* scan = app.add_subcommand("scan", "rank candidate deletion subsets");
  scan->add_option("--manifest", manifest_path, "run manifest JSON");
  add_common(scan);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    Manifest mf;
    if (!manifest_path.empty()) mf = load_manifest(manifest_path);
    if (!network_flag.empty()) mf.network = network_flag;
    if (!plan_flag.empty()) mf.plan = plan_flag;
    if (!out_flag.empty()) mf.out = out_flag;
    if (rtol_flag > 0) mf.solver.rtol = rtol_flag;
    if (atol_flag > 0) mf.solver.atol = atol_flag;
    if (t_end_flag > 0) mf.solver.t_end = t_end_flag;
    if (seed_flag != 0) mf.seed = seed_flag;
    if (!observed_flag.empty()) {
      mf.observed.clear();
      std::string cur;
      for (char ch : observed_flag + ",") {
        if (ch == ',') {
          if (!cur.empty()) mf.observed.push_back(cur);
          cur.clear();
        } else
          cur += ch;
      }
    }
    if (mf.network.empty()) throw ModelError("no network file given");

    if (info->parsed()) return cmd_info(mf.network);
    if (reduce->parsed()) {
      std::map<std::string, double> x_ref_entries;
      for (const auto& pair : x_ref_pairs) {
        auto eq = pair.find('=');
        if (eq == std::string::npos)
          throw ModelError("--x-ref expects NAME=VALUE, got '" + pair + "'");
        x_ref_entries[pair.substr(0, eq)] = std::stod(pair.substr(eq + 1));
      }
      return cmd_reduce(mf, remove_names, x_ref_entries);
    }
    if (simulate->parsed()) return cmd_simulate(mf);
    if (compare_cmd->parsed()) return cmd_compare(mf);
    if (scan->parsed()) return cmd_scan(mf);
  } catch (const std::exception& e) {
    return failure_exit(e);
  }
  return 0;
}
