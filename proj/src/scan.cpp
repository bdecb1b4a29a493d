#include "kronred/scan.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "kronred/errors.hpp"
#include "kronred/integrate.hpp"
#include "kronred/kinetics.hpp"
#include "kronred/reduction.hpp"

namespace kronred {

namespace {

ScanEntry evaluate_subset(const Network& net, const StoichiometryView& view,
                          const Eigen::VectorXd& x0, const std::vector<int>& subset,
                          const Trajectory& full, const ScanOptions& opts) {
  ScanEntry entry;
  entry.removed = subset;
  try {
    ReducedNetwork red = plan_reduction(net, view, subset, x0);

    std::vector<int> observed;
    for (int sp : opts.observed)
      if (!red.frozen_values.count(sp)) observed.push_back(sp);
    if (observed.empty()) {
      entry.reason = "every observed species is frozen";
      return entry;
    }

    ReducedEval eval(red);
    Trajectory traj = integrate(
        [&eval](double t, const Eigen::VectorXd& x, Eigen::VectorXd& dx) { eval.rhs(t, x, dx); },
        x0, opts.solver);
    if (traj.status == Trajectory::Status::Failed) {
      entry.reason = "reduced integration failed: " + traj.reason;
      return entry;
    }

    ComparisonSpec spec;
    spec.observed = observed;
    spec.grid = uniform_grid(opts.solver.t_end);
    spec.denom_floor = opts.solver.atol;
    entry.score = compare(full, traj, spec).aggregate;
    entry.feasible = true;
  } catch (const Error& e) {
    entry.reason = e.what();
  }
  return entry;
}

void subsets_of_size(const std::vector<int>& pool, int size, std::vector<int>& current,
                     size_t start, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(current.size()) == size) {
    out.push_back(current);
    return;
  }
  for (size_t i = start; i < pool.size(); ++i) {
    current.push_back(pool[i]);
    subsets_of_size(pool, size, current, i + 1, out);
    current.pop_back();
  }
}

bool ranks_before(const ScanEntry& a, const ScanEntry& b) {
  if (a.feasible != b.feasible) return a.feasible;
  if (a.feasible && a.score != b.score) return a.score < b.score;
  if (a.removed.size() != b.removed.size()) return a.removed.size() < b.removed.size();
  return a.removed < b.removed;
}

std::vector<ScanEntry> scan_impl(const Network& net, const StoichiometryView& view,
                                 const Eigen::VectorXd& x0, const std::vector<int>& candidates,
                                 int budget, const ScanOptions& opts, int threads) {
  std::vector<int> pool;
  for (int c : candidates)
    if (std::find(pool.begin(), pool.end(), c) == pool.end()) pool.push_back(c);
  std::sort(pool.begin(), pool.end());

  std::vector<ScanEntry> ranking;
  int limit = std::min<int>(budget, static_cast<int>(pool.size()));
  if (pool.empty() || limit <= 0) return ranking;

  KineticsEval kin(net, view);
  Trajectory full = integrate(
      [&kin](double t, const Eigen::VectorXd& x, Eigen::VectorXd& dx) { kin.full_rhs(t, x, dx); },
      x0, opts.solver);
  if (full.status == Trajectory::Status::Failed)
    throw IntegrationError("full model: " + full.reason);

  std::vector<std::vector<int>> queue;
  std::vector<int> scratch;
  for (int size = 1; size <= std::min(limit, opts.max_subset_size); ++size)
    subsets_of_size(pool, size, scratch, 0, queue);

  std::set<std::vector<int>> seen(queue.begin(), queue.end());

  auto run_queue = [&](const std::vector<std::vector<int>>& batch) {
    std::vector<ScanEntry> results(batch.size());
    if (threads > 1) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#endif
      for (long i = 0; i < static_cast<long>(batch.size()); ++i)
        results[i] = evaluate_subset(net, view, x0, batch[i], full, opts);
    } else {
      for (size_t i = 0; i < batch.size(); ++i)
        results[i] = evaluate_subset(net, view, x0, batch[i], full, opts);
    }
    return results;
  };

  std::vector<ScanEntry> results = run_queue(queue);
  ranking.insert(ranking.end(), results.begin(), results.end());

  // Greedy tail: grow the current best feasible subset one candidate at a
  // time until the budget, scoring every one-step extension.
  for (int size = opts.max_subset_size + 1; size <= limit; ++size) {
    const ScanEntry* best = nullptr;
    for (const auto& e : ranking)
      if (e.feasible && static_cast<int>(e.removed.size()) == size - 1 &&
          (!best || e.score < best->score || (e.score == best->score && e.removed < best->removed)))
        best = &e;
    if (!best) break;

    std::vector<std::vector<int>> extensions;
    for (int c : pool) {
      if (std::find(best->removed.begin(), best->removed.end(), c) != best->removed.end())
        continue;
      std::vector<int> ext = best->removed;
      ext.push_back(c);
      std::sort(ext.begin(), ext.end());
      if (seen.insert(ext).second) extensions.push_back(ext);
    }
    if (extensions.empty()) break;
    std::sort(extensions.begin(), extensions.end());
    std::vector<ScanEntry> batch = run_queue(extensions);
    ranking.insert(ranking.end(), batch.begin(), batch.end());
  }

  std::stable_sort(ranking.begin(), ranking.end(), ranks_before);
  return ranking;
}

}  // namespace

int scan_thread_count(int requested) {
#ifdef _OPENMP
  int n = requested > 0 ? requested : omp_get_max_threads();
#else
  int n = requested > 0 ? requested : 1;
#endif
  if (const char* env = std::getenv("KRONRED_THREADS")) {
    int cap = std::atoi(env);
    if (cap > 0) n = std::min(n, cap);
  }
  return std::max(1, n);
}

std::vector<ScanEntry> scan_candidates(const Network& net, const StoichiometryView& view,
                                       const Eigen::VectorXd& x0,
                                       const std::vector<int>& candidates, int budget,
                                       const ScanOptions& opts) {
  return scan_impl(net, view, x0, candidates, budget, opts, scan_thread_count(opts.threads));
}

std::vector<ScanEntry> scan_candidates_serial(const Network& net, const StoichiometryView& view,
                                              const Eigen::VectorXd& x0,
                                              const std::vector<int>& candidates, int budget,
                                              const ScanOptions& opts) {
  return scan_impl(net, view, x0, candidates, budget, opts, 1);
}

}  // namespace kronred
