#ifndef KRONRED_SCAN_HPP
#define KRONRED_SCAN_HPP

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kronred/compare.hpp"
#include "kronred/network.hpp"
#include "kronred/stoichiometry.hpp"

namespace kronred {

struct ScanOptions {
  int max_subset_size = 4;  // exhaustive enumeration cap; larger sizes go greedy
  int threads = 0;          // 0: runtime default; KRONRED_THREADS caps either way
  SolverConfig solver;
  std::vector<int> observed;
};

struct ScanEntry {
  std::vector<int> removed;
  double score = 0.0;
  bool feasible = false;
  std::string reason;  // failure reason when infeasible
};

/// Effective worker count after applying the KRONRED_THREADS cap.
int scan_thread_count(int requested);

/// Scores every candidate deletion subset: exhaustively for sizes up to
/// min(budget, max_subset_size), then greedy single-candidate extensions up
/// to the budget. Each subset is planned at x0, simulated, and compared
/// against one shared full-model trajectory; infeasible subsets (singular
/// block, integration failure, every observed species frozen) are kept in
/// the ranking with their reason. Returns feasible entries sorted ascending
/// by score, then infeasible ones, ties broken by subset size and indices.
std::vector<ScanEntry> scan_candidates(const Network& net, const StoichiometryView& view,
                                       const Eigen::VectorXd& x0,
                                       const std::vector<int>& candidates, int budget,
                                       const ScanOptions& opts);

/// Single-threaded reference producing bit-identical results.
std::vector<ScanEntry> scan_candidates_serial(const Network& net, const StoichiometryView& view,
                                              const Eigen::VectorXd& x0,
                                              const std::vector<int>& candidates, int budget,
                                              const ScanOptions& opts);

}  // namespace kronred

#endif  // KRONRED_SCAN_HPP
