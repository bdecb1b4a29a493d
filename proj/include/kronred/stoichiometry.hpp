#ifndef KRONRED_STOICHIOMETRY_HPP
#define KRONRED_STOICHIOMETRY_HPP

#include <vector>

#include <Eigen/Dense>

#include "kronred/network.hpp"

namespace kronred {

/// One directed edge of the complex graph. A reversible reaction expands to
/// two edges (forward first) sharing the reaction's denominator.
struct DirectedEdge {
  int tail = -1;      // substrate complex
  int head = -1;      // product complex
  int reaction = -1;  // owning reaction index
  bool reverse = false;
  double k = 0.0;     // rate constant of this direction
};

/// Integer stoichiometric structure derived from a Network: the complex
/// composition matrix Z (m x c), the incidence matrix B (c x r, one column
/// per directed edge, -1 tail / +1 head), their product S = Z B, the directed
/// edge list, and the connected components of the complex graph.
struct StoichiometryView {
  Eigen::MatrixXi Z;
  Eigen::MatrixXi B;
  Eigen::MatrixXi S;
  std::vector<DirectedEdge> edges;
  std::vector<std::vector<int>> linkage_partition;
  int linkage_classes = 0;
  int rank_B = 0;

  int species_count() const { return static_cast<int>(Z.rows()); }
  int complex_count() const { return static_cast<int>(Z.cols()); }
  int edge_count() const { return static_cast<int>(B.cols()); }
};

/// Expands reactions to directed edges and assembles Z, B, S. Linkage classes
/// come from union-find over the undirected edges; rank(B) is computed
/// exactly over the rationals and cross-checks the component count.
StoichiometryView build_stoichiometry(const Network& net);

/// Exact rank of an integer matrix over the rationals (fraction elimination
/// with overflow diagnostics).
int exact_rank(const Eigen::MatrixXi& M);

/// Integer basis of the left null space of Z: vectors w with w^T Z = 0,
/// cleared to primitive integer form, deterministic order. Since S = Z B,
/// every such w also satisfies w^T S = 0. Empty when Z has full row rank.
std::vector<Eigen::VectorXi> conservation_basis(const StoichiometryView& view);

}  // namespace kronred

#endif  // KRONRED_STOICHIOMETRY_HPP
