#include "kronred/stoichiometry.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "kronred/errors.hpp"

namespace kronred {
namespace {

// Exact fraction on 64-bit components. Arithmetic is overflow-checked so a
// pathological elimination fails loudly instead of silently wrapping.
struct Rat {
  long long num = 0;
  long long den = 1;

  Rat() = default;
  Rat(long long n) : num(n), den(1) {}
  Rat(long long n, long long d) : num(n), den(d) { normalize(); }

  void normalize() {
    if (den == 0) throw OverflowError("rational with zero denominator");
    if (den < 0) {
      num = checked_neg(num);
      den = checked_neg(den);
    }
    long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
    if (num == 0) den = 1;
  }

  static long long checked_neg(long long v) {
    if (v == std::numeric_limits<long long>::min())
      throw OverflowError("integer overflow in exact elimination");
    return -v;
  }
  static long long mul(long long a, long long b) {
    long long r;
    if (__builtin_mul_overflow(a, b, &r))
      throw OverflowError("integer overflow in exact elimination");
    return r;
  }
  static long long add(long long a, long long b) {
    long long r;
    if (__builtin_add_overflow(a, b, &r))
      throw OverflowError("integer overflow in exact elimination");
    return r;
  }

  bool zero() const { return num == 0; }

  Rat operator*(const Rat& o) const {
    // Cross-reduce before multiplying to keep components small.
    long long g1 = std::gcd(num < 0 ? -num : num, o.den);
    long long g2 = std::gcd(o.num < 0 ? -o.num : o.num, den);
    Rat r;
    r.num = mul(num / g1, o.num / g2);
    r.den = mul(den / g2, o.den / g1);
    r.normalize();
    return r;
  }
  Rat operator/(const Rat& o) const {
    if (o.zero()) throw OverflowError("division by zero in exact elimination");
    return *this * Rat(o.den, o.num);
  }
  Rat operator-(const Rat& o) const {
    long long g = std::gcd(den, o.den);
    long long l = mul(den / g, o.den);
    long long a = mul(num, l / den);
    long long b = mul(o.num, l / o.den);
    Rat r;
    r.num = add(a, checked_neg(b));
    r.den = l;
    r.normalize();
    return r;
  }
};

using RatMatrix = std::vector<std::vector<Rat>>;

RatMatrix to_rat(const Eigen::MatrixXi& M) {
  RatMatrix A(M.rows(), std::vector<Rat>(M.cols()));
  for (int i = 0; i < M.rows(); ++i)
    for (int j = 0; j < M.cols(); ++j) A[i][j] = Rat(M(i, j));
  return A;
}

// In-place reduced row echelon form; returns pivot columns.
std::vector<int> rref(RatMatrix& A) {
  std::vector<int> pivots;
  if (A.empty()) return pivots;
  int rows = static_cast<int>(A.size());
  int cols = static_cast<int>(A[0].size());
  int row = 0;
  for (int col = 0; col < cols && row < rows; ++col) {
    int pivot = -1;
    for (int i = row; i < rows; ++i)
      if (!A[i][col].zero()) {
        pivot = i;
        break;
      }
    if (pivot < 0) continue;
    std::swap(A[row], A[pivot]);
    Rat inv = Rat(1) / A[row][col];
    for (int j = col; j < cols; ++j) A[row][j] = A[row][j] * inv;
    for (int i = 0; i < rows; ++i) {
      if (i == row || A[i][col].zero()) continue;
      Rat f = A[i][col];
      for (int j = col; j < cols; ++j) A[i][j] = A[i][j] - f * A[row][j];
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

StoichiometryView build_stoichiometry(const Network& net) {
  if (net.reactions.empty()) throw ModelError("no reactions");
  const int m = net.species_count();
  const int c = net.complex_count();

  StoichiometryView view;
  view.Z = Eigen::MatrixXi::Zero(m, c);
  for (const auto& cx : net.complexes)
    for (const auto& [sp, coeff] : cx.composition) view.Z(sp, cx.index) = coeff;

  for (const auto& r : net.reactions) {
    view.edges.push_back({r.substrate, r.product, static_cast<int>(&r - net.reactions.data()),
                          false, r.law.k_forward});
    if (r.reversible)
      view.edges.push_back({r.product, r.substrate, static_cast<int>(&r - net.reactions.data()),
                            true, r.law.k_reverse});
  }
  const int r = static_cast<int>(view.edges.size());
  view.B = Eigen::MatrixXi::Zero(c, r);
  for (int j = 0; j < r; ++j) {
    view.B(view.edges[j].tail, j) = -1;
    view.B(view.edges[j].head, j) = 1;
  }
  view.S = view.Z * view.B;

  UnionFind uf(c);
  for (const auto& e : view.edges) uf.unite(e.tail, e.head);
  std::vector<int> root_slot(c, -1);
  for (int v = 0; v < c; ++v) {
    int root = uf.find(v);
    if (root_slot[root] < 0) {
      root_slot[root] = static_cast<int>(view.linkage_partition.size());
      view.linkage_partition.emplace_back();
    }
    view.linkage_partition[root_slot[root]].push_back(v);
  }
  view.linkage_classes = static_cast<int>(view.linkage_partition.size());

  view.rank_B = exact_rank(view.B);
  if (view.linkage_classes != c - view.rank_B)
    throw ModelError("linkage class count disagrees with c - rank(B)");
  return view;
}

int exact_rank(const Eigen::MatrixXi& M) {
  if (M.rows() == 0 || M.cols() == 0) return 0;
  RatMatrix A = to_rat(M);
  return static_cast<int>(rref(A).size());
}

std::vector<Eigen::VectorXi> conservation_basis(const StoichiometryView& view) {
  const int m = view.species_count();
  const int c = view.complex_count();
  std::vector<Eigen::VectorXi> basis;
  if (m == 0) return basis;

  // Null space of Z^T: rows are complexes, columns are species.
  Eigen::MatrixXi Zt = view.Z.transpose();
  RatMatrix A = to_rat(Zt);
  if (c == 0) {
    for (int i = 0; i < m; ++i) {
      Eigen::VectorXi w = Eigen::VectorXi::Zero(m);
      w[i] = 1;
      basis.push_back(w);
    }
    return basis;
  }
  std::vector<int> pivots = rref(A);
  std::vector<bool> is_pivot(m, false);
  for (int p : pivots) is_pivot[p] = true;

  for (int free_col = 0; free_col < m; ++free_col) {
    if (is_pivot[free_col]) continue;
    // w[free_col] = 1, pivot entries read off the reduced rows.
    std::vector<Rat> w(m);
    w[free_col] = Rat(1);
    for (size_t row = 0; row < pivots.size(); ++row)
      w[pivots[row]] = Rat(0) - A[row][free_col];

    long long lcm = 1;
    for (const auto& e : w) lcm = Rat::mul(lcm / std::gcd(lcm, e.den), e.den);
    Eigen::VectorXi v(m);
    for (int i = 0; i < m; ++i) v[i] = static_cast<int>(Rat::mul(w[i].num, lcm / w[i].den));
    long long g = 0;
    for (int i = 0; i < m; ++i) g = std::gcd(g, static_cast<long long>(v[i] < 0 ? -v[i] : v[i]));
    if (g > 1)
      for (int i = 0; i < m; ++i) v[i] = static_cast<int>(v[i] / g);
    // Sign convention: first nonzero positive.
    for (int i = 0; i < m; ++i) {
      if (v[i] == 0) continue;
      if (v[i] < 0) v = -v;
      break;
    }
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace kronred
