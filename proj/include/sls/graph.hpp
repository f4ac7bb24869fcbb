#pragma once

#include "sls/dataset.hpp"
#include "sls/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sls {

struct CorrelationMatrix {
  Matrix r;      // p x p, symmetric, unit diagonal, entries in [-1, 1]
  Index n = 0;   // sample size behind the correlations

  Index p() const { return r.rows(); }
};

/// Pearson correlations of a standardized design: r_jk = x_j'x_k / n.
CorrelationMatrix correlations(const StandardizedDataset& ds);

/// Correlation threshold from a normal-scale cutoff c via the Fisher
/// transformation: r = tanh(c / sqrt(n - 3)). Requires n >= 4, c > 0.
double fisher_cutoff(double c, Index n);

enum class AdjacencyKind {
  DissimilarityThreshold,  // N.1: a_jk = 1{r_jk > r},  s = +1
  SignedThreshold,         // N.2: a_jk = 1{|r_jk| > r}, s = sgn(r_jk)
  Power,                   // N.3: a_jk = max(0, r_jk)^alpha, s = +1
  SignedPower,             // N.4: a_jk = |r_jk|^alpha, s = sgn(r_jk)
  Partition
};

struct AdjacencyScheme {
  AdjacencyKind kind = AdjacencyKind::DissimilarityThreshold;
  double cutoff = 3.09;  // normal-scale threshold c for N.1/N.2
  std::optional<double> correlation_threshold;  // direct r in (0,1); overrides cutoff
  double alpha = 6.0;                           // exponent for N.3/N.4
  double sparsity_floor = 1e-8;  // power-scheme weights below this are dropped
  std::vector<std::vector<Index>> blocks;       // Partition only

  static AdjacencyScheme n1(double c = 3.09);
  static AdjacencyScheme n2(double c = 3.29);
  static AdjacencyScheme n3(double alpha = 6.0);
  static AdjacencyScheme n4(double alpha = 6.0);
  void validate() const;

  /// The effective correlation threshold for a threshold scheme at sample size n.
  double resolve_threshold(Index n) const;
};

/// Signed adjacency of the predictor graph: entry (j, k) is s_jk * |a_jk| with
/// zero diagonal; degrees d_j are row sums of |a_jk|.
struct AdjacencyMatrix {
  SparseMatrix signed_weights;
  Vector degrees;

  Index p() const { return signed_weights.rows(); }
  Index edge_count() const { return signed_weights.nonZeros() / 2; }
  double weight(Index j, Index k) const { return std::abs(signed_weights.coeff(j, k)); }
  double sign(Index j, Index k) const {
    const double v = signed_weights.coeff(j, k);
    return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0);
  }

  static AdjacencyMatrix empty(Index p);
};

AdjacencyMatrix build_adjacency(const CorrelationMatrix& corr, const AdjacencyScheme& scheme);

/// Clique adjacency of disjoint blocks covering {0..p-1}: weight 1/|block|
/// between every pair inside a block, positive sign. The raw Laplacian of this
/// adjacency is the block-wise centering projection I - 11'/|block|.
AdjacencyMatrix partition_adjacency(Index p, const std::vector<std::vector<Index>>& blocks);

/// Subgraph on `keep` (sorted ascending); degrees recomputed from surviving edges.
AdjacencyMatrix restrict_adjacency(const AdjacencyMatrix& adj, const std::vector<Index>& keep);

/// Coordinate-list text: lines "j k weight sign", 0-based, one per edge (j < k).
void save_adjacency(const AdjacencyMatrix& adj, const std::string& path);
AdjacencyMatrix load_adjacency(const std::string& path);

}  // namespace sls
