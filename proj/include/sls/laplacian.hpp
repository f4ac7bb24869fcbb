#pragma once

#include "sls/dataset.hpp"
#include "sls/graph.hpp"
#include "sls/types.hpp"

#include <string>
#include <vector>

namespace sls {

/// Graph Laplacian: raw L = D - A (signed A), or normalized
/// L = I - D^{-1/2} A D^{-1/2} with zero rows for isolated vertices.
/// Positive semi-definite by construction.
struct Laplacian {
  SparseMatrix matrix;
  Vector diag;  // cached diagonal
  bool normalized = false;

  Index p() const { return matrix.rows(); }
  static Laplacian zero(Index p);
  static Laplacian from_matrix(SparseMatrix m, bool normalized = false);
};

Laplacian build_laplacian(const AdjacencyMatrix& adj, bool normalized = false);

/// Quadratic form b'Lb. Equals the pairwise sum
/// sum_{j<k} |a_jk| (b_j - s_jk b_k)^2 for a raw Laplacian.
double laplacian_quadratic(const Laplacian& L, const Eigen::Ref<const Vector>& b);

/// Connected components of the adjacency graph, each sorted ascending, listed
/// by smallest member. Isolated vertices appear as singletons.
std::vector<std::vector<Index>> connected_components(const AdjacencyMatrix& adj);

struct UnbiasednessCheck {
  bool unbiased = false;
  double residual = 0.0;  // ||L_O beta_O||_inf over the support submatrix
};

/// A Laplacian is unbiased for beta on support O when L_O beta_O = 0, in which
/// case the oracle shrinkage estimator has no bias from the quadratic term.
UnbiasednessCheck is_unbiased(const Laplacian& L, const std::vector<Index>& support,
                              const Eigen::Ref<const Vector>& beta, double tol = 1e-8);

/// Stacked design folding the Laplacian penalty into least squares:
/// X~ = [X; (n lambda2 L)^{1/2}], y~ = [y; 0], so that X~'X~/n = Sigma + lambda2 L
/// and X~'y~ = X'y.
struct AugmentedData {
  Matrix X_tilde;
  Vector y_tilde;
  double lambda2 = 0.0;
};

AugmentedData augment(const StandardizedDataset& ds, const Laplacian& L, double lambda2);

/// Coordinate-list export: lines "j k value", 0-based, upper triangle with diagonal.
void save_laplacian(const Laplacian& L, const std::string& path);

}  // namespace sls
