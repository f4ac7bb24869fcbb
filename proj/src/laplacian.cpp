#include "sls/laplacian.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <deque>
#include <fstream>

namespace sls {

Laplacian Laplacian::zero(Index p) {
  Laplacian L;
  L.matrix = SparseMatrix(p, p);
  L.diag = Vector::Zero(p);
  return L;
}

Laplacian Laplacian::from_matrix(SparseMatrix m, bool normalized) {
  if (m.rows() != m.cols()) throw ValidationError("laplacian: matrix must be square");
  Laplacian L;
  L.matrix = std::move(m);
  L.matrix.makeCompressed();
  L.normalized = normalized;
  L.diag = L.matrix.diagonal();
  return L;
}

Laplacian build_laplacian(const AdjacencyMatrix& adj, bool normalized) {
  const Index p = adj.p();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(adj.signed_weights.nonZeros() + p));

  if (!normalized) {
    for (Index j = 0; j < p; ++j) {
      if (adj.degrees[j] != 0.0) triplets.emplace_back(j, j, adj.degrees[j]);
      for (SparseMatrix::InnerIterator it(adj.signed_weights, j); it; ++it)
        triplets.emplace_back(it.row(), j, -it.value());
    }
  } else {
    // Isolated vertices get all-zero rows so lambda2 never shrinks them.
    for (Index j = 0; j < p; ++j) {
      if (adj.degrees[j] <= 0.0) continue;
      triplets.emplace_back(j, j, 1.0);
      const double dj = adj.degrees[j];
      for (SparseMatrix::InnerIterator it(adj.signed_weights, j); it; ++it) {
        const double dk = adj.degrees[it.row()];
        triplets.emplace_back(it.row(), j, -it.value() / std::sqrt(dj * dk));
      }
    }
  }

  SparseMatrix m(p, p);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return Laplacian::from_matrix(std::move(m), normalized);
}

double laplacian_quadratic(const Laplacian& L, const Eigen::Ref<const Vector>& b) {
  if (b.size() != L.p())
    throw ValidationError("laplacian_quadratic: vector length " + std::to_string(b.size()) +
                          " does not match p=" + std::to_string(L.p()));
  return b.dot(L.matrix * b);
}

std::vector<std::vector<Index>> connected_components(const AdjacencyMatrix& adj) {
  const Index p = adj.p();
  std::vector<std::vector<Index>> components;
  std::vector<bool> visited(static_cast<std::size_t>(p), false);
  for (Index start = 0; start < p; ++start) {
    if (visited[static_cast<std::size_t>(start)]) continue;
    std::vector<Index> comp;
    std::deque<Index> queue{start};
    visited[static_cast<std::size_t>(start)] = true;
    while (!queue.empty()) {
      const Index j = queue.front();
      queue.pop_front();
      comp.push_back(j);
      for (SparseMatrix::InnerIterator it(adj.signed_weights, j); it; ++it) {
        const Index k = it.row();
        if (!visited[static_cast<std::size_t>(k)]) {
          visited[static_cast<std::size_t>(k)] = true;
          queue.push_back(k);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    components.push_back(std::move(comp));
  }
  return components;
}

UnbiasednessCheck is_unbiased(const Laplacian& L, const std::vector<Index>& support,
                              const Eigen::Ref<const Vector>& beta, double tol) {
  if (support.empty()) throw ValidationError("is_unbiased: support must be nonempty");
  if (beta.size() != L.p()) throw ValidationError("is_unbiased: beta length does not match p");
  std::vector<Index> position(static_cast<std::size_t>(L.p()), -1);
  for (std::size_t i = 0; i < support.size(); ++i) {
    const Index j = support[i];
    if (j < 0 || j >= L.p()) throw ValidationError("is_unbiased: support index out of range");
    position[static_cast<std::size_t>(j)] = static_cast<Index>(i);
  }
  Vector residual = Vector::Zero(static_cast<Index>(support.size()));
  for (const Index j : support) {
    for (SparseMatrix::InnerIterator it(L.matrix, j); it; ++it) {
      const Index rpos = position[static_cast<std::size_t>(it.row())];
      if (rpos < 0) continue;
      residual[rpos] += it.value() * beta[j];
    }
  }
  UnbiasednessCheck check;
  check.residual = residual.size() > 0 ? residual.lpNorm<Eigen::Infinity>() : 0.0;
  check.unbiased = check.residual <= tol;
  return check;
}

AugmentedData augment(const StandardizedDataset& ds, const Laplacian& L, double lambda2) {
  if (!(lambda2 >= 0.0)) throw ValidationError("augment: lambda2 must be >= 0");
  const Index n = ds.n();
  const Index p = ds.p();
  if (L.p() != p) throw ValidationError("augment: Laplacian size does not match p");

  AugmentedData out;
  out.lambda2 = lambda2;
  out.X_tilde.resize(n + p, p);
  out.X_tilde.topRows(n) = ds.X_s;
  out.y_tilde = Vector::Zero(n + p);
  out.y_tilde.head(n) = ds.y_c;

  if (lambda2 == 0.0 || L.matrix.nonZeros() == 0) {
    out.X_tilde.bottomRows(p).setZero();
    return out;
  }

  // Symmetric PSD square root of n*lambda2*L via eigen-decomposition, with
  // small negative eigenvalues from rounding clamped to zero.
  const Matrix dense = Matrix(L.matrix) * (static_cast<double>(n) * lambda2);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(dense);
  if (eig.info() != Eigen::Success)
    throw NumericalError("augment: eigen-decomposition of the Laplacian failed");
  const double scale = std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
  Vector roots = eig.eigenvalues();
  for (Index i = 0; i < roots.size(); ++i) {
    if (roots[i] < -1e-10 * scale)
      throw NumericalError("augment: Laplacian is not positive semi-definite (eigenvalue " +
                           std::to_string(roots[i]) + ")");
    roots[i] = std::sqrt(std::max(0.0, roots[i]));
  }
  out.X_tilde.bottomRows(p) =
      eig.eigenvectors() * roots.asDiagonal() * eig.eigenvectors().transpose();
  return out;
}

void save_laplacian(const Laplacian& L, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("save_laplacian: cannot write '" + path + "'");
  out << "# p " << L.p() << " normalized " << (L.normalized ? 1 : 0) << "\n";
  out.precision(17);
  for (Index j = 0; j < L.p(); ++j)
    for (SparseMatrix::InnerIterator it(L.matrix, j); it; ++it) {
      if (it.row() > it.col()) continue;
      out << it.row() << ' ' << it.col() << ' ' << it.value() << "\n";
    }
}

}  // namespace sls
