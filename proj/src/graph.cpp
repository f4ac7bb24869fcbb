#include "sls/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace sls {

CorrelationMatrix correlations(const StandardizedDataset& ds) {
  CorrelationMatrix out;
  out.n = ds.n();
  out.r = (ds.X_s.transpose() * ds.X_s) / static_cast<double>(ds.n());
  // Force exact symmetry, clamp rounding and pin the diagonal.
  out.r = 0.5 * (out.r + out.r.transpose()).eval();
  out.r = out.r.cwiseMax(-1.0).cwiseMin(1.0);
  out.r.diagonal().setOnes();
  return out;
}

double fisher_cutoff(double c, Index n) {
  if (n <= 3) throw ValidationError("fisher_cutoff: n >= 4 required, got n=" + std::to_string(n));
  if (!(c > 0.0)) throw ValidationError("fisher_cutoff: cutoff c must be > 0");
  return std::tanh(c / std::sqrt(static_cast<double>(n - 3)));
}

AdjacencyScheme AdjacencyScheme::n1(double c) {
  AdjacencyScheme s;
  s.kind = AdjacencyKind::DissimilarityThreshold;
  s.cutoff = c;
  return s;
}

AdjacencyScheme AdjacencyScheme::n2(double c) {
  AdjacencyScheme s;
  s.kind = AdjacencyKind::SignedThreshold;
  s.cutoff = c;
  return s;
}

AdjacencyScheme AdjacencyScheme::n3(double alpha) {
  AdjacencyScheme s;
  s.kind = AdjacencyKind::Power;
  s.alpha = alpha;
  return s;
}

AdjacencyScheme AdjacencyScheme::n4(double alpha) {
  AdjacencyScheme s;
  s.kind = AdjacencyKind::SignedPower;
  s.alpha = alpha;
  return s;
}

void AdjacencyScheme::validate() const {
  switch (kind) {
    case AdjacencyKind::DissimilarityThreshold:
    case AdjacencyKind::SignedThreshold:
      if (correlation_threshold) {
        const double r = *correlation_threshold;
        if (!(r > 0.0 && r < 1.0))
          throw ValidationError("adjacency scheme: correlation threshold must lie in (0, 1)");
      } else if (!(cutoff > 0.0)) {
        throw ValidationError("adjacency scheme: normal-scale cutoff c must be > 0");
      }
      break;
    case AdjacencyKind::Power:
    case AdjacencyKind::SignedPower:
      if (!(alpha > 0.0)) throw ValidationError("adjacency scheme: alpha must be > 0");
      break;
    case AdjacencyKind::Partition:
      if (blocks.empty()) throw ValidationError("adjacency scheme: partition blocks are required");
      break;
  }
}

double AdjacencyScheme::resolve_threshold(Index n) const {
  if (correlation_threshold) return *correlation_threshold;
  return fisher_cutoff(cutoff, n);
}

AdjacencyMatrix AdjacencyMatrix::empty(Index p) {
  AdjacencyMatrix adj;
  adj.signed_weights = SparseMatrix(p, p);
  adj.degrees = Vector::Zero(p);
  return adj;
}

namespace {

AdjacencyMatrix from_triplets(Index p, const std::vector<Eigen::Triplet<double>>& triplets) {
  AdjacencyMatrix adj;
  adj.signed_weights = SparseMatrix(p, p);
  adj.signed_weights.setFromTriplets(triplets.begin(), triplets.end());
  adj.signed_weights.makeCompressed();
  adj.degrees = Vector::Zero(p);
  for (Index j = 0; j < p; ++j)
    for (SparseMatrix::InnerIterator it(adj.signed_weights, j); it; ++it)
      adj.degrees[it.row()] += std::abs(it.value());
  return adj;
}

}  // namespace

AdjacencyMatrix build_adjacency(const CorrelationMatrix& corr, const AdjacencyScheme& scheme) {
  scheme.validate();
  if (scheme.kind == AdjacencyKind::Partition)
    return partition_adjacency(corr.p(), scheme.blocks);

  const Index p = corr.p();
  std::vector<Eigen::Triplet<double>> triplets;
  auto add_edge = [&](Index j, Index k, double signed_weight) {
    triplets.emplace_back(j, k, signed_weight);
    triplets.emplace_back(k, j, signed_weight);
  };

  switch (scheme.kind) {
    case AdjacencyKind::DissimilarityThreshold: {
      const double r = scheme.resolve_threshold(corr.n);
      for (Index j = 0; j < p; ++j)
        for (Index k = j + 1; k < p; ++k)
          if (corr.r(j, k) > r) add_edge(j, k, 1.0);
      break;
    }
    case AdjacencyKind::SignedThreshold: {
      const double r = scheme.resolve_threshold(corr.n);
      for (Index j = 0; j < p; ++j)
        for (Index k = j + 1; k < p; ++k) {
          const double rjk = corr.r(j, k);
          if (std::abs(rjk) > r) add_edge(j, k, rjk > 0 ? 1.0 : -1.0);
        }
      break;
    }
    case AdjacencyKind::Power: {
      for (Index j = 0; j < p; ++j)
        for (Index k = j + 1; k < p; ++k) {
          const double rjk = corr.r(j, k);
          if (rjk <= 0.0) continue;
          const double w = std::pow(rjk, scheme.alpha);
          if (w >= scheme.sparsity_floor) add_edge(j, k, w);
        }
      break;
    }
    case AdjacencyKind::SignedPower: {
      for (Index j = 0; j < p; ++j)
        for (Index k = j + 1; k < p; ++k) {
          const double rjk = corr.r(j, k);
          const double w = std::pow(std::abs(rjk), scheme.alpha);
          if (w >= scheme.sparsity_floor) add_edge(j, k, rjk >= 0 ? w : -w);
        }
      break;
    }
    case AdjacencyKind::Partition:
      break;  // handled above
  }
  return from_triplets(p, triplets);
}

AdjacencyMatrix partition_adjacency(Index p, const std::vector<std::vector<Index>>& blocks) {
  std::vector<bool> seen(static_cast<std::size_t>(p), false);
  Index covered = 0;
  for (const auto& block : blocks) {
    for (const Index j : block) {
      if (j < 0 || j >= p)
        throw ValidationError("partition_adjacency: index " + std::to_string(j) +
                              " out of range [0, " + std::to_string(p - 1) + "]");
      if (seen[static_cast<std::size_t>(j)])
        throw ValidationError("partition_adjacency: index " + std::to_string(j) +
                              " appears in more than one block");
      seen[static_cast<std::size_t>(j)] = true;
      ++covered;
    }
  }
  if (covered != p)
    throw ValidationError("partition_adjacency: blocks cover " + std::to_string(covered) +
                          " of " + std::to_string(p) + " indices");

  std::vector<Eigen::Triplet<double>> triplets;
  for (const auto& block : blocks) {
    const double w = 1.0 / static_cast<double>(block.size());
    for (std::size_t a = 0; a < block.size(); ++a)
      for (std::size_t b = a + 1; b < block.size(); ++b) {
        triplets.emplace_back(block[a], block[b], w);
        triplets.emplace_back(block[b], block[a], w);
      }
  }
  return from_triplets(p, triplets);
}

AdjacencyMatrix restrict_adjacency(const AdjacencyMatrix& adj, const std::vector<Index>& keep) {
  std::vector<Index> position(static_cast<std::size_t>(adj.p()), -1);
  for (std::size_t i = 0; i < keep.size(); ++i) {
    const Index j = keep[i];
    if (j < 0 || j >= adj.p())
      throw ValidationError("restrict_adjacency: index " + std::to_string(j) + " out of range");
    position[static_cast<std::size_t>(j)] = static_cast<Index>(i);
  }
  std::vector<Eigen::Triplet<double>> triplets;
  for (Index j = 0; j < adj.p(); ++j) {
    if (position[static_cast<std::size_t>(j)] < 0) continue;
    for (SparseMatrix::InnerIterator it(adj.signed_weights, j); it; ++it) {
      const Index rpos = position[static_cast<std::size_t>(it.row())];
      if (rpos < 0) continue;
      triplets.emplace_back(rpos, position[static_cast<std::size_t>(j)], it.value());
    }
  }
  return from_triplets(static_cast<Index>(keep.size()), triplets);
}

void save_adjacency(const AdjacencyMatrix& adj, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("save_adjacency: cannot write '" + path + "'");
  out << "# p " << adj.p() << "\n";
  out.precision(17);
  for (Index j = 0; j < adj.p(); ++j)
    for (SparseMatrix::InnerIterator it(adj.signed_weights, j); it; ++it) {
      if (it.row() >= it.col()) continue;  // upper triangle only
      const double v = it.value();
      out << it.row() << ' ' << it.col() << ' ' << std::abs(v) << ' ' << (v < 0 ? -1 : 1) << "\n";
    }
}

AdjacencyMatrix load_adjacency(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("load_adjacency: cannot open '" + path + "'");
  std::string line;
  Index p = -1;
  Index max_index = -1;
  std::vector<Eigen::Triplet<double>> triplets;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::stringstream ss(line.substr(1));
      std::string tag;
      if (ss >> tag && tag == "p") ss >> p;
      continue;
    }
    std::stringstream ss(line);
    Index j, k;
    double w;
    int s;
    if (!(ss >> j >> k >> w >> s))
      throw ValidationError("load_adjacency: malformed line " + std::to_string(lineno) +
                            " (expected 'j k weight sign')");
    if (j < 0 || k < 0 || j == k || w < 0 || (s != 1 && s != -1))
      throw ValidationError("load_adjacency: invalid edge at line " + std::to_string(lineno));
    max_index = std::max({max_index, j, k});
    if (w == 0.0) continue;
    triplets.emplace_back(j, k, s * w);
    triplets.emplace_back(k, j, s * w);
  }
  if (p < 0) p = max_index + 1;
  if (max_index >= p)
    throw ValidationError("load_adjacency: edge index exceeds declared p=" + std::to_string(p));
  return from_triplets(std::max<Index>(p, 0), triplets);
}

}  // namespace sls
