// SPDX-License-Identifier: Apache-2.0
#include "ppiref/idist.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_map>

#include "ppiref/parallel.hpp"

namespace ppiref {

InterfaceEmbedding idist_embed(const Interface& interface, const IDistConfig& config) {
  config.validate();
  for (const auto& c : interface.chains)
    if (c.residues.empty()) fail(ErrorCode::EmptyChain, interface.id + ": chain " + c.id + " has no residues");
  const Eigen::MatrixX3d x = interface.coordinates();
  const Eigen::MatrixXd f = interface.features();
  const Eigen::VectorXi p = interface.partners();
  return InterfaceEmbedding{interface.id, idist_embed(x, f, p, config.alpha)};
}

std::vector<InterfaceEmbedding> idist_embed_all(const std::vector<Interface>& interfaces, const IDistConfig& config,
                                                unsigned workers) {
  std::vector<InterfaceEmbedding> out(interfaces.size());
  parallel_blocks(interfaces.size(), workers, [&](std::size_t begin, std::size_t end, unsigned) {
    for (std::size_t k = begin; k < end; ++k) out[k] = idist_embed(interfaces[k], config);
  });
  return out;
}

Eigen::MatrixXd embedding_matrix(std::span<const InterfaceEmbedding> embeddings) {
  if (embeddings.empty()) return Eigen::MatrixXd(0, 0);
  const Eigen::Index d = embeddings.front().z.size();
  Eigen::MatrixXd z(d, static_cast<Eigen::Index>(embeddings.size()));
  for (std::size_t k = 0; k < embeddings.size(); ++k) {
    if (embeddings[k].z.size() != d)
      fail(ErrorCode::DimensionMismatch, "embedding " + embeddings[k].id + " has dimension " +
                                             std::to_string(embeddings[k].z.size()) + ", expected " +
                                             std::to_string(d));
    z.col(static_cast<Eigen::Index>(k)) = embeddings[k].z;
  }
  return z;
}

namespace {

using Pairs = std::vector<NeighborPair>;

void scan_all_pairs(const Eigen::MatrixXd& z, double threshold, std::size_t begin, std::size_t end, Pairs& out) {
  const auto n = static_cast<std::size_t>(z.cols());
  for (std::size_t i = begin; i < end; ++i) {
    const auto ci = z.col(static_cast<Eigen::Index>(i));
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = (ci - z.col(static_cast<Eigen::Index>(j))).norm();
      if (d < threshold) out.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), d});
    }
  }
}

// Grid over the (up to) three highest-variance coordinates with cell size
// equal to the threshold. Projection onto coordinates never increases
// distances, so every pair closer than the threshold lies in adjacent
// cells; candidates are then checked with the full distance.
class ProjectedGrid {
 public:
  ProjectedGrid(const Eigen::MatrixXd& z, double threshold) : z_(z), cell_(threshold) {
    const Eigen::Index d = z.rows();
    const Eigen::VectorXd mean = z.rowwise().mean();
    const Eigen::VectorXd var = (z.colwise() - mean).rowwise().squaredNorm();
    std::vector<Eigen::Index> dims(static_cast<std::size_t>(d));
    std::iota(dims.begin(), dims.end(), Eigen::Index{0});
    std::stable_sort(dims.begin(), dims.end(), [&](Eigen::Index a, Eigen::Index b) { return var[a] > var[b]; });
    dims.resize(std::min<std::size_t>(dims.size(), 3));
    dims_ = dims;
    for (Eigen::Index k = 0; k < z.cols(); ++k) buckets_[cell_of(k)].push_back(static_cast<std::uint32_t>(k));
  }

  void query(std::size_t i, double threshold, Pairs& out) const {
    const Cell home = cell_of(static_cast<Eigen::Index>(i));
    const auto ci = z_.col(static_cast<Eigen::Index>(i));
    const std::size_t k = dims_.size();
    std::size_t combos = 1;
    for (std::size_t a = 0; a < k; ++a) combos *= 3;
    for (std::size_t code = 0; code < combos; ++code) {
      Cell c = home;
      std::size_t rest = code;
      for (std::size_t a = 0; a < k; ++a) {
        c[a] += static_cast<std::int64_t>(rest % 3) - 1;
        rest /= 3;
      }
      auto it = buckets_.find(c);
      if (it == buckets_.end()) continue;
      for (std::uint32_t j : it->second) {
        if (j <= i) continue;
        const double d = (ci - z_.col(j)).norm();
        if (d < threshold) out.push_back({static_cast<std::uint32_t>(i), j, d});
      }
    }
  }

 private:
  using Cell = std::array<std::int64_t, 3>;

  Cell cell_of(Eigen::Index k) const {
    Cell c{0, 0, 0};
    for (std::size_t a = 0; a < dims_.size(); ++a)
      c[a] = static_cast<std::int64_t>(std::floor(z_(dims_[a], k) / cell_));
    return c;
  }

  const Eigen::MatrixXd& z_;
  double cell_;
  std::vector<Eigen::Index> dims_;
  std::map<Cell, std::vector<std::uint32_t>> buckets_;
};

}  // namespace

std::vector<NeighborPair> pairwise_distances(const Eigen::MatrixXd& embeddings, double threshold, NeighborMode mode,
                                             unsigned workers) {
  if (!(threshold > 0.0)) fail(ErrorCode::InvalidArgument, "threshold must be positive");
  const auto n = static_cast<std::size_t>(embeddings.cols());
  if (n < 2) return {};
  if (n > std::numeric_limits<std::uint32_t>::max()) fail(ErrorCode::InvalidArgument, "too many embeddings");
  if (mode == NeighborMode::Auto) mode = n > kGridIndexMinSize ? NeighborMode::GridIndex : NeighborMode::AllPairs;
  if (!embeddings.allFinite()) fail(ErrorCode::InvalidArgument, "embeddings contain non-finite values");

  workers = std::max(1u, workers);
  std::vector<Pairs> partial(workers);
  if (mode == NeighborMode::AllPairs) {
    // Row i costs n - i comparisons; balance blocks by cutting at equal
    // shares of the triangle instead of equal row counts.
    std::vector<std::size_t> cuts(workers + 1, n);
    cuts[0] = 0;
    for (unsigned w = 1; w < workers; ++w) {
      const double frac = 1.0 - std::sqrt(1.0 - static_cast<double>(w) / workers);
      cuts[w] = std::min(n, static_cast<std::size_t>(frac * static_cast<double>(n)));
    }
    parallel_blocks(workers, workers, [&](std::size_t begin, std::size_t end, unsigned) {
      for (std::size_t w = begin; w < end; ++w) scan_all_pairs(embeddings, threshold, cuts[w], cuts[w + 1], partial[w]);
    });
  } else {
    const ProjectedGrid grid(embeddings, threshold);
    parallel_blocks(n, workers, [&](std::size_t begin, std::size_t end, unsigned w) {
      for (std::size_t i = begin; i < end; ++i) grid.query(i, threshold, partial[w]);
    });
  }

  Pairs out;
  for (auto& p : partial) out.insert(out.end(), p.begin(), p.end());
  std::sort(out.begin(), out.end(), [](const NeighborPair& a, const NeighborPair& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });
  return out;
}

std::vector<NeighborPair> pairwise_distances(std::span<const InterfaceEmbedding> embeddings, double threshold,
                                             NeighborMode mode, unsigned workers) {
  return pairwise_distances(embedding_matrix(embeddings), threshold, mode, workers);
}

}  // namespace ppiref
