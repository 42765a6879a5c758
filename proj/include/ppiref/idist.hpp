// SPDX-License-Identifier: Apache-2.0
//
// iDist: alignment-free comparison of protein-protein interfaces.
//
// Each residue i of an interface carries a Calpha position x_i, a feature
// vector f_i (one-hot amino acid) and a chain label p_i. One round of
// distance-weighted message passing gives
//
//   m_intra(i) = mean_{j : p_j == p_i} f_j exp(-|x_i - x_j|^2 / alpha)
//   m_inter(i) = mean_{j : p_j != p_i} f_j exp(-|x_i - x_j|^2 / alpha)
//   h_i        = f_i / 2 + m_intra(i) / 4 - m_inter(i) / 4
//
// where the intra set includes i itself. The interface embedding z is the
// mean over chains of the per-chain mean of h. Only pairwise distances
// enter, so z is invariant to rotations and translations of the input.
// Two interfaces are compared by the Euclidean distance of their z.

#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ppiref/error.hpp"
#include "ppiref/interface.hpp"

namespace ppiref {

struct IDistConfig {
  double alpha = 16.0;      // RBF bandwidth in A^2
  double threshold = 0.03;  // near-duplicate cutoff (strict <)

  /// 6 A interfaces (DIPS-style), threshold 0.04.
  static constexpr IDistConfig dips6() { return {16.0, 0.04}; }
  /// 10 A interfaces (PPIRef-style), threshold 0.03.
  static constexpr IDistConfig ppiref10() { return {16.0, 0.03}; }

  void validate() const {
    if (!(alpha > 0.0)) fail(ErrorCode::InvalidArgument, "alpha must be positive");
    if (!(threshold > 0.0)) fail(ErrorCode::InvalidArgument, "threshold must be positive");
  }
};

/// Interface cutoff paired with its calibrated iDist configuration.
struct IDistPreset {
  const char* name;
  double cutoff;
  IDistConfig config;
};

inline constexpr IDistPreset kDips6Preset{"dips6", kDipsCutoff, IDistConfig::dips6()};
inline constexpr IDistPreset kPpiref10Preset{"ppiref10", kPpirefCutoff, IDistConfig::ppiref10()};

struct InterfaceEmbedding {
  std::string id;
  Eigen::VectorXd z;
};

/// Per-residue hidden vectors h (N x d). `partners` holds chain labels
/// 0..C-1; C must be at least 2 and every label in range must occur
/// (Error(EmptyChain) otherwise).
template <typename DerivedX, typename DerivedF, typename DerivedP>
Eigen::Matrix<typename DerivedX::Scalar, Eigen::Dynamic, Eigen::Dynamic> idist_residue_embeddings(
    const Eigen::MatrixBase<DerivedX>& coords, const Eigen::MatrixBase<DerivedF>& features,
    const Eigen::MatrixBase<DerivedP>& partners, typename DerivedX::Scalar alpha, Eigen::Index n_chains) {
  using Scalar = typename DerivedX::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index n = coords.rows();
  if (coords.cols() != 3) fail(ErrorCode::DimensionMismatch, "coordinates must be N x 3");
  if (features.rows() != n || partners.size() != n)
    fail(ErrorCode::DimensionMismatch, "coordinates, features and partners disagree on N");
  if (n == 0) fail(ErrorCode::InvalidArgument, "interface has no residues");
  if (n_chains < 2) fail(ErrorCode::InvalidArgument, "an interface needs at least two chains");
  if (!(alpha > Scalar(0))) fail(ErrorCode::InvalidArgument, "alpha must be positive");

  Eigen::VectorXi chain_size = Eigen::VectorXi::Zero(n_chains);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto c = static_cast<Eigen::Index>(partners(i));
    if (c < 0 || c >= n_chains) fail(ErrorCode::InvalidArgument, "chain label out of range");
    ++chain_size[c];
  }
  for (Eigen::Index c = 0; c < n_chains; ++c)
    if (chain_size[c] == 0) fail(ErrorCode::EmptyChain, "chain " + std::to_string(c) + " has no residues");

  // Split RBF weights into same-chain and cross-chain parts.
  Matrix intra = Matrix::Zero(n, n);
  Matrix inter = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    intra(i, i) = Scalar(1);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Scalar w = std::exp(-(coords.row(i) - coords.row(j)).squaredNorm() / alpha);
      Matrix& target = partners(i) == partners(j) ? intra : inter;
      target(i, j) = w;
      target(j, i) = w;
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const Scalar n_same = Scalar(chain_size[partners(i)]);
    intra.row(i) /= n_same;
    inter.row(i) /= Scalar(n) - n_same;
  }
  const Matrix f = features.template cast<Scalar>();
  return Scalar(0.5) * f + Scalar(0.25) * (intra * f) - Scalar(0.25) * (inter * f);
}

/// Interface embedding z from coordinates (N x 3), features (N x d) and
/// chain labels (0..C-1, C = max label + 1).
template <typename DerivedX, typename DerivedF, typename DerivedP>
Eigen::Matrix<typename DerivedX::Scalar, Eigen::Dynamic, 1> idist_embed(const Eigen::MatrixBase<DerivedX>& coords,
                                                                        const Eigen::MatrixBase<DerivedF>& features,
                                                                        const Eigen::MatrixBase<DerivedP>& partners,
                                                                        typename DerivedX::Scalar alpha) {
  using Scalar = typename DerivedX::Scalar;
  const Eigen::Index n_chains = partners.size() == 0 ? 0 : static_cast<Eigen::Index>(partners.maxCoeff()) + 1;
  const auto h = idist_residue_embeddings(coords, features, partners, alpha, n_chains);

  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> chain_sum =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(n_chains, h.cols());
  Eigen::VectorXi chain_size = Eigen::VectorXi::Zero(n_chains);
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    chain_sum.row(partners(i)) += h.row(i);
    ++chain_size[partners(i)];
  }
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> z = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(h.cols());
  for (Eigen::Index c = 0; c < n_chains; ++c) z += chain_sum.row(c).transpose() / Scalar(chain_size[c]);
  return z / Scalar(n_chains);
}

InterfaceEmbedding idist_embed(const Interface& interface, const IDistConfig& config = {});

/// Embeds every interface; `workers` threads, output in input order.
std::vector<InterfaceEmbedding> idist_embed_all(const std::vector<Interface>& interfaces, const IDistConfig& config,
                                                unsigned workers = 1);

/// Euclidean distance; Error(DimensionMismatch) on unequal sizes.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar idist(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  if (a.size() != b.size())
    fail(ErrorCode::DimensionMismatch,
         "embedding dimensions differ: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  return (a - b).norm();
}

inline double idist(const InterfaceEmbedding& a, const InterfaceEmbedding& b) { return idist(a.z, b.z); }

inline bool is_near_duplicate(const InterfaceEmbedding& a, const InterfaceEmbedding& b,
                              const IDistConfig& config = {}) {
  return idist(a, b) < config.threshold;
}

enum class NeighborMode { AllPairs, GridIndex, Auto };

/// Above this many embeddings Auto switches from AllPairs to GridIndex.
inline constexpr std::size_t kGridIndexMinSize = 10000;

struct NeighborPair {
  std::uint32_t i = 0;
  std::uint32_t j = 0;  // i < j
  double distance = 0.0;

  bool operator==(const NeighborPair&) const = default;
};

/// All pairs (i < j) of columns of `embeddings` (d x n) closer than
/// `threshold`, sorted by (i, j). Output is identical for every mode and
/// worker count.
std::vector<NeighborPair> pairwise_distances(const Eigen::MatrixXd& embeddings, double threshold,
                                             NeighborMode mode = NeighborMode::Auto, unsigned workers = 1);

std::vector<NeighborPair> pairwise_distances(std::span<const InterfaceEmbedding> embeddings, double threshold,
                                             NeighborMode mode = NeighborMode::Auto, unsigned workers = 1);

/// Stacks embeddings as columns; Error(DimensionMismatch) if sizes differ.
Eigen::MatrixXd embedding_matrix(std::span<const InterfaceEmbedding> embeddings);

}  // namespace ppiref
