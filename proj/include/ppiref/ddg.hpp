// SPDX-License-Identifier: Apache-2.0
//
// Reference math for masked amino-acid modeling and log-odds scoring of
// binding affinity changes. Probability matrices come from an external
// model; rows are residues, columns follow the alphabet in amino_acid.hpp.

#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ppiref/amino_acid.hpp"

namespace ppiref {

/// Mean ddG (kcal/mol) of the SKEMPI v2.0 training data, used to impute
/// missing predictions during evaluation.
inline constexpr double kImputedDdg = 0.69;

/// N x 20 row-stochastic matrix: non-negative, rows sum to 1 within 1e-6.
class ProbabilityMatrix {
 public:
  static constexpr double kRowSumTolerance = 1e-6;

  explicit ProbabilityMatrix(Eigen::MatrixXd p);

  const Eigen::MatrixXd& values() const { return p_; }
  Eigen::Index rows() const { return p_.rows(); }
  double operator()(Eigen::Index row, AminoAcid aa) const { return p_(row, index_of(aa)); }

  static ProbabilityMatrix uniform(Eigen::Index rows);

 private:
  Eigen::MatrixXd p_;
};

struct Substitution {
  AminoAcid wild_type = AminoAcid::Unknown;
  std::string chain_id;
  int position = 0;
  char insertion_code = ' ';
  AminoAcid mutant = AminoAcid::Unknown;

  /// Back to the compact form, e.g. "TH31W".
  std::string to_string() const;
  bool same_site(const Substitution& other) const {
    return chain_id == other.chain_id && position == other.position && insertion_code == other.insertion_code;
  }
  bool operator==(const Substitution&) const = default;
};

struct MutationRecord {
  std::string complex_id;
  std::vector<Substitution> substitutions;
  std::optional<double> label;  // ddG, kcal/mol
};

/// Parses "TH31W" (wild type T, chain H, residue 31, mutant W), optionally
/// with an insertion code before the mutant ("TH31AW") and a negative
/// position; multi-point mutations are comma separated.
/// Errors: BadAminoAcid, BadPosition, DuplicateSite, IdentityMutation.
std::vector<Substitution> parse_mutation(std::string_view text);

/// Returns the rows with the listed indices zeroed (IndexOutOfRange for a
/// bad index).
Eigen::MatrixXd mask_features(const Eigen::MatrixXd& one_hot_rows, std::span<const Eigen::Index> masked);

using ClassWeights = Eigen::Matrix<double, kAlphabetSize, 1>;

/// Label-smoothed, class-weighted cross-entropy over masked positions:
///   -sum_{i in M} w[c_i] * ((1 - eps) log P(i, c_i)
///                          + eps * sum_{j != c_i} log P(i, j) / 20)
/// `native` has one class per row of P. ZeroProbability when a referenced
/// probability is 0.
double masked_ce_loss(const ProbabilityMatrix& p, std::span<const AminoAcid> native,
                      std::span<const Eigen::Index> masked, double epsilon, const ClassWeights& weights);

/// w_a proportional to 1 / (count_a + 1), scaled to mean 1.
ClassWeights class_weights(const std::array<std::uint64_t, kAlphabetSize>& counts);

/// sum_i log P(site_i, wt_i) - sum_i log P(site_i, mut_i). Negative values
/// predict stabilization. Errors: IdentityMutation, ZeroProbability,
/// IndexOutOfRange, DimensionMismatch.
double log_odds_ddg(const ProbabilityMatrix& p, std::span<const Eigen::Index> sites,
                    std::span<const AminoAcid> wild_type, std::span<const AminoAcid> mutant);

}  // namespace ppiref
