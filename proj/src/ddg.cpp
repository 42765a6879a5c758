// SPDX-License-Identifier: Apache-2.0
#include "ppiref/ddg.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

#include "ppiref/error.hpp"

namespace ppiref {

ProbabilityMatrix::ProbabilityMatrix(Eigen::MatrixXd p) : p_(std::move(p)) {
  if (p_.rows() < 1) fail(ErrorCode::InvalidArgument, "probability matrix needs at least one row");
  if (p_.cols() != kAlphabetSize)
    fail(ErrorCode::DimensionMismatch, "probability matrix must have 20 columns, got " + std::to_string(p_.cols()));
  for (Eigen::Index i = 0; i < p_.rows(); ++i) {
    if (!p_.row(i).allFinite() || (p_.row(i).array() < 0.0).any())
      fail(ErrorCode::InvalidArgument, "row " + std::to_string(i) + " has negative or non-finite entries");
    if (std::abs(p_.row(i).sum() - 1.0) > kRowSumTolerance)
      fail(ErrorCode::InvalidArgument, "row " + std::to_string(i) + " does not sum to 1");
  }
}

ProbabilityMatrix ProbabilityMatrix::uniform(Eigen::Index rows) {
  return ProbabilityMatrix(Eigen::MatrixXd::Constant(rows, kAlphabetSize, 1.0 / kAlphabetSize));
}

std::string Substitution::to_string() const {
  std::string s;
  s += one_letter(wild_type);
  s += chain_id;
  s += std::to_string(position);
  if (insertion_code != ' ') s += insertion_code;
  s += one_letter(mutant);
  return s;
}

namespace {

Substitution parse_one(std::string_view t) {
  while (!t.empty() && std::isspace(static_cast<unsigned char>(t.front()))) t.remove_prefix(1);
  while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.remove_suffix(1);
  const std::string text(t);
  if (t.size() < 4) fail(ErrorCode::BadPosition, "mutation '" + text + "' is too short");

  Substitution s;
  auto wt = from_one_letter(t.front());
  if (!wt || !std::isalpha(static_cast<unsigned char>(t.front())))
    fail(ErrorCode::BadAminoAcid, "unknown wild-type residue in '" + text + "'");
  auto mut = from_one_letter(t.back());
  if (!mut || !std::isalpha(static_cast<unsigned char>(t.back())))
    fail(ErrorCode::BadAminoAcid, "unknown mutant residue in '" + text + "'");
  s.wild_type = *wt;
  s.mutant = *mut;
  s.chain_id = std::string(1, t[1]);
  if (!std::isalnum(static_cast<unsigned char>(t[1]))) fail(ErrorCode::BadPosition, "bad chain id in '" + text + "'");

  std::string_view body = t.substr(2, t.size() - 3);  // position [+ insertion code]
  if (!body.empty() && std::isalpha(static_cast<unsigned char>(body.back()))) {
    s.insertion_code = static_cast<char>(std::toupper(static_cast<unsigned char>(body.back())));
    body.remove_suffix(1);
  }
  int pos = 0;
  auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), pos);
  if (body.empty() || ec != std::errc() || ptr != body.data() + body.size())
    fail(ErrorCode::BadPosition, "bad residue position in '" + text + "'");
  s.position = pos;
  if (s.wild_type == s.mutant) fail(ErrorCode::IdentityMutation, "'" + text + "' does not change the residue");
  return s;
}

void check_probability(double p, Eigen::Index row, AminoAcid aa) {
  if (!(p > 0.0))
    fail(ErrorCode::ZeroProbability,
         "P(" + std::to_string(row) + ", " + std::string(three_letter(aa)) + ") is zero");
}

}  // namespace

std::vector<Substitution> parse_mutation(std::string_view text) {
  std::vector<Substitution> subs;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string_view::npos) comma = text.size();
    Substitution s = parse_one(text.substr(pos, comma - pos));
    for (const auto& prev : subs)
      if (prev.same_site(s)) fail(ErrorCode::DuplicateSite, "site " + s.chain_id + std::to_string(s.position) +
                                                                " mutated twice in '" + std::string(text) + "'");
    subs.push_back(std::move(s));
    pos = comma + 1;
  }
  return subs;
}

Eigen::MatrixXd mask_features(const Eigen::MatrixXd& one_hot_rows, std::span<const Eigen::Index> masked) {
  Eigen::MatrixXd out = one_hot_rows;
  for (Eigen::Index i : masked) {
    if (i < 0 || i >= out.rows())
      fail(ErrorCode::IndexOutOfRange, "mask index " + std::to_string(i) + " outside " + std::to_string(out.rows()));
    out.row(i).setZero();
  }
  return out;
}

double masked_ce_loss(const ProbabilityMatrix& p, std::span<const AminoAcid> native,
                      std::span<const Eigen::Index> masked, double epsilon, const ClassWeights& weights) {
  if (static_cast<Eigen::Index>(native.size()) != p.rows())
    fail(ErrorCode::DimensionMismatch, "native sequence length differs from probability rows");
  if (!(epsilon >= 0.0 && epsilon < 1.0)) fail(ErrorCode::InvalidArgument, "epsilon must be in [0, 1)");
  double loss = 0.0;
  for (Eigen::Index i : masked) {
    if (i < 0 || i >= p.rows()) fail(ErrorCode::IndexOutOfRange, "mask index " + std::to_string(i));
    const AminoAcid c = native[static_cast<std::size_t>(i)];
    if (!is_standard(c)) fail(ErrorCode::InvalidArgument, "masked residue has no native class");
    check_probability(p(i, c), i, c);
    double smooth = 0.0;
    if (epsilon > 0.0) {
      for (int j = 0; j < kAlphabetSize; ++j) {
        if (j == index_of(c)) continue;
        const AminoAcid other = amino_acid_at(j);
        check_probability(p(i, other), i, other);
        smooth += std::log(p(i, other)) / kAlphabetSize;
      }
    }
    loss -= weights[index_of(c)] * ((1.0 - epsilon) * std::log(p(i, c)) + epsilon * smooth);
  }
  return loss;
}

ClassWeights class_weights(const std::array<std::uint64_t, kAlphabetSize>& counts) {
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  if (total == 0) fail(ErrorCode::InvalidArgument, "class counts are all zero");
  ClassWeights w;
  for (int a = 0; a < kAlphabetSize; ++a) w[a] = 1.0 / (static_cast<double>(counts[a]) + 1.0);
  return w / w.mean();
}

double log_odds_ddg(const ProbabilityMatrix& p, std::span<const Eigen::Index> sites,
                    std::span<const AminoAcid> wild_type, std::span<const AminoAcid> mutant) {
  if (sites.size() != wild_type.size() || sites.size() != mutant.size())
    fail(ErrorCode::DimensionMismatch, "sites, wild types and mutants differ in length");
  if (sites.empty()) fail(ErrorCode::InvalidArgument, "no mutated sites");
  // Both sums run in site order so that swapping wild type and mutant
  // negates the result exactly.
  double wt_sum = 0.0;
  double mut_sum = 0.0;
  for (std::size_t k = 0; k < sites.size(); ++k) {
    const Eigen::Index i = sites[k];
    if (i < 0 || i >= p.rows()) fail(ErrorCode::IndexOutOfRange, "site index " + std::to_string(i));
    if (!is_standard(wild_type[k]) || !is_standard(mutant[k]))
      fail(ErrorCode::BadAminoAcid, "non-standard residue at site " + std::to_string(i));
    if (wild_type[k] == mutant[k]) fail(ErrorCode::IdentityMutation, "site " + std::to_string(i) + " is unchanged");
    check_probability(p(i, wild_type[k]), i, wild_type[k]);
    check_probability(p(i, mutant[k]), i, mutant[k]);
    wt_sum += std::log(p(i, wild_type[k]));
    mut_sum += std::log(p(i, mutant[k]));
  }
  return wt_sum - mut_sum;
}

}  // namespace ppiref
