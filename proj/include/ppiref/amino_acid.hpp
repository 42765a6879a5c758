// SPDX-License-Identifier: Apache-2.0
//
// The 20-letter amino-acid alphabet used for residue features.
//
// Ordering is alphabetical by three-letter code:
//   0 ALA  1 ARG  2 ASN  3 ASP  4 CYS  5 GLN  6 GLU  7 GLY  8 HIS  9 ILE
//  10 LEU 11 LYS 12 MET 13 PHE 14 PRO 15 SER 16 THR 17 TRP 18 TYR 19 VAL
// Unknown sits outside the alphabet and encodes to the zero vector.

#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace ppiref {

inline constexpr int kAlphabetSize = 20;

enum class AminoAcid : std::uint8_t {
  Ala, Arg, Asn, Asp, Cys, Gln, Glu, Gly, His, Ile,
  Leu, Lys, Met, Phe, Pro, Ser, Thr, Trp, Tyr, Val,
  Unknown,
};

template <typename Scalar>
using FeatureVector = Eigen::Matrix<Scalar, kAlphabetSize, 1>;

constexpr int index_of(AminoAcid aa) { return static_cast<int>(aa); }
constexpr bool is_standard(AminoAcid aa) { return aa != AminoAcid::Unknown; }

AminoAcid amino_acid_at(int index);

/// Three-letter residue name to alphabet member. Standard codes map to
/// themselves, common modified residues (MSE, SEP, TPO, ...) and protonation
/// variants (HID, CYX, ...) map to their standard parent, anything else is
/// Unknown.
AminoAcid from_three_letter(std::string_view name);

/// True when the three-letter code is a standard or mapped modified residue.
bool is_amino_acid_code(std::string_view name);

/// DNA/RNA residue names (DA, DC, A, U, ...).
bool is_nucleotide_code(std::string_view name);

std::optional<AminoAcid> from_one_letter(char code);
char one_letter(AminoAcid aa);
std::string_view three_letter(AminoAcid aa);

template <typename Scalar = double>
FeatureVector<Scalar> residue_one_hot(AminoAcid aa) {
  FeatureVector<Scalar> v = FeatureVector<Scalar>::Zero();
  if (is_standard(aa)) v[index_of(aa)] = Scalar(1);
  return v;
}

template <typename Scalar = double>
FeatureVector<Scalar> residue_one_hot(std::string_view three_letter_code) {
  return residue_one_hot<Scalar>(from_three_letter(three_letter_code));
}

}  // namespace ppiref
