// SPDX-License-Identifier: Apache-2.0
#include "ppiref/amino_acid.hpp"

#include <algorithm>
#include <cctype>
#include <string>
#include <utility>

namespace ppiref {

namespace {

constexpr std::array<std::string_view, kAlphabetSize> kThreeLetter = {
    "ALA", "ARG", "ASN", "ASP", "CYS", "GLN", "GLU", "GLY", "HIS", "ILE",
    "LEU", "LYS", "MET", "PHE", "PRO", "SER", "THR", "TRP", "TYR", "VAL"};

constexpr std::array<char, kAlphabetSize> kOneLetter = {
    'A', 'R', 'N', 'D', 'C', 'Q', 'E', 'G', 'H', 'I',
    'L', 'K', 'M', 'F', 'P', 'S', 'T', 'W', 'Y', 'V'};

// Parents follow the wwPDB chemical component dictionary (mon_nstd_parent).
constexpr std::pair<std::string_view, AminoAcid> kModified[] = {
    {"MSE", AminoAcid::Met}, {"FME", AminoAcid::Met}, {"MHO", AminoAcid::Met},
    {"SEP", AminoAcid::Ser}, {"SAC", AminoAcid::Ser}, {"DSN", AminoAcid::Ser},
    {"TPO", AminoAcid::Thr}, {"DTH", AminoAcid::Thr},
    {"PTR", AminoAcid::Tyr}, {"TYS", AminoAcid::Tyr}, {"DTY", AminoAcid::Tyr},
    {"HYP", AminoAcid::Pro}, {"DPR", AminoAcid::Pro},
    {"MLY", AminoAcid::Lys}, {"M3L", AminoAcid::Lys}, {"ALY", AminoAcid::Lys},
    {"KCX", AminoAcid::Lys}, {"LLP", AminoAcid::Lys}, {"MLZ", AminoAcid::Lys},
    {"DLY", AminoAcid::Lys}, {"PYL", AminoAcid::Lys},
    {"CSO", AminoAcid::Cys}, {"CME", AminoAcid::Cys}, {"CSD", AminoAcid::Cys},
    {"OCS", AminoAcid::Cys}, {"CAS", AminoAcid::Cys}, {"CSX", AminoAcid::Cys},
    {"SEC", AminoAcid::Cys}, {"CYX", AminoAcid::Cys}, {"CYM", AminoAcid::Cys},
    {"DCY", AminoAcid::Cys},
    {"PCA", AminoAcid::Gln}, {"DGN", AminoAcid::Gln},
    {"CGU", AminoAcid::Glu}, {"DGL", AminoAcid::Glu},
    {"MEN", AminoAcid::Asn}, {"DSG", AminoAcid::Asn},
    {"DAS", AminoAcid::Asp}, {"IAS", AminoAcid::Asp},
    {"MLE", AminoAcid::Leu}, {"NLE", AminoAcid::Leu}, {"DLE", AminoAcid::Leu},
    {"AIB", AminoAcid::Ala}, {"DAL", AminoAcid::Ala}, {"ABA", AminoAcid::Ala},
    {"DAR", AminoAcid::Arg}, {"AGM", AminoAcid::Arg},
    {"HIC", AminoAcid::His}, {"HID", AminoAcid::His}, {"HIE", AminoAcid::His},
    {"HIP", AminoAcid::His}, {"HSD", AminoAcid::His}, {"HSE", AminoAcid::His},
    {"HSP", AminoAcid::His}, {"DHI", AminoAcid::His},
    {"DIL", AminoAcid::Ile}, {"DVA", AminoAcid::Val}, {"MVA", AminoAcid::Val},
    {"DPN", AminoAcid::Phe}, {"DTR", AminoAcid::Trp}, {"TRQ", AminoAcid::Trp},
    {"GL3", AminoAcid::Gly}, {"SAR", AminoAcid::Gly},
};

constexpr std::string_view kNucleotides[] = {
    "DA", "DC", "DG", "DT", "DU", "DI", "A", "C", "G", "U", "T", "I", "N", "DN",
    "ADE", "CYT", "GUA", "THY", "URA", "PSU", "5MC", "OMG", "OMC", "2MG", "H2U", "1MA",
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  return s;
}

std::string upper(std::string_view s) {
  std::string out(trim(s));
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

AminoAcid amino_acid_at(int index) {
  if (index < 0 || index >= kAlphabetSize) return AminoAcid::Unknown;
  return static_cast<AminoAcid>(index);
}

AminoAcid from_three_letter(std::string_view name) {
  const std::string key = upper(name);
  for (int i = 0; i < kAlphabetSize; ++i)
    if (kThreeLetter[i] == key) return static_cast<AminoAcid>(i);
  for (const auto& [code, parent] : kModified)
    if (code == key) return parent;
  return AminoAcid::Unknown;
}

bool is_amino_acid_code(std::string_view name) {
  return from_three_letter(name) != AminoAcid::Unknown;
}

bool is_nucleotide_code(std::string_view name) {
  const std::string key = upper(name);
  return std::find(std::begin(kNucleotides), std::end(kNucleotides), key) != std::end(kNucleotides);
}

std::optional<AminoAcid> from_one_letter(char code) {
  const char c = static_cast<char>(std::toupper(static_cast<unsigned char>(code)));
  for (int i = 0; i < kAlphabetSize; ++i)
    if (kOneLetter[i] == c) return static_cast<AminoAcid>(i);
  return std::nullopt;
}

char one_letter(AminoAcid aa) {
  return is_standard(aa) ? kOneLetter[index_of(aa)] : 'X';
}

std::string_view three_letter(AminoAcid aa) {
  return is_standard(aa) ? kThreeLetter[index_of(aa)] : std::string_view("UNK");
}

}  // namespace ppiref
