// SPDX-License-Identifier: Apache-2.0
//
// In-memory model of a macromolecular entry: chains -> residues -> heavy atoms,
// plus the experiment metadata used by interface filtering.

#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ppiref/amino_acid.hpp"

namespace ppiref {

struct Atom {
  std::string name;
  std::string element;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  double occupancy = 1.0;
  bool is_heavy = true;

  bool operator==(const Atom&) const = default;
};

struct Residue {
  std::string chain_id;
  int seq_number = 0;
  char insertion_code = ' ';
  std::string name;  // residue name as it appears in the file
  AminoAcid aa = AminoAcid::Unknown;
  std::vector<Atom> atoms;

  const Atom* find_atom(std::string_view atom_name) const;
  const Atom* alpha_carbon() const { return find_atom("CA"); }
  /// "A:31" or "A:31B" style label.
  std::string label() const;

  bool operator==(const Residue&) const = default;
};

struct Chain {
  std::string id;
  std::vector<Residue> residues;

  std::size_t atom_count() const;
  bool operator==(const Chain&) const = default;
};

struct Structure {
  std::string entry_id;
  std::vector<Chain> chains;
  std::string method;  // lower case; several methods joined by "; "
  std::optional<double> resolution;

  const Chain* find_chain(std::string_view id) const;
  std::size_t residue_count() const;
  std::size_t atom_count() const;

  bool operator==(const Structure&) const = default;
};

enum class StructureFormat { Auto, Pdb, Mmcif };

/// Parses PDB or mmCIF text. Keeps model 1 only, drops hydrogens, waters and
/// non-polymer HETATM groups, and resolves alternate locations to the
/// highest-occupancy conformer (first one on ties). `fallback_id` names the
/// entry when the file carries no id.
///
/// Throws Error(UnparsableRecord) with a line number for malformed
/// coordinate records and Error(EmptyStructure) when no residue survives.
Structure parse_structure(std::string_view content, StructureFormat format = StructureFormat::Auto,
                          std::string_view fallback_id = "");

/// Reads and parses a file; the file stem is the fallback id and the format
/// is chosen from the extension when `format` is Auto.
Structure read_structure(const std::string& path, StructureFormat format = StructureFormat::Auto);

StructureFormat sniff_format(std::string_view content);

/// Writes PDB ATOM/HETATM records (plus EXPDTA/REMARK 2 when present).
std::string write_pdb(const Structure& structure);

bool is_hydrogen_element(std::string_view element);

}  // namespace ppiref
