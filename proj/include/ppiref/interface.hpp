// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "ppiref/amino_acid.hpp"
#include "ppiref/structure.hpp"

namespace ppiref {

/// Heavy-atom distance cutoffs used for the two interface definitions.
inline constexpr double kDipsCutoff = 6.0;
inline constexpr double kPpirefCutoff = 10.0;

struct InterfaceResidue {
  std::string chain_id;
  int seq_number = 0;
  char insertion_code = ' ';
  std::string name;
  AminoAcid aa = AminoAcid::Unknown;
  Eigen::Vector3d ca = Eigen::Vector3d::Zero();

  FeatureVector<double> one_hot() const { return residue_one_hot<double>(aa); }
  bool operator==(const InterfaceResidue&) const = default;
};

struct InterfaceChain {
  std::string id;
  std::vector<InterfaceResidue> residues;  // file order

  bool operator==(const InterfaceChain&) const = default;
};

/// Contact residues of a set of chains (a pair when produced by
/// extract_interfaces). Chains are sorted by id.
struct Interface {
  std::string id;      // ENTRY_chainA_chainB
  std::string source;  // entry id
  std::vector<InterfaceChain> chains;
  double cutoff = kPpirefCutoff;

  std::size_t residue_count() const;
  std::vector<std::string> chain_ids() const;

  /// N x 3 Calpha coordinates, chains concatenated in order.
  Eigen::MatrixX3d coordinates() const;
  /// N x 20 one-hot features in the same row order.
  Eigen::MatrixXd features() const;
  /// Chain index (0..C-1) of each row.
  Eigen::VectorXi partners() const;

  bool operator==(const Interface&) const = default;
};

std::string interface_id(const std::string& entry_id, std::vector<std::string> chain_ids);

/// One interface per unordered chain pair with at least one heavy-atom pair
/// within `cutoff` (inclusive). Interface residues are those with a heavy
/// atom within `cutoff` of any heavy atom of the partner chain; residues
/// without a CA atom are dropped with a warning. Sorted by id.
std::vector<Interface> extract_interfaces(const Structure& structure, double cutoff = kPpirefCutoff);

/// Symmetric N x N partner matrix: true iff rows come from different chains.
Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> residue_contact_map(const Interface& interface);

/// Trimmed PDB text holding every heavy atom of the interface residues.
std::string write_interface_pdb(const Structure& structure, const Interface& interface);

}  // namespace ppiref
