// SPDX-License-Identifier: Apache-2.0
//
// Shrake-Rupley solvent-accessible surface area and buried surface area.

#pragma once

#include <Eigen/Core>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ppiref/structure.hpp"

namespace ppiref {

inline constexpr double kWaterProbe = 1.4;
inline constexpr int kDefaultSpherePoints = 960;

struct SasaAtom {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  double radius = 1.8;
};

/// Bondi (1964) van der Waals radius in Angstrom; 1.80 for elements not
/// in the table.
double vdw_radius(std::string_view element);

/// n quasi-uniform unit vectors on the golden-angle spiral, one per column.
Eigen::Matrix3Xd fibonacci_sphere(int n_points);

/// Per-atom accessible area in A^2. Requires radii > 0, probe >= 0 and
/// n_points >= 32.
Eigen::VectorXd shrake_rupley_sasa(std::span<const SasaAtom> atoms, double probe = kWaterProbe,
                                   int n_points = kDefaultSpherePoints);

/// Heavy atoms of the named chains with their Bondi radii. Throws
/// Error(MissingChain) when a chain is absent.
std::vector<SasaAtom> sasa_atoms(const Structure& structure, std::span<const std::string> chain_ids);

double total_sasa(std::span<const SasaAtom> atoms, double probe = kWaterProbe, int n_points = kDefaultSpherePoints);

/// Full (not halved) buried area: sum of the isolated-chain SASAs minus the
/// SASA of the complex, clamped at zero. Independent of chain order.
double compute_bsa(const Structure& structure, std::span<const std::string> chain_ids, double probe = kWaterProbe,
                   int n_points = kDefaultSpherePoints);

inline double compute_bsa(const Structure& structure, const std::string& chain_a, const std::string& chain_b,
                          double probe = kWaterProbe, int n_points = kDefaultSpherePoints) {
  const std::string ids[] = {chain_a, chain_b};
  return compute_bsa(structure, ids, probe, n_points);
}

}  // namespace ppiref
