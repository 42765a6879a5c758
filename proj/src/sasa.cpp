// SPDX-License-Identifier: Apache-2.0
#include "ppiref/sasa.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>

#include "ppiref/error.hpp"
#include "ppiref/spatial_grid.hpp"

namespace ppiref {

double vdw_radius(std::string_view element) {
  std::string e;
  for (char c : element)
    if (!std::isspace(static_cast<unsigned char>(c))) e += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (e == "C") return 1.70;
  if (e == "N") return 1.55;
  if (e == "O") return 1.52;
  if (e == "S") return 1.80;
  if (e == "P") return 1.80;
  if (e == "SE") return 1.90;
  if (e == "F") return 1.47;
  if (e == "CL") return 1.75;
  if (e == "BR") return 1.85;
  if (e == "I") return 1.98;
  if (e == "H" || e == "D") return 1.20;
  return 1.80;
}

Eigen::Matrix3Xd fibonacci_sphere(int n_points) {
  if (n_points < 1) fail(ErrorCode::InvalidArgument, "sphere needs at least one point");
  Eigen::Matrix3Xd u(3, n_points);
  const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int k = 0; k < n_points; ++k) {
    const double z = 1.0 - (2.0 * k + 1.0) / n_points;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden_angle * k;
    u.col(k) << r * std::cos(phi), r * std::sin(phi), z;
  }
  return u;
}

Eigen::VectorXd shrake_rupley_sasa(std::span<const SasaAtom> atoms, double probe, int n_points) {
  if (n_points < 32) fail(ErrorCode::InvalidArgument, "n_points must be at least 32");
  if (!(probe >= 0.0)) fail(ErrorCode::InvalidArgument, "probe radius must be non-negative");
  const std::size_t n = atoms.size();
  Eigen::VectorXd area = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  if (n == 0) return area;

  std::vector<Eigen::Vector3d> centers(n);
  std::vector<double> expanded(n);
  double max_r = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(atoms[i].radius > 0.0)) fail(ErrorCode::InvalidArgument, "atom radius must be positive");
    centers[i] = atoms[i].center;
    expanded[i] = atoms[i].radius + probe;
    max_r = std::max(max_r, expanded[i]);
  }

  const Eigen::Matrix3Xd sphere = fibonacci_sphere(n_points);
  const SpatialGrid grid(centers, 2.0 * max_r);
  std::vector<std::size_t> neighbors;
  for (std::size_t i = 0; i < n; ++i) {
    const double ri = expanded[i];
    neighbors.clear();
    grid.for_each_within(centers[i], ri + max_r, [&](std::size_t j, double d2) {
      const double reach = ri + expanded[j];
      if (j != i && d2 < reach * reach) neighbors.push_back(j);
    });
    std::sort(neighbors.begin(), neighbors.end());  // deterministic scan order

    int accessible = 0;
    std::size_t last = 0;  // index into neighbors of the last occluder
    for (int k = 0; k < n_points; ++k) {
      const Eigen::Vector3d p = centers[i] + ri * sphere.col(k);
      bool buried = false;
      if (!neighbors.empty()) {
        const std::size_t j = neighbors[last];
        buried = (p - centers[j]).squaredNorm() < expanded[j] * expanded[j];
        for (std::size_t m = 0; !buried && m < neighbors.size(); ++m) {
          const std::size_t jm = neighbors[m];
          if ((p - centers[jm]).squaredNorm() < expanded[jm] * expanded[jm]) {
            buried = true;
            last = m;
          }
        }
      }
      if (!buried) ++accessible;
    }
    area[static_cast<Eigen::Index>(i)] = 4.0 * std::numbers::pi * ri * ri * accessible / n_points;
  }
  return area;
}

std::vector<SasaAtom> sasa_atoms(const Structure& structure, std::span<const std::string> chain_ids) {
  std::vector<SasaAtom> out;
  for (const std::string& id : chain_ids) {
    const Chain* chain = structure.find_chain(id);
    if (chain == nullptr) fail(ErrorCode::MissingChain, "chain '" + id + "' not in entry " + structure.entry_id);
    for (const Residue& r : chain->residues)
      for (const Atom& a : r.atoms)
        if (a.is_heavy) out.push_back(SasaAtom{a.position, vdw_radius(a.element)});
  }
  return out;
}

double total_sasa(std::span<const SasaAtom> atoms, double probe, int n_points) {
  return shrake_rupley_sasa(atoms, probe, n_points).sum();
}

double compute_bsa(const Structure& structure, std::span<const std::string> chain_ids_in, double probe, int n_points) {
  std::vector<std::string> chain_ids(chain_ids_in.begin(), chain_ids_in.end());
  std::sort(chain_ids.begin(), chain_ids.end());
  double separate = 0.0;
  for (const std::string& id : chain_ids) {
    const std::string one[] = {id};
    const auto atoms = sasa_atoms(structure, one);
    if (atoms.empty()) fail(ErrorCode::MissingChain, "chain '" + id + "' has no heavy atoms");
    separate += total_sasa(atoms, probe, n_points);
  }
  const double together = total_sasa(sasa_atoms(structure, chain_ids), probe, n_points);
  return std::max(0.0, separate - together);
}

}  // namespace ppiref
