// SPDX-License-Identifier: Apache-2.0
#include "ppiref/interface.hpp"

#include <algorithm>
#include <map>
#include <utility>

#include "ppiref/error.hpp"
#include "ppiref/log.hpp"
#include "ppiref/spatial_grid.hpp"

namespace ppiref {

std::size_t Interface::residue_count() const {
  std::size_t n = 0;
  for (const auto& c : chains) n += c.residues.size();
  return n;
}

std::vector<std::string> Interface::chain_ids() const {
  std::vector<std::string> ids;
  for (const auto& c : chains) ids.push_back(c.id);
  return ids;
}

Eigen::MatrixX3d Interface::coordinates() const {
  Eigen::MatrixX3d x(static_cast<Eigen::Index>(residue_count()), 3);
  Eigen::Index row = 0;
  for (const auto& c : chains)
    for (const auto& r : c.residues) x.row(row++) = r.ca.transpose();
  return x;
}

Eigen::MatrixXd Interface::features() const {
  Eigen::MatrixXd f(static_cast<Eigen::Index>(residue_count()), kAlphabetSize);
  Eigen::Index row = 0;
  for (const auto& c : chains)
    for (const auto& r : c.residues) f.row(row++) = r.one_hot().transpose();
  return f;
}

Eigen::VectorXi Interface::partners() const {
  Eigen::VectorXi p(static_cast<Eigen::Index>(residue_count()));
  Eigen::Index row = 0;
  for (std::size_t c = 0; c < chains.size(); ++c)
    for (std::size_t k = 0; k < chains[c].residues.size(); ++k) p[row++] = static_cast<int>(c);
  return p;
}

std::string interface_id(const std::string& entry_id, std::vector<std::string> chain_ids) {
  std::sort(chain_ids.begin(), chain_ids.end());
  std::string id = entry_id;
  for (const auto& c : chain_ids) id += "_" + c;
  return id;
}

std::vector<Interface> extract_interfaces(const Structure& structure, double cutoff) {
  if (!(cutoff > 0.0)) fail(ErrorCode::InvalidArgument, "cutoff must be positive");
  std::vector<Interface> out;
  const std::size_t n_chains = structure.chains.size();
  if (n_chains < 2) return out;

  // Flatten residues and heavy atoms.
  std::vector<const Residue*> residues;
  std::vector<std::size_t> residue_chain;
  std::vector<Eigen::Vector3d> positions;
  std::vector<std::size_t> atom_residue;
  for (std::size_t c = 0; c < n_chains; ++c) {
    for (const Residue& r : structure.chains[c].residues) {
      for (const Atom& a : r.atoms) {
        if (!a.is_heavy) continue;
        positions.push_back(a.position);
        atom_residue.push_back(residues.size());
      }
      residues.push_back(&r);
      residue_chain.push_back(c);
    }
  }

  // contacts[(ca, cb)] flags every residue that touches the other chain.
  std::map<std::pair<std::size_t, std::size_t>, std::vector<char>> contacts;
  const SpatialGrid grid(positions, cutoff);
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const std::size_t ri = atom_residue[i];
    const std::size_t ci = residue_chain[ri];
    grid.for_each_within(positions[i], cutoff, [&](std::size_t j, double) {
      const std::size_t rj = atom_residue[j];
      const std::size_t cj = residue_chain[rj];
      if (cj <= ci) return;
      auto& flags = contacts[{ci, cj}];
      if (flags.empty()) flags.assign(residues.size(), 0);
      flags[ri] = 1;
      flags[rj] = 1;
    });
  }

  for (const auto& [pair, flags] : contacts) {
    Interface iface;
    iface.source = structure.entry_id;
    iface.cutoff = cutoff;
    std::vector<std::size_t> chain_order = {pair.first, pair.second};
    std::sort(chain_order.begin(), chain_order.end(),
              [&](std::size_t a, std::size_t b) { return structure.chains[a].id < structure.chains[b].id; });
    bool complete = true;
    for (std::size_t c : chain_order) {
      InterfaceChain ic;
      ic.id = structure.chains[c].id;
      for (std::size_t r = 0; r < residues.size(); ++r) {
        if (!flags[r] || residue_chain[r] != c) continue;
        const Residue& res = *residues[r];
        const Atom* ca = res.alpha_carbon();
        if (ca == nullptr) {
          log_warning("residue " + structure.entry_id + " " + res.label() + " has no CA atom; excluded from interface");
          continue;
        }
        ic.residues.push_back(InterfaceResidue{res.chain_id, res.seq_number, res.insertion_code, res.name, res.aa,
                                               ca->position});
      }
      if (ic.residues.empty()) complete = false;
      iface.chains.push_back(std::move(ic));
    }
    iface.id = interface_id(structure.entry_id, iface.chain_ids());
    if (!complete) {
      log_warning("interface " + iface.id + " has a side without CA-bearing residues; skipped");
      continue;
    }
    out.push_back(std::move(iface));
  }
  std::sort(out.begin(), out.end(), [](const Interface& a, const Interface& b) { return a.id < b.id; });
  return out;
}

Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> residue_contact_map(const Interface& interface) {
  const Eigen::VectorXi p = interface.partners();
  const Eigen::Index n = p.size();
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = p[i] != p[j];
  return m;
}

std::string write_interface_pdb(const Structure& structure, const Interface& interface) {
  Structure trimmed;
  trimmed.entry_id = structure.entry_id;
  trimmed.method = structure.method;
  trimmed.resolution = structure.resolution;
  for (const InterfaceChain& ic : interface.chains) {
    const Chain* chain = structure.find_chain(ic.id);
    if (chain == nullptr) fail(ErrorCode::MissingChain, "chain " + ic.id + " not in " + structure.entry_id);
    Chain out{ic.id, {}};
    for (const Residue& r : chain->residues) {
      const bool keep = std::any_of(ic.residues.begin(), ic.residues.end(), [&](const InterfaceResidue& x) {
        return x.seq_number == r.seq_number && x.insertion_code == r.insertion_code;
      });
      if (keep) out.residues.push_back(r);
    }
    trimmed.chains.push_back(std::move(out));
  }
  return write_pdb(trimmed);
}

}  // namespace ppiref
