// Seeded random inputs for property tests.
#pragma once

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "ppiref/amino_acid.hpp"
#include "ppiref/dedup.hpp"
#include "ppiref/idist.hpp"
#include "ppiref/interface.hpp"

namespace gen {

using Rng = std::mt19937_64;

struct RawInterface {
  Eigen::MatrixX3d x;
  Eigen::MatrixXd f;
  Eigen::VectorXi p;
};

/// n residues spread over c chains (every chain non-empty), Calpha positions
/// in a box of `extent` A, random standard amino acids.
inline RawInterface random_raw_interface(Rng& rng, int n, int c, double extent = 20.0) {
  std::uniform_real_distribution<double> coord(-extent, extent);
  std::uniform_int_distribution<int> aa(0, ppiref::kAlphabetSize - 1);
  std::uniform_int_distribution<int> chain(0, c - 1);
  RawInterface r;
  r.x.resize(n, 3);
  r.f = Eigen::MatrixXd::Zero(n, ppiref::kAlphabetSize);
  r.p.resize(n);
  for (int i = 0; i < n; ++i) {
    r.x.row(i) << coord(rng), coord(rng), coord(rng);
    r.f(i, aa(rng)) = 1.0;
    r.p[i] = i < c ? i : chain(rng);
  }
  return r;
}

inline ppiref::Interface to_interface(const RawInterface& r, const std::string& id) {
  ppiref::Interface out;
  out.id = id;
  out.source = id;
  const int c = r.p.maxCoeff() + 1;
  for (int k = 0; k < c; ++k) out.chains.push_back({std::string(1, static_cast<char>('A' + k)), {}});
  for (Eigen::Index i = 0; i < r.x.rows(); ++i) {
    ppiref::InterfaceResidue res;
    res.chain_id = out.chains[r.p[i]].id;
    res.seq_number = static_cast<int>(i);
    Eigen::Index a = 0;
    r.f.row(i).maxCoeff(&a);
    res.aa = ppiref::amino_acid_at(static_cast<int>(a));
    res.name = std::string(ppiref::three_letter(res.aa));
    res.ca = r.x.row(i).transpose();
    out.chains[r.p[i]].residues.push_back(res);
  }
  return out;
}

/// Uniformly random rotation (normalized Gaussian quaternion) and a
/// translation of up to `shift` A per axis.
inline Eigen::Isometry3d random_rigid_motion(Rng& rng, double shift = 100.0) {
  std::normal_distribution<double> g;
  Eigen::Quaterniond q(g(rng), g(rng), g(rng), g(rng));
  q.normalize();
  std::uniform_real_distribution<double> t(-shift, shift);
  Eigen::Isometry3d m = Eigen::Isometry3d::Identity();
  m.linear() = q.toRotationMatrix();
  m.translation() << t(rng), t(rng), t(rng);
  return m;
}

inline Eigen::MatrixX3d apply(const Eigen::Isometry3d& m, const Eigen::MatrixX3d& x) {
  return ((m.linear() * x.transpose()).colwise() + m.translation()).transpose();
}

/// n embeddings of dimension d; a fraction of them are jittered copies of
/// earlier ones so that near-duplicate pairs exist at threshold `tau`.
inline std::vector<ppiref::InterfaceEmbedding> random_embeddings(Rng& rng, int n, double tau, int d = 20,
                                                                 double spread = 0.3) {
  std::uniform_real_distribution<double> u(-spread, spread);
  std::uniform_real_distribution<double> jitter(-tau, tau);
  std::bernoulli_distribution copy(0.4);
  std::vector<ppiref::InterfaceEmbedding> out;
  for (int k = 0; k < n; ++k) {
    ppiref::InterfaceEmbedding e;
    char id[32];
    std::snprintf(id, sizeof id, "I%05d", k);
    e.id = id;
    e.z.resize(d);
    if (k > 0 && copy(rng)) {
      std::uniform_int_distribution<int> pick(0, k - 1);
      e.z = out[pick(rng)].z;
      for (int j = 0; j < d; ++j) e.z[j] += jitter(rng) / std::sqrt(static_cast<double>(d));
    } else {
      for (int j = 0; j < d; ++j) e.z[j] = u(rng);
    }
    out.push_back(std::move(e));
  }
  return out;
}

/// Erdos-Renyi graph with node ids "n000".."n(n-1)" in shuffled order.
inline ppiref::NearDuplicateGraph random_graph(Rng& rng, int n, double p) {
  std::vector<std::string> ids;
  for (int k = 0; k < n; ++k) {
    char id[16];
    std::snprintf(id, sizeof id, "n%03d", k);
    ids.push_back(id);
  }
  std::shuffle(ids.begin(), ids.end(), rng);
  std::bernoulli_distribution edge(p);
  std::vector<ppiref::GraphEdge> edges;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (edge(rng)) edges.push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b), 0.0});
  return ppiref::NearDuplicateGraph(std::move(ids), std::move(edges));
}

}  // namespace gen
