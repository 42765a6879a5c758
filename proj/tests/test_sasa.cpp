#include <doctest.h>

#include <Eigen/Geometry>
#include <cmath>

#include "oracles.hpp"
#include "ppiref/error.hpp"
#include "ppiref/sasa.hpp"
#include "support.hpp"

using namespace ppiref;

TEST_CASE("isolated sphere area") {
  for (double r : {1.52, 1.7, 1.8, 3.0}) {
    const SasaAtom a{Eigen::Vector3d(1, 2, 3), r};
    const double expected = 4 * M_PI * (r + kWaterProbe) * (r + kWaterProbe);
    CHECK(std::abs(total_sasa(std::span(&a, 1)) - expected) / expected < 0.005);
  }
}

TEST_CASE("two overlapping spheres match the analytic cap") {
  for (double d : {1.0, 2.5, 3.2, 4.0, 5.0, 6.0}) {
    const std::vector<SasaAtom> atoms{{Eigen::Vector3d::Zero(), 1.7}, {Eigen::Vector3d(d, 0, 0), 1.52}};
    const auto area = shrake_rupley_sasa(atoms);
    const double ri = 1.7 + kWaterProbe, rj = 1.52 + kWaterProbe;
    CAPTURE(d);
    CHECK(std::abs(area[0] - oracle::exposed_two_spheres(ri, rj, d)) / oracle::exposed_two_spheres(ri, rj, d) < 0.01);
    CHECK(std::abs(area[1] - oracle::exposed_two_spheres(rj, ri, d)) / oracle::exposed_two_spheres(rj, ri, d) < 0.01);
  }
}

TEST_CASE("sphere points are unit vectors spread over the sphere") {
  const auto p = fibonacci_sphere(960);
  CHECK(p.cols() == 960);
  CHECK((p.colwise().norm().array() - 1.0).abs().maxCoeff() < 1e-12);
  CHECK(p.rowwise().mean().norm() < 1e-2);
}

TEST_CASE("SASA is stable under rigid motion") {
  const Structure s = read_structure(support::fixture("structures/2BEG.pdb"));
  const std::vector<std::string> ids{"A", "B"};
  auto atoms = sasa_atoms(s, ids);
  const double before = total_sasa(atoms);
  const Eigen::Matrix3d rot = Eigen::AngleAxisd(0.7, Eigen::Vector3d(1, 2, 3).normalized()).toRotationMatrix();
  for (auto& a : atoms) a.center = rot * a.center + Eigen::Vector3d(10, -20, 30);
  CHECK(std::abs(total_sasa(atoms) - before) / before < 0.01);
}

TEST_CASE("BSA against the independent recording") {
  for (const auto& row : support::expected_rows("expected_bsa.csv")) {
    const Structure s = read_structure(support::fixture("structures/" + row.at("entry") + ".pdb"));
    const std::vector<std::string> a{row.at("chain_a")}, b{row.at("chain_b")};
    CAPTURE(row.at("entry"));
    const double sa = total_sasa(sasa_atoms(s, a));
    const double sb = total_sasa(sasa_atoms(s, b));
    CHECK(sa == doctest::Approx(std::stod(row.at("sasa_a"))).epsilon(0.01));
    CHECK(sb == doctest::Approx(std::stod(row.at("sasa_b"))).epsilon(0.01));
    const double bsa = compute_bsa(s, row.at("chain_a"), row.at("chain_b"));
    const double expected = std::stod(row.at("bsa"));
    if (expected == 0.0) {
      CHECK(bsa < 1.0);
    } else {
      CHECK(bsa == doctest::Approx(expected).epsilon(0.05));
    }
  }
}

TEST_CASE("BSA is symmetric, non-negative, and zero for separated chains") {
  const Structure s = read_structure(support::fixture("structures/7DDO.pdb"));
  CHECK(compute_bsa(s, "A", "C") == compute_bsa(s, "C", "A"));
  Structure apart = s;
  for (auto& r : apart.chains[1].residues)
    for (auto& a : r.atoms) a.position += Eigen::Vector3d(500, 0, 0);
  const double bsa = compute_bsa(apart, "A", "C");
  CHECK(bsa >= 0.0);
  CHECK(bsa < 1e-6);
}

TEST_CASE("radii and argument checks") {
  CHECK(vdw_radius("C") == 1.70);
  CHECK(vdw_radius("N") == 1.55);
  CHECK(vdw_radius("O") == 1.52);
  CHECK(vdw_radius("S") == 1.80);
  CHECK(vdw_radius("XX") == 1.80);
  const SasaAtom a{Eigen::Vector3d::Zero(), 1.7};
  CHECK_THROWS_AS(shrake_rupley_sasa(std::span(&a, 1), kWaterProbe, 4), Error);
  CHECK_THROWS_AS(shrake_rupley_sasa(std::span(&a, 1), -1.0), Error);
  const Structure s = read_structure(support::fixture("structures/7DDO.pdb"));
  CHECK_THROWS_AS(compute_bsa(s, "A", "Z"), Error);
}
