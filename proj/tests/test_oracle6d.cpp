#include "doctest.h"

#include "ymm/oracle6d.hpp"

#include <cmath>
#include <complex>

using namespace ymm;

namespace {

// SO(3) singlets among polynomials of degree N in two 3-vectors, from the
// Weyl integration formula over the character of Sym^N(V + V).
int character_singlets(int N) {
  const int steps = 4096;
  double sum = 0.0;
  for (int s = 0; s < steps; ++s) {
    const double theta = M_PI * (s + 0.5) / steps;
    // coefficients of prod 1/(1 - t z): z in {e^{i theta}, 1, e^{-i theta}} twice
    std::vector<std::complex<double>> c(N + 1, 0.0);
    c[0] = 1.0;
    const std::complex<double> zs[3] = {std::polar(1.0, theta), 1.0, std::polar(1.0, -theta)};
    for (int rep = 0; rep < 2; ++rep)
      for (const auto& z : zs)
        for (int n = 1; n <= N; ++n) c[n] += z * c[n - 1];
    sum += c[N].real() * (1.0 - std::cos(theta));
  }
  return int(std::lround(sum / steps));
}

}  // namespace

TEST_CASE("fock cutoff and basis") {
  CHECK(FockCutoff{8}.dim() == 3003);
  CHECK(FockCutoff{4}.dim() == 210);
  CHECK_THROWS_AS(FockCutoff{1}.validate(), std::invalid_argument);
  FockCutoff big{30};
  big.max_dimension = 1000;
  CHECK_THROWS_WITH_AS(big.validate(), doctest::Contains("oracle.Nmax"), std::invalid_argument);

  const FockBasis b = make_fock_basis(FockCutoff{4});
  CHECK(b.dim() == 210);
  CHECK(b.Nmax() == 4);
  for (Eigen::Index i = 0; i < b.dim(); ++i) CHECK(b.index(b.states[i]) == i);
  CHECK(b.index({5, 0, 0, 0, 0, 0}) == -1);
  CHECK(b.index({0, 0, 0, 0, 0, 0}) == 0);
}

TEST_CASE("direct hamiltonian") {
  const SparseMatrixD h = build_direct_hamiltonian(FockCutoff{4});
  CHECK(h.coeff(0, 0) == doctest::Approx(4.5).epsilon(1e-14));
  const OracleDiagnostics d = oracle_diagnostics(FockCutoff{4});
  CHECK(d.hermiticity < 1e-12);
  CHECK(d.gauge_commutator < 1e-10);
  CHECK(d.algebra < 1e-10);
  CHECK(d.rotation_commutator < 1e-10);
  CHECK(d.vacuum_annihilation == 0.0);
}

TEST_CASE("gauge generators and singlets") {
  const FockBasis b = make_fock_basis(FockCutoff{4});
  const GaugeGenerators g = build_gauge_generators(b);
  for (int a = 0; a < 3; ++a) {
    const SparseMatrixC v = g.V(a);
    CHECK(Eigen::MatrixXcd(v - SparseMatrixC(v.adjoint())).cwiseAbs().maxCoeff() < 1e-14);
  }
  const SingletSpace s = singlet_space(b, g);
  for (Eigen::Index i = 0; i < s.casimir.size(); ++i) {
    const double c = s.casimir[i];
    const double j = std::round((std::sqrt(1.0 + 4.0 * std::max(0.0, c)) - 1.0) / 2.0);
    CHECK(std::abs(c - j * (j + 1)) < 1e-8);
  }
  CHECK(s.count() == 10);
  const Eigen::MatrixXd p = s.basis * s.basis.transpose();
  CHECK((p * p - p).cwiseAbs().maxCoeff() < 1e-10);
  const Eigen::MatrixXd cs = Eigen::MatrixXd(g.casimir()) * s.basis;
  CHECK(cs.cwiseAbs().maxCoeff() < 1e-10);

  for (int nmax : {2, 4, 6}) {
    const FockBasis bn = make_fock_basis(FockCutoff{nmax});
    const SingletSpace sn = singlet_space(bn, build_gauge_generators(bn));
    int expected = 0;
    for (int N = 0; N <= nmax; ++N) {
      CHECK(sn.per_level[std::size_t(N)] == character_singlets(N));
      expected += character_singlets(N);
    }
    CHECK(sn.count() == expected);
  }
  CHECK(character_singlets(2) == 3);
  CHECK(character_singlets(3) == 0);
}

TEST_CASE("singlet spectrum") {
  double previous = 1e9;
  for (int nmax : {4, 6, 8}) {
    const SingletSpectrum s = singlet_spectrum(FockCutoff{nmax}, 8);
    REQUIRE(s.records.size() == 8);
    CHECK(s.records.front().E < previous);
    CHECK(s.records.front().E > 1.05535);
    CHECK(s.records.front().E <= s.vacuum_energy);
    previous = s.records.front().E;
    for (const SpectralRecord& r : s.records) {
      CHECK(r.q_abs % 2 == 0);
      CHECK(r.q_quality < 0.05);
    }
    for (std::size_t i = 1; i < s.records.size(); ++i) CHECK(s.records[i].E >= s.records[i - 1].E);
  }
  CHECK(singlet_spectrum(FockCutoff{4}, 1).records.front().E == doctest::Approx(1.064443).epsilon(1e-6));
  CHECK(singlet_spectrum(FockCutoff{2}, 3).vacuum_energy == doctest::Approx(1.125));
  CHECK_THROWS_AS(singlet_spectrum(FockCutoff{4}, 0), std::invalid_argument);
}

TEST_CASE("cross check against supplied records") {
  std::vector<SpectralRecord> reduced(5);
  const double e[5] = {1.05535, 1.6774, 1.6781, 1.80, 2.30};
  const int q[5] = {0, 2, 2, 0, 4};
  for (int i = 0; i < 5; ++i) {
    reduced[i].E = e[i];
    reduced[i].q_abs = q[i];
  }
  const CrossCheckReport r = cross_check({8, 4, 6}, reduced, 5, 0.05, 2);
  REQUIRE(r.sweep.size() == 3);
  CHECK(r.sweep[0].Nmax == 4);
  CHECK(r.ground_diff_nonincreasing);
  CHECK(r.variational_bound);
  CHECK(r.labels_match);
  CHECK(r.levels.size() == 5);
  const CrossCheckReport serial = cross_check({4, 6, 8}, reduced, 5, 0.05, 1);
  CHECK(to_json(serial).dump() == to_json(r).dump());

  reduced[1].q_abs = 0;
  CHECK_FALSE(cross_check({4}, reduced, 5).labels_match);
  CHECK_THROWS_AS(cross_check({4}, reduced, 6), std::invalid_argument);
}
