#pragma once

#include "ymm/eigensolve.hpp"
#include "ymm/model.hpp"
#include "ymm/spectrum.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

#include "json.hpp"

namespace ymm {

using SparseMatrixD = Eigen::SparseMatrix<double>;
using SparseMatrixC = Eigen::SparseMatrix<std::complex<double>>;

/// Six unit-frequency oscillators x_a^{(i)}, mode 3 i + a, with total quanta <= Nmax.
struct FockCutoff {
  int Nmax = 4;
  Eigen::Index max_dimension = 200000;

  /// C(Nmax + 6, 6).
  Eigen::Index dim() const;
  void validate() const;
};

/// Occupations ordered by total quanta, then lexicographically; block N
/// spans [offsets[N], offsets[N + 1]).
struct FockBasis {
  std::vector<std::array<int, 6>> states;
  std::vector<Eigen::Index> offsets;

  Eigen::Index dim() const { return Eigen::Index(states.size()); }
  /// -1 when the occupation lies outside the cutoff.
  Eigen::Index index(const std::array<int, 6>& s) const;
  int Nmax() const { return int(offsets.size()) - 2; }

 private:
  friend FockBasis make_fock_basis(const FockCutoff& cutoff);
  std::vector<Eigen::Index> table_;  // packed occupations, sorted
  std::vector<Eigen::Index> order_;  // basis index per table_ entry
};
FockBasis make_fock_basis(const FockCutoff& cutoff);

/// 4H = sum p^2 + sum_{a != b} (x1_a^2 x2_b^2 - x1_a x2_a x1_b x2_b) projected
/// onto the cutoff space; real symmetric.
SparseMatrixD build_direct_hamiltonian(const FockCutoff& cutoff);
SparseMatrixD build_direct_hamiltonian(const FockBasis& basis);

/// V_a = sum_i (x^{(i)} x p^{(i)})_a = i W_a with W_a real antisymmetric.
struct GaugeGenerators {
  std::array<SparseMatrixD, 3> W;

  SparseMatrixC V(int a) const;
  /// sum_a V_a^2 = -sum_a W_a^2, real symmetric.
  SparseMatrixD casimir() const;
};
GaugeGenerators build_gauge_generators(const FockCutoff& cutoff);
GaugeGenerators build_gauge_generators(const FockBasis& basis);

/// SO(2) generator x1.p2 - x2.p1 = i K, K real antisymmetric.
SparseMatrixD build_rotation_generator(const FockBasis& basis);

struct SingletSpace {
  Eigen::MatrixXd basis;          // orthonormal columns spanning the Casimir null space
  Eigen::VectorXd casimir;        // every Casimir eigenvalue, ascending
  std::vector<int> per_level;     // singlets per total-quanta block
  int count() const { return int(basis.cols()); }
};
/// Block-wise diagonalization of the Casimir; eigenvalues below 0.5 count as singlets.
SingletSpace singlet_space(const FockBasis& basis, const GaugeGenerators& gauge);

struct SingletSpectrum {
  int Nmax = 0;
  Eigen::Index dim = 0;
  int singlets = 0;
  double vacuum_energy = 0.0;          // <0|4H|0> / 4
  std::vector<SpectralRecord> records;  // k lowest, ascending E, enumerated
};

/// k lowest singlet levels of the direct construction, labelled like the
/// reduced model (cluster, diagonalize the projected generator squared).
SingletSpectrum singlet_spectrum(const FockCutoff& cutoff, int k, const ClassifyOptions& opt = {});

struct OracleDiagnostics {
  int Nmax = 0;
  double hermiticity = 0.0;        // max |H - H^T|
  double gauge_commutator = 0.0;   // max_a max |[H, W_a]|
  double algebra = 0.0;            // max |[V_1, V_2] - i V_3| over cyclic triples
  double rotation_commutator = 0.0;  // max |[H, K]|
  double vacuum_annihilation = 0.0;  // max_a ||V_a |0>||
};
OracleDiagnostics oracle_diagnostics(const FockCutoff& cutoff);

struct CrossCheckLevel {
  int level = 0;
  double E_reduced = 0.0, E_direct = 0.0;
  int q_reduced = 0, q_direct = 0;
  double diff = 0.0;  // |E_direct - E_reduced| / E_reduced
};

struct CutoffSummary {
  int Nmax = 0;
  Eigen::Index dim = 0;
  int singlets = 0;
  double E0_direct = 0.0;
  double ground_diff = 0.0;  // |E0_direct - E0_reduced|
  double vacuum_energy = 0.0;
};

struct CrossCheckReport {
  std::vector<CutoffSummary> sweep;   // ascending Nmax
  std::vector<CrossCheckLevel> levels;  // at the largest cutoff
  double E0_reduced = 0.0;
  double rel_tol = 0.05;
  bool ground_diff_nonincreasing = false;
  bool labels_match = false;
  bool within_tolerance = false;
  bool variational_bound = false;  // both ground energies <= the Fock vacuum energy
  nlohmann::json reduced = nlohmann::json::object();

  bool passed() const {
    return ground_diff_nonincreasing && labels_match && within_tolerance && variational_bound;
  }
};

/// Compares the k lowest states, sorted by E, of the reduced records against
/// the direct construction at the largest cutoff, and the ground energy along
/// the whole sweep. Cutoffs are independent and run on up to `threads` threads.
CrossCheckReport cross_check(const std::vector<int>& cutoffs, const std::vector<SpectralRecord>& reduced, int k,
                             double rel_tol = 0.05, int threads = 1);
/// Same, solving the reduced model first.
CrossCheckReport cross_check(const std::vector<int>& cutoffs, const ModelSpec& spec, int k, const EigenRequest& req,
                             double rel_tol = 0.05);

nlohmann::json to_json(const SingletSpectrum& s);
nlohmann::json to_json(const OracleDiagnostics& d);
nlohmann::json to_json(const CrossCheckReport& r);

}  // namespace ymm
