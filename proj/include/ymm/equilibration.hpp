#pragma once

#include "ymm/eigensolve.hpp"
#include "ymm/regge.hpp"
#include "ymm/spectrum.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace ymm {

/// Consecutive levels of one q_abs sector inside [E, E + Delta], one
/// representative per +-q pair (the lower member).
struct MicrocanonicalWindow {
  double E = 0.0;
  double Delta = 0.0;
  int q_abs = 0;
  std::vector<int> indices;  // n values, consecutive
  std::vector<double> energies;

  int d() const { return static_cast<int>(indices.size()); }
  void validate() const;
};

/// One level per n in the q_abs sector, ascending.
std::vector<SpectralRecord> sector_levels(const std::vector<SpectralRecord>& records, int q_abs);
MicrocanonicalWindow extract_window(const std::vector<SpectralRecord>& records, int q_abs, double E, double Delta);
/// d consecutive levels starting at n_start; E is the first energy, Delta the span.
MicrocanonicalWindow window_by_index(const std::vector<SpectralRecord>& records, int q_abs, int n_start, int d);

struct AmplitudeVector {
  Eigen::VectorXcd c;
  Eigen::VectorXd energies;

  /// Normalized within 1e-12 and conformable.
  void validate() const;
  static AmplitudeVector uniform(const Eigen::VectorXd& energies);
};

/// Weights |c_n|^2 of the dephased state. Energies closer than `tol` count as
/// duplicates and raise std::invalid_argument (merge them first).
Eigen::VectorXd time_averaged_state(const AmplitudeVector& amps, double tol = 0.0);
/// Combines amplitudes of energies within tol: c = sqrt(sum |c|^2), E = first.
AmplitudeVector merge_degenerate(const AmplitudeVector& amps, double tol, int* merged = nullptr);

double effective_dimension(const AmplitudeVector& amps);
double effective_dimension(const Eigen::VectorXd& weights);

struct HaarStats {
  int d = 0;
  int samples = 0;
  std::uint64_t seed = 0;
  double mean_deff = 0.0, se_deff = 0.0;
  double mean_purity = 0.0, se_purity = 0.0;  // sum |c|^4
  bool deff_bound = false;                    // mean_deff >= (1 + d) / 2
};

/// Haar-random unit vectors in C^d from normalized complex Gaussians. Sample
/// i draws from a generator seeded with derive_seed(seed, i), so results do
/// not depend on `threads`.
HaarStats haar_microcanonical_stats(int d, int samples, std::uint64_t seed, int threads = 1);

struct DeffEstimate {
  double d_delta = 0.0;     // alpha Delta (E + E0)^{alpha - 1} / c
  double deff_bound = 0.0;  // d_delta / 2 + 1/2
};
DeffEstimate microcanonical_deff_estimate(const ReggeFit& fit, double E, double Delta, int q_abs);

struct EquilibrationReport {
  std::string kind;
  std::vector<double> times;
  std::vector<double> deviation;
  std::vector<double> bound;        // certified bound series (or constant bound)
  std::vector<double> quadratic_bound;  // quadratic curve in t, trajectories only
  double d_eff = 0.0;
  double horizon = 0.0;
  double mean_deviation = 0.0;
  double bound_value = 0.0;
  std::uint64_t seed = 0;
  std::map<std::string, bool> checks;
  nlohmann::json extra = nlohmann::json::object();

  bool passed() const;
};

/// 10^4 / (smallest gap between distinct energies).
double default_horizon(const Eigen::VectorXd& energies);

/// Uniform grid t_k = k T / (samples - 1), k = 0..samples-1.
std::vector<double> time_grid(double horizon, int samples);

/// Uniform superposition of the window levels under the nearest-neighbour
/// hopping observable O: exact |Tr O(rho(t) - omega)| / ||O|| with the path
/// norm 2 cos(pi / (d + 1)), the certified series (1/d) sum cos(g_i t) and the
/// quadratic curve 1 - (1/(2d)) sum g_i^2 t^2.
EquilibrationReport slow_observable_trajectory(const MicrocanonicalWindow& window, const std::vector<double>& t_grid);

/// (1/(2d)) sum g_i^2: coefficient of t^2 in the quadratic curve.
double quadratic_shrinkage(const MicrocanonicalWindow& window);
/// Same coefficient from the fitted gap law at energy E.
double predicted_shrinkage(const ReggeFit& fit, double E, int d);

/// Time average over `samples` grid points in [0, T] of |Tr rho(t) A - Tr omega A|^2
/// against ||A||^2 / d_eff; passes when the mean is <= bound (1 + slack).
/// `a` is given in the eigenbasis of `amps.energies`.
EquilibrationReport observable_equilibration_check(const AmplitudeVector& amps, const Eigen::MatrixXcd& a,
                                                   double horizon, int samples, double slack = 0.1);

/// Tensor layout with the first register fastest; `subsystem` picks S.
struct Bipartition {
  std::vector<int> dims;
  int subsystem = 0;

  Eigen::Index total() const;
  void validate() const;
};

/// Tr_B of |psi><psi|.
Eigen::MatrixXcd partial_trace(const Eigen::VectorXcd& psi, const Bipartition& bp);
/// Sum of |eigenvalues| of a Hermitian matrix.
double trace_norm(const Eigen::MatrixXcd& m);

/// Dense-path subsystem check: psi(t) from the full eigendecomposition,
/// omega as the dephased state (levels within `degeneracy_tol` merged, count
/// reported), mean ||rho_S(t) - omega_S||_1 over the grid against
/// d_S / sqrt(d_eff) (1 + slack).
EquilibrationReport subsystem_equilibration_check(const EigenResult& full, const Bipartition& bp,
                                                  const Eigen::VectorXcd& psi0, double horizon, int samples,
                                                  double slack = 0.1, double degeneracy_tol = 1e-10,
                                                  Eigen::Index max_dense = 4096);

struct GapSector {
  int q_abs = 0;
  int gaps = 0;
  int violations = 0;
  double max_gap = 0.0;
  double bound_at_floor = 0.0;
};
struct GapBoundReport {
  std::vector<GapSector> sectors;
  int gaps = 0;
  int violations = 0;
  double violation_fraction = 0.0;
};
/// Gap law E_{i+1} - E_i <= c / (alpha (E_i + E0)^{alpha - 1}) for every
/// consecutive pair of sector levels with E_i >= E_floor.
GapBoundReport gap_bound_check(const std::vector<SpectralRecord>& records, const ReggeFit& fit, double E_floor);
/// Right-hand side of the gap law.
double gap_bound(const ReggeFit& fit, double E);

nlohmann::json to_json(const HaarStats& s);
nlohmann::json to_json(const EquilibrationReport& r);
nlohmann::json to_json(const GapBoundReport& r);
nlohmann::json to_json(const MicrocanonicalWindow& w);

}  // namespace ymm
