#pragma once

#include "ymm/spectrum.hpp"

#include <Eigen/Dense>

#include <climits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace ymm {

enum class ReggeMode { AlphaFree, AlphaFixed2 };
std::string to_string(ReggeMode m);
ReggeMode regge_mode_from_string(const std::string& s);

/// Explicit fit region: q_min <= q_abs <= q_max and n < cutoff, where the
/// cutoff is n_cutoff[q_abs] if present, else default_n_cutoff.
struct FitRegion {
  int q_min = 0;
  int q_max = INT_MAX;
  int default_n_cutoff = INT_MAX;
  std::map<int, int> n_cutoff;
  bool exclude_flagged = true;  // near-degenerate pairs and charge-flagged states

  int cutoff(int q) const;
};

struct ReggePoint {
  double E = 0.0;
  int q = 0;
  int n = 0;
};

struct ReggeParams {
  double alpha = 2.0, E0 = 1.5, a = 0.0, b = 0.0, c = 0.0;
};

struct ReggeFit {
  ReggeParams params;
  ReggeMode mode = ReggeMode::AlphaFree;
  double rms_residual = 0.0;       // energy units
  Eigen::MatrixXd covariance;      // 5x5 over (alpha, E0, a, b, c); alpha row/col zero when fixed
  Eigen::VectorXd residuals;       // (a + b q + c n)^{1/alpha} - E0 - E per point
  std::vector<double> objective;   // sum of squared residuals after each accepted step
  FitRegion region;
  int points = 0;
  int iterations = 0;
  std::string status;
};

/// Carries the best parameters found when the optimizer gives up.
class FitError : public std::runtime_error {
 public:
  FitError(const std::string& what, ReggeFit best) : std::runtime_error(what), best_(std::move(best)) {}
  const ReggeFit& best() const { return best_; }

 private:
  ReggeFit best_;
};

struct ReggeOptions {
  int max_iter = 500;
  double tol = 1e-15;
};

/// One point per (q_abs, n) in the region; a +-q pair contributes its mean energy.
std::vector<ReggePoint> select_region(const std::vector<SpectralRecord>& records, const FitRegion& region);

/// Least squares for (E + E0)^alpha = a + b q + c n, with residuals taken in
/// energy, E = (a + b q + c n)^{1/alpha} - E0. Damped Gauss-Newton from
/// alpha = 2, E0 = 1.5 and (a, b, c) from the linear problem at that point.
/// Throws std::invalid_argument for < 8 points or a singular design, FitError
/// on non-convergence or E0 <= -min(E).
ReggeFit regge_fit(const std::vector<ReggePoint>& points, ReggeMode mode, const ReggeOptions& opt = {});
ReggeFit regge_fit(const std::vector<SpectralRecord>& records, const FitRegion& region, ReggeMode mode,
                   const ReggeOptions& opt = {});

/// Exact points E = (a + b q + c n)^{1/alpha} - E0 for every q in `qs`, n < n_count.
std::vector<ReggePoint> synthetic_regge(const ReggeParams& p, const std::vector<int>& qs, int n_count);

/// Per-n straight line of (E + E0)^2 against |q| over the upper half of the
/// |q| values present for that n; r2 is NaN when fewer than 3 points remain.
struct ChewFrautschiLine {
  int n = 0;
  int points = 0;
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};
std::vector<ChewFrautschiLine> chew_frautschi(const std::vector<ReggePoint>& points, double E0);

nlohmann::json to_json(const ReggeFit& f);
nlohmann::json to_json(const std::vector<ChewFrautschiLine>& lines);

}  // namespace ymm
