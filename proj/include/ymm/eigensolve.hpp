#pragma once

#include "ymm/model.hpp"
#include "ymm/tensor_operator.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "json.hpp"

namespace ymm {

enum class SolverMode { Dense, Lanczos, Auto };

struct EigenRequest {
  int k = 10;
  double tol = 1e-8;
  int max_iter = 2000;  // restart cycles
  std::uint64_t seed = 1;
  SolverMode mode = SolverMode::Auto;
  Eigen::Index dense_threshold = 4096;
  int max_basis = 0;  // 0 selects max(2k + 40, 3k, 100)
  int threads = 1;
  bool split_parity = true;  // solve even-l and odd-l sectors separately

  void validate() const;
};

struct EigenResult {
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXd eigenvectors;  // orthonormal columns
  Eigen::VectorXd residuals;     // ||A v - lambda v||
  std::vector<bool> converged;
  std::vector<int> parity;  // l-parity per column when solved by sector, else -1
  int iterations = 0;
  int matvecs = 0;
  std::string method;

  Eigen::Index size() const { return eigenvalues.size(); }
  bool all_converged() const;
  /// Keep the first n columns.
  void truncate(Eigen::Index n);
};

using MatVec = std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>;

/// All eigenpairs of a symmetric matrix.
EigenResult dense_full_spectrum(const Eigen::MatrixXd& m);
/// All eigenpairs of the dense materialization; throws beyond `dense_threshold`.
EigenResult dense_full_spectrum(const TensorOperator& op, Eigen::Index dense_threshold = 4096);

/// k lowest eigenpairs by thick-restart Lanczos with full reorthogonalization
/// (classical Gram-Schmidt against the whole basis every step, repeated when
/// the norm drops by more than 1/sqrt(2)). Deterministic for a fixed seed. Pairs that miss `tol`
/// within `max_iter` restart cycles are returned with converged = false.
EigenResult lanczos_lowest(const MatVec& apply, Eigen::Index dim, const EigenRequest& req);

/// k lowest eigenpairs of a real symmetric operator. Dense or Lanczos per
/// `mode`; with split_parity each l-parity sector is solved for k pairs, the
/// merged list is cut at the lower of the two sector maxima so that it is
/// complete below the cut, then truncated to k.
EigenResult lowest_eigenpairs(const TensorOperator& op, const EigenRequest& req);
EigenResult lowest_eigenpairs(const Eigen::SparseMatrix<double>& m, const EigenRequest& req);

struct SweepLevel {
  int h0 = 0;
  int l0 = 0;
  Eigen::VectorXd eigenvalues;
  Eigen::VectorXd residuals;
  int matvecs = 0;
};

struct SweepResult {
  std::vector<SweepLevel> levels;
  Eigen::Index tracked = 0;                   // eigenvalues common to all levels
  Eigen::VectorXd last_delta;                 // last - previous level
  std::vector<bool> stable;                   // |last_delta| < stability_tol
  std::vector<bool> monotone;                 // nonincreasing within 2 tol along the sweep
  Eigen::VectorXd extrapolated;               // lambda_inf per tracked level
  std::vector<bool> extrapolation_valid;      // false: fell back to the last value
  Eigen::VectorXd rate;                       // fitted gamma (NaN when invalid)
  double stability_tol = 1e-4;
};

/// Exponential three-point extrapolation y = y_inf + c exp(-gamma x).
struct Extrapolation {
  double value = 0.0;
  double gamma = 0.0;
  bool valid = false;
};
Extrapolation extrapolate_exponential(const std::array<double, 3>& x, const std::array<double, 3>& y);

using OperatorBuilder = std::function<TensorOperator(const ModelSpec&)>;

/// Solves each spec (strictly nested, h0 and l0 nondecreasing) for k lowest
/// eigenvalues of the built operator (4H by default).
SweepResult truncation_sweep(const std::vector<ModelSpec>& specs, const EigenRequest& req,
                             double stability_tol = 1e-4, const OperatorBuilder& builder = assemble_4h);

nlohmann::json to_json(const EigenResult& r);
nlohmann::json to_json(const SweepResult& s);

}  // namespace ymm
