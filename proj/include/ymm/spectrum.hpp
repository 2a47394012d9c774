#pragma once

#include "ymm/eigensolve.hpp"
#include "ymm/tensor_operator.hpp"

#include <Eigen/Dense>

#include <vector>

namespace ymm {

struct SpectralRecord {
  double E = 0.0;          // units of H (solver eigenvalue / 4)
  int q_abs = 0;           // even, >= 0
  int n = -1;              // index within the q_abs sector; -1 until enumerated
  double size = 0.0;       // <X^2 x 1 x 1 + 1 x X^2 x 1>^{1/2}
  double q_quality = 0.0;  // |sqrt(<Q^2>) - q_abs|
  bool degenerate_pair = false;
  double residual = 0.0;  // solver residual (4H units)
  double q2 = 0.0;        // projected <Q^2>
  int parity = -1;        // l-parity of the solver sector, -1 if unsplit
  bool charge_flag = false;  // q_quality above the reject threshold
  Eigen::Index column = -1;  // column in the classified vector block
};

struct ClassifyOptions {
  double cluster_tol = 1e-6;  // absolute, units of H
  double reject_threshold = 0.2;
};

struct Classification {
  std::vector<SpectralRecord> records;
  /// Eigenvectors rotated within each energy cluster to diagonalize Q^2.
  Eigen::MatrixXd vectors;
};

/// Clusters eigenvalues within cluster_tol, diagonalizes Q^2 on each cluster
/// and labels every state by the nearest even integer to sqrt(<Q^2>). States
/// beyond reject_threshold are flagged, never dropped.
Classification classify_charge(const EigenResult& eigen, const TensorOperator& q2op, const ClassifyOptions& opt = {});
/// Same with Q^2 given as a real symmetric matrix-vector product.
Classification classify_charge(const EigenResult& eigen, const MatVec& q2, const ClassifyOptions& opt = {});

/// Per q_abs, ascending E: n = 0, 1, ...; for q_abs != 0 consecutive levels of
/// opposite l-parity share one n (the +-q pair). Input order is irrelevant.
std::vector<SpectralRecord> enumerate_levels(std::vector<SpectralRecord> records);

/// Within each q_abs sector, levels i and i+1 are flagged when their gap is
/// below rel_threshold times the mean gap over the 5-level window around them.
/// A +-q pair counts as one level. Sectors with < 3 levels get no flags.
std::vector<bool> detect_near_degenerate_pairs(const std::vector<SpectralRecord>& records, double rel_threshold = 0.05);
void mark_near_degenerate_pairs(std::vector<SpectralRecord>& records, double rel_threshold = 0.05);

/// sqrt(<v|S|v>) per column.
Eigen::VectorXd size_expectations(const Eigen::MatrixXd& vectors, const TensorOperator& sizeop);
Eigen::VectorXd size_expectations(const EigenResult& eigen, const TensorOperator& sizeop);

/// Full pipeline on one solve: classify, sizes, enumerate, flag pairs.
std::vector<SpectralRecord> analyze_spectrum(const EigenResult& eigen, const TensorOperator& q2op,
                                             const TensorOperator& sizeop, const ClassifyOptions& opt = {},
                                             double rel_threshold = 0.05);

}  // namespace ymm
