#include "ymm/spectrum.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace ymm {

Classification classify_charge(const EigenResult& eigen, const TensorOperator& q2op, const ClassifyOptions& opt) {
  if (eigen.eigenvectors.cols() != eigen.size() || (eigen.size() > 0 && eigen.eigenvectors.rows() != q2op.dim()))
    throw std::invalid_argument("classify_charge: eigenvectors missing or not conformable with Q^2");
  if (q2op.structure() != OperatorStructure::RealSymmetric)
    throw std::invalid_argument("classify_charge: Q^2 operator must be real symmetric");
  return classify_charge(
      eigen, [&](const Eigen::VectorXd& v, Eigen::VectorXd& out) { apply_into(q2op, v, out); }, opt);
}

Classification classify_charge(const EigenResult& eigen, const MatVec& q2, const ClassifyOptions& opt) {
  if (eigen.eigenvectors.cols() != eigen.size())
    throw std::invalid_argument("classify_charge: eigenvectors missing");
  const Eigen::Index count = eigen.size();
  std::vector<Eigen::Index> order(count);
  std::iota(order.begin(), order.end(), Eigen::Index(0));
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return eigen.eigenvalues[a] < eigen.eigenvalues[b]; });
  auto parity_of = [&](Eigen::Index c) {
    return c < Eigen::Index(eigen.parity.size()) ? eigen.parity[c] : -1;
  };

  Classification out;
  out.vectors.resize(eigen.eigenvectors.rows(), count);
  out.records.reserve(count);
  Eigen::VectorXd qv;
  Eigen::Index begin = 0;
  while (begin < count) {
    Eigen::Index end = begin + 1;
    while (end < count &&
           (eigen.eigenvalues[order[end]] - eigen.eigenvalues[order[end - 1]]) / 4.0 <= opt.cluster_tol)
      ++end;
    // Q^2 preserves l-parity, so each cluster is split by sector first
    std::map<int, std::vector<Eigen::Index>> by_parity;
    for (Eigen::Index i = begin; i < end; ++i) by_parity[parity_of(order[i])].push_back(i);
    for (const auto& [parity, members] : by_parity) {
      const Eigen::Index c = Eigen::Index(members.size());
      Eigen::MatrixXd v(eigen.eigenvectors.rows(), c), qvs(eigen.eigenvectors.rows(), c);
      for (Eigen::Index j = 0; j < c; ++j) {
        v.col(j) = eigen.eigenvectors.col(order[members[j]]);
        q2(Eigen::VectorXd(v.col(j)), qv);
        qvs.col(j) = qv;
      }
      Eigen::MatrixXd m = v.transpose() * qvs;
      m = 0.5 * (m + m.transpose()).eval();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
      const Eigen::MatrixXd rotated = c == 1 ? v : Eigen::MatrixXd(v * es.eigenvectors());
      const Eigen::VectorXd q2 = c == 1 ? Eigen::VectorXd(m.diagonal()) : Eigen::VectorXd(es.eigenvalues());
      for (Eigen::Index j = 0; j < c; ++j) {
        const Eigen::Index source = order[members[j]];
        SpectralRecord r;
        r.E = eigen.eigenvalues[source] / 4.0;
        r.q2 = q2[j];
        const double q = std::sqrt(std::max(0.0, q2[j]));
        r.q_abs = 2 * static_cast<int>(std::lround(q / 2.0));
        r.q_quality = std::abs(q - r.q_abs);
        r.charge_flag = r.q_quality > opt.reject_threshold;
        r.residual = source < eigen.residuals.size() ? eigen.residuals[source] : 0.0;
        r.parity = parity;
        r.column = Eigen::Index(out.records.size());
        out.vectors.col(r.column) = rotated.col(j);
        out.records.push_back(r);
      }
    }
    begin = end;
  }
  return out;
}

std::vector<SpectralRecord> enumerate_levels(std::vector<SpectralRecord> records) {
  std::stable_sort(records.begin(), records.end(), [](const SpectralRecord& a, const SpectralRecord& b) {
    if (a.q_abs != b.q_abs) return a.q_abs < b.q_abs;
    if (a.E != b.E) return a.E < b.E;
    if (a.parity != b.parity) return a.parity < b.parity;
    return a.column < b.column;
  });
  std::size_t i = 0;
  while (i < records.size()) {
    const int q = records[i].q_abs;
    int n = 0;
    std::size_t j = i;
    while (j < records.size() && records[j].q_abs == q) {
      records[j].n = n;
      const bool pair = q != 0 && j + 1 < records.size() && records[j + 1].q_abs == q &&
                        (records[j].parity < 0 || records[j + 1].parity < 0 ||
                         records[j].parity != records[j + 1].parity);
      if (pair) records[++j].n = n;
      ++n;
      ++j;
    }
    i = j;
  }
  return records;
}

std::vector<bool> detect_near_degenerate_pairs(const std::vector<SpectralRecord>& records, double rel_threshold) {
  std::vector<bool> flags(records.size(), false);
  // sector -> n -> (energy sum, members)
  std::map<int, std::map<int, std::pair<double, std::vector<std::size_t>>>> sectors;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].n < 0) throw std::invalid_argument("detect_near_degenerate_pairs: records not enumerated");
    auto& level = sectors[records[i].q_abs][records[i].n];
    level.first += records[i].E;
    level.second.push_back(i);
  }
  for (const auto& [q, levels] : sectors) {
    const int count = static_cast<int>(levels.size());
    if (count < 3) continue;
    std::vector<double> e;
    std::vector<const std::vector<std::size_t>*> members;
    for (const auto& [n, level] : levels) {
      e.push_back(level.first / double(level.second.size()));
      members.push_back(&level.second);
    }
    const int window = std::min(5, count);
    for (int i = 0; i + 1 < count; ++i) {
      int lo = std::clamp(i - 2, 0, count - window);
      const int hi = lo + window - 1;
      const double mean_gap = (e[hi] - e[lo]) / double(hi - lo);
      if (e[i + 1] - e[i] < rel_threshold * mean_gap) {
        for (std::size_t m : *members[i]) flags[m] = true;
        for (std::size_t m : *members[i + 1]) flags[m] = true;
      }
    }
  }
  return flags;
}

void mark_near_degenerate_pairs(std::vector<SpectralRecord>& records, double rel_threshold) {
  const std::vector<bool> flags = detect_near_degenerate_pairs(records, rel_threshold);
  for (std::size_t i = 0; i < records.size(); ++i) records[i].degenerate_pair = flags[i];
}

Eigen::VectorXd size_expectations(const Eigen::MatrixXd& vectors, const TensorOperator& sizeop) {
  Eigen::VectorXd out(vectors.cols());
  Eigen::VectorXd sv;
  for (Eigen::Index i = 0; i < vectors.cols(); ++i) {
    const Eigen::VectorXd v = vectors.col(i);
    apply_into(sizeop, v, sv);
    out[i] = std::sqrt(std::max(0.0, v.dot(sv)));
  }
  return out;
}

Eigen::VectorXd size_expectations(const EigenResult& eigen, const TensorOperator& sizeop) {
  return size_expectations(eigen.eigenvectors, sizeop);
}

std::vector<SpectralRecord> analyze_spectrum(const EigenResult& eigen, const TensorOperator& q2op,
                                             const TensorOperator& sizeop, const ClassifyOptions& opt,
                                             double rel_threshold) {
  Classification c = classify_charge(eigen, q2op, opt);
  const Eigen::VectorXd sizes = size_expectations(c.vectors, sizeop);
  for (SpectralRecord& r : c.records) r.size = sizes[r.column];
  std::vector<SpectralRecord> records = enumerate_levels(std::move(c.records));
  mark_near_degenerate_pairs(records, rel_threshold);
  return records;
}

}  // namespace ymm
