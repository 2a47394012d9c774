#include "ymm/tensor_operator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace ymm {

RadialFactor RadialFactor::dense(Eigen::MatrixXd m) {
  RadialFactor f;
  f.identity = false;
  const Eigen::Index n = m.rows();
  bool tri = n == m.cols() && n > 2;
  for (Eigen::Index j = 0; tri && j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      if (std::abs(i - j) > 1 && m(i, j) != 0.0) {
        tri = false;
        break;
      }
  if (tri) {
    f.tridiagonal = true;
    f.diag = m.diagonal();
    f.upper = m.diagonal(1);
    f.lower = m.diagonal(-1);
  }
  f.matrix = std::move(m);
  return f;
}

AngularFactor AngularFactor::diag(Eigen::VectorXd d) {
  AngularFactor f;
  f.kind = Kind::Diagonal;
  f.diagonal = std::move(d);
  return f;
}

AngularFactor AngularFactor::banded(const Eigen::SparseMatrix<double>& m) {
  AngularFactor f;
  f.kind = Kind::Sparse;
  f.sparse = m;
  f.sparse.makeCompressed();
  return f;
}

Eigen::MatrixXd AngularFactor::to_dense(Eigen::Index l0) const {
  switch (kind) {
    case Kind::Identity: return Eigen::MatrixXd::Identity(l0, l0);
    case Kind::Diagonal: return diagonal.asDiagonal();
    case Kind::Sparse: return Eigen::MatrixXd(sparse);
  }
  return {};
}

void TensorOperator::add_term(Term term) {
  for (const RadialPair& p : term.pairs)
    for (const RadialFactor* f : {&p.first, &p.second})
      if (!f->identity && (f->matrix.rows() != h0_ || f->matrix.cols() != h0_))
        throw std::invalid_argument("TensorOperator: radial factor not h0 x h0 in term " + term.label);
  const AngularFactor& a = term.angular;
  if (a.kind == AngularFactor::Kind::Diagonal && a.diagonal.size() != l0_)
    throw std::invalid_argument("TensorOperator: angular diagonal length != l0 in term " + term.label);
  if (a.kind == AngularFactor::Kind::Sparse && (a.sparse.rows() != l0_ || a.sparse.cols() != l0_))
    throw std::invalid_argument("TensorOperator: angular factor not l0 x l0 in term " + term.label);
  terms_.push_back(std::move(term));
}

namespace {

template <typename F>
void parallel_for(int n, int threads, F&& body) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      for (int i = t; i < n; i += threads) body(i);
    });
  for (auto& th : pool) th.join();
}

using ConstSlice = Eigen::Map<const Eigen::MatrixXd>;
using Slice = Eigen::Map<Eigen::MatrixXd>;

// out = F v (left) for a non-identity factor
template <typename In>
void left_multiply(const RadialFactor& f, const In& v, Eigen::MatrixXd& out) {
  if (!f.tridiagonal) {
    out.noalias() = f.matrix * v;
    return;
  }
  const Eigen::Index n = v.rows();
  out.noalias() = f.diag.asDiagonal() * v;
  out.topRows(n - 1).noalias() += f.upper.asDiagonal() * v.bottomRows(n - 1);
  out.bottomRows(n - 1).noalias() += f.lower.asDiagonal() * v.topRows(n - 1);
}

// out = v F^T (right) for a non-identity factor
template <typename In>
void right_multiply(const RadialFactor& f, const In& v, Eigen::MatrixXd& out) {
  if (!f.tridiagonal) {
    out.noalias() = v * f.matrix.transpose();
    return;
  }
  const Eigen::Index n = v.cols();
  out.noalias() = v * f.diag.asDiagonal();
  out.leftCols(n - 1).noalias() += v.rightCols(n - 1) * f.upper.asDiagonal();
  out.rightCols(n - 1).noalias() += v.leftCols(n - 1) * f.lower.asDiagonal();
}

void radial_pairs(const std::vector<RadialPair>& pairs, const ConstSlice& v, Eigen::MatrixXd& u,
                  Eigen::MatrixXd& tmp, Eigen::MatrixXd& tmp2) {
  u.setZero();
  for (const RadialPair& p : pairs) {
    if (p.first.identity && p.second.identity) {
      u += p.coef * v;
    } else if (p.second.identity) {
      left_multiply(p.first, v, tmp);
      u += p.coef * tmp;
    } else if (p.first.identity) {
      right_multiply(p.second, v, tmp);
      u += p.coef * tmp;
    } else {
      left_multiply(p.first, v, tmp);
      right_multiply(p.second, tmp, tmp2);
      u += p.coef * tmp2;
    }
  }
}

void apply_real(const TensorOperator& op, const Eigen::VectorXd& v, Eigen::VectorXd& out, int threads) {
  if (v.size() != op.dim()) throw std::invalid_argument("apply: vector length does not match operator dimension");
  const int h0 = op.h0(), l0 = op.l0();
  const Eigen::Index block = Eigen::Index(h0) * h0;
  out.setZero(op.dim());
  Eigen::VectorXd work(op.dim());
  for (const Term& term : op.terms()) {
    const bool direct = term.angular.kind != AngularFactor::Kind::Sparse;
    // U_l = sum_p coef (F1 V_l F2^T); accumulated directly for identity/diagonal angular factors
    parallel_for(l0, threads, [&](int l) {
      Eigen::MatrixXd u(h0, h0), tmp(h0, h0), tmp2(h0, h0);
      radial_pairs(term.pairs, ConstSlice(v.data() + l * block, h0, h0), u, tmp, tmp2);
      if (!direct) {
        Slice(work.data() + l * block, h0, h0) = u;
        return;
      }
      Slice o(out.data() + l * block, h0, h0);
      if (term.angular.kind == AngularFactor::Kind::Identity)
        o += u;
      else
        o += term.angular.diagonal[l] * u;
    });
    if (direct) continue;
    const auto& g = term.angular.sparse;
    parallel_for(l0, threads, [&](int l) {
      Slice o(out.data() + l * block, h0, h0);
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(g, l); it; ++it)
        o += it.value() * ConstSlice(work.data() + it.col() * block, h0, h0);
    });
  }
}

}  // namespace

void apply_into(const TensorOperator& op, const Eigen::VectorXd& v, Eigen::VectorXd& out, int threads) {
  apply_real(op, v, out, threads);
}

void apply_into(const TensorOperator& op, const Eigen::VectorXcd& v, Eigen::VectorXcd& out,
                                      int threads) {
  Eigen::VectorXd re, im;
  apply_real(op, v.real(), re, threads);
  apply_real(op, v.imag(), im, threads);
  out.resize(v.size());
  out.real() = re;
  out.imag() = im;
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> apply(const TensorOperator& op,
                                               const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& v, int threads) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out;
  apply_into(op, v, out, threads);
  return out;
}

template Eigen::VectorXd apply<double>(const TensorOperator&, const Eigen::VectorXd&, int);
template Eigen::VectorXcd apply<std::complex<double>>(const TensorOperator&, const Eigen::VectorXcd&, int);

Eigen::VectorXcd apply_hermitian(const TensorOperator& op, const Eigen::VectorXcd& v, int threads) {
  Eigen::VectorXcd out = apply<std::complex<double>>(op, v, threads);
  if (op.structure() == OperatorStructure::ImaginaryHermitian) out *= std::complex<double>(0.0, 1.0);
  return out;
}

namespace {

Eigen::MatrixXd radial_dense(const RadialFactor& f, int h0) {
  return f.identity ? Eigen::MatrixXd::Identity(h0, h0) : f.matrix;
}

}  // namespace

Eigen::MatrixXd materialize_dense(const TensorOperator& op, Eigen::Index max_dim) {
  const Eigen::Index n = op.dim();
  if (n > max_dim) throw std::invalid_argument("materialize_dense: dimension exceeds dense threshold");
  const int h0 = op.h0(), l0 = op.l0();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  auto idx = [h0](int i, int j, int l) { return Eigen::Index(i) + Eigen::Index(h0) * j + Eigen::Index(h0) * h0 * l; };
  for (const Term& term : op.terms()) {
    const Eigen::MatrixXd g = term.angular.to_dense(l0);
    for (const RadialPair& p : term.pairs) {
      const Eigen::MatrixXd f1 = radial_dense(p.first, h0), f2 = radial_dense(p.second, h0);
      for (int l = 0; l < l0; ++l)
        for (int lp = 0; lp < l0; ++lp) {
          if (g(l, lp) == 0.0) continue;
          for (int i = 0; i < h0; ++i)
            for (int ip = 0; ip < h0; ++ip) {
              if (f1(i, ip) == 0.0) continue;
              for (int j = 0; j < h0; ++j)
                for (int jp = 0; jp < h0; ++jp)
                  m(idx(i, j, l), idx(ip, jp, lp)) += p.coef * f1(i, ip) * f2(j, jp) * g(l, lp);
            }
        }
    }
  }
  return m;
}

Eigen::MatrixXcd materialize_dense_hermitian(const TensorOperator& op, Eigen::Index max_dim) {
  const Eigen::MatrixXd k = materialize_dense(op, max_dim);
  if (op.structure() == OperatorStructure::ImaginaryHermitian)
    return std::complex<double>(0.0, 1.0) * k.cast<std::complex<double>>();
  return k.cast<std::complex<double>>();
}

namespace {

RadialFactor radial_product(const RadialFactor& a, const RadialFactor& b) {
  if (a.identity) return b;
  if (b.identity) return a;
  return RadialFactor::dense(a.matrix * b.matrix);
}

AngularFactor angular_product(const AngularFactor& a, const AngularFactor& b, int l0) {
  using K = AngularFactor::Kind;
  if (a.kind == K::Identity) return b;
  if (b.kind == K::Identity) return a;
  if (a.kind == K::Diagonal && b.kind == K::Diagonal) return AngularFactor::diag(a.diagonal.cwiseProduct(b.diagonal));
  auto sparse_of = [l0](const AngularFactor& f) -> Eigen::SparseMatrix<double> {
    if (f.kind == K::Sparse) return Eigen::SparseMatrix<double>(f.sparse);
    Eigen::SparseMatrix<double> s(l0, l0);
    std::vector<Eigen::Triplet<double>> t;
    for (int l = 0; l < l0; ++l) t.emplace_back(l, l, f.diagonal[l]);
    s.setFromTriplets(t.begin(), t.end());
    return s;
  };
  Eigen::SparseMatrix<double> p = sparse_of(a) * sparse_of(b);
  p.prune(0.0);
  return AngularFactor::banded(p);
}

}  // namespace

TensorOperator operator_product(const TensorOperator& a, const TensorOperator& b, double factor,
                                OperatorStructure structure) {
  if (a.h0() != b.h0() || a.l0() != b.l0()) throw std::invalid_argument("operator_product: shape mismatch");
  TensorOperator out(a.h0(), a.l0(), structure);
  for (const Term& ta : a.terms())
    for (const Term& tb : b.terms()) {
      Term t;
      t.label = ta.label + "*" + tb.label;
      t.angular = angular_product(ta.angular, tb.angular, a.l0());
      for (const RadialPair& pa : ta.pairs)
        for (const RadialPair& pb : tb.pairs)
          t.pairs.push_back({factor * pa.coef * pb.coef, radial_product(pa.first, pb.first),
                             radial_product(pa.second, pb.second)});
      out.add_term(std::move(t));
    }
  return out;
}

std::vector<int> parity_levels(int l0, int parity) {
  std::vector<int> out;
  for (int l = parity; l < l0; l += 2) out.push_back(l);
  return out;
}

TensorOperator restrict_levels(const TensorOperator& op, const std::vector<int>& levels) {
  for (int l : levels)
    if (l < 0 || l >= op.l0()) throw std::out_of_range("restrict_levels: level out of range");
  const int n = static_cast<int>(levels.size());
  TensorOperator out(op.h0(), n, op.structure());
  for (const Term& term : op.terms()) {
    Term t;
    t.label = term.label;
    t.pairs = term.pairs;
    switch (term.angular.kind) {
      case AngularFactor::Kind::Identity: t.angular = AngularFactor::eye(); break;
      case AngularFactor::Kind::Diagonal: {
        Eigen::VectorXd d(n);
        for (int k = 0; k < n; ++k) d[k] = term.angular.diagonal[levels[k]];
        t.angular = AngularFactor::diag(std::move(d));
        break;
      }
      case AngularFactor::Kind::Sparse: {
        std::vector<Eigen::Triplet<double>> trip;
        for (int r = 0; r < n; ++r)
          for (int c = 0; c < n; ++c) {
            const double v = term.angular.sparse.coeff(levels[r], levels[c]);
            if (v != 0.0) trip.emplace_back(r, c, v);
          }
        Eigen::SparseMatrix<double> s(n, n);
        s.setFromTriplets(trip.begin(), trip.end());
        t.angular = AngularFactor::banded(s);
        break;
      }
    }
    out.add_term(std::move(t));
  }
  return out;
}

Eigen::VectorXd swap_radial_registers(const Eigen::VectorXd& v, int h0, int l0) {
  const Eigen::Index block = Eigen::Index(h0) * h0;
  Eigen::VectorXd out(v.size());
  for (int l = 0; l < l0; ++l)
    Slice(out.data() + l * block, h0, h0) = ConstSlice(v.data() + l * block, h0, h0).transpose();
  return out;
}

namespace {

nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json radial_json(const RadialFactor& f) {
  if (f.identity) return "identity";
  return matrix_json(f.matrix);
}

}  // namespace

nlohmann::json to_json(const TensorOperator& op) {
  nlohmann::json j;
  j["h0"] = op.h0();
  j["l0"] = op.l0();
  j["dim"] = op.dim();
  j["structure"] = op.structure() == OperatorStructure::RealSymmetric ? "real_symmetric" : "imaginary_hermitian";
  j["layout"] = "index = i + h0*j + h0*h0*l";
  nlohmann::json terms = nlohmann::json::array();
  for (const Term& t : op.terms()) {
    nlohmann::json jt;
    jt["label"] = t.label;
    nlohmann::json ang;
    switch (t.angular.kind) {
      case AngularFactor::Kind::Identity: ang["kind"] = "identity"; break;
      case AngularFactor::Kind::Diagonal:
        ang["kind"] = "diagonal";
        ang["diagonal"] = std::vector<double>(t.angular.diagonal.data(), t.angular.diagonal.data() + t.angular.diagonal.size());
        break;
      case AngularFactor::Kind::Sparse: {
        ang["kind"] = "sparse";
        nlohmann::json entries = nlohmann::json::array();
        for (int r = 0; r < t.angular.sparse.outerSize(); ++r)
          for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(t.angular.sparse, r); it; ++it)
            entries.push_back({it.row(), it.col(), it.value()});
        ang["entries"] = std::move(entries);
        break;
      }
    }
    jt["angular"] = std::move(ang);
    nlohmann::json pairs = nlohmann::json::array();
    for (const RadialPair& p : t.pairs)
      pairs.push_back({{"coef", p.coef}, {"first", radial_json(p.first)}, {"second", radial_json(p.second)}});
    jt["pairs"] = std::move(pairs);
    terms.push_back(std::move(jt));
  }
  j["terms"] = std::move(terms);
  return j;
}

}  // namespace ymm
