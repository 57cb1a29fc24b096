#ifndef QMOD_FOCK_HPP
#define QMOD_FOCK_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <utility>

#include "qmod/defs.hpp"

namespace qmod {

// Truncated photon-number basis: `slots` tensor factors, each holding
// 0..n_max photons. Basis vectors are enumerated lexicographically over
// occupation tuples with slot 0 as the most significant digit, so the
// linear index of (c_0, ..., c_{s-1}) is sum_i c_i * (n_max+1)^(s-1-i).
class FockBasis {
 public:
  FockBasis() : FockBasis(1, 0) {}  // vacuum-only placeholder

  FockBasis(int slots, int n_max) : slots_(slots), n_max_(n_max) {
    if (slots < 1) throw std::domain_error("FockBasis: slots must be >= 1");
    if (n_max < 0) throw std::domain_error("FockBasis: n_max must be >= 0");
    dim_ = 1;
    const Index radix = static_cast<Index>(n_max) + 1;
    for (int s = 0; s < slots; ++s) {
      if (dim_ > std::numeric_limits<Index>::max() / radix) {
        std::ostringstream msg;
        msg << "FockBasis: dimension (" << n_max + 1 << ")^" << slots
            << " overflows the index type";
        throw capacity_error(msg.str());
      }
      dim_ *= radix;
    }
  }

  int slots() const { return slots_; }
  int n_max() const { return n_max_; }
  Index dim() const { return dim_; }

  bool contains(const OccupationTuple& t) const {
    if (static_cast<int>(t.size()) != slots_) return false;
    return std::all_of(t.begin(), t.end(),
                       [this](int c) { return c >= 0 && c <= n_max_; });
  }

  Index index_of(const OccupationTuple& t) const {
    if (!contains(t)) throw std::domain_error("FockBasis: occupation tuple out of range");
    Index idx = 0;
    for (int c : t) idx = idx * (n_max_ + 1) + c;
    return idx;
  }

  OccupationTuple tuple_of(Index idx) const {
    if (idx < 0 || idx >= dim_) throw std::domain_error("FockBasis: index out of range");
    OccupationTuple t(slots_);
    for (int s = slots_ - 1; s >= 0; --s) {
      t[s] = static_cast<int>(idx % (n_max_ + 1));
      idx /= n_max_ + 1;
    }
    return t;
  }

  friend bool operator==(const FockBasis&, const FockBasis&) = default;

 private:
  int slots_;
  int n_max_;
  Index dim_;
};

// Density operator on a truncated Fock space. `diagonal_hint` asserts that
// every off-diagonal entry is exactly zero.
template <typename Scalar = double>
struct DensityOperator {
  FockBasis basis;
  MatrixC<Scalar> matrix;
  bool diagonal_hint = false;
};

// Sparse probability map over occupation tuples; the diagonal twin of a
// number-diagonal DensityOperator. Entries absent from the map are exact
// zeros.
template <typename Scalar = double>
struct ClassicalDistribution {
  FockBasis basis;
  std::map<OccupationTuple, Scalar> probs;
};

template <typename Scalar = double>
struct SchattenTerm {
  Scalar weight;
  DensityOperator<Scalar> projector;  // rank one
};

// Ordered (descending weight) spectral decomposition into orthogonal
// rank-one projectors. `degenerate` is raised when two kept weights are
// closer than the relative degeneracy gap, i.e. the decomposition is not
// unique.
template <typename Scalar = double>
struct SchattenDecomposition {
  FockBasis basis;
  std::vector<SchattenTerm<Scalar>> terms;
  bool degenerate = false;
};

// Raw spectral view used internally: full spectrum sorted descending with
// aligned eigenvector columns. Values are as computed (no clamping).
template <typename Scalar = double>
struct EigenSystem {
  VectorR<Scalar> values;
  MatrixC<Scalar> vectors;
};

template <typename Scalar>
Scalar max_offdiag(const MatrixC<Scalar>& m) {
  Scalar worst = 0;
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i)
      if (i != j) worst = std::max(worst, std::abs(m(i, j)));
  return worst;
}

template <typename Scalar>
Scalar hermiticity_defect(const MatrixC<Scalar>& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

// Structural validity: square on the right space, Hermitian, unit trace.
// Positivity is enforced wherever a spectrum is taken.
template <typename Scalar>
void validate_density(const DensityOperator<Scalar>& rho) {
  if (rho.matrix.rows() != rho.basis.dim() || rho.matrix.cols() != rho.basis.dim())
    throw std::domain_error("DensityOperator: matrix shape does not match basis");
  if (hermiticity_defect(rho.matrix) > tol::hermitian)
    throw std::domain_error("DensityOperator: not Hermitian within tolerance");
  if (std::abs(rho.matrix.trace().real() - Scalar(1)) > tol::trace ||
      std::abs(rho.matrix.trace().imag()) > tol::trace)
    throw std::domain_error("DensityOperator: trace differs from 1");
  if (rho.diagonal_hint && max_offdiag(rho.matrix) != Scalar(0))
    throw std::domain_error("DensityOperator: diagonal_hint set on non-diagonal matrix");
}

template <typename Scalar>
void validate_classical(const ClassicalDistribution<Scalar>& dist) {
  Scalar sum = 0;
  for (const auto& [t, p] : dist.probs) {
    if (!dist.basis.contains(t))
      throw std::domain_error("ClassicalDistribution: tuple outside basis");
    if (p < -Scalar(tol::prob_floor))
      throw std::domain_error("ClassicalDistribution: negative probability");
    sum += p;
  }
  if (std::abs(sum - Scalar(1)) > tol::prob_sum)
    throw std::domain_error("ClassicalDistribution: probabilities do not sum to 1");
}

// |n><n| on a single-slot basis.
template <typename Scalar = double>
DensityOperator<Scalar> number_projection(int n, const FockBasis& basis) {
  if (basis.slots() != 1)
    throw std::domain_error("number_projection: basis must have a single slot");
  if (n < 0 || n > basis.n_max())
    throw std::domain_error("number_projection: photon count out of range");
  MatrixC<Scalar> m = MatrixC<Scalar>::Zero(basis.dim(), basis.dim());
  m(n, n) = Scalar(1);
  return {basis, std::move(m), true};
}

// Projector onto one occupation tuple of a (possibly multi-slot) basis.
template <typename Scalar = double>
DensityOperator<Scalar> occupation_projection(const OccupationTuple& t, const FockBasis& basis) {
  if (basis.dim() > cap::dense_dim)
    throw capacity_error("occupation_projection: dense dimension exceeds cap");
  const Index idx = basis.index_of(t);
  MatrixC<Scalar> m = MatrixC<Scalar>::Zero(basis.dim(), basis.dim());
  m(idx, idx) = Scalar(1);
  return {basis, std::move(m), true};
}

template <typename Scalar = double>
DensityOperator<Scalar> diagonal_operator(const FockBasis& basis, const VectorR<Scalar>& diag) {
  if (diag.size() != basis.dim())
    throw std::domain_error("diagonal_operator: length does not match basis");
  MatrixC<Scalar> m = MatrixC<Scalar>::Zero(basis.dim(), basis.dim());
  for (Index i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return {basis, std::move(m), true};
}

template <typename Scalar = double>
ClassicalDistribution<Scalar> point_mass(const OccupationTuple& t, const FockBasis& basis) {
  if (!basis.contains(t)) throw std::domain_error("point_mass: tuple outside basis");
  ClassicalDistribution<Scalar> d{basis, {}};
  d.probs[t] = Scalar(1);
  return d;
}

// Kronecker product in the documented basis order: slots of `a` become the
// leading (most significant) slots of the result.
template <typename Scalar>
DensityOperator<Scalar> tensor(const DensityOperator<Scalar>& a, const DensityOperator<Scalar>& b) {
  if (a.basis.n_max() != b.basis.n_max())
    throw std::domain_error("tensor: operands have different per-slot cutoffs");
  const FockBasis basis(a.basis.slots() + b.basis.slots(), a.basis.n_max());
  if (basis.dim() > cap::dense_dim)
    throw capacity_error("tensor: dense dimension " + std::to_string(basis.dim()) +
                         " exceeds cap " + std::to_string(cap::dense_dim));
  const Index da = a.basis.dim(), db = b.basis.dim();
  MatrixC<Scalar> m(da * db, da * db);
  for (Index i = 0; i < da; ++i)
    for (Index j = 0; j < da; ++j)
      m.block(i * db, j * db, db, db) = a.matrix(i, j) * b.matrix;
  return {basis, std::move(m), a.diagonal_hint && b.diagonal_hint};
}

template <typename Scalar>
ClassicalDistribution<Scalar> tensor(const ClassicalDistribution<Scalar>& a,
                                     const ClassicalDistribution<Scalar>& b) {
  if (a.basis.n_max() != b.basis.n_max())
    throw std::domain_error("tensor: operands have different per-slot cutoffs");
  if (static_cast<double>(a.probs.size()) * static_cast<double>(b.probs.size()) >
      cap::sparse_terms)
    throw capacity_error("tensor: sparse support would exceed cap");
  ClassicalDistribution<Scalar> out{FockBasis(a.basis.slots() + b.basis.slots(), a.basis.n_max()),
                                    {}};
  for (const auto& [ta, pa] : a.probs)
    for (const auto& [tb, pb] : b.probs) {
      OccupationTuple t = ta;
      t.insert(t.end(), tb.begin(), tb.end());
      out.probs[std::move(t)] = pa * pb;
    }
  return out;
}

namespace detail {

// Offsets of each sub-tuple value within the full linear index, for a
// subset of slots. offsets[k] is the contribution of sub-index k.
inline std::vector<Index> slot_offsets(const FockBasis& basis, const std::vector<int>& slots) {
  const Index radix = basis.n_max() + 1;
  std::vector<Index> strides(basis.slots());
  Index s = 1;
  for (int i = basis.slots() - 1; i >= 0; --i) {
    strides[i] = s;
    s *= radix;
  }
  Index sub_dim = 1;
  for (size_t i = 0; i < slots.size(); ++i) sub_dim *= radix;
  std::vector<Index> offsets(sub_dim, 0);
  for (Index k = 0; k < sub_dim; ++k) {
    Index rem = k;
    for (int i = static_cast<int>(slots.size()) - 1; i >= 0; --i) {
      offsets[k] += (rem % radix) * strides[slots[i]];
      rem /= radix;
    }
  }
  return offsets;
}

inline std::vector<int> complement_slots(int slots, const std::vector<int>& keep) {
  std::vector<int> rest;
  for (int s = 0; s < slots; ++s)
    if (std::find(keep.begin(), keep.end(), s) == keep.end()) rest.push_back(s);
  return rest;
}

}  // namespace detail

// Reduced density operator on `keep` (reported in ascending slot order).
template <typename Scalar>
DensityOperator<Scalar> partial_trace(const DensityOperator<Scalar>& op, std::vector<int> keep) {
  if (keep.empty()) throw std::domain_error("partial_trace: keep set must be nonempty");
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  if (keep.front() < 0 || keep.back() >= op.basis.slots())
    throw std::domain_error("partial_trace: slot index out of range");
  if (static_cast<int>(keep.size()) == op.basis.slots()) return op;

  const std::vector<int> rest = detail::complement_slots(op.basis.slots(), keep);
  const std::vector<Index> kept_off = detail::slot_offsets(op.basis, keep);
  const std::vector<Index> rest_off = detail::slot_offsets(op.basis, rest);
  const Index kd = static_cast<Index>(kept_off.size());

  MatrixC<Scalar> m = MatrixC<Scalar>::Zero(kd, kd);
  for (Index i = 0; i < kd; ++i)
    for (Index j = 0; j < kd; ++j)
      for (Index t : rest_off) m(i, j) += op.matrix(kept_off[i] + t, kept_off[j] + t);
  return {FockBasis(static_cast<int>(keep.size()), op.basis.n_max()), std::move(m),
          op.diagonal_hint};
}

// Marginal distribution on `keep`.
template <typename Scalar>
ClassicalDistribution<Scalar> partial_trace(const ClassicalDistribution<Scalar>& dist,
                                            std::vector<int> keep) {
  if (keep.empty()) throw std::domain_error("partial_trace: keep set must be nonempty");
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  if (keep.front() < 0 || keep.back() >= dist.basis.slots())
    throw std::domain_error("partial_trace: slot index out of range");
  ClassicalDistribution<Scalar> out{FockBasis(static_cast<int>(keep.size()), dist.basis.n_max()),
                                    {}};
  for (const auto& [t, p] : dist.probs) {
    OccupationTuple sub(keep.size());
    for (size_t i = 0; i < keep.size(); ++i) sub[i] = t[keep[i]];
    out.probs[sub] += p;
  }
  return out;
}

// Full spectrum of a Hermitian operator, sorted descending, with a fast
// exact path for diagonal matrices (ties there resolve to ascending basis
// index, which keeps canonical decompositions in the number basis).
template <typename Scalar>
EigenSystem<Scalar> eigensystem(const DensityOperator<Scalar>& op) {
  if (op.matrix.rows() != op.matrix.cols() || op.matrix.rows() != op.basis.dim())
    throw std::domain_error("eigensystem: matrix shape does not match basis");
  if (hermiticity_defect(op.matrix) > tol::hermitian)
    throw std::domain_error("eigensystem: operator not Hermitian within tolerance");
  const Index n = op.matrix.rows();
  EigenSystem<Scalar> sys;
  sys.values.resize(n);
  if (op.diagonal_hint || max_offdiag(op.matrix) < Scalar(tol::diagonal_detect)) {
    std::vector<Index> order(n);
    for (Index i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
      return op.matrix(a, a).real() > op.matrix(b, b).real();
    });
    sys.vectors = MatrixC<Scalar>::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
      sys.values[i] = op.matrix(order[i], order[i]).real();
      sys.vectors(order[i], i) = Scalar(1);
    }
    return sys;
  }
  const MatrixC<Scalar> sym = (op.matrix + op.matrix.adjoint()) / Scalar(2);
  Eigen::SelfAdjointEigenSolver<MatrixC<Scalar>> solver(sym);
  if (solver.info() != Eigen::Success)
    throw consistency_error("eigensystem: eigensolver failed to converge");
  sys.vectors.resize(n, n);
  for (Index i = 0; i < n; ++i) {  // ascending -> descending
    sys.values[i] = solver.eigenvalues()[n - 1 - i];
    sys.vectors.col(i) = solver.eigenvectors().col(n - 1 - i);
  }
  return sys;
}

namespace detail {

template <typename Scalar>
bool is_basis_vector(const VectorC<Scalar>& v) {
  int hits = 0;
  for (Index i = 0; i < v.size(); ++i) {
    const Scalar a = std::abs(v[i]);
    if (a > Scalar(1) - Scalar(1e-12)) ++hits;
    else if (a > Scalar(1e-12)) return false;
  }
  return hits == 1;
}

template <typename Scalar>
Scalar clamp_unit_weight(Scalar v) {
  if (v < -Scalar(tol::eigen_floor))
    throw std::domain_error("spectral_decompose: eigenvalue below the PSD floor");
  if (v > Scalar(1) + Scalar(tol::eigen_floor))
    throw std::domain_error("spectral_decompose: eigenvalue above 1 beyond tolerance");
  return std::clamp(v, Scalar(0), Scalar(1));
}

}  // namespace detail

template <typename Scalar>
SchattenDecomposition<Scalar> spectral_decompose(const DensityOperator<Scalar>& op,
                                                 Scalar drop_tol = Scalar(tol::spectral_drop)) {
  if (op.basis.dim() > cap::dense_dim)
    throw capacity_error("spectral_decompose: dense dimension exceeds cap");
  const EigenSystem<Scalar> sys = eigensystem(op);
  SchattenDecomposition<Scalar> out{op.basis, {}, false};
  std::vector<Scalar> kept;
  for (Index i = 0; i < sys.values.size(); ++i) {
    const Scalar w = detail::clamp_unit_weight(sys.values[i]);
    if (w < drop_tol) continue;
    const VectorC<Scalar> v = sys.vectors.col(i);
    DensityOperator<Scalar> proj{op.basis, (v * v.adjoint()).eval(),
                                 detail::is_basis_vector(v)};
    out.terms.push_back({w, std::move(proj)});
    kept.push_back(w);
  }
  for (size_t i = 0; i + 1 < kept.size(); ++i) {
    const Scalar gap = kept[i] - kept[i + 1];
    if (gap < Scalar(tol::degeneracy_gap) * std::max(kept[i], Scalar(tol::log_clamp)))
      out.degenerate = true;
  }
  return out;
}

template <typename Scalar>
DensityOperator<Scalar> reconstruct(const SchattenDecomposition<Scalar>& decomp) {
  MatrixC<Scalar> m = MatrixC<Scalar>::Zero(decomp.basis.dim(), decomp.basis.dim());
  bool diag = true;
  for (const auto& term : decomp.terms) {
    m += term.weight * term.projector.matrix;
    diag = diag && term.projector.diagonal_hint;
  }
  return {decomp.basis, std::move(m), diag};
}

// Diagonal extraction; rejects states with visible off-diagonal mass.
template <typename Scalar>
ClassicalDistribution<Scalar> to_classical(const DensityOperator<Scalar>& op) {
  if (!op.diagonal_hint && max_offdiag(op.matrix) >= Scalar(tol::offdiag))
    throw representation_error("to_classical: state carries off-diagonal mass");
  ClassicalDistribution<Scalar> out{op.basis, {}};
  for (Index i = 0; i < op.basis.dim(); ++i) {
    const Scalar p = op.matrix(i, i).real();
    if (p < -Scalar(tol::prob_floor))
      throw representation_error("to_classical: negative diagonal entry");
    if (p > Scalar(0)) out.probs[op.basis.tuple_of(i)] = p;
  }
  return out;
}

template <typename Scalar>
DensityOperator<Scalar> from_classical(const ClassicalDistribution<Scalar>& dist) {
  if (dist.basis.dim() > cap::dense_dim)
    throw capacity_error("from_classical: dense dimension exceeds cap");
  MatrixC<Scalar> m = MatrixC<Scalar>::Zero(dist.basis.dim(), dist.basis.dim());
  for (const auto& [t, p] : dist.probs) {
    const Index i = dist.basis.index_of(t);
    m(i, i) = p;
  }
  return {dist.basis, std::move(m), true};
}

template <typename Scalar>
Scalar mean_photon_number(const DensityOperator<Scalar>& rho) {
  Scalar mean = 0;
  for (Index i = 0; i < rho.basis.dim(); ++i) {
    const OccupationTuple t = rho.basis.tuple_of(i);
    Scalar total = 0;
    for (int c : t) total += Scalar(c);
    mean += rho.matrix(i, i).real() * total;
  }
  return mean;
}

template <typename Scalar>
Scalar mean_photon_number(const ClassicalDistribution<Scalar>& dist) {
  Scalar mean = 0;
  for (const auto& [t, p] : dist.probs) {
    Scalar total = 0;
    for (int c : t) total += Scalar(c);
    mean += p * total;
  }
  return mean;
}

}  // namespace qmod

#endif  // QMOD_FOCK_HPP
