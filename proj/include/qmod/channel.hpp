#ifndef QMOD_CHANNEL_HPP
#define QMOD_CHANNEL_HPP

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "qmod/fock.hpp"

namespace qmod {

// Beam-splitter loss channel with transition ratio eta (fraction of
// transmitted power). alpha/beta are derived from eta so that
// alpha^2 + beta^2 = 1 holds exactly.
template <typename Scalar = double>
struct AttenuationChannel {
  Scalar eta;
  int n_max;

  Scalar alpha() const { return std::sqrt(eta); }
  Scalar beta() const { return std::sqrt(Scalar(1) - eta); }
};

template <typename Scalar = double>
AttenuationChannel<Scalar> attenuation_channel(Scalar eta, int n_max) {
  if (!(eta >= Scalar(0) && eta <= Scalar(1)))
    throw std::domain_error("attenuation_channel: eta must lie in [0, 1]");
  if (n_max < 0) throw std::domain_error("attenuation_channel: n_max must be >= 0");
  return {eta, n_max};
}

// Finite Kraus family A_k acting on a single slot. Completeness
// sum_k A_k^dagger A_k = I holds exactly on the truncated domain because
// attenuation never raises the photon number.
template <typename Scalar = double>
struct KrausChannel {
  std::vector<MatrixC<Scalar>> ops;
  std::string source;
};

// Slotwise tensor power of the attenuation channel.
template <typename Scalar = double>
struct LiftedChannel {
  AttenuationChannel<Scalar> base;
  KrausChannel<Scalar> per_slot;
  int slots;
};

namespace detail {

// log(n!) for n = 0..n_max; coefficients are assembled in log space so
// large pulse amplitudes do not overflow.
template <typename Scalar>
std::vector<Scalar> log_factorials(int n_max) {
  std::vector<Scalar> lf(n_max + 1, Scalar(0));
  for (int n = 1; n <= n_max; ++n) lf[n] = lf[n - 1] + std::log(Scalar(n));
  return lf;
}

}  // namespace detail

// Two-mode isometry of the beam splitter restricted to vacuum noise input:
// column n holds the amplitudes of splitting |n> into |j> kept and |n-j>
// lost, j = 0..n. Rows are indexed by the two-slot basis (kept slot most
// significant).
template <typename Scalar = double>
MatrixC<Scalar> beam_splitter_isometry(int n_max, Scalar eta) {
  if (!(eta >= Scalar(0) && eta <= Scalar(1)))
    throw std::domain_error("beam_splitter_isometry: eta must lie in [0, 1]");
  const int dim = n_max + 1;
  const Scalar alpha = std::sqrt(eta);
  const Scalar beta = std::sqrt(Scalar(1) - eta);
  const std::vector<Scalar> lf = detail::log_factorials<Scalar>(n_max);

  MatrixC<Scalar> v = MatrixC<Scalar>::Zero(static_cast<Index>(dim) * dim, dim);
  for (int n = 0; n <= n_max; ++n) {
    for (int j = 0; j <= n; ++j) {
      if ((j > 0 && alpha == Scalar(0)) || (j < n && beta == Scalar(0))) continue;
      Scalar log_mag = (lf[n] - lf[j] - lf[n - j]) / Scalar(2);
      if (j > 0) log_mag += Scalar(j) * std::log(alpha);
      if (j < n) log_mag += Scalar(n - j) * std::log(beta);
      const Scalar sign = ((n - j) % 2 == 0) ? Scalar(1) : Scalar(-1);
      v(static_cast<Index>(j) * dim + (n - j), n) = sign * std::exp(log_mag);
    }
  }
  return v;
}

// A_k = (I (x) <k|) V: row m of A_k is the amplitude for keeping m photons
// while k leak out. Index k runs 0..n_max; losing more than n_max photons
// is impossible on the truncated domain.
template <typename Scalar = double>
KrausChannel<Scalar> kraus_from_isometry(const MatrixC<Scalar>& v) {
  const Index dim = v.cols();
  if (v.rows() != dim * dim)
    throw std::domain_error("kraus_from_isometry: matrix is not a two-mode isometry");
  KrausChannel<Scalar> ch;
  ch.source = "attenuation";
  ch.ops.reserve(dim);
  for (Index k = 0; k < dim; ++k) {
    MatrixC<Scalar> a(dim, dim);
    for (Index m = 0; m < dim; ++m)
      for (Index n = 0; n < dim; ++n) a(m, n) = v(m * dim + k, n);
    ch.ops.push_back(std::move(a));
  }
  return ch;
}

template <typename Scalar = double>
KrausChannel<Scalar> kraus_channel(const AttenuationChannel<Scalar>& att) {
  return kraus_from_isometry(beam_splitter_isometry(att.n_max, att.eta));
}

// Max entrywise defect of sum_k A_k^dagger A_k against the identity.
template <typename Scalar>
Scalar completeness_defect(const KrausChannel<Scalar>& ch) {
  if (ch.ops.empty()) throw std::domain_error("completeness_defect: empty Kraus family");
  const Index dim = ch.ops.front().rows();
  MatrixC<Scalar> sum = MatrixC<Scalar>::Zero(dim, dim);
  for (const auto& a : ch.ops) sum += a.adjoint() * a;
  return (sum - MatrixC<Scalar>::Identity(dim, dim)).cwiseAbs().maxCoeff();
}

// rho -> sum_k A_k rho A_k^dagger on a single slot.
template <typename Scalar>
DensityOperator<Scalar> apply(const KrausChannel<Scalar>& ch, const DensityOperator<Scalar>& rho) {
  if (ch.ops.empty()) throw std::domain_error("apply: empty Kraus family");
  if (rho.basis.slots() != 1 || rho.basis.dim() != ch.ops.front().rows())
    throw std::domain_error("apply: channel and state dimensions do not match");
  MatrixC<Scalar> out = MatrixC<Scalar>::Zero(rho.basis.dim(), rho.basis.dim());
  for (const auto& a : ch.ops) out += a * rho.matrix * a.adjoint();
  const bool diag = rho.diagonal_hint && max_offdiag(out) == Scalar(0);
  return {rho.basis, std::move(out), diag};
}

namespace detail {

// C(n, j) eta^j (1-eta)^(n-j), assembled directly; pow handles the eta = 0
// and eta = 1 edges (0^0 = 1).
template <typename Scalar>
Scalar binomial_pmf(int n, int j, Scalar eta) {
  Scalar coeff = 1;
  for (int i = 1; i <= j; ++i) coeff *= Scalar(n - j + i) / Scalar(i);
  return coeff * std::pow(eta, Scalar(j)) * std::pow(Scalar(1) - eta, Scalar(n - j));
}

}  // namespace detail

// Classical fast path: each slot count n is replaced by an independent
// binomial mixture over surviving counts j <= n.
template <typename Scalar>
ClassicalDistribution<Scalar> thin_binomial(Scalar eta, const ClassicalDistribution<Scalar>& dist) {
  if (!(eta >= Scalar(0) && eta <= Scalar(1)))
    throw std::domain_error("thin_binomial: eta must lie in [0, 1]");
  ClassicalDistribution<Scalar> out{dist.basis, {}};
  const int slots = dist.basis.slots();
  OccupationTuple scratch(slots);
  std::function<void(const OccupationTuple&, int, Scalar)> expand =
      [&](const OccupationTuple& src, int slot, Scalar p) {
        if (p == Scalar(0)) return;
        if (slot == slots) {
          out.probs[scratch] += p;
          return;
        }
        for (int j = 0; j <= src[slot]; ++j) {
          const Scalar pj = detail::binomial_pmf(src[slot], j, eta);
          if (pj == Scalar(0)) continue;
          scratch[slot] = j;
          expand(src, slot + 1, p * pj);
        }
      };
  for (const auto& [t, p] : dist.probs) expand(t, 0, p);
  return out;
}

template <typename Scalar>
LiftedChannel<Scalar> lift(const AttenuationChannel<Scalar>& att, int slots) {
  if (slots < 1) throw std::domain_error("lift: slot count must be >= 1");
  return {att, kraus_channel(att), slots};
}

namespace detail {

// Conjugate `rho` by sum_k (I (x) A_k (x) I) ... acting on one slot, using
// index strides instead of materialized Kronecker factors.
template <typename Scalar>
MatrixC<Scalar> apply_on_slot(const KrausChannel<Scalar>& ch, const MatrixC<Scalar>& rho,
                              const FockBasis& basis, int slot) {
  const Index radix = basis.n_max() + 1;
  Index right = 1;
  for (int s = slot + 1; s < basis.slots(); ++s) right *= radix;
  const Index group = basis.dim() / radix;  // # of (left, right) pairs

  // positions[m][g]: linear index with digit m at `slot` and the g-th
  // (left, right) combination elsewhere; g enumeration is shared across m.
  std::vector<std::vector<Index>> positions(radix, std::vector<Index>(group));
  for (Index m = 0; m < radix; ++m) {
    Index g = 0;
    for (Index l = 0; l < basis.dim() / (radix * right); ++l)
      for (Index r = 0; r < right; ++r) positions[m][g++] = (l * radix + m) * right + r;
  }

  MatrixC<Scalar> out = MatrixC<Scalar>::Zero(rho.rows(), rho.cols());
  for (const auto& a : ch.ops) {
    for (Index m = 0; m < radix; ++m)
      for (Index n = 0; n < radix; ++n) {
        const std::complex<Scalar> left = a(m, n);
        if (left == std::complex<Scalar>(0)) continue;
        for (Index mp = 0; mp < radix; ++mp)
          for (Index np = 0; np < radix; ++np) {
            const std::complex<Scalar> coeff = left * std::conj(a(mp, np));
            if (coeff == std::complex<Scalar>(0)) continue;
            const auto& rm = positions[m];
            const auto& rn = positions[n];
            const auto& cm = positions[mp];
            const auto& cn = positions[np];
            for (Index i = 0; i < group; ++i)
              for (Index j = 0; j < group; ++j)
                out(rm[i], cm[j]) += coeff * rho(rn[i], cn[j]);
          }
      }
  }
  return out;
}

}  // namespace detail

// Dense slotwise application of the lifted channel.
template <typename Scalar>
DensityOperator<Scalar> apply(const LiftedChannel<Scalar>& lc, const DensityOperator<Scalar>& rho) {
  if (rho.basis.slots() != lc.slots)
    throw std::domain_error("apply: lifted channel slot count does not match state");
  if (rho.basis.n_max() + 1 != lc.per_slot.ops.front().rows())
    throw std::domain_error("apply: lifted channel cutoff does not match state");
  MatrixC<Scalar> m = rho.matrix;
  for (int s = 0; s < lc.slots; ++s) m = detail::apply_on_slot(lc.per_slot, m, rho.basis, s);
  const bool diag = rho.diagonal_hint && max_offdiag(m) == Scalar(0);
  return {rho.basis, std::move(m), diag};
}

// Classical inputs take the binomial-thinning path.
template <typename Scalar>
ClassicalDistribution<Scalar> apply(const LiftedChannel<Scalar>& lc,
                                    const ClassicalDistribution<Scalar>& dist) {
  if (dist.basis.slots() != lc.slots)
    throw std::domain_error("apply: lifted channel slot count does not match state");
  if (dist.basis.n_max() != lc.base.n_max)
    throw std::domain_error("apply: lifted channel cutoff does not match state");
  return thin_binomial(lc.base.eta, dist);
}

}  // namespace qmod

#endif  // QMOD_CHANNEL_HPP
