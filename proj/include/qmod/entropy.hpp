#ifndef QMOD_ENTROPY_HPP
#define QMOD_ENTROPY_HPP

#include <cstdint>
#include <random>

#include "qmod/channel.hpp"

namespace qmod {

// Entropy in nats on the extended real line. `borderline_kernel` records
// that a support decision fell inside the guard band just below the kernel
// threshold.
template <typename Scalar = double>
struct EntropyValue {
  Scalar value = 0;
  bool finite = true;
  bool borderline_kernel = false;

  static EntropyValue infinity(bool borderline = false) {
    return {std::numeric_limits<Scalar>::infinity(), false, borderline};
  }
};

// Correlated input/output state sigma_E = sum_n w_n E_n (x) Lambda(E_n)
// for a fixed Schatten decomposition E, together with its marginals.
template <typename Scalar = double>
struct CompoundState {
  DensityOperator<Scalar> joint;  // input slots first, then output slots
  DensityOperator<Scalar> marginal_in;
  DensityOperator<Scalar> marginal_out;
  SchattenDecomposition<Scalar> decomposition;
};

// How the supremum over Schatten decompositions is searched. `canonical`
// takes the spectral decomposition as is (unique when the spectrum is
// nondegenerate); `randomized` additionally tries `rotations` random
// orthonormal rotations inside each degenerate eigenvalue cluster and
// keeps the best value found.
template <typename Scalar = double>
struct MutualEntropyPolicy {
  enum class Kind { canonical, randomized };
  Kind kind = Kind::canonical;
  int rotations = 0;
  std::uint64_t seed = 0;

  static MutualEntropyPolicy canonical() { return {}; }
  static MutualEntropyPolicy randomized(int rotations, std::uint64_t seed) {
    if (rotations < 1)
      throw std::domain_error("MutualEntropyPolicy: rotation count must be >= 1");
    return {Kind::randomized, rotations, seed};
  }
};

// -sum_i w_i log w_i over the clamped spectrum, natural log, 0 log 0 = 0.
template <typename Scalar>
EntropyValue<Scalar> von_neumann(const DensityOperator<Scalar>& rho) {
  validate_density(rho);
  const EigenSystem<Scalar> sys = eigensystem(rho);
  Scalar h = 0;
  for (Index i = 0; i < sys.values.size(); ++i) {
    const Scalar w = detail::clamp_unit_weight(sys.values[i]);
    if (w > Scalar(0)) h -= w * std::log(w);
  }
  return {std::max(h, Scalar(0)), true, false};
}

template <typename Scalar>
EntropyValue<Scalar> von_neumann(const ClassicalDistribution<Scalar>& dist) {
  validate_classical(dist);
  Scalar h = 0;
  for (const auto& [t, p] : dist.probs)
    if (p > Scalar(0)) h -= p * std::log(p);
  return {std::max(h, Scalar(0)), true, false};
}

// Umegaki relative entropy Tr rho (log rho - log sigma), finite only when
// the support of sigma contains the support of rho. Support membership is
// decided spectrally with the kernel threshold; eigenvalues inside the
// guard band [kernel_guard, kernel) count as kernel and are flagged.
template <typename Scalar>
EntropyValue<Scalar> relative_entropy(const DensityOperator<Scalar>& rho,
                                      const DensityOperator<Scalar>& sigma) {
  if (!(rho.basis == sigma.basis))
    throw std::domain_error("relative_entropy: operands live on different bases");
  const EigenSystem<Scalar> rho_sys = eigensystem(rho);
  const EigenSystem<Scalar> sig_sys = eigensystem(sigma);

  bool borderline = false;
  std::vector<Index> kernel_cols;
  for (Index i = 0; i < sig_sys.values.size(); ++i) {
    if (sig_sys.values[i] < Scalar(tol::kernel)) {
      kernel_cols.push_back(i);
      if (sig_sys.values[i] >= Scalar(tol::kernel_guard)) borderline = true;
    }
  }
  Scalar kernel_mass = 0;
  for (Index i : kernel_cols) {
    const VectorC<Scalar> u = sig_sys.vectors.col(i);
    kernel_mass += (u.adjoint() * rho.matrix * u)(0, 0).real();
  }
  if (kernel_mass > Scalar(tol::support_loss))
    return EntropyValue<Scalar>::infinity(borderline);

  Scalar value = 0;
  for (Index i = 0; i < rho_sys.values.size(); ++i) {
    const Scalar w = detail::clamp_unit_weight(rho_sys.values[i]);
    if (w > Scalar(0)) value += w * std::log(w);
  }
  for (Index i = 0; i < sig_sys.values.size(); ++i) {
    if (sig_sys.values[i] < Scalar(tol::kernel)) continue;
    const Scalar s = std::max(sig_sys.values[i], Scalar(tol::log_clamp));
    const VectorC<Scalar> u = sig_sys.vectors.col(i);
    value -= std::log(s) * (u.adjoint() * rho.matrix * u)(0, 0).real();
  }
  if (value < -Scalar(tol::entropy_slack))
    throw consistency_error("relative_entropy: negative value beyond tolerance");
  return {std::max(value, Scalar(0)), true, borderline};
}

// Classical twin with exact support semantics: tuples absent from the map
// are exact zeros, so no kernel threshold is involved.
template <typename Scalar>
EntropyValue<Scalar> relative_entropy(const ClassicalDistribution<Scalar>& p,
                                      const ClassicalDistribution<Scalar>& q) {
  if (!(p.basis == q.basis))
    throw std::domain_error("relative_entropy: operands live on different bases");
  Scalar value = 0;
  for (const auto& [t, pv] : p.probs) {
    if (pv <= Scalar(0)) continue;
    const auto it = q.probs.find(t);
    if (it == q.probs.end() || it->second <= Scalar(0))
      return EntropyValue<Scalar>::infinity();
    value += pv * std::log(pv / it->second);
  }
  if (value < -Scalar(tol::entropy_slack))
    throw consistency_error("relative_entropy: negative value beyond tolerance");
  return {std::max(value, Scalar(0)), true, false};
}

template <typename Scalar, typename Channel>
CompoundState<Scalar> compound_state(const SchattenDecomposition<Scalar>& decomp,
                                     const Channel& channel) {
  if (decomp.terms.empty())
    throw std::domain_error("compound_state: empty decomposition");
  const FockBasis joint_basis(2 * decomp.basis.slots(), decomp.basis.n_max());
  if (joint_basis.dim() > cap::dense_dim)
    throw capacity_error("compound_state: joint dimension " +
                         std::to_string(joint_basis.dim()) + " exceeds dense cap");
  CompoundState<Scalar> out;
  out.decomposition = decomp;
  MatrixC<Scalar> joint = MatrixC<Scalar>::Zero(joint_basis.dim(), joint_basis.dim());
  bool diag = true;
  for (const auto& term : decomp.terms) {
    const DensityOperator<Scalar> mapped = apply(channel, term.projector);
    const DensityOperator<Scalar> pair = tensor(term.projector, mapped);
    joint += term.weight * pair.matrix;
    diag = diag && pair.diagonal_hint;
  }
  out.joint = {joint_basis, std::move(joint), diag};
  out.marginal_in = reconstruct(decomp);
  out.marginal_out = apply(channel, out.marginal_in);
  return out;
}

namespace detail {

// Haar-style random unitary: complex Ginibre followed by QR.
template <typename Scalar>
MatrixC<Scalar> random_unitary(Index dim, std::mt19937_64& rng) {
  std::normal_distribution<Scalar> gauss(Scalar(0), Scalar(1));
  MatrixC<Scalar> g(dim, dim);
  for (Index j = 0; j < dim; ++j)
    for (Index i = 0; i < dim; ++i) g(i, j) = std::complex<Scalar>(gauss(rng), gauss(rng));
  Eigen::HouseholderQR<MatrixC<Scalar>> qr(g);
  MatrixC<Scalar> q = qr.householderQ();
  const MatrixC<Scalar> r = qr.matrixQR().template triangularView<Eigen::Upper>();
  for (Index j = 0; j < dim; ++j) {
    const std::complex<Scalar> d = r(j, j);
    const Scalar mag = std::abs(d);
    if (mag > Scalar(0)) q.col(j) *= d / mag;
  }
  return q;
}

// Clusters of adjacent kept weights closer than the relative degeneracy
// gap; only these admit alternative Schatten decompositions.
template <typename Scalar>
std::vector<std::pair<size_t, size_t>> degenerate_clusters(
    const std::vector<SchattenTerm<Scalar>>& terms) {
  std::vector<std::pair<size_t, size_t>> clusters;
  size_t start = 0;
  for (size_t i = 1; i <= terms.size(); ++i) {
    const bool close =
        i < terms.size() &&
        terms[i - 1].weight - terms[i].weight <
            Scalar(tol::degeneracy_gap) * std::max(terms[i - 1].weight, Scalar(tol::log_clamp));
    if (!close) {
      if (i - start >= 2) clusters.emplace_back(start, i);
      start = i;
    }
  }
  return clusters;
}

template <typename Scalar>
VectorC<Scalar> projector_axis(const DensityOperator<Scalar>& projector) {
  Index pivot = 0;
  Scalar best = -1;
  for (Index i = 0; i < projector.matrix.rows(); ++i) {
    const Scalar d = projector.matrix(i, i).real();
    if (d > best) {
      best = d;
      pivot = i;
    }
  }
  VectorC<Scalar> v = projector.matrix.col(pivot);
  const Scalar norm = v.norm();
  if (norm <= Scalar(0))
    throw consistency_error("projector_axis: zero projector");
  return v / norm;
}

}  // namespace detail

// Ohya mutual entropy I = S(sigma_E, rho (x) Lambda(rho)) with the
// supremum over decompositions searched per `policy`.
template <typename Scalar, typename Channel>
EntropyValue<Scalar> mutual_entropy(const DensityOperator<Scalar>& rho, const Channel& channel,
                                    const MutualEntropyPolicy<Scalar>& policy =
                                        MutualEntropyPolicy<Scalar>::canonical()) {
  validate_density(rho);
  if (policy.kind == MutualEntropyPolicy<Scalar>::Kind::randomized && policy.rotations < 1)
    throw std::domain_error("mutual_entropy: randomized policy needs >= 1 rotations");

  const DensityOperator<Scalar> rho_out = apply(channel, rho);
  const DensityOperator<Scalar> product = tensor(rho, rho_out);
  const SchattenDecomposition<Scalar> canonical = spectral_decompose(rho);

  const auto evaluate = [&](const SchattenDecomposition<Scalar>& decomp) {
    return relative_entropy(compound_state(decomp, channel).joint, product);
  };

  EntropyValue<Scalar> best = evaluate(canonical);
  if (policy.kind == MutualEntropyPolicy<Scalar>::Kind::randomized && canonical.degenerate) {
    const auto clusters = detail::degenerate_clusters(canonical.terms);
    std::mt19937_64 rng(policy.seed);
    for (int trial = 0; trial < policy.rotations; ++trial) {
      SchattenDecomposition<Scalar> rotated = canonical;
      for (const auto& [lo, hi] : clusters) {
        const Index width = static_cast<Index>(hi - lo);
        MatrixC<Scalar> axes(rho.basis.dim(), width);
        for (Index c = 0; c < width; ++c)
          axes.col(c) = detail::projector_axis(canonical.terms[lo + c].projector);
        const MatrixC<Scalar> mixed = axes * detail::random_unitary<Scalar>(width, rng);
        for (Index c = 0; c < width; ++c) {
          const VectorC<Scalar> v = mixed.col(c);
          rotated.terms[lo + c].projector = {rho.basis, (v * v.adjoint()).eval(), false};
        }
      }
      const EntropyValue<Scalar> trial_value = evaluate(rotated);
      if (trial_value.finite && (!best.finite || trial_value.value > best.value))
        best = trial_value;
    }
  }
  return best;
}

template <typename Scalar = double>
struct FundamentalInequalityReport {
  EntropyValue<Scalar> mutual;
  EntropyValue<Scalar> entropy_in;
  EntropyValue<Scalar> entropy_out;
  Scalar tolerance = Scalar(tol::entropy_slack);
  bool pass = false;
};

// 0 <= I <= min{S(rho), S(Lambda rho)} within tolerance.
template <typename Scalar, typename Channel>
FundamentalInequalityReport<Scalar> fundamental_inequality_check(
    const DensityOperator<Scalar>& rho, const Channel& channel,
    const MutualEntropyPolicy<Scalar>& policy = MutualEntropyPolicy<Scalar>::canonical()) {
  FundamentalInequalityReport<Scalar> report;
  report.mutual = mutual_entropy(rho, channel, policy);
  report.entropy_in = von_neumann(rho);
  report.entropy_out = von_neumann(apply(channel, rho));
  const Scalar bound = std::min(report.entropy_in.value, report.entropy_out.value);
  report.pass = report.mutual.finite && report.mutual.value >= -report.tolerance &&
                report.mutual.value <= bound + report.tolerance;
  return report;
}

// Classical mutual information of a letter -> distribution channel:
// sum_n w_n sum_y p(y|n) log(p(y|n) / q(y)) with q the output mixture.
// Coincides with the quantum value when all operators commute.
template <typename Scalar>
Scalar classical_mutual_information(const std::vector<Scalar>& prior,
                                    const std::vector<ClassicalDistribution<Scalar>>& likelihoods) {
  if (prior.size() != likelihoods.size())
    throw std::domain_error("classical_mutual_information: prior/likelihood size mismatch");
  if (prior.empty())
    throw std::domain_error("classical_mutual_information: empty prior");
  Scalar sum = 0;
  for (Scalar w : prior) {
    if (w < -Scalar(tol::prob_floor))
      throw std::domain_error("classical_mutual_information: negative prior weight");
    sum += w;
  }
  if (std::abs(sum - Scalar(1)) > Scalar(tol::prob_sum))
    throw std::domain_error("classical_mutual_information: prior does not sum to 1");
  for (const auto& lk : likelihoods) validate_classical(lk);

  std::map<OccupationTuple, Scalar> mixture;
  for (size_t n = 0; n < prior.size(); ++n)
    for (const auto& [y, p] : likelihoods[n].probs) mixture[y] += prior[n] * p;

  Scalar mi = 0;
  for (size_t n = 0; n < prior.size(); ++n) {
    if (prior[n] <= Scalar(0)) continue;
    for (const auto& [y, p] : likelihoods[n].probs)
      if (p > Scalar(0)) mi += prior[n] * p * std::log(p / mixture[y]);
  }
  return std::max(mi, Scalar(0));
}

}  // namespace qmod

#endif  // QMOD_ENTROPY_HPP
