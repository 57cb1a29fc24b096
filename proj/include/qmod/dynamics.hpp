#ifndef QMOD_DYNAMICS_HPP
#define QMOD_DYNAMICS_HPP

#include <optional>

#include "qmod/entropy.hpp"

namespace qmod {

// Stationary i.i.d. product source: the modeled infinite state is the
// tensor power of `symbol_state`, carried together with the Schatten
// decomposition the block compounds are built from.
template <typename Scalar = double>
struct StationarySource {
  DensityOperator<Scalar> symbol_state;
  SchattenDecomposition<Scalar> decomposition;
};

// Number-diagonal source in sparse form: letter n is the projector onto
// `patterns[n]` with weight `weights[n]`. This is the representation the
// classical block path scales with, well past the dense dimension cap.
template <typename Scalar = double>
struct DiagonalSource {
  FockBasis letter_basis;
  std::vector<Scalar> weights;
  std::vector<OccupationTuple> patterns;
};

template <typename Scalar = double>
struct BlockResult {
  int block_length = 0;
  Scalar entropy = 0;  // S over the whole block
  Scalar mutual = 0;   // I over the whole block
  Scalar entropy_per_symbol = 0;
  Scalar mutual_per_symbol = 0;
};

template <typename Scalar>
void validate_source(const DiagonalSource<Scalar>& src) {
  if (src.weights.size() != src.patterns.size() || src.weights.empty())
    throw std::domain_error("DiagonalSource: weights/patterns size mismatch");
  Scalar sum = 0;
  for (Scalar w : src.weights) {
    if (w < -Scalar(tol::prob_floor))
      throw std::domain_error("DiagonalSource: negative weight");
    sum += w;
  }
  if (std::abs(sum - Scalar(1)) > Scalar(tol::prob_sum))
    throw std::domain_error("DiagonalSource: weights do not sum to 1");
  for (const auto& t : src.patterns)
    if (!src.letter_basis.contains(t))
      throw std::domain_error("DiagonalSource: pattern outside letter basis");
  for (size_t i = 0; i < src.patterns.size(); ++i)
    for (size_t j = i + 1; j < src.patterns.size(); ++j)
      if (src.patterns[i] == src.patterns[j])
        throw std::domain_error("DiagonalSource: duplicate letter pattern");
}

template <typename Scalar>
StationarySource<Scalar> make_stationary_source(const DensityOperator<Scalar>& rho) {
  validate_density(rho);
  return {rho, spectral_decompose(rho)};
}

namespace detail {

template <typename Scalar>
bool weights_degenerate(std::vector<Scalar> w) {
  std::sort(w.begin(), w.end(), std::greater<Scalar>());
  for (size_t i = 0; i + 1 < w.size(); ++i) {
    if (w[i + 1] < Scalar(tol::spectral_drop)) break;
    if (w[i] - w[i + 1] < Scalar(tol::degeneracy_gap) * std::max(w[i], Scalar(tol::log_clamp)))
      return true;
  }
  return false;
}

}  // namespace detail

// Point-mass pattern of a rank-one number-diagonal projector, if it is one.
template <typename Scalar>
std::optional<OccupationTuple> classical_point_mass(const DensityOperator<Scalar>& projector) {
  if (!projector.diagonal_hint && max_offdiag(projector.matrix) > Scalar(tol::prob_floor))
    return std::nullopt;
  Index where = -1;
  for (Index i = 0; i < projector.basis.dim(); ++i) {
    const Scalar d = projector.matrix(i, i).real();
    if (d > Scalar(1) - Scalar(1e-9)) {
      if (where >= 0) return std::nullopt;
      where = i;
    } else if (d > Scalar(tol::prob_floor)) {
      return std::nullopt;
    }
  }
  if (where < 0) return std::nullopt;
  return projector.basis.tuple_of(where);
}

template <typename Scalar>
std::optional<DiagonalSource<Scalar>> as_diagonal_source(const StationarySource<Scalar>& src) {
  DiagonalSource<Scalar> out{src.symbol_state.basis, {}, {}};
  for (const auto& term : src.decomposition.terms) {
    const auto pattern = classical_point_mass(term.projector);
    if (!pattern) return std::nullopt;
    out.weights.push_back(term.weight);
    out.patterns.push_back(*pattern);
  }
  return out;
}

template <typename Scalar>
StationarySource<Scalar> to_stationary_source(const DiagonalSource<Scalar>& src) {
  validate_source(src);
  if (src.letter_basis.dim() > cap::dense_dim)
    throw capacity_error("to_stationary_source: dense dimension " +
                         std::to_string(src.letter_basis.dim()) + " exceeds cap " +
                         std::to_string(cap::dense_dim));
  SchattenDecomposition<Scalar> decomp{src.letter_basis, {}, false};
  for (size_t n = 0; n < src.weights.size(); ++n)
    decomp.terms.push_back(
        {src.weights[n], occupation_projection<Scalar>(src.patterns[n], src.letter_basis)});
  decomp.degenerate = detail::weights_degenerate(src.weights);
  return {reconstruct(decomp), std::move(decomp)};
}

template <typename Scalar>
ClassicalDistribution<Scalar> single_block_distribution(const DiagonalSource<Scalar>& src) {
  ClassicalDistribution<Scalar> dist{src.letter_basis, {}};
  for (size_t n = 0; n < src.weights.size(); ++n)
    if (src.weights[n] > Scalar(0)) dist.probs[src.patterns[n]] += src.weights[n];
  return dist;
}

namespace detail {

template <typename Scalar>
void check_block_channel(const DiagonalSource<Scalar>& src,
                         const AttenuationChannel<Scalar>& att) {
  if (att.n_max != src.letter_basis.n_max())
    throw std::domain_error("block: channel cutoff does not match letter basis");
}

// Number of thinning outcomes of one letter: prod_s (count_s + 1).
template <typename Scalar>
double letter_output_support(const OccupationTuple& pattern) {
  double total = 1;
  for (int c : pattern) total *= c + 1;
  return total;
}

template <typename Scalar>
void check_sparse_capacity(const DiagonalSource<Scalar>& src, int block_length,
                           const char* what) {
  double per_block = 0;
  for (size_t n = 0; n < src.weights.size(); ++n)
    if (src.weights[n] > Scalar(0))
      per_block += letter_output_support<Scalar>(src.patterns[n]);
  double total = 1;
  for (int i = 0; i < block_length; ++i) {
    total *= per_block;
    if (total > cap::sparse_terms) {
      std::ostringstream msg;
      msg << what << ": sparse joint support would exceed " << cap::sparse_terms
          << " amplitudes (" << per_block << " per block, block length " << block_length << ")";
      throw capacity_error(msg.str());
    }
  }
}

// Enumerate letter tuples of length N over letters with positive weight.
template <typename Scalar, typename Visit>
void for_each_letter_tuple(const DiagonalSource<Scalar>& src, int block_length, Visit&& visit) {
  std::vector<size_t> active;
  for (size_t n = 0; n < src.weights.size(); ++n)
    if (src.weights[n] > Scalar(0)) active.push_back(n);
  std::vector<size_t> tuple(block_length, 0);
  std::function<void(int, Scalar)> walk = [&](int pos, Scalar weight) {
    if (pos == block_length) {
      visit(tuple, weight);
      return;
    }
    for (size_t a : active) {
      tuple[pos] = a;
      walk(pos + 1, weight * src.weights[a]);
    }
  };
  walk(0, Scalar(1));
}

}  // namespace detail

// Input compound over N blocks: the product measure of the letter mixture.
template <typename Scalar>
ClassicalDistribution<Scalar> block_compound_input(const DiagonalSource<Scalar>& src,
                                                   int block_length) {
  validate_source(src);
  if (block_length < 1) throw std::domain_error("block_compound_input: block length must be >= 1");
  const double tuples = std::pow(static_cast<double>(src.weights.size()), block_length);
  if (tuples > cap::sparse_terms)
    throw capacity_error("block_compound_input: letter tuple count " + std::to_string(tuples) +
                         " exceeds sparse cap");
  ClassicalDistribution<Scalar> out{
      FockBasis(block_length * src.letter_basis.slots(), src.letter_basis.n_max()), {}};
  detail::for_each_letter_tuple(src, block_length,
                                [&](const std::vector<size_t>& tuple, Scalar weight) {
                                  OccupationTuple t;
                                  t.reserve(out.basis.slots());
                                  for (size_t n : tuple) {
                                    const auto& p = src.patterns[n];
                                    t.insert(t.end(), p.begin(), p.end());
                                  }
                                  out.probs[std::move(t)] += weight;
                                });
  return out;
}

// Output compound over N blocks: the N-fold product of the thinned letter
// mixture, i.e. the block state after slotwise attenuation.
template <typename Scalar>
ClassicalDistribution<Scalar> block_compound_output(const DiagonalSource<Scalar>& src,
                                                    const AttenuationChannel<Scalar>& att,
                                                    int block_length) {
  validate_source(src);
  detail::check_block_channel(src, att);
  if (block_length < 1) throw std::domain_error("block_compound_output: block length must be >= 1");
  detail::check_sparse_capacity(src, block_length, "block_compound_output");
  const ClassicalDistribution<Scalar> q0 = thin_binomial(att.eta, single_block_distribution(src));
  ClassicalDistribution<Scalar> out = q0;
  for (int i = 1; i < block_length; ++i) out = tensor(out, q0);
  return out;
}

// Correlated compound over N blocks, laid out as the N input blocks
// followed by the N output blocks.
template <typename Scalar>
ClassicalDistribution<Scalar> block_joint_compound(const DiagonalSource<Scalar>& src,
                                                   const AttenuationChannel<Scalar>& att,
                                                   int block_length) {
  validate_source(src);
  detail::check_block_channel(src, att);
  if (block_length < 1) throw std::domain_error("block_joint_compound: block length must be >= 1");
  detail::check_sparse_capacity(src, block_length, "block_joint_compound");

  std::vector<ClassicalDistribution<Scalar>> letter_out;
  letter_out.reserve(src.patterns.size());
  for (const auto& p : src.patterns)
    letter_out.push_back(thin_binomial(att.eta, point_mass<Scalar>(p, src.letter_basis)));

  ClassicalDistribution<Scalar> out{
      FockBasis(2 * block_length * src.letter_basis.slots(), src.letter_basis.n_max()), {}};
  const int slots = src.letter_basis.slots();
  detail::for_each_letter_tuple(src, block_length, [&](const std::vector<size_t>& tuple,
                                                       Scalar weight) {
    OccupationTuple input_part;
    input_part.reserve(block_length * slots);
    for (size_t n : tuple) {
      const auto& p = src.patterns[n];
      input_part.insert(input_part.end(), p.begin(), p.end());
    }
    OccupationTuple full = input_part;
    full.resize(2 * block_length * slots);
    std::function<void(int, Scalar)> emit = [&](int pos, Scalar prob) {
      if (pos == block_length) {
        out.probs[full] += prob;
        return;
      }
      for (const auto& [y, py] : letter_out[tuple[pos]].probs) {
        std::copy(y.begin(), y.end(),
                  full.begin() + (block_length + pos) * slots);
        emit(pos + 1, prob * py);
      }
    };
    emit(0, weight);
  });
  return out;
}

// Definitional block functionals on the sparse path: the entropy functional
// is the weighted relative entropy of each block letter string against the
// product state, the mutual functional the relative entropy of the joint
// compound against the product of compounds. Both are enumerated, never
// shortcut through closed forms.
template <typename Scalar>
BlockResult<Scalar> block_functionals(const DiagonalSource<Scalar>& src,
                                      const AttenuationChannel<Scalar>& att, int block_length) {
  validate_source(src);
  detail::check_block_channel(src, att);
  if (block_length < 1) throw std::domain_error("block_functionals: block length must be >= 1");
  detail::check_sparse_capacity(src, block_length, "block_functionals");

  const ClassicalDistribution<Scalar> p0 = single_block_distribution(src);
  const ClassicalDistribution<Scalar> q0 = thin_binomial(att.eta, p0);
  std::vector<ClassicalDistribution<Scalar>> letter_out;
  letter_out.reserve(src.patterns.size());
  for (const auto& p : src.patterns)
    letter_out.push_back(thin_binomial(att.eta, point_mass<Scalar>(p, src.letter_basis)));

  Scalar entropy = 0;
  Scalar mutual = 0;
  detail::for_each_letter_tuple(
      src, block_length, [&](const std::vector<size_t>& tuple, Scalar weight) {
        if (weight <= Scalar(0)) return;
        // S(point mass at the letter string || product state) = -log P.
        Scalar log_p = 0;
        for (size_t n : tuple) log_p += std::log(p0.probs.at(src.patterns[n]));
        entropy -= weight * log_p;

        // KL of this letter string's output distribution against the
        // product reference, block by block.
        std::function<Scalar(int, Scalar, Scalar)> walk = [&](int pos, Scalar t_prob,
                                                              Scalar q_prob) -> Scalar {
          if (pos == block_length) return t_prob * std::log(t_prob / q_prob);
          Scalar acc = 0;
          for (const auto& [y, py] : letter_out[tuple[pos]].probs)
            acc += walk(pos + 1, t_prob * py, q_prob * q0.probs.at(y));
          return acc;
        };
        mutual += weight * walk(0, Scalar(1), Scalar(1));
      });
  mutual = std::max(mutual, Scalar(0));
  return {block_length, entropy, mutual, entropy / Scalar(block_length),
          mutual / Scalar(block_length)};
}

namespace detail {

template <typename Scalar, typename Compute>
Scalar per_symbol_limit(int block_max, const char* what, Compute&& compute) {
  if (block_max < 1) throw std::domain_error(std::string(what) + ": block_max must be >= 1");
  Scalar first = 0;
  Scalar last = 0;
  for (int n = 1; n <= block_max; ++n) {
    const Scalar per_symbol = compute(n);
    if (n == 1) first = per_symbol;
    if (std::abs(per_symbol - first) > Scalar(tol::additivity)) {
      std::ostringstream msg;
      msg << what << ": per-symbol value at N=" << n << " (" << per_symbol
          << ") deviates from N=1 (" << first << ") beyond " << tol::additivity
          << "; i.i.d. sources must be exactly additive";
      throw consistency_error(msg.str());
    }
    last = per_symbol;
  }
  return last;
}

}  // namespace detail

// Per-symbol entropy of the stationary source. The infinite-block limit is
// exact for i.i.d. products, so the N = 1..block_max values must agree; any
// deviation is an internal error, not a result.
template <typename Scalar>
Scalar dynamical_entropy(const DiagonalSource<Scalar>& src, int block_max = 3) {
  const AttenuationChannel<Scalar> identity =
      attenuation_channel(Scalar(1), src.letter_basis.n_max());
  return detail::per_symbol_limit<Scalar>(block_max, "dynamical_entropy", [&](int n) {
    return block_functionals(src, identity, n).entropy_per_symbol;
  });
}

template <typename Scalar>
Scalar dynamical_mutual(const DiagonalSource<Scalar>& src, const AttenuationChannel<Scalar>& att,
                        int block_max = 3) {
  return detail::per_symbol_limit<Scalar>(block_max, "dynamical_mutual", [&](int n) {
    return block_functionals(src, att, n).mutual_per_symbol;
  });
}

// ---------------------------------------------------------------------------
// Dense twins, used for cross-path checks below the dense dimension cap.
// ---------------------------------------------------------------------------

namespace detail {

template <typename Scalar>
DensityOperator<Scalar> tensor_power(const DensityOperator<Scalar>& op, int n) {
  DensityOperator<Scalar> out = op;
  for (int i = 1; i < n; ++i) out = tensor(out, op);
  return out;
}

template <typename Scalar>
void check_dense_block(const StationarySource<Scalar>& src, int block_length, int copies,
                       const char* what) {
  double dim = 1;
  for (int i = 0; i < copies * block_length; ++i) {
    dim *= static_cast<double>(src.symbol_state.basis.dim());
    if (dim > static_cast<double>(cap::dense_dim)) {
      std::ostringstream msg;
      msg << what << ": dense block dimension exceeds cap " << cap::dense_dim;
      throw capacity_error(msg.str());
    }
  }
}

}  // namespace detail

template <typename Scalar>
DensityOperator<Scalar> block_compound_input(const StationarySource<Scalar>& src,
                                             int block_length) {
  if (block_length < 1) throw std::domain_error("block_compound_input: block length must be >= 1");
  detail::check_dense_block(src, block_length, 1, "block_compound_input");
  return detail::tensor_power(src.symbol_state, block_length);
}

template <typename Scalar>
DensityOperator<Scalar> block_compound_output(const StationarySource<Scalar>& src,
                                              const AttenuationChannel<Scalar>& att,
                                              int block_length) {
  if (block_length < 1) throw std::domain_error("block_compound_output: block length must be >= 1");
  detail::check_dense_block(src, block_length, 1, "block_compound_output");
  const LiftedChannel<Scalar> lc = lift(att, src.symbol_state.basis.slots());
  return detail::tensor_power(apply(lc, src.symbol_state), block_length);
}

template <typename Scalar>
DensityOperator<Scalar> block_joint_compound(const StationarySource<Scalar>& src,
                                             const AttenuationChannel<Scalar>& att,
                                             int block_length) {
  if (block_length < 1) throw std::domain_error("block_joint_compound: block length must be >= 1");
  detail::check_dense_block(src, block_length, 2, "block_joint_compound");
  const LiftedChannel<Scalar> lc = lift(att, src.symbol_state.basis.slots());

  const auto& terms = src.decomposition.terms;
  std::vector<DensityOperator<Scalar>> mapped;
  mapped.reserve(terms.size());
  for (const auto& term : terms) mapped.push_back(apply(lc, term.projector));

  const FockBasis joint_basis(2 * block_length * src.symbol_state.basis.slots(),
                              src.symbol_state.basis.n_max());
  MatrixC<Scalar> joint = MatrixC<Scalar>::Zero(joint_basis.dim(), joint_basis.dim());
  bool diag = true;
  std::vector<size_t> tuple(block_length, 0);
  std::function<void(int, Scalar)> walk = [&](int pos, Scalar weight) {
    if (weight <= Scalar(0)) return;
    if (pos == block_length) {
      DensityOperator<Scalar> in_block = terms[tuple[0]].projector;
      DensityOperator<Scalar> out_block = mapped[tuple[0]];
      for (int i = 1; i < block_length; ++i) {
        in_block = tensor(in_block, terms[tuple[i]].projector);
        out_block = tensor(out_block, mapped[tuple[i]]);
      }
      const DensityOperator<Scalar> pair = tensor(in_block, out_block);
      joint += weight * pair.matrix;
      diag = diag && pair.diagonal_hint;
      return;
    }
    for (size_t n = 0; n < terms.size(); ++n) {
      tuple[pos] = n;
      walk(pos + 1, weight * terms[n].weight);
    }
  };
  walk(0, Scalar(1));
  return {joint_basis, std::move(joint), diag};
}

template <typename Scalar>
BlockResult<Scalar> block_functionals(const StationarySource<Scalar>& src,
                                      const AttenuationChannel<Scalar>& att, int block_length,
                                      const MutualEntropyPolicy<Scalar>& policy =
                                          MutualEntropyPolicy<Scalar>::canonical()) {
  if (block_length < 1) throw std::domain_error("block_functionals: block length must be >= 1");
  detail::check_dense_block(src, block_length, 2, "block_functionals");

  const auto evaluate = [&](const StationarySource<Scalar>& s) -> std::pair<Scalar, Scalar> {
    const DensityOperator<Scalar> input = block_compound_input(s, block_length);
    const DensityOperator<Scalar> output = block_compound_output(s, att, block_length);
    const DensityOperator<Scalar> joint = block_joint_compound(s, att, block_length);

    Scalar entropy = 0;
    std::vector<size_t> tuple(block_length, 0);
    const auto& terms = s.decomposition.terms;
    std::function<void(int, Scalar)> walk = [&](int pos, Scalar weight) {
      if (weight <= Scalar(0)) return;
      if (pos == block_length) {
        DensityOperator<Scalar> proj = terms[tuple[0]].projector;
        for (int i = 1; i < block_length; ++i) proj = tensor(proj, terms[tuple[i]].projector);
        const EntropyValue<Scalar> rel = relative_entropy(proj, input);
        if (!rel.finite)
          throw consistency_error("block_functionals: infinite entropy term on a valid source");
        entropy += weight * rel.value;
        return;
      }
      for (size_t n = 0; n < terms.size(); ++n) {
        tuple[pos] = n;
        walk(pos + 1, weight * terms[n].weight);
      }
    };
    walk(0, Scalar(1));

    const EntropyValue<Scalar> mutual = relative_entropy(joint, tensor(input, output));
    if (!mutual.finite)
      throw consistency_error("block_functionals: infinite mutual term on a valid source");
    return {entropy, mutual.value};
  };

  auto [entropy, mutual] = evaluate(src);
  if (policy.kind == MutualEntropyPolicy<Scalar>::Kind::randomized) {
    StationarySource<Scalar> sorted = src;
    std::stable_sort(sorted.decomposition.terms.begin(), sorted.decomposition.terms.end(),
                     [](const auto& a, const auto& b) { return a.weight > b.weight; });
    const auto clusters = detail::degenerate_clusters(sorted.decomposition.terms);
    if (!clusters.empty()) {
      std::mt19937_64 rng(policy.seed);
      const Index dim = src.symbol_state.basis.dim();
      for (int trial = 0; trial < policy.rotations; ++trial) {
        StationarySource<Scalar> rotated = sorted;
        for (const auto& [lo, hi] : clusters) {
          const Index width = static_cast<Index>(hi - lo);
          MatrixC<Scalar> axes(dim, width);
          for (Index c = 0; c < width; ++c)
            axes.col(c) = detail::projector_axis(sorted.decomposition.terms[lo + c].projector);
          const MatrixC<Scalar> mixed = axes * detail::random_unitary<Scalar>(width, rng);
          for (Index c = 0; c < width; ++c) {
            const VectorC<Scalar> v = mixed.col(c);
            rotated.decomposition.terms[lo + c].projector = {src.symbol_state.basis,
                                                             (v * v.adjoint()).eval(), false};
          }
        }
        const auto [e, m] = evaluate(rotated);
        entropy = std::max(entropy, e);
        mutual = std::max(mutual, m);
      }
    }
  }
  return {block_length, entropy, mutual, entropy / Scalar(block_length),
          mutual / Scalar(block_length)};
}

template <typename Scalar>
Scalar dynamical_entropy(const StationarySource<Scalar>& src, int block_max = 3) {
  const AttenuationChannel<Scalar> identity =
      attenuation_channel(Scalar(1), src.symbol_state.basis.n_max());
  return detail::per_symbol_limit<Scalar>(block_max, "dynamical_entropy", [&](int n) {
    return block_functionals(src, identity, n).entropy_per_symbol;
  });
}

template <typename Scalar>
Scalar dynamical_mutual(const StationarySource<Scalar>& src, const AttenuationChannel<Scalar>& att,
                        int block_max = 3) {
  return detail::per_symbol_limit<Scalar>(block_max, "dynamical_mutual", [&](int n) {
    return block_functionals(src, att, n).mutual_per_symbol;
  });
}

}  // namespace qmod

#endif  // QMOD_DYNAMICS_HPP
