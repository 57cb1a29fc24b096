#ifndef QMOD_DEFS_HPP
#define QMOD_DEFS_HPP

#include <Eigen/Dense>

#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmod {

using Index = Eigen::Index;

template <typename Scalar>
using MatrixC = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorC = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;
template <typename Scalar>
using VectorR = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Per-slot photon counts. Slot 0 is the most significant basis digit.
using OccupationTuple = std::vector<int>;

namespace tol {
inline constexpr double hermitian = 1e-10;   // max entrywise |M - M^dagger|
inline constexpr double trace = 1e-10;       // |Tr rho - 1|
inline constexpr double eigen_floor = 1e-10; // eigenvalues in [-floor, 0) snap to 0
inline constexpr double prob_floor = 1e-12;  // classical values below -prob_floor are invalid
inline constexpr double prob_sum = 1e-10;
inline constexpr double kraus_complete = 1e-12;
inline constexpr double spectral_drop = 1e-12;  // default weight cutoff for kept terms
inline constexpr double degeneracy_gap = 1e-9;  // relative gap for the degeneracy flag
inline constexpr double diagonal_detect = 1e-13;
inline constexpr double kernel = 1e-10;       // support/kernel split for relative entropy
inline constexpr double kernel_guard = 1e-12; // [guard, kernel) counts as kernel, flagged
inline constexpr double support_loss = 1e-10; // mass of rho tolerated on the kernel of sigma
inline constexpr double log_clamp = 1e-300;   // floor before logs on the support
inline constexpr double offdiag = 1e-10;      // off-diagonal mass allowed by to_classical
inline constexpr double additivity = 1e-9;    // per-symbol linearity assertion
inline constexpr double entropy_slack = 1e-9; // slack for >= 0 / <= min inequalities
}  // namespace tol

namespace cap {
inline constexpr Index dense_dim = 4096;          // largest dense operator dimension
inline constexpr double sparse_terms = 1000000.0; // largest sparse joint support
}  // namespace cap

// A state cannot be expressed in the requested representation.
struct representation_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A computation would exceed the dense or sparse resource caps.
struct capacity_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An internal cross-check failed; signals a bug, not a math result.
struct consistency_error : std::logic_error {
  using std::logic_error::logic_error;
};

// Modulation images of distinct letters are not orthogonal.
struct ideal_modulator_error : std::domain_error {
  using std::domain_error::domain_error;
};

}  // namespace qmod

#endif  // QMOD_DEFS_HPP
