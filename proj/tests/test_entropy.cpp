#include <doctest.h>

#include "qmod/entropy.hpp"
#include "test_support.hpp"

using namespace qmod;

namespace {

DensityOperator<double> diag2(double a, double b) {
  VectorR<double> d(2);
  d << a, b;
  return diagonal_operator(FockBasis(1, 1), d);
}

}  // namespace

TEST_CASE("von Neumann entropy") {
  CHECK(von_neumann(number_projection<double>(1, FockBasis(1, 2))).value == 0.0);
  CHECK(von_neumann(diag2(0.5, 0.5)).value == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  // -0.7 ln 0.7 - 0.3 ln 0.3
  CHECK(von_neumann(diag2(0.7, 0.3)).value ==
        doctest::Approx(0.61086430205489346).epsilon(1e-12));

  MatrixC<double> bad = MatrixC<double>::Identity(2, 2);
  CHECK_THROWS_AS(von_neumann(DensityOperator<double>{FockBasis(1, 1), bad, false}),
                  std::domain_error);
}

TEST_CASE("von Neumann entropy is unitarily invariant") {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 10; ++trial) {
    auto rho = testing::random_density(rng, 4);
    const double base = von_neumann(rho).value;

    // conjugate by a random permutation
    std::vector<int> perm{0, 1, 2, 3};
    std::shuffle(perm.begin(), perm.end(), rng);
    MatrixC<double> p = MatrixC<double>::Zero(4, 4);
    for (int i = 0; i < 4; ++i) p(perm[i], i) = 1.0;
    DensityOperator<double> rotated{rho.basis, p * rho.matrix * p.adjoint(), false};
    CHECK(von_neumann(rotated).value == doctest::Approx(base).epsilon(1e-9));
  }
}

TEST_CASE("relative entropy") {
  std::mt19937_64 rng(73);
  for (int trial = 0; trial < 5; ++trial) {
    auto rho = testing::random_density(rng, 3);
    auto self = relative_entropy(rho, rho);
    CHECK(self.finite);
    CHECK(self.value == doctest::Approx(0.0).epsilon(1e-10));
  }

  // Commuting pair: sum_i p_i log(p_i / q_i).
  auto rel = relative_entropy(diag2(0.5, 0.5), diag2(0.75, 0.25));
  CHECK(rel.value == doctest::Approx(0.14384103622589046).epsilon(1e-12));

  // Violated support hits the infinity marker.
  auto inf = relative_entropy(number_projection<double>(1, FockBasis(1, 1)),
                              number_projection<double>(0, FockBasis(1, 1)));
  CHECK_FALSE(inf.finite);

  CHECK_THROWS_AS(relative_entropy(diag2(0.5, 0.5),
                                   number_projection<double>(0, FockBasis(1, 2))),
                  std::domain_error);
}

TEST_CASE("relative entropy is positive definite on commuting pairs") {
  std::mt19937_64 rng(79);
  for (int trial = 0; trial < 20; ++trial) {
    auto rho = testing::random_diagonal(rng, 4);
    auto sigma = testing::random_diagonal(rng, 4);
    auto rel = relative_entropy(rho, sigma);
    CHECK(rel.finite);
    CHECK(rel.value >= 0.0);
    const bool equal = testing::max_abs_diff(rho.matrix, sigma.matrix) < 1e-9;
    if (rel.value < 1e-9) CHECK(equal);
  }
}

TEST_CASE("kernel guard band is flagged as borderline") {
  // A sigma eigenvalue inside [1e-12, 1e-10) counts as kernel; results that
  // depended on that call are marked borderline.
  VectorR<double> s(2);
  s << 1.0 - 5e-11, 5e-11;
  auto sigma = diagonal_operator(FockBasis(1, 1), s);

  auto violated = relative_entropy(diag2(0.5, 0.5), sigma);
  CHECK_FALSE(violated.finite);
  CHECK(violated.borderline_kernel);

  auto fine = relative_entropy(number_projection<double>(0, FockBasis(1, 1)), sigma);
  CHECK(fine.finite);
  CHECK(fine.borderline_kernel);
  CHECK(fine.value == doctest::Approx(-std::log(1.0 - 5e-11)).epsilon(1e-6));
}

TEST_CASE("classical relative entropy matches the dense path") {
  std::mt19937_64 rng(83);
  for (int trial = 0; trial < 10; ++trial) {
    auto rho = testing::random_diagonal(rng, 4);
    auto sigma = testing::random_diagonal(rng, 4);
    auto dense = relative_entropy(rho, sigma);
    auto classical = relative_entropy(to_classical(rho), to_classical(sigma));
    CHECK(dense.value == doctest::Approx(classical.value).epsilon(1e-10));
  }
}

TEST_CASE("compound state construction") {
  auto rho = diag2(0.5, 0.5);
  auto decomp = spectral_decompose(rho);

  // Identity channel: perfectly correlated joint.
  auto identity = lift(attenuation_channel(1.0, 1), 1);
  auto compound = compound_state(decomp, identity);
  CHECK(compound.joint.matrix(compound.joint.basis.index_of({0, 0}),
                              compound.joint.basis.index_of({0, 0}))
            .real() == doctest::Approx(0.5));
  CHECK(compound.joint.matrix(compound.joint.basis.index_of({1, 1}),
                              compound.joint.basis.index_of({1, 1}))
            .real() == doctest::Approx(0.5));
  CHECK(compound.joint.matrix.trace().real() == doctest::Approx(1.0));

  // Marginals reproduce the inputs.
  auto half = lift(attenuation_channel(0.5, 1), 1);
  auto mixed = compound_state(decomp, half);
  CHECK(testing::max_abs_diff(partial_trace(mixed.joint, {0}).matrix, rho.matrix) < 1e-10);
  CHECK(testing::max_abs_diff(partial_trace(mixed.joint, {1}).matrix,
                              apply(half, rho).matrix) < 1e-10);
  CHECK(testing::max_abs_diff(mixed.marginal_out.matrix, apply(half, rho).matrix) < 1e-10);

  // Constant channel: joint is the product with the vacuum.
  auto dark = lift(attenuation_channel(0.0, 1), 1);
  auto vacuum = number_projection<double>(0, FockBasis(1, 1));
  auto constant = compound_state(decomp, dark);
  CHECK(testing::max_abs_diff(constant.joint.matrix, tensor(rho, vacuum).matrix) < 1e-12);
}

TEST_CASE("mutual entropy endpoints") {
  std::mt19937_64 rng(89);
  for (int trial = 0; trial < 5; ++trial) {
    auto rho = testing::random_diagonal(rng, 3);
    auto identity = lift(attenuation_channel(1.0, 2), 1);
    CHECK(mutual_entropy(rho, identity).value ==
          doctest::Approx(von_neumann(rho).value).epsilon(1e-9));

    auto dark = lift(attenuation_channel(0.0, 2), 1);
    CHECK(mutual_entropy(rho, dark).value == doctest::Approx(0.0).epsilon(1e-10));
  }
}

TEST_CASE("mutual entropy of the binary thinning channel") {
  // diag(.5,.5) through eta=1/2 equals the classical value of the induced
  // binary channel, enumerated exhaustively.
  auto rho = diag2(0.5, 0.5);
  auto half = lift(attenuation_channel(0.5, 1), 1);
  const double quantum = mutual_entropy(rho, half).value;

  std::vector<double> prior{0.5, 0.5};
  std::vector<ClassicalDistribution<double>> likelihoods{
      thin_binomial(0.5, point_mass<double>({0}, rho.basis)),
      thin_binomial(0.5, point_mass<double>({1}, rho.basis))};
  const double classical = classical_mutual_information(prior, likelihoods);
  CHECK(quantum == doctest::Approx(classical).epsilon(1e-9));
  CHECK(quantum == doctest::Approx(0.21576155433883570).epsilon(1e-9));
}

TEST_CASE("randomized decomposition search never loses to canonical") {
  auto rho = diag2(0.5, 0.5);  // fully degenerate spectrum
  for (double eta : {0.3, 0.7}) {
    auto lc = lift(attenuation_channel(eta, 1), 1);
    const double canonical = mutual_entropy(rho, lc).value;
    const double randomized =
        mutual_entropy(rho, lc, MutualEntropyPolicy<double>::randomized(8, 99)).value;
    CHECK(randomized >= canonical - 1e-12);
  }
  CHECK_THROWS_AS(MutualEntropyPolicy<double>::randomized(0, 1), std::domain_error);
}

TEST_CASE("fundamental inequality report") {
  auto rho = diag2(0.7, 0.3);
  auto identity = lift(attenuation_channel(1.0, 1), 1);
  auto report = fundamental_inequality_check(rho, identity);
  CHECK(report.pass);
  CHECK(report.mutual.value == doctest::Approx(report.entropy_in.value).epsilon(1e-9));

  auto dark = lift(attenuation_channel(0.0, 1), 1);
  auto zero = fundamental_inequality_check(rho, dark);
  CHECK(zero.pass);
  CHECK(zero.mutual.value == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("classical mutual information oracle cases") {
  FockBasis basis(1, 2);
  // Distinct deterministic outputs: H(prior).
  std::vector<double> prior{0.6, 0.4};
  std::vector<ClassicalDistribution<double>> distinct{point_mass<double>({0}, basis),
                                                      point_mass<double>({2}, basis)};
  const double h = -(0.6 * std::log(0.6) + 0.4 * std::log(0.4));
  CHECK(classical_mutual_information(prior, distinct) == doctest::Approx(h).epsilon(1e-12));

  // Identical likelihoods carry nothing.
  std::vector<ClassicalDistribution<double>> same{point_mass<double>({1}, basis),
                                                  point_mass<double>({1}, basis)};
  CHECK(classical_mutual_information(prior, same) == doctest::Approx(0.0));

  // Binary erasure channel: (1 - eps) H(prior).
  const double eps = 0.3;
  FockBasis out_basis(1, 2);
  auto erased = [&](int symbol) {
    ClassicalDistribution<double> d{out_basis, {}};
    d.probs[{symbol}] = 1.0 - eps;
    d.probs[{2}] = eps;  // shared erasure flag
    return d;
  };
  std::vector<ClassicalDistribution<double>> erasure{erased(0), erased(1)};
  CHECK(classical_mutual_information(prior, erasure) ==
        doctest::Approx((1.0 - eps) * h).epsilon(1e-12));

  CHECK_THROWS_AS(classical_mutual_information({0.5}, distinct), std::domain_error);
}
