#include <doctest.h>

#include "qmod/fock.hpp"
#include "test_support.hpp"

using namespace qmod;

TEST_CASE("basis enumeration is lexicographic with slot 0 most significant") {
  FockBasis basis(2, 2);
  CHECK(basis.dim() == 9);
  CHECK(basis.index_of({0, 0}) == 0);
  CHECK(basis.index_of({0, 2}) == 2);
  CHECK(basis.index_of({1, 0}) == 3);
  CHECK(basis.index_of({2, 1}) == 7);
  for (Index i = 0; i < basis.dim(); ++i) CHECK(basis.index_of(basis.tuple_of(i)) == i);
  CHECK_THROWS_AS(basis.index_of({3, 0}), std::domain_error);
  CHECK_THROWS_AS(basis.index_of({0}), std::domain_error);
  CHECK_THROWS_AS(FockBasis(0, 2), std::domain_error);
}

TEST_CASE("number projections") {
  FockBasis basis(1, 2);
  auto vac = number_projection<double>(0, basis);
  CHECK(vac.matrix(0, 0).real() == 1.0);
  CHECK(vac.matrix(1, 1).real() == 0.0);
  CHECK(vac.diagonal_hint);

  auto top = number_projection<double>(2, basis);
  CHECK(top.matrix(2, 2).real() == 1.0);

  for (int n = 0; n <= 2; ++n)
    CHECK(number_projection<double>(n, basis).matrix.trace().real() == doctest::Approx(1.0));

  CHECK_THROWS_AS(number_projection<double>(3, basis), std::domain_error);
  CHECK_THROWS_AS(number_projection<double>(-1, basis), std::domain_error);
  CHECK_THROWS_AS(number_projection<double>(0, FockBasis(2, 1)), std::domain_error);
}

TEST_CASE("tensor products") {
  FockBasis basis(1, 1);
  auto p0 = number_projection<double>(0, basis);
  auto p1 = number_projection<double>(1, basis);
  auto joint = tensor(p0, p1);
  CHECK(joint.basis.slots() == 2);
  CHECK(joint.matrix(joint.basis.index_of({0, 1}), joint.basis.index_of({0, 1})).real() == 1.0);
  CHECK(joint.matrix.trace().real() == doctest::Approx(1.0));
  CHECK(joint.diagonal_hint);

  std::mt19937_64 rng(11);
  auto a = testing::random_density(rng, 3);
  auto b = testing::random_density(rng, 3);
  auto ab = tensor(a, b);
  CHECK(ab.matrix.trace().real() ==
        doctest::Approx(a.matrix.trace().real() * b.matrix.trace().real()).epsilon(1e-12));
  CHECK_FALSE(ab.diagonal_hint);

  // The product stays a valid state: PSD within tolerance, weights sum to 1.
  auto decomp = spectral_decompose(ab);
  double sum = 0;
  for (const auto& term : decomp.terms) sum += term.weight;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));

  CHECK_THROWS_AS(tensor(p0, number_projection<double>(0, FockBasis(1, 2))), std::domain_error);
}

TEST_CASE("partial trace recovers product factors") {
  std::mt19937_64 rng(23);
  auto a = testing::random_density(rng, 4);
  auto b = testing::random_density(rng, 4);
  auto ab = tensor(a, b);

  auto ra = partial_trace(ab, {0});
  auto rb = partial_trace(ab, {1});
  CHECK(testing::max_abs_diff(ra.matrix, a.matrix) < 1e-12);
  CHECK(testing::max_abs_diff(rb.matrix, b.matrix) < 1e-12);
  CHECK(std::abs(ra.matrix.trace().real() - ab.matrix.trace().real()) < 1e-12);

  // keeping every slot is the identity
  auto all = partial_trace(ab, {0, 1});
  CHECK(testing::max_abs_diff(all.matrix, ab.matrix) == 0.0);

  CHECK_THROWS_AS(partial_trace(ab, {}), std::domain_error);
  CHECK_THROWS_AS(partial_trace(ab, {2}), std::domain_error);
}

TEST_CASE("partial trace recovers factors at dimension 64") {
  std::mt19937_64 rng(29);
  auto a = testing::random_density(rng, 8);
  auto b = testing::random_density(rng, 8);
  auto ab = tensor(a, b);  // dim 64
  CHECK(testing::max_abs_diff(partial_trace(ab, {0}).matrix, a.matrix) < 1e-12);
  CHECK(testing::max_abs_diff(partial_trace(ab, {1}).matrix, b.matrix) < 1e-12);
}

TEST_CASE("partial trace on three slots") {
  std::mt19937_64 rng(31);
  auto a = testing::random_density(rng, 2);
  auto b = testing::random_density(rng, 2);
  auto c = testing::random_density(rng, 2);
  auto abc = tensor(tensor(a, b), c);
  auto ac = partial_trace(abc, {0, 2});
  CHECK(testing::max_abs_diff(ac.matrix, tensor(a, c).matrix) < 1e-12);
}

TEST_CASE("spectral decomposition of a diagonal state") {
  VectorR<double> d(2);
  d << 0.7, 0.3;
  auto rho = diagonal_operator(FockBasis(1, 1), d);
  auto decomp = spectral_decompose(rho);
  REQUIRE(decomp.terms.size() == 2);
  CHECK(decomp.terms[0].weight == doctest::Approx(0.7));
  CHECK(decomp.terms[1].weight == doctest::Approx(0.3));
  CHECK(decomp.terms[0].projector.matrix(0, 0).real() == doctest::Approx(1.0));
  CHECK(decomp.terms[1].projector.matrix(1, 1).real() == doctest::Approx(1.0));
  CHECK_FALSE(decomp.degenerate);

  VectorR<double> mixed = VectorR<double>::Constant(2, 0.5);
  CHECK(spectral_decompose(diagonal_operator(FockBasis(1, 1), mixed)).degenerate);
}

TEST_CASE("spectral decomposition reconstructs random states") {
  std::mt19937_64 rng(47);
  std::uniform_int_distribution<int> dims(2, 8);
  for (int trial = 0; trial < 100; ++trial) {
    auto rho = testing::random_density(rng, dims(rng));
    auto decomp = spectral_decompose(rho);

    double weight_sum = 0;
    for (const auto& term : decomp.terms) weight_sum += term.weight;
    CHECK(weight_sum == doctest::Approx(1.0).epsilon(1e-9));

    for (size_t i = 0; i < decomp.terms.size(); ++i) {
      const auto& p = decomp.terms[i].projector.matrix;
      CHECK(testing::max_abs_diff(p * p, p) < 1e-10);  // idempotent
      for (size_t j = i + 1; j < decomp.terms.size(); ++j) {
        const double overlap =
            std::abs((p * decomp.terms[j].projector.matrix).trace());
        CHECK(overlap < 1e-9);
      }
    }
    CHECK(testing::max_abs_diff(reconstruct(decomp).matrix, rho.matrix) < 1e-9);
  }
}

TEST_CASE("spectral decomposition rejects bad input") {
  MatrixC<double> m(2, 2);
  m << std::complex<double>(0.5, 0), std::complex<double>(0.3, 0),
      std::complex<double>(0.0, 0), std::complex<double>(0.5, 0);
  DensityOperator<double> rho{FockBasis(1, 1), m, false};
  CHECK_THROWS_AS(spectral_decompose(rho), std::domain_error);
}

TEST_CASE("classical round trip") {
  VectorR<double> d(2);
  d << 0.5, 0.5;
  auto rho = diagonal_operator(FockBasis(1, 1), d);
  auto dist = to_classical(rho);
  CHECK(dist.probs.at({0}) == 0.5);
  CHECK(dist.probs.at({1}) == 0.5);
  auto back = from_classical(dist);
  CHECK(testing::max_abs_diff(back.matrix, rho.matrix) == 0.0);

  VectorC<double> plus(2);
  plus << std::complex<double>(std::sqrt(0.5), 0), std::complex<double>(std::sqrt(0.5), 0);
  DensityOperator<double> coherent{FockBasis(1, 1), plus * plus.adjoint(), false};
  CHECK_THROWS_AS(to_classical(coherent), representation_error);
}

TEST_CASE("dense and classical pipelines agree on diagonal states") {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 20; ++trial) {
    auto a = testing::random_diagonal(rng, 3);
    auto b = testing::random_diagonal(rng, 3);
    auto dense = partial_trace(tensor(a, b), {1});
    auto classical = partial_trace(tensor(to_classical(a), to_classical(b)), {1});
    CHECK(testing::max_abs_diff(dense.matrix, from_classical(classical).matrix) < 1e-10);
  }
}

TEST_CASE("validation catches malformed operators and distributions") {
  MatrixC<double> half = MatrixC<double>::Identity(2, 2) * std::complex<double>(0.4, 0);
  CHECK_THROWS_AS(validate_density(DensityOperator<double>{FockBasis(1, 1), half, false}),
                  std::domain_error);

  ClassicalDistribution<double> dist{FockBasis(1, 1), {}};
  dist.probs[{0}] = 0.8;
  CHECK_THROWS_AS(validate_classical(dist), std::domain_error);
  dist.probs[{1}] = 0.2;
  CHECK_NOTHROW(validate_classical(dist));
}
