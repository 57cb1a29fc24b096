#include <doctest.h>

#include "qmod/modulation.hpp"
#include "test_support.hpp"

using namespace qmod;

TEST_CASE("letter patterns") {
  const ModulationScheme pwm{ModulationKind::PWM, 1, 2};
  CHECK(letter_pattern(pwm, 1) == OccupationTuple{1, 0});
  CHECK(letter_pattern(pwm, 2) == OccupationTuple{1, 1});

  const ModulationScheme ppm{ModulationKind::PPM, 1, 3};
  CHECK(letter_pattern(ppm, 2) == OccupationTuple{0, 1, 0});

  const ModulationScheme wide{ModulationKind::PWM, 2, 3};
  CHECK(letter_pattern(wide, 3) == OccupationTuple{2, 2, 2});

  const ModulationScheme pam{ModulationKind::PAM, 1, 4};
  CHECK(letter_pattern(pam, 1) == OccupationTuple{0});
  CHECK(letter_pattern(pam, 4) == OccupationTuple{3});

  CHECK_THROWS_AS(letter_pattern(ppm, 0), std::domain_error);
  CHECK_THROWS_AS(letter_pattern(ppm, 4), std::domain_error);
  CHECK_THROWS_AS(letter_pattern(ModulationScheme{ModulationKind::PPM, 0, 3}, 1),
                  std::domain_error);
}

TEST_CASE("modulated states are orthogonal projectors") {
  auto p = pam_state(3, 3);
  CHECK(p.matrix(3, 3).real() == 1.0);
  CHECK(p.matrix.trace().real() == doctest::Approx(1.0));

  for (int n = 1; n <= 3; ++n) {
    auto w = pwm_state(n, 2, 3);
    auto s = ppm_state(n, 2, 3);
    CHECK(w.matrix.trace().real() == doctest::Approx(1.0));
    CHECK(s.matrix.trace().real() == doctest::Approx(1.0));
    for (int m = n + 1; m <= 3; ++m) {
      CHECK(std::abs((w.matrix * pwm_state(m, 2, 3).matrix).trace()) < 1e-12);
      CHECK(std::abs((s.matrix * ppm_state(m, 2, 3).matrix).trace()) < 1e-12);
    }
  }

  // Every PPM letter lights exactly one slot.
  for (int n = 1; n <= 3; ++n) {
    const auto pattern = letter_pattern(ModulationScheme{ModulationKind::PPM, 2, 3}, n);
    int lit = 0;
    for (int c : pattern) lit += c > 0 ? 1 : 0;
    CHECK(lit == 1);
  }
}

TEST_CASE("modulated sources") {
  Alphabet<double> alphabet{{0.5, 0.5}};
  auto src = modulated_source(alphabet, ModulationScheme{ModulationKind::PPM, 1, 2});
  CHECK(src.symbol_state.basis.slots() == 2);
  const Index i10 = src.symbol_state.basis.index_of({1, 0});
  const Index i01 = src.symbol_state.basis.index_of({0, 1});
  CHECK(src.symbol_state.matrix(i10, i10).real() == doctest::Approx(0.5));
  CHECK(src.symbol_state.matrix(i01, i01).real() == doctest::Approx(0.5));

  // Entropy of any ideal-modulator mixture is H(lambda).
  Alphabet<double> skew{{0.7, 0.2, 0.1}};
  for (auto kind : {ModulationKind::PWM, ModulationKind::PPM}) {
    auto mixed = modulated_source(skew, ModulationScheme{kind, 2, 3});
    CHECK(von_neumann(mixed.symbol_state).value ==
          doctest::Approx(closed_form_dynamical_entropy(skew)).epsilon(1e-10));
  }

  auto pam = modulated_source(Alphabet<double>{{0.25, 0.25, 0.25, 0.25}},
                              ModulationScheme{ModulationKind::PAM, 1, 4});
  CHECK(pam.symbol_state.basis.n_max() == 3);

  CHECK_THROWS_AS(modulated_source(alphabet, ModulationScheme{ModulationKind::PPM, 1, 3}),
                  std::domain_error);
  CHECK_THROWS_AS(modulated_source(Alphabet<double>{{0.6, 0.6}},
                                   ModulationScheme{ModulationKind::PPM, 1, 2}),
                  std::domain_error);
}

TEST_CASE("closed forms") {
  Alphabet<double> uniform{{0.5, 0.5}};
  const double ln2 = std::log(2.0);

  CHECK(closed_form_dynamical_entropy(uniform) == doctest::Approx(ln2).epsilon(1e-12));
  CHECK(closed_form_dynamical_entropy(Alphabet<double>{{1.0, 0.0}}) == doctest::Approx(0.0));

  CHECK(closed_form_pwm_mutual(uniform, 1.0, 1) == doctest::Approx(ln2).epsilon(1e-12));
  CHECK(closed_form_pwm_mutual(uniform, 0.0, 1) == doctest::Approx(0.0));
  CHECK(closed_form_pwm_mutual(uniform, 0.5, 1) ==
        doctest::Approx(0.25993019270997949).epsilon(1e-12));

  CHECK(closed_form_ppm_mutual(uniform, 0.5, 1) ==
        doctest::Approx(0.34657359027997265).epsilon(1e-12));
  CHECK(closed_form_ppm_mutual(uniform, 1.0, 2) == doctest::Approx(ln2).epsilon(1e-12));

  // PPM through attenuation is an erasure channel with eps = (1-eta)^d.
  Alphabet<double> skew{{0.6, 0.4}};
  const double eps = std::pow(1.0 - 0.3, 2);
  std::vector<ClassicalDistribution<double>> erasure;
  const auto src = modulated_diagonal_source(skew, ModulationScheme{ModulationKind::PPM, 2, 2});
  for (const auto& pattern : src.patterns)
    erasure.push_back(thin_binomial(0.3, point_mass<double>(pattern, src.letter_basis)));
  CHECK(closed_form_ppm_mutual(skew, 0.3, 2) ==
        doctest::Approx(classical_mutual_information(skew.lambda, erasure)).epsilon(1e-10));
  CHECK((1.0 - eps) * closed_form_dynamical_entropy(skew) ==
        doctest::Approx(closed_form_ppm_mutual(skew, 0.3, 2)).epsilon(1e-12));
}

TEST_CASE("closed-form entropy matches the definitional machinery") {
  for (int m : {2, 3}) {
    Alphabet<double> alphabet;
    alphabet.lambda.assign(m, 1.0 / m);
    for (auto kind : {ModulationKind::PWM, ModulationKind::PPM}) {
      const double brute =
          brute_force_dynamical_entropy(alphabet, ModulationScheme{kind, 1, m});
      CHECK(brute == doctest::Approx(closed_form_dynamical_entropy(alphabet)).epsilon(1e-9));
    }
  }
}

TEST_CASE("brute force mutual entropy") {
  Alphabet<double> uniform{{0.5, 0.5}};

  // PPM: matches the closed form exactly.
  CHECK(brute_force_mutual(uniform, ModulationScheme{ModulationKind::PPM, 1, 2}, 0.5) ==
        doctest::Approx(closed_form_ppm_mutual(uniform, 0.5, 1)).epsilon(1e-9));

  // PWM probe point: the definitional value is the classical four-outcome
  // enumeration, not the closed form.
  CHECK(brute_force_mutual(uniform, ModulationScheme{ModulationKind::PWM, 1, 2}, 0.5) ==
        doctest::Approx(0.21576155433883570).epsilon(1e-9));

  for (auto kind : {ModulationKind::PWM, ModulationKind::PPM})
    CHECK(brute_force_mutual(uniform, ModulationScheme{kind, 1, 2}, 1.0) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-9));
}

TEST_CASE("modulator comparison report") {
  Alphabet<double> uniform{{0.5, 0.5}};
  auto report = compare_modulators(uniform, 0.5, 1);

  CHECK(report.s_tilde == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(report.r_ppm_closed == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(report.r_pwm_closed == doctest::Approx(0.375).epsilon(1e-12));
  CHECK(report.theorem5_pass());
  CHECK(report.theorem6_pass());

  // The PWM closed form and the definitional value disagree here; the
  // report must carry both and a note, adjudicating neither.
  CHECK(report.discrepancy_pwm > 1e-6);
  CHECK(report.discrepancy_ppm < 1e-9);
  REQUIRE(report.discrepancy_notes.size() == 1);
  CHECK(report.discrepancy_notes[0].find("PWM") != std::string::npos);

  for (double r : {report.r_ppm_closed, report.r_pwm_closed, report.r_ppm_brute,
                   report.r_pwm_brute}) {
    CHECK(r >= 0.0);
    CHECK(r <= 1.0 + 1e-9);
  }
}

TEST_CASE("ordering holds across a small grid") {
  for (double eta : {0.1, 0.5, 0.9})
    for (int d : {1, 2})
      for (int m : {2, 3}) {
        Alphabet<double> alphabet;
        alphabet.lambda.assign(m, 1.0 / m);
        auto report = compare_modulators(alphabet, eta, d);
        CHECK(report.theorem5_pass());
        CHECK(report.theorem6_pass());
        CHECK(report.i_ppm_brute <= report.s_tilde + 1e-9);
        CHECK(report.i_pwm_brute <= report.s_tilde + 1e-9);
      }
}

TEST_CASE("ppm brute force scales past the dense cap") {
  // 10-photon pulses over 4 slots: letter dimension 10^4, far beyond any
  // dense representation; the sparse path must still match the closed form.
  Alphabet<double> uniform{{0.25, 0.25, 0.25, 0.25}};
  const ModulationScheme ppm{ModulationKind::PPM, 9, 4};
  for (double eta : {0.25, 0.75})
    CHECK(brute_force_mutual(uniform, ppm, eta) ==
          doctest::Approx(closed_form_ppm_mutual(uniform, eta, 9)).epsilon(1e-9));
}

TEST_CASE("pam letters form a thinning channel") {
  // Uniform binary PAM through eta = 1/2 is the binary thinning channel.
  Alphabet<double> uniform{{0.5, 0.5}};
  const ModulationScheme pam{ModulationKind::PAM, 1, 2};
  CHECK(brute_force_mutual(uniform, pam, 0.5) ==
        doctest::Approx(0.21576155433883570).epsilon(1e-9));
  CHECK(brute_force_dynamical_entropy(uniform, pam) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-10));
}

TEST_CASE("ratio guard for zero-entropy alphabets") {
  Alphabet<double> certain{{1.0, 0.0}};
  auto report = compare_modulators(certain, 0.5, 1);
  CHECK(report.s_tilde == doctest::Approx(0.0));
  CHECK(report.r_ppm_closed == 0.0);
  CHECK(report.r_pwm_closed == 0.0);
}
