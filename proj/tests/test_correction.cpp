#include <doctest.h>

#include <cmath>
#include <vector>

#include "ccmn/correction.hpp"
#include "ccmn/noise.hpp"
#include "ccmn/rng.hpp"

using namespace ccmn;
using Kind = SurrogateLoss::Kind;

namespace {

const SurrogateLoss kSquare(Kind::Square);

NoiseSpec random_valid_spec(Rng& rng, std::size_t q) {
  NoiseSpec spec;
  for (std::size_t j = 0; j < q; ++j) {
    const double rp = rng.uniform(0.0, 0.8);
    const double rn = rng.uniform(0.0, 0.95 - rp);
    spec.rho_pos.push_back(rp);
    spec.rho_neg.push_back(rn);
  }
  spec.validate();
  return spec;
}

LabelVector random_labels(Rng& rng, std::size_t q) {
  std::vector<int8_t> v(q);
  for (auto& y : v) y = rng.below(2) == 0 ? -1 : 1;
  return LabelVector(std::move(v));
}

std::vector<double> random_scores(Rng& rng, std::size_t q, double lo = -3.0, double hi = 3.0) {
  std::vector<double> f(q);
  for (auto& x : f) x = rng.uniform(lo, hi);
  return f;
}

}  // namespace

TEST_CASE("independent correction reproduces the hand-evaluated values") {
  // rho_pos = 0.2, rho_neg = 0.1, square loss.
  CHECK(corrected_phi_independent(kSquare, 1.0, +1, 0.2, 0.1) ==
        doctest::Approx(-1.1428571428571428).epsilon(1e-12));
  CHECK(corrected_phi_independent(kSquare, 1.0, -1, 0.2, 0.1) ==
        doctest::Approx(4.571428571428571).epsilon(1e-12));
  // Zero noise collapses to the plain margin loss.
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const double f = rng.uniform(-4.0, 4.0);
    const int y = rng.below(2) == 0 ? -1 : 1;
    CHECK(corrected_phi_independent(kSquare, f, y, 0.0, 0.0) ==
          kSquare.value(static_cast<double>(y) * f));
  }
  CHECK_THROWS_AS(corrected_phi_independent(kSquare, 1.0, +1, 0.6, 0.4), InvalidNoiseSpec);
  CHECK_THROWS_AS(corrected_phi_independent(kSquare, 1.0, 0, 0.1, 0.1), ShapeError);
}

TEST_CASE("hamming correction sums the per-label terms") {
  NoiseSpec spec{{0.2, 0.0}, {0.1, 0.0}};
  const std::vector<double> f{1.0, 1.0};
  const LabelVector y({+1, -1});
  CHECK(corrected_loss_hamming(kSquare, f, y, spec) ==
        doctest::Approx(2.857142857142857).epsilon(1e-12));

  const std::vector<double> f1{1.0};
  CHECK(corrected_loss_hamming(kSquare, f1, LabelVector({+1}), NoiseSpec{{0.2}, {0.1}}) ==
        corrected_phi_independent(kSquare, 1.0, +1, 0.2, 0.1));

  CHECK_THROWS_AS(corrected_loss_hamming(kSquare, f1, y, spec), ShapeError);
}

TEST_CASE("pairwise table matches the closed-form coefficients") {
  SUBCASE("zero noise is the identity correction") {
    auto t = pairwise_correction_table(NoiseSpec::zero(2), 0, 1);
    CHECK(t.kappa == 1.0);
    CHECK(t.coef[0][0] == 1.0);
    CHECK(t.coef[0][1] == 0.0);
    CHECK(t.coef[1][0] == 0.0);
    CHECK(t.coef[1][1] == 1.0);
    for (int row : {2, 3}) {
      CHECK(t.coef[row][0] == 0.0);
      CHECK(t.coef[row][1] == 0.0);
    }
  }
  SUBCASE("worked example") {
    NoiseSpec spec{{0.1, 0.2}, {0.2, 0.1}};
    auto t = pairwise_correction_table(spec, 0, 1);
    const double kappa = 1.0 / 0.49;
    CHECK(t.kappa == doctest::Approx(kappa).epsilon(1e-12));
    CHECK(t.coef[0][0] == doctest::Approx(0.64 * kappa).epsilon(1e-12));
    CHECK(t.coef[0][1] == doctest::Approx(0.01 * kappa).epsilon(1e-12));
    CHECK(t.coef[2][0] == doctest::Approx(-0.16 * kappa).epsilon(1e-12));
    CHECK(t.coef[2][1] == doctest::Approx(-0.09 * kappa).epsilon(1e-12));
  }
  CHECK_THROWS_AS(pairwise_correction_table(NoiseSpec::zero(2), 1, 1), InvalidPair);
  CHECK_THROWS_AS(pairwise_correction_table(NoiseSpec::zero(2), 0, 5), InvalidPair);
}

TEST_CASE("linear-system derivation agrees with the closed form") {
  SUBCASE("zero noise returns the clean pair losses") {
    auto x = derive_pairwise_by_linsolve(NoiseSpec::zero(2), 0, 1, 0.7, kSquare);
    CHECK(x[0] == doctest::Approx(kSquare.value(0.7)).epsilon(1e-14));
    CHECK(x[1] == doctest::Approx(kSquare.value(-0.7)).epsilon(1e-14));
    CHECK(x[2] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(x[3] == doctest::Approx(0.0).epsilon(1e-14));
  }
  SUBCASE("worked example at f_jk = 0.5") {
    NoiseSpec spec{{0.1, 0.2}, {0.2, 0.1}};
    auto x = derive_pairwise_by_linsolve(spec, 0, 1, 0.5, kSquare);
    CHECK(x[0] == doctest::Approx(0.37244897959183676).epsilon(1e-12));
    CHECK(x[2] == doctest::Approx(-0.4948979591836735).epsilon(1e-12));
  }
  SUBCASE("1000 random draws per loss kind") {
    Rng rng(11);
    for (Kind kind : {Kind::Square, Kind::Hinge, Kind::Sigmoid}) {
      SurrogateLoss loss(kind);
      for (int i = 0; i < 1000; ++i) {
        NoiseSpec spec = random_valid_spec(rng, 2);
        const double f_jk = rng.uniform(-3.0, 3.0);
        auto solved = derive_pairwise_by_linsolve(spec, 0, 1, f_jk, loss);
        auto table = pairwise_correction_table(spec, 0, 1);
        for (int row = 0; row < 4; ++row)
          CHECK(std::fabs(solved[row] - table.apply(row, loss, f_jk)) <= 1e-9);
      }
    }
  }
}

TEST_CASE("ranking correction over pairs") {
  SUBCASE("zero noise reduces to the plain pairwise surrogate") {
    const std::vector<double> f{0.8, -0.4};
    CHECK(corrected_loss_ranking(kSquare, f, LabelVector({+1, -1}), NoiseSpec::zero(2)) ==
          kSquare.value(f[0] - f[1]));
    CHECK(corrected_loss_ranking(kSquare, f, LabelVector({+1, +1}), NoiseSpec::zero(2)) == 0.0);
  }
  SUBCASE("single pair worked example") {
    NoiseSpec spec{{0.1, 0.2}, {0.2, 0.1}};
    const std::vector<double> f{0.5, 0.0};
    CHECK(corrected_loss_ranking(kSquare, f, LabelVector({+1, -1}), spec) ==
          doctest::Approx(0.37244897959183676).epsilon(1e-12));
  }
  const std::vector<double> f1{1.0};
  CHECK_THROWS_AS(corrected_loss_ranking(kSquare, f1, LabelVector({+1}), NoiseSpec::zero(1)),
                  ShapeError);
}

TEST_CASE("dummy label loss is the independent correction on score gaps") {
  SUBCASE("zero noise and zero threshold reduce to the plain surrogate") {
    Rng rng(17);
    for (int i = 0; i < 50; ++i) {
      const auto f = random_scores(rng, 4);
      const auto y = random_labels(rng, 4);
      CHECK(dummy_label_loss(kSquare, f, 0.0, y, NoiseSpec::zero(4)) ==
            plain_loss_hamming(kSquare, f, y));
    }
  }
  SUBCASE("worked single-label example") {
    const std::vector<double> f{1.5};
    CHECK(dummy_label_loss(kSquare, f, 0.5, LabelVector({+1}), NoiseSpec{{0.2}, {0.1}}) ==
          doctest::Approx(-1.1428571428571428).epsilon(1e-12));
  }
  SUBCASE("invariant under common shifts") {
    Rng rng(19);
    NoiseSpec spec = random_valid_spec(rng, 3);
    const auto y = random_labels(rng, 3);
    auto f = random_scores(rng, 3);
    const double f0 = rng.uniform(-1.0, 1.0);
    const double base = dummy_label_loss(kSquare, f, f0, y, spec);
    const double shift = 2.375;
    for (auto& x : f) x += shift;
    CHECK(dummy_label_loss(kSquare, f, f0 + shift, y, spec) ==
          doctest::Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("uPML hamming specialization") {
  SUBCASE("worked example") {
    const std::vector<double> f{0.0};
    const std::vector<double> rho{0.5};
    CHECK(upml_loss_hamming(kSquare, f, LabelVector({-1}), rho) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("zero rates reduce to the plain surrogate on observed labels") {
    Rng rng(23);
    const std::vector<double> rho(5, 0.0);
    for (int i = 0; i < 50; ++i) {
      const auto f = random_scores(rng, 5);
      const auto y = random_labels(rng, 5);
      CHECK(upml_loss_hamming(kSquare, f, y, rho) ==
            doctest::Approx(plain_loss_hamming(kSquare, f, y)).epsilon(1e-12));
    }
  }
  SUBCASE("equals the general correction with rho_pos = 0") {
    Rng rng(29);
    for (Kind kind : {Kind::Square, Kind::Hinge, Kind::Sigmoid}) {
      SurrogateLoss loss(kind);
      for (int i = 0; i < 200; ++i) {
        const std::size_t q = 1 + rng.below(5);
        std::vector<double> rho(q);
        for (auto& r : rho) r = rng.uniform(0.0, 0.9);
        NoiseSpec spec{std::vector<double>(q, 0.0), rho};
        const auto f = random_scores(rng, q);
        const auto y = random_labels(rng, q);
        CHECK(std::fabs(upml_loss_hamming(loss, f, y, rho) -
                        corrected_loss_hamming(loss, f, y, spec)) <= 1e-12);
      }
    }
  }
  const std::vector<double> f{0.0};
  CHECK_THROWS_AS(upml_loss_hamming(kSquare, f, LabelVector({-1}), std::vector<double>{1.0}),
                  InvalidNoiseSpec);
}

TEST_CASE("uPML ranking specialization") {
  SUBCASE("worked example") {
    const std::vector<double> f{1.0, 0.0};
    const std::vector<double> rho{0.5, 0.5};
    CHECK(upml_loss_ranking(kSquare, f, LabelVector({-1, -1}), rho) ==
          doctest::Approx(-8.0).epsilon(1e-12));
  }
  SUBCASE("zero rates reduce to the plain pairwise surrogate") {
    Rng rng(31);
    const std::vector<double> rho(4, 0.0);
    for (int i = 0; i < 50; ++i) {
      const auto f = random_scores(rng, 4);
      const auto y = random_labels(rng, 4);
      CHECK(upml_loss_ranking(kSquare, f, y, rho) ==
            doctest::Approx(plain_loss_ranking(kSquare, f, y)).epsilon(1e-12));
    }
  }
  SUBCASE("equals the general correction with rho_pos = 0") {
    Rng rng(37);
    for (Kind kind : {Kind::Square, Kind::Hinge, Kind::Sigmoid}) {
      SurrogateLoss loss(kind);
      for (int i = 0; i < 200; ++i) {
        const std::size_t q = 2 + rng.below(4);
        std::vector<double> rho(q);
        for (auto& r : rho) r = rng.uniform(0.0, 0.9);
        NoiseSpec spec{std::vector<double>(q, 0.0), rho};
        const auto f = random_scores(rng, q);
        const auto y = random_labels(rng, q);
        CHECK(std::fabs(upml_loss_ranking(loss, f, y, rho) -
                        corrected_loss_ranking(loss, f, y, spec)) <= 1e-12);
      }
    }
  }
}

TEST_CASE("unbiasedness of the hamming correction under exact enumeration") {
  Rng rng(41);
  for (Kind kind : {Kind::Square, Kind::Hinge, Kind::Sigmoid}) {
    SurrogateLoss loss(kind);
    for (int trial = 0; trial < 60; ++trial) {
      const std::size_t q = 1 + rng.below(6);
      NoiseSpec spec = random_valid_spec(rng, q);
      const auto f = random_scores(rng, q);
      const auto y_clean = random_labels(rng, q);
      double expectation = 0.0;
      for (const auto& [y_noisy, prob] : enumerate_flip_distribution(y_clean, spec))
        expectation += prob * corrected_loss_hamming(loss, f, y_noisy, spec);
      CHECK(std::fabs(expectation - plain_loss_hamming(loss, f, y_clean)) <= 1e-9);
    }
  }
}

TEST_CASE("unbiasedness of the ranking correction under exact enumeration") {
  Rng rng(43);
  for (Kind kind : {Kind::Square, Kind::Hinge, Kind::Sigmoid}) {
    SurrogateLoss loss(kind);
    for (int trial = 0; trial < 60; ++trial) {
      const std::size_t q = 2 + rng.below(5);
      NoiseSpec spec = random_valid_spec(rng, q);
      const auto f = random_scores(rng, q);
      const auto y_clean = random_labels(rng, q);
      double expectation = 0.0;
      for (const auto& [y_noisy, prob] : enumerate_flip_distribution(y_clean, spec))
        expectation += prob * corrected_loss_ranking(loss, f, y_noisy, spec);
      CHECK(std::fabs(expectation - plain_loss_ranking(loss, f, y_clean)) <= 1e-9);
    }
  }
}

TEST_CASE("bound constants") {
  SUBCASE("zero noise gives all ones") {
    auto c = compute_bound_constants(NoiseSpec::zero(4));
    CHECK(c.mu_independent == 1.0);
    CHECK(c.mu_dependent == 1.0);
    CHECK(c.kappa_max == 1.0);
  }
  SUBCASE("uniform rates worked example") {
    NoiseSpec spec{{0.2, 0.2}, {0.1, 0.1}};
    auto c = compute_bound_constants(spec);
    CHECK(c.mu_independent == doctest::Approx(1.4285714285714286).epsilon(1e-12));
    CHECK(c.mu_dependent == doctest::Approx(2.2448979591836737).epsilon(1e-12));
    CHECK(c.kappa_max == doctest::Approx(1.4285714285714286).epsilon(1e-12));
  }
  SUBCASE("dependent mu dominates independent mu") {
    Rng rng(47);
    for (int i = 0; i < 200; ++i) {
      auto c = compute_bound_constants(random_valid_spec(rng, 1 + rng.below(6)));
      CHECK(c.mu_dependent >= c.mu_independent - 1e-15);
    }
  }
}

TEST_CASE("objective names round-trip") {
  for (ObjectiveKind kind :
       {ObjectiveKind::HammingCorrected, ObjectiveKind::RankingCorrected,
        ObjectiveKind::HammingPlain, ObjectiveKind::RankingPlain, ObjectiveKind::UpmlHamming,
        ObjectiveKind::UpmlRanking})
    CHECK(objective_from_name(objective_name(kind)) == kind);
  CHECK_THROWS_AS(objective_from_name("nope"), ParseError);
}

TEST_CASE("training objective validation") {
  TrainingObjective obj;
  obj.kind = ObjectiveKind::HammingCorrected;
  obj.spec = NoiseSpec::zero(3);
  CHECK_NOTHROW(obj.validate(3));
  CHECK_THROWS_AS(obj.validate(2), ShapeError);

  obj.dummy_threshold = true;
  CHECK_THROWS_AS(obj.validate(3), Error);  // dummy needs a ranking objective

  TrainingObjective upml;
  upml.kind = ObjectiveKind::UpmlHamming;
  upml.spec = NoiseSpec{{0.1, 0.0}, {0.2, 0.2}};
  CHECK_THROWS_AS(upml.validate(2), InvalidNoiseSpec);
  upml.spec = NoiseSpec{{0.0, 0.0}, {0.2, 0.2}};
  CHECK_NOTHROW(upml.validate(2));
}

TEST_CASE("plain objectives ignore the configured rates") {
  Rng rng(53);
  TrainingObjective plain;
  plain.kind = ObjectiveKind::HammingPlain;
  plain.spec = NoiseSpec{{0.3, 0.3}, {0.3, 0.3}};  // must be ignored
  for (int i = 0; i < 20; ++i) {
    const auto f = random_scores(rng, 2);
    const auto y = random_labels(rng, 2);
    CHECK(plain.value_and_grad(f, y) == plain_loss_hamming(kSquare, f, y));
  }
}
