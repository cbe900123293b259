#include <gtest/gtest.h>

#include <random>

#include "../oracles/oracles.hpp"
#include "helpers.hpp"
#include "kamforge/errors.hpp"
#include "kamforge/sampling.hpp"
#include "kamforge/series.hpp"

using namespace kamforge;
using namespace kamforge::testing_support;

namespace {

const TruncationSpec T1{1, 3, 3, 4};

}  // namespace

TEST(Series, LaurentInverse) {
  const auto a = S("rational", T1, R"([[[1],[0],0,"1"]])");
  const auto b = S("rational", T1, R"([[[-1],[0],0,"1"]])");
  EXPECT_EQ(a * b, S("rational", T1, R"([[[0],[0],0,"1"]])"));
}

TEST(Series, TruncatedProduct) {
  const TruncationSpec t{1, 2, 0, 0};
  const auto a = S("rational", t, R"([[[0],[0],0,"1"], [[0],[1],0,"1"]])");
  const auto b = S("rational", t, R"([[[0],[0],0,"1"], [[0],[1],0,"-1"]])");
  EXPECT_EQ(a * b, S("rational", t, R"([[[0],[0],0,"1"], [[0],[2],0,"-1"]])"));
}

TEST(Series, ProductPastWindowIsZero) {
  const TruncationSpec t{1, 2, 0, 0};
  const auto a = S("rational", t, R"([[[0],[2],0,"1"]])");
  const auto b = S("rational", t, R"([[[0],[1],0,"1"]])");
  const auto c = a * b;
  EXPECT_TRUE(c.is_zero());
  EXPECT_EQ(c.dropped(), 1u);
}

TEST(Series, InputOutsideWindowRejected) {
  EXPECT_THROW((void)S("rational", T1, R"([[[0],[4],0,"1"]])"), Error);
}

TEST(Series, ContextMismatch) {
  const auto a = S("rational", T1, R"([[[0],[1],0,"1"]])");
  const auto b = S("quadratic(2)", T1, R"([[[0],[1],0,"1"]])");
  try {
    (void)(a + b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ContextMismatch);
  }
}

TEST(Bracket, TorusPQ) {
  const auto p = S("rational", T1, R"([[[0],[1],0,"1"]])");
  const auto q = S("rational", T1, R"([[[1],[0],0,"1"]])");
  const auto qi = S("rational", T1, R"([[[-1],[0],0,"1"]])");
  EXPECT_EQ(poisson_bracket(p, q), q);
  EXPECT_EQ(poisson_bracket(p, qi), -qi);
}

TEST(Bracket, TwoFrequencyEigenvalue) {
  const TruncationSpec t{2, 2, 0, 2};
  const auto H = S("quadratic(2)", t, R"([[[0,0],[1,0],0,"1"], [[0,0],[0,1],0,"[0, 1, 2]"]])");
  const auto f = S("quadratic(2)", t, R"([[[1,-1],[0,0],0,"1"]])");
  EXPECT_EQ(poisson_bracket(H, f), S("quadratic(2)", t, R"([[[1,-1],[0,0],0,"[1, -1, 2]"]])"));
}

TEST(Bracket, SymplecticHyperbolicEigenvalue) {
  const TruncationSpec t{1, 6, 0, 6};
  const auto pq = S("rational", t, R"([[[1],[1],0,"1"]])", BracketMode::symplectic);
  for (int i = 0; i <= 3; ++i) {
    for (int j = 0; j <= 3; ++j) {
      const TermKey key = K({j}, {i});
      const auto f = PoissonSeries::monomial(ScalarContext::rational(), t, BracketMode::symplectic, key,
                                             Scalar::one(ScalarContext::rational()));
      // i is the p exponent, j the q exponent
      EXPECT_EQ(poisson_bracket(pq, f), f.scaled(Scalar::from_int(ScalarContext::rational(), j - i)));
    }
  }
}

TEST(Bracket, ModeMismatchRejected) {
  const auto a = S("rational", T1, R"([[[0],[1],0,"1"]])");
  const auto b = S("rational", T1, R"([[[0],[1],0,"1"]])", BracketMode::symplectic);
  EXPECT_THROW((void)poisson_bracket(a, b), Error);
}

TEST(Bracket, MatchesDerivativeOracle) {
  std::mt19937_64 rng(3);
  const TruncationSpec t{2, 5, 3, 5};
  SeriesShape shape;
  shape.max_terms = 5;
  for (BracketMode mode : {BracketMode::torus, BracketMode::symplectic}) {
    for (const char* ctx : {"rational", "quadratic(3)"}) {
      for (int i = 0; i < 100; ++i) {
        const auto c = io::parse_context(ctx);
        const auto f = random_series(c, t, mode, shape, rng);
        const auto g = random_series(c, t, mode, shape, rng);
        EXPECT_EQ(poisson_bracket(f, g), oracle::bracket(f, g));
      }
    }
  }
}

TEST(Bracket, FlippedIsNegated) {
  std::mt19937_64 rng(5);
  const TruncationSpec t{2, 4, 3, 4};
  for (int i = 0; i < 50; ++i) {
    const auto f = random_series(ScalarContext::rational(), t, BracketMode::torus, {}, rng);
    const auto g = random_series(ScalarContext::rational(), t, BracketMode::torus, {}, rng);
    EXPECT_EQ(poisson_bracket_flipped(f, g), -poisson_bracket(f, g));
  }
}

TEST(Average, KeepsQFreePart) {
  EXPECT_TRUE(average(S("rational", T1, R"([[[1],[1],0,"1"]])")).is_zero());
  EXPECT_EQ(average(S("rational", T1, R"([[[0],[2],0,"1"], [[1],[1],0,"1"]])")),
            S("rational", T1, R"([[[0],[2],0,"1"]])"));
  const auto f = S("rational", T1, R"([[[0],[2],1,"3"], [[0],[0],2,"1/2"]])");
  EXPECT_EQ(average(f), f);
}

TEST(Flow, ZeroGeneratorIsIdentity) {
  const auto f = S("rational", T1, R"([[[1],[1],0,"2"], [[0],[2],1,"1"]])");
  const Generator g = HamiltonianGenerator{PoissonSeries::empty_like(f)};
  EXPECT_EQ(flow_apply(g, f), f);
}

TEST(Flow, TIsCentral) {
  const auto t = S("rational", T1, R"([[[0],[0],1,"1"]])");
  const Generator h = HamiltonianGenerator{S("rational", T1, R"([[[1],[1],1,"1"], [[-1],[2],1,"3"]])")};
  const Generator tr = TranslationGenerator{1, {Scalar(Rational(-1))}};
  EXPECT_EQ(flow_apply(h, t), t);
  EXPECT_EQ(flow_apply(tr, t), t);
}

TEST(Flow, RemovesOrderOneQTerms) {
  const auto S1 = S("rational", T1, R"([[[-1],[1],1,"1"], [[1],[1],1,"-1"]])");
  const auto f = S("rational", T1, R"([[[0],[1],0,"1"], [[0],[2],1,"1"], [[1],[1],1,"1"], [[-1],[1],1,"1"]])");
  const auto g = flow_apply(HamiltonianGenerator{S1}, f);
  EXPECT_TRUE(g.coeff(K({1}, {1}, 1)).is_zero());
  EXPECT_TRUE(g.coeff(K({-1}, {1}, 1)).is_zero());
  EXPECT_EQ(g.coeff(K({0}, {2}, 1)), Scalar(Rational(1)));
}

TEST(Flow, OrderZeroGeneratorRejected) {
  const auto S0 = S("rational", T1, R"([[[1],[1],0,"1"]])");
  try {
    (void)flow_apply(HamiltonianGenerator{S0}, S0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::GeneratorOrderViolation);
  }
  EXPECT_THROW(validate(TranslationGenerator{0, {Scalar(Rational(1))}}), Error);
}

TEST(Flow, InverseRoundTrip) {
  std::mt19937_64 rng(9);
  const TruncationSpec t{2, 8, 3, 8};
  SeriesShape gs;
  gs.min_t = 1;
  for (int i = 0; i < 30; ++i) {
    const auto f = random_series(ScalarContext::rational(), t, BracketMode::torus, {}, rng);
    const auto s = random_series(ScalarContext::rational(), t, BracketMode::torus, gs, rng);
    const std::vector<Generator> hs{HamiltonianGenerator{s}, inverse(HamiltonianGenerator{s})};
    EXPECT_EQ(compose_flows(hs, f), f);
    const Generator tr = TranslationGenerator{1, {Scalar(Rational(2)), Scalar(Rational(-3, 2))}};
    EXPECT_EQ(compose_flows({tr, inverse(tr)}, f), f);
  }
  const auto f = random_series(ScalarContext::rational(), t, BracketMode::torus, {}, rng);
  EXPECT_EQ(compose_flows({}, f), f);
}

TEST(Flow, TranslationSubstitutes) {
  const TruncationSpec t{1, 3, 3, 0};
  const auto f = S("rational", t, R"([[[0],[2],0,"1"]])");
  const auto g = flow_apply(TranslationGenerator{1, {Scalar(Rational(-1))}}, f);
  // (p - t)^2
  EXPECT_EQ(g, S("rational", t, R"([[[0],[2],0,"1"], [[0],[1],1,"-2"], [[0],[0],2,"1"]])"));
}
