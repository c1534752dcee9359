#include <gtest/gtest.h>

#include <bnrefine/error.hpp>
#include <bnrefine/math.hpp>
#include <bnrefine/oracle.hpp>
#include <bnrefine/sampler.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>
#include <numeric>

#include "fixtures.hpp"

using namespace bnrefine;

namespace {

double log_sigmoid(double u) { return u >= 0 ? -std::log1p(std::exp(-u)) : u - std::log1p(std::exp(u)); }

double total_probability(const oracle::ExactPosterior& post) {
  double s = 0.0;
  for (const auto& e : post.entries) s += e.probability;
  return s;
}

}  // namespace

TEST(ExhaustivePosterior, NoCandidatesIsCertain) {
  auto schema = DomainSchema::binary(3);
  const std::vector<Example> data{{{0, 1, 1}}};
  const auto post = oracle::exhaustive_posterior(0, data, ArcPriorMatrix(3, 0.5), PriorConfig{}, schema);
  ASSERT_EQ(post.entries.size(), 1u);
  EXPECT_TRUE(post.entries[0].parents.empty());
  EXPECT_DOUBLE_EQ(post.entries[0].probability, 1.0);
}

TEST(ExhaustivePosterior, NoDataGivesThePrior) {
  auto schema = DomainSchema::binary(4);
  const auto post = oracle::exhaustive_posterior(3, {}, ArcPriorMatrix(4, 0.5), PriorConfig{}, schema);
  ASSERT_EQ(post.entries.size(), 8u);
  for (const auto& e : post.entries) EXPECT_NEAR(e.probability, 0.125, 1e-15);
  for (std::size_t y = 0; y < 3; ++y) EXPECT_NEAR(oracle::exhaustive_arc_posterior(post, y), 0.5, 1e-15);
}

TEST(ExhaustivePosterior, MandatoryArcIsCertain) {
  auto schema = DomainSchema::binary(3);
  ArcPriorMatrix m(3, 0.5);
  m.set(1, 2, 1.0);
  const auto data = forward_sample(fixtures::random_network(schema, {{}, {}, {0}}, 1), 100, 2);
  EXPECT_DOUBLE_EQ(oracle::exhaustive_arc_posterior(1, 2, data, m, PriorConfig{}, schema), 1.0);
}

TEST(ExhaustivePosterior, NormalisedAndMatchesDirectScores) {
  const auto truth = fixtures::five_variable_truth();
  const auto data = forward_sample(truth, 300, 3);
  ArcPriorMatrix m(5, 0.5);
  m.set(0, 4, 0.8);
  m.set(2, 4, 0.1);
  for (std::size_t x = 0; x < 5; ++x) {
    const auto post = oracle::exhaustive_posterior(x, data, m, PriorConfig{2.0}, truth.schema());
    EXPECT_NEAR(total_probability(post), 1.0, 1e-12);
    for (const auto& e : post.entries) {
      ParentIndexer idx(e.parents, truth.schema().arities());
      const double lml = log_marginal_likelihood(
          tally(x, idx, truth.schema(), data), alpha_for(x, e.parents, PriorConfig{2.0}, truth.schema()));
      EXPECT_NEAR(e.log_score, lml + log_structure_prior(x, e.parents, m, truth.schema()), 1e-9);
    }
  }
}

TEST(ExhaustivePosterior, IndependentOfExampleOrder) {
  const auto truth = fixtures::five_variable_truth();
  auto data = forward_sample(truth, 200, 4);
  const auto a = oracle::exhaustive_posterior(4, data, ArcPriorMatrix(5, 0.5), PriorConfig{}, truth.schema());
  std::reverse(data.begin(), data.end());
  const auto b = oracle::exhaustive_posterior(4, data, ArcPriorMatrix(5, 0.5), PriorConfig{}, truth.schema());
  ASSERT_EQ(a.entries.size(), b.entries.size());
  for (std::size_t k = 0; k < a.entries.size(); ++k) {
    EXPECT_EQ(a.entries[k].parents, b.entries[k].parents);
    EXPECT_NEAR(a.entries[k].log_score, b.entries[k].log_score, 1e-9);
  }
}

TEST(ExhaustivePosterior, GuardRefusesLargeProblems) {
  auto schema = DomainSchema::binary(17);
  EXPECT_THROW(oracle::exhaustive_posterior(16, {}, ArcPriorMatrix(17, 0.5), PriorConfig{}, schema), GuardError);
  EXPECT_NO_THROW(oracle::exhaustive_posterior(15, {}, ArcPriorMatrix(17, 0.5), PriorConfig{}, schema));
}

TEST(FullJoint, SingleVariableIsItsRow) {
  ConcreteNetwork net(DomainSchema::binary(1), {{}}, {fixtures::binary_cpt({0.75})});
  const auto joint = oracle::full_joint_enumeration(net);
  ASSERT_EQ(joint.size(), 2u);
  EXPECT_DOUBLE_EQ(joint[0], 0.25);
  EXPECT_DOUBLE_EQ(joint[1], 0.75);
}

TEST(FullJoint, IndependentIsOuterProduct) {
  DomainSchema schema({{"a", {"0", "1"}}, {"b", {"0", "1", "2"}}});
  Cpt b{3, 1, {0.2, 0.3, 0.5}};
  ConcreteNetwork net(schema, {{}, {}}, {fixtures::binary_cpt({0.4}), b});
  const auto joint = oracle::full_joint_enumeration(net);
  ASSERT_EQ(joint.size(), 6u);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      EXPECT_NEAR(joint[i * 3 + j], (i ? 0.4 : 0.6) * b.probs[j], 1e-15);
  EXPECT_NEAR(std::accumulate(joint.begin(), joint.end(), 0.0), 1.0, 1e-9);
}

TEST(FullJoint, GuardRefusesLargeJoints) {
  auto schema = DomainSchema::binary(21);
  std::vector<std::vector<std::size_t>> parents(21);
  std::vector<Cpt> cpts(21, fixtures::binary_cpt({0.5}));
  ConcreteNetwork net(schema, parents, cpts);
  EXPECT_THROW(oracle::full_joint_enumeration(net), GuardError);
}

TEST(Quadrature, ConstantLikelihoodGivesZero) {
  const double v = oracle::quadrature_marginal_1d(
      [](double) { return 0.0; },
      [](double u) { return -0.5 * std::log(2 * std::numbers::pi) - u * u / 2; }, oracle::Grid{});
  EXPECT_NEAR(v, 0.0, 1e-9);
}

TEST(Quadrature, BernoulliWithConjugatePriorMatchesBetaRatio) {
  // Beta(a, b) prior carried to logit coordinates: θ^a (1−θ)^b / B(a, b).
  for (auto [k, n, a, b] : {std::tuple{7.0, 20.0, 0.5, 0.5}, {40.0, 100.0, 1.0, 1.0}, {3.0, 3.0, 2.0, 0.7}}) {
    const double log_b_prior = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    const double v = oracle::quadrature_marginal_1d(
        [&](double u) { return k * log_sigmoid(u) + (n - k) * log_sigmoid(-u); },
        [&](double u) { return a * log_sigmoid(u) + b * log_sigmoid(-u) - log_b_prior; },
        oracle::Grid{-40, 40, 8001});
    const double exact = std::lgamma(k + a) + std::lgamma(n - k + b) - std::lgamma(n + a + b) - log_b_prior;
    EXPECT_NEAR(v, exact, 1e-6) << k << "/" << n;
  }
}

TEST(Quadrature, GridDoublingConverges) {
  auto ll = [](double u) { return 12 * log_sigmoid(u) + 30 * log_sigmoid(-u); };
  auto prior = [](double u) { return -0.5 * std::log(200 * std::numbers::pi) - u * u / 200; };
  const double coarse = oracle::quadrature_marginal_1d(ll, prior, oracle::Grid{-20, 20, 4001});
  const double fine = oracle::quadrature_marginal_1d(ll, prior, oracle::Grid{-20, 20, 8001});
  EXPECT_LT(std::abs(coarse - fine), 1e-6);
}
