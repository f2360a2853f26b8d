// Copyright 2026 The ldpfo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "core/domain.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "oracles/frequency_oracle.h"
#include "postprocess/estimators.h"
#include "support/oracles.h"

namespace ldpfo {
namespace {

using ::testing::DoubleNear;
using ::testing::ElementsAre;
using ::testing::Pointwise;

EstimateVector Est(std::vector<double> v) { return EstimateVector{std::move(v)}; }

double Sum(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0);
}

NoiseModel FixedNoise(double sigma, int64_t n) {
  NoiseModel noise;
  noise.params = PerturbParams::Olh(1.0, 2).value();
  noise.n = n;
  noise.sigma_sq_approx = sigma * sigma;
  return noise;
}

TEST(BaseTest, Identity) {
  const ProcessedEstimate out = Base(Est({0.5, 0.6, -0.1}));
  EXPECT_THAT(out.est, ElementsAre(0.5, 0.6, -0.1));
  EXPECT_EQ(out.method, Method::kBase);
  EXPECT_FALSE(out.nonneg_guaranteed);
  EXPECT_FALSE(out.sums_to_one_guaranteed);
}

TEST(BasePosTest, ClipsNegatives) {
  EXPECT_THAT(BasePos(Est({0.5, -0.2, 0.7})).est, ElementsAre(0.5, 0.0, 0.7));
  EXPECT_THAT(BasePos(Est({0.1, 0.2})).est, ElementsAre(0.1, 0.2));
  EXPECT_TRUE(BasePos(Est({0.1})).nonneg_guaranteed);
}

TEST(PostPosTest, ClipsQueryAnswers) {
  EXPECT_EQ(PostPos(-0.03), 0.0);
  EXPECT_EQ(PostPos(0.4), 0.4);
  const EstimateVector est = Est({0.2, -0.1, 0.0, -0.4});
  const ProcessedEstimate out = PostPosEstimate(est);
  EXPECT_EQ(out.est, est.est);
  EXPECT_TRUE(out.clip_query_answers);
  // On singleton queries post-pos is base-pos.
  const ProcessedEstimate pos = BasePos(est);
  for (size_t v = 0; v < est.d(); ++v) {
    EXPECT_EQ(PostPos(out.est[v]), pos.est[v]);
  }
}

TEST(InverseNormalCdfTest, MatchesBisection) {
  for (double p : {1e-10, 1e-4, 0.01, 0.2, 0.5, 0.7, 0.975, 0.998046875,
                   1 - 1e-9}) {
    EXPECT_NEAR(InverseNormalCdf(p), testing::InverseNormalCdfBisection(p),
                1e-9)
        << "p=" << p;
  }
}

TEST(BaseCutTest, ThresholdExample) {
  const NoiseModel noise = FixedNoise(0.01, 1000);
  auto cfg = CutConfig::For(2.0, 1024, noise);
  ASSERT_TRUE(cfg.ok());
  EXPECT_NEAR(cfg->threshold, 0.028856349124267572, 1e-12);
  EXPECT_NEAR(cfg->threshold,
              testing::InverseNormalCdfBisection(1 - 2.0 / 1024) * 0.01, 1e-12);
}

TEST(BaseCutTest, KeepsStrictlyAboveThreshold) {
  CutConfig cfg{2.0, 0.029};
  EXPECT_THAT(BaseCut(Est({0.5, 0.01, 0.029, -0.3}), cfg).est,
              ElementsAre(0.5, 0.0, 0.0, 0.0));
}

TEST(BaseCutTest, AlphaRange) {
  const NoiseModel noise = FixedNoise(0.01, 1000);
  EXPECT_FALSE(CutConfig::For(0.0, 10, noise).ok());
  EXPECT_FALSE(CutConfig::For(10.0, 10, noise).ok());
}

TEST(NormTest, AddsCommonShift) {
  EXPECT_THAT(Norm(Est({0.3, 0.3, 0.2})).est,
              Pointwise(DoubleNear(1e-15), {0.3 + 0.2 / 3, 0.3 + 0.2 / 3,
                                            0.2 + 0.2 / 3}));
  EXPECT_THAT(Norm(Est({0.25, 0.75})).est, ElementsAre(0.25, 0.75));
}

TEST(NormTest, GrrEstimatesAlreadySumToOne) {
  auto dist = GenerateZipf(20, 3000, 1.1);
  auto params = PerturbParams::Grr(1.0, 20).value();
  auto counts = SimulateSupportCounts(SampleUsers(*dist, RngSeed{3}), params,
                                      RngSeed{4});
  auto est = Estimate(*counts, params);
  EXPECT_NEAR(Sum(est->est), 1.0, 1e-12);
  EXPECT_THAT(Norm(*est).est, Pointwise(DoubleNear(1e-12), est->est));
}

TEST(NormMulTest, HandExample) {
  auto r = NormMul(Est({0.8, 0.4, -0.2}));
  ASSERT_TRUE(r.ok());
  EXPECT_NEAR(r->scale, 5.0 / 6.0, 1e-15);
  EXPECT_THAT(r->est.est,
              Pointwise(DoubleNear(1e-15), {2.0 / 3.0, 1.0 / 3.0, 0.0}));
  EXPECT_THAT(r->zero_set, ElementsAre(2u));
}

TEST(NormMulTest, ScalesUp) {
  auto r = NormMul(Est({2.0, 2.0}));
  EXPECT_THAT(r->est.est, ElementsAre(0.5, 0.5));
  auto same = NormMul(Est({0.25, 0.75}));
  EXPECT_EQ(same->scale, 1.0);
  EXPECT_THAT(same->est.est, ElementsAre(0.25, 0.75));
}

TEST(NormMulTest, NeedsPositiveEntry) {
  EXPECT_FALSE(NormMul(Est({-0.1, 0.0})).ok());
}

TEST(NormSubTest, HandExample) {
  const SolverResult r = NormSub(Est({0.5, 0.4, 0.3, -0.2}));
  EXPECT_NEAR(r.shift, -1.0 / 15.0, 1e-15);
  EXPECT_THAT(r.est.est, Pointwise(DoubleNear(1e-15),
                                   {0.5 - 1.0 / 15, 0.4 - 1.0 / 15,
                                    0.3 - 1.0 / 15, 0.0}));
  EXPECT_THAT(r.zero_set, ElementsAre(3u));
  EXPECT_THAT(r.est.est,
              Pointwise(DoubleNear(1e-12), testing::DykstraSimplexProjection(
                                               {0.5, 0.4, 0.3, -0.2})));
}

TEST(NormSubTest, ConsistentInputUnchanged) {
  EXPECT_THAT(NormSub(Est({0.5, 0.25, 0.25, 0.0})).est.est,
              ElementsAre(0.5, 0.25, 0.25, 0.0));
}

TEST(NormSubTest, MatchesQpOracle) {
  std::mt19937_64 gen(101);
  std::uniform_int_distribution<size_t> dim(1, 32);
  for (int trial = 0; trial < 150; ++trial) {
    const auto y = testing::UniformVector(gen, dim(gen), -0.5, 1.0);
    const SolverResult r = NormSub(y);
    const auto oracle = testing::DykstraSimplexProjection(y);
    ASSERT_THAT(r.est.est, Pointwise(DoubleNear(1e-9), oracle))
        << "trial " << trial;
    std::vector<size_t> zeros;
    for (size_t i = 0; i < y.size(); ++i) {
      if (r.est.est[i] == 0.0) zeros.push_back(i);
    }
    EXPECT_EQ(r.zero_set, zeros);
  }
}

TEST(NormSubTest, AllBelowZero) {
  const SolverResult r = NormSub(Est({-3.0, -1.0, -2.0}));
  EXPECT_THAT(r.est.est, ElementsAre(0.0, 1.0, 0.0));
}

TEST(NormCutTest, HandExample) {
  const SolverResult r = NormCut(Est({0.6, 0.5, 0.05, -0.1}));
  EXPECT_THAT(r.est.est, ElementsAre(0.6, 0.0, 0.0, 0.0));
  EXPECT_EQ(r.threshold, 0.6);
}

TEST(NormCutTest, SmallPositiveMassOnlyClips) {
  EXPECT_THAT(NormCut(Est({0.5, 0.4, -0.1})).est.est,
              ElementsAre(0.5, 0.4, 0.0));
  EXPECT_THAT(NormCut(Est({0.5, 0.3, 0.2})).est.est,
              ElementsAre(0.5, 0.3, 0.2));
}

TEST(NormCutTest, TiesStayTogether) {
  // 0.4 + 0.3 + 0.3 = 1 keeps both 0.3 entries; one more and both go.
  EXPECT_THAT(NormCut(Est({0.4, 0.3, 0.3, 0.2})).est.est,
              ElementsAre(0.4, 0.3, 0.3, 0.0));
  EXPECT_THAT(NormCut(Est({0.5, 0.3, 0.3})).est.est,
              ElementsAre(0.5, 0.0, 0.0));
}

TEST(NormCutTest, NothingFits) {
  const SolverResult r = NormCut(Est({1.5, 1.2}));
  EXPECT_THAT(r.est.est, ElementsAre(0.0, 0.0));
}

class MleApxTest : public ::testing::Test {
 protected:
  static void ExpectMatchesOracle(const std::vector<double>& est,
                                  const PerturbParams& params) {
    auto r = MleApx(Est(est), params);
    ASSERT_TRUE(r.ok()) << r.status();
    const auto& f = r->est.est;
    for (double x : f) EXPECT_GE(x, 0.0);
    EXPECT_NEAR(Sum(f), 1.0, 1e-9);
    const auto oracle = testing::MleDualOracle(est, params);
    const double mine = testing::MleObjective(f, est, params);
    const double ref = testing::MleObjective(oracle, est, params);
    EXPECT_LE(mine, ref + 1e-6 * std::max(1.0, std::abs(ref)));
    EXPECT_NEAR(mine, ref, 1e-6 * std::max(1e-12, std::abs(ref)));
  }
};

TEST_F(MleApxTest, ConsistentInputUnchanged) {
  auto params = PerturbParams::Olh(1.0, 4).value();
  auto r = MleApx(Est({0.5, 0.25, 0.25, 0.0}), params);
  ASSERT_TRUE(r.ok());
  EXPECT_NEAR(r->multiplier, 0.0, 1e-15);
  EXPECT_THAT(r->est.est,
              Pointwise(DoubleNear(1e-15), {0.5, 0.25, 0.25, 0.0}));
}

TEST_F(MleApxTest, HandInstance) {
  ExpectMatchesOracle({0.5, 0.4, 0.3, -0.2}, PerturbParams::Olh(1.0, 4).value());
}

TEST_F(MleApxTest, RandomInstances) {
  std::mt19937_64 gen(202);
  std::uniform_int_distribution<size_t> dim(2, 16);
  for (double eps : {0.5, 1.0, 2.0}) {
    for (int trial = 0; trial < 20; ++trial) {
      const size_t d = dim(gen);
      ExpectMatchesOracle(testing::UniformVector(gen, d, -0.5, 1.0),
                          PerturbParams::Olh(eps, d).value());
      ExpectMatchesOracle(testing::UniformVector(gen, d, -0.1, 0.3),
                          PerturbParams::Grr(eps, d).value());
    }
  }
}

// -A/B with A = q(1-q), B = (p-q)(1-p-q); +inf when B = 0.
double VarianceBound(const PerturbParams& params) {
  const double b = (params.p - params.q) * (1.0 - params.p - params.q);
  return b > 0.0 ? -params.q * (1.0 - params.q) / b : -INFINITY;
}

TEST_F(MleApxTest, OptimalAboveVarianceBound) {
  std::mt19937_64 gen(212);
  for (double eps : {4.0, 6.0, 8.0}) {
    for (int trial = 0; trial < 20; ++trial) {
      const size_t d = 2 + trial % 15;
      for (const auto& params : {PerturbParams::Olh(eps, d).value(),
                                 PerturbParams::Grr(eps, d).value()}) {
        const double lo = std::max(VarianceBound(params), -1.0);
        ExpectMatchesOracle(testing::UniformVector(gen, d, lo, 1.0), params);
      }
    }
  }
}

TEST_F(MleApxTest, BelowVarianceBoundStaysOrdered) {
  // OLH at eps = 4 has -A/B near -0.076. The exact minimizer lifts the two
  // most negative entries above the zero at 0.05; the solver keeps the order.
  const std::vector<double> y = {-0.276, 0.144, -0.351, -0.040,
                                 0.901,  0.716, 0.051,  0.943};
  const PerturbParams params = PerturbParams::Olh(4.0, y.size()).value();
  ASSERT_LT(*std::min_element(y.begin(), y.end()), VarianceBound(params));
  auto r = MleApx(Est(y), params);
  ASSERT_TRUE(r.ok());
  EXPECT_NEAR(Sum(r->est.est), 1.0, 1e-12);
  for (size_t i = 0; i < y.size(); ++i) {
    for (size_t j = 0; j < y.size(); ++j) {
      if (y[i] <= y[j]) EXPECT_LE(r->est.est[i], r->est.est[j]);
    }
  }
  const auto oracle = testing::MleDualOracle(y, params);
  EXPECT_GT(oracle[2], oracle[6]);
  EXPECT_GT(testing::MleObjective(r->est.est, y, params),
            testing::MleObjective(oracle, y, params));
}

TEST_F(MleApxTest, EverythingBelowBound) {
  auto r = MleApx(Est({-5.0, -5.0, -5.0, -5.0, -4.0}),
                  PerturbParams::Olh(1.0, 5).value());
  ASSERT_TRUE(r.ok()) << r.status();
  EXPECT_THAT(r->est.est, ElementsAre(0.0, 0.0, 0.0, 0.0, 1.0));
  auto mixed = MleApx(Est({-40.0, -35.0, -30.0, 0.2, 0.1}),
                      PerturbParams::Olh(0.5, 5).value());
  ASSERT_TRUE(mixed.ok());
  EXPECT_NEAR(Sum(mixed->est.est), 1.0, 1e-12);
  EXPECT_EQ(mixed->est.est[0], 0.0);
  EXPECT_GT(mixed->est.est[3], mixed->est.est[4]);
}

TEST_F(MleApxTest, EqualsNormSubWhenPPlusQIsOne) {
  // GRR over two values has p + q = 1.
  auto params = PerturbParams::Grr(0.8, 2).value();
  std::mt19937_64 gen(303);
  for (int trial = 0; trial < 20; ++trial) {
    const auto y = testing::UniformVector(gen, 2, -0.5, 1.5);
    auto r = MleApx(Est(y), params);
    ASSERT_TRUE(r.ok());
    EXPECT_THAT(r->est.est, Pointwise(DoubleNear(1e-14), NormSub(y).est.est));
  }
}

TEST_F(MleApxTest, RejectsDegenerateParams) {
  PerturbParams params = PerturbParams::Olh(1.0, 3).value();
  params.p = params.q;
  EXPECT_FALSE(MleApx(Est({0.1, 0.2, 0.7}), params).ok());
}

TEST(FitPowerPriorTest, ExactPowerLaw) {
  std::vector<double> f(200);
  for (size_t i = 0; i < f.size(); ++i) f[i] = std::pow(i + 1.0, -1.5);
  std::reverse(f.begin(), f.end());  // ranks come from sorting
  auto prior = FitPowerPrior(Est(f), 0.0, 10);
  ASSERT_TRUE(prior.ok());
  EXPECT_NEAR(prior->exponent, 1.5, 1e-6);
  EXPECT_EQ(prior->grid_size, 10u);
}

TEST(FitPowerPriorTest, TwoPoints) {
  auto prior = FitPowerPrior(Est({0.1, 0.4, 0.001}), 0.01, 10);
  ASSERT_TRUE(prior.ok());
  EXPECT_NEAR(prior->exponent, 2.0, 1e-12);
}

TEST(FitPowerPriorTest, FlatInput) {
  auto prior = FitPowerPrior(Est({0.2, 0.2, 0.2, 0.2}), 0.01, 10);
  ASSERT_TRUE(prior.ok());
  EXPECT_EQ(prior->exponent, 0.0);
  EXPECT_FALSE(std::signbit(prior->exponent));
}

TEST(FitPowerPriorTest, NeedsTwoUsableEntries) {
  EXPECT_FALSE(FitPowerPrior(Est({0.5, 0.001, -0.2}), 0.01, 10).ok());
}

TEST(PowerTest, FlatPriorIsSymmetric) {
  const PowerPrior prior{0.0, 0, false};
  auto out = Power(Est({0.5}), prior, FixedNoise(0.01, 1000000));
  ASSERT_TRUE(out.ok());
  EXPECT_NEAR(out->est[0], 0.5, 1e-4);
}

TEST(PowerTest, OutputsInUnitInterval) {
  std::mt19937_64 gen(404);
  for (double s : {0.0, 0.7, 1.0, 1.5, 3.0}) {
    const auto y = testing::UniformVector(gen, 64, -0.3, 1.2);
    auto out = Power(Est(y), PowerPrior{s, 0, false}, FixedNoise(0.05, 10000));
    ASSERT_TRUE(out.ok());
    for (double x : out->est) {
      EXPECT_GT(x, 0.0);
      EXPECT_LE(x, 1.0);
    }
  }
}

TEST(PowerTest, GridRefinement) {
  std::mt19937_64 gen(505);
  const int64_t n = 10000;
  const NoiseModel noise =
      NoiseModel::For(PerturbParams::Olh(1.0, 64).value(), n);
  auto truth = GenerateZipf(64, n, 1.5);
  std::normal_distribution<double> jitter(0.0, noise.sigma());
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> y = truth->freqs;
    for (double& x : y) x += jitter(gen);
    for (double s : {0.8, 1.5}) {
      const size_t coarse = DefaultGridSize(n);
      auto a = Power(Est(y), PowerPrior{s, coarse, false}, noise);
      auto b = Power(Est(y), PowerPrior{s, coarse * 100, false}, noise);
      double diff = 0.0, norm = 0.0;
      for (size_t v = 0; v < y.size(); ++v) {
        diff += (a->est[v] - b->est[v]) * (a->est[v] - b->est[v]);
        norm += b->est[v] * b->est[v];
      }
      EXPECT_LE(std::sqrt(diff / norm), 1e-3) << "trial " << trial;
    }
  }
}

TEST(PowerTest, RejectsZeroSigma) {
  EXPECT_FALSE(
      Power(Est({0.5, 0.5}), PowerPrior{1.0, 10, false}, FixedNoise(0.0, 100))
          .ok());
}

TEST(PowerNsTest, SumsToOne) {
  std::mt19937_64 gen(606);
  for (int trial = 0; trial < 20; ++trial) {
    const auto y = testing::UniformVector(gen, 32, -0.2, 0.4);
    auto out =
        PowerNs(Est(y), PowerPrior{1.2, 0, false}, FixedNoise(0.03, 5000));
    ASSERT_TRUE(out.ok());
    EXPECT_NEAR(Sum(out->est), 1.0, 1e-9);
    EXPECT_EQ(out->method, Method::kPowerNs);
    for (double x : out->est) EXPECT_GE(x, 0.0);
  }
}

TEST(ApplyMethodTest, LabelsAndGuarantees) {
  auto params = PerturbParams::Olh(1.0, 64).value();
  auto truth = GenerateZipf(64, 50000, 1.5);
  auto counts = SimulateSupportCounts(SampleUsers(*truth, RngSeed{1}), params,
                                      RngSeed{2});
  auto est = Estimate(*counts, params);
  MethodContext ctx{params, 50000, 2.0, 0};
  for (Method m : kAllMethods) {
    auto out = ApplyMethod(m, *est, ctx);
    ASSERT_TRUE(out.ok()) << MethodName(m) << ": " << out.status();
    EXPECT_EQ(out->est.method, m);
    EXPECT_EQ(out->est.d(), 64u);
    if (out->est.nonneg_guaranteed) {
      for (double x : out->est.est) EXPECT_GE(x, 0.0) << MethodName(m);
    }
    if (out->est.sums_to_one_guaranteed) {
      EXPECT_NEAR(Sum(out->est.est), 1.0, 1e-9) << MethodName(m);
    }
    EXPECT_EQ(out->prior.has_value(),
              m == Method::kPower || m == Method::kPowerNs);
  }
  EXPECT_EQ(DefaultGridSize(50000), 224u);
}

}  // namespace
}  // namespace ldpfo
