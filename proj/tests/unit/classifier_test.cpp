#include <gtest/gtest.h>

#include <cmath>

#include "evolsym/classifier.hpp"
#include "evolsym/gallery.hpp"
#include "test_support.hpp"

namespace evolsym {
namespace {

SamplingConfig quick(int shells = 10) {
  SamplingConfig cfg;
  cfg.shells = shells;
  cfg.low_discrepancy_directions = 16;
  cfg.random_directions = 16;
  return cfg;
}

TEST(ShellDirections, CountsAndUnitLength) {
  SamplingConfig cfg;
  for (std::size_t n : {1u, 2u, 3u}) {
    const auto dirs = shell_directions(n, 3, cfg);
    EXPECT_EQ(dirs.size(), 2 * n + 128);
    for (const auto& d : dirs) {
      double s = 0.0;
      for (double v : d) s += v * v;
      EXPECT_NEAR(s, 1.0, 1e-14);
    }
  }
}

TEST(ShellDirections, SeedSelectsRandomPart) {
  SamplingConfig a, b;
  b.seed = 17;
  EXPECT_EQ(shell_directions(3, 2, a), shell_directions(3, 2, SamplingConfig{}));
  EXPECT_NE(shell_directions(3, 2, a), shell_directions(3, 2, b));
  EXPECT_NE(shell_directions(3, 2, a), shell_directions(3, 3, a));
}

TEST(SpectralBound, Schrodinger) {
  const auto rep = sample_spectral_bound(gallery::make("schrodinger"), quick());
  EXPECT_EQ(rep.max_shell_index(), 10);
  for (const auto& s : rep.shells) EXPECT_NEAR(s.abscissa_max, 0.0, 1e-12);
  EXPECT_NEAR(rep.s0_estimate, 0.0, 1e-12);
  EXPECT_TRUE(rep.verdict_bounded);
  EXPECT_EQ(petrovskii_verdict(rep), Petrovskii::satisfied);
}

TEST(SpectralBound, HeatMaximumAtOrigin) {
  const auto rep = sample_spectral_bound(gallery::make("heat"), quick());
  EXPECT_EQ(rep.origin_abscissa, 0.0);
  EXPECT_EQ(rep.s0_estimate, 0.0);
  for (const auto& s : rep.shells) EXPECT_NEAR(s.abscissa_max, -s.radius * s.radius, 1e-9 * s.radius * s.radius);
  EXPECT_LT(rep.log_fit_slope, 0.0);
}

TEST(SpectralBound, BackwardHeatViolates) {
  const auto rep = sample_spectral_bound(gallery::make("backward-heat"), quick());
  for (std::size_t j = 0; j < rep.shells.size(); ++j)
    EXPECT_NEAR(rep.shells[j].abscissa_max, std::ldexp(1.0, 2 * static_cast<int>(j)), 1e-9 * std::ldexp(1.0, 2 * static_cast<int>(j)));
  EXPECT_FALSE(rep.verdict_bounded);
  EXPECT_TRUE(std::isinf(rep.s0_estimate));
  EXPECT_EQ(petrovskii_verdict(rep), Petrovskii::violated);
}

TEST(SpectralBound, TooFewShellsIsInconclusive) {
  for (const char* name : {"heat", "backward-heat", "schrodinger"}) {
    const auto rep = sample_spectral_bound(gallery::make(name), quick(2));
    EXPECT_FALSE(rep.verdict_bounded);
    EXPECT_EQ(petrovskii_verdict(rep), Petrovskii::inconclusive) << name;
  }
}

TEST(SpectralBound, NegativeShellCountRejected) {
  EXPECT_THROW(sample_spectral_bound(gallery::make("heat"), quick(-1)), PreconditionError);
}

TEST(SpectralBound, MatchesClosedFormAtEverySample) {
  // p(d) = (1+2i) d1 - 3 d1 d2 + 0.5 d2^2, so Re p(i xi) = -2 xi1 + 3 xi1 xi2 - 0.5 xi2^2
  const auto g = parse_operator(R"({"m":1,"n":2,"entries":[{"row":0,"col":0,"terms":[
      {"coeff":[1,2],"alpha":[1,0]},{"coeff":[-3,0],"alpha":[1,1]},{"coeff":[0.5,0],"alpha":[0,2]}]}]})");
  const auto cfg = quick(6);
  const auto rep = sample_spectral_bound(g, cfg);
  for (const auto& s : rep.shells) {
    double best = -INFINITY;
    for (const auto& d : s.directions) {
      const double x1 = s.radius * d[0], x2 = s.radius * d[1];
      best = std::max(best, -2 * x1 + 3 * x1 * x2 - 0.5 * x2 * x2);
    }
    EXPECT_NEAR(s.abscissa_max, best, 1e-9 * std::max(1.0, std::abs(best)));
  }
}

TEST(SpectralBound, ShiftMovesEveryShellByRealPart) {
  NormalStream rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = testing::random_operator(rng, 2, 2, 1, 2);
    const complex c(rng.next(), rng.next());
    const auto a = sample_spectral_bound(g, quick(5)), b = sample_spectral_bound(g.shifted(c), quick(5));
    EXPECT_NEAR(b.origin_abscissa, a.origin_abscissa + c.real(), 1e-10 * (1 + std::abs(a.origin_abscissa)));
    for (std::size_t j = 0; j < a.shells.size(); ++j)
      EXPECT_NEAR(b.shells[j].abscissa_max, a.shells[j].abscissa_max + c.real(),
                  1e-10 * (1 + std::abs(a.shells[j].abscissa_max)));
  }
}

TEST(Classify, Gallery) {
  const auto heat = classify(gallery::make("heat"));
  EXPECT_EQ(heat.petrovskii, Petrovskii::satisfied);
  EXPECT_FALSE(heat.hyperbolic);
  EXPECT_EQ(heat.deg_P, 2);
  EXPECT_EQ(heat.p0, Rational(2));

  EXPECT_EQ(classify(gallery::make("backward-heat")).petrovskii, Petrovskii::violated);

  const auto schr = classify(gallery::make("schrodinger"));
  EXPECT_EQ(schr.petrovskii, Petrovskii::satisfied);
  EXPECT_FALSE(schr.hyperbolic);

  for (const char* name : {"transport", "wave", "wave-companion"}) {
    const auto c = classify(gallery::make(name));
    EXPECT_TRUE(c.hyperbolic) << name;
    EXPECT_LE(c.p0, Rational(1)) << name;
    EXPECT_EQ(c.deg_P, static_cast<int>(c.m)) << name;
  }
}

TEST(Classify, AxisPermutationInvariance) {
  const auto g = parse_operator(R"({"m":2,"n":2,"entries":[
      {"row":0,"col":0,"terms":[{"coeff":[1,0],"alpha":[2,0]},{"coeff":[0.5,0],"alpha":[0,2]}]},
      {"row":0,"col":1,"terms":[{"coeff":[0,1],"alpha":[1,0]}]},
      {"row":1,"col":0,"terms":[{"coeff":[2,0],"alpha":[0,1]}]},
      {"row":1,"col":1,"terms":[{"coeff":[-1,0],"alpha":[0,2]}]}]})");
  const std::vector<std::size_t> swap{1, 0};
  const auto a = classify(g), b = classify(g.permuted_axes(swap));
  EXPECT_EQ(a.petrovskii, b.petrovskii);
  EXPECT_EQ(a.deg_P, b.deg_P);
  EXPECT_EQ(a.p0, b.p0);
  EXPECT_EQ(a.hyperbolic, b.hyperbolic);
}

TEST(Classify, ReflectionInvariance) {
  // xi -> -xi negates odd-order terms; the transport direction flips, nothing else changes
  const auto a = classify(gallery::make("transport:2")), b = classify(gallery::make("transport:-2"));
  EXPECT_EQ(a.petrovskii, b.petrovskii);
  EXPECT_EQ(a.hyperbolic, b.hyperbolic);
  EXPECT_EQ(a.p0, b.p0);
  EXPECT_EQ(a.spectral_report.s0_estimate, b.spectral_report.s0_estimate);
}

TEST(Classify, JsonHasStableKeys) {
  const auto j = to_json(classify(gallery::make("heat"), quick(4)));
  for (const char* key : {"petrovskii", "deg_P", "p0", "hyperbolic", "spectral_report"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(j.at("petrovskii"), "satisfied");
}

TEST(GrowthBound, SchrodingerAndHeatNeedNoWeight) {
  for (const char* name : {"schrodinger", "heat"}) {
    const auto rep = growth_bound_check(gallery::make(name), 0.0);
    EXPECT_TRUE(rep.found) << name;
    EXPECT_EQ(rep.k, 0) << name;
    EXPECT_NEAR(rep.sup, 1.0, 1e-12) << name;
  }
}

TEST(GrowthBound, WaveWithinTwo) {
  for (const char* name : {"wave", "wave-companion", "transport"}) {
    const auto rep = growth_bound_check(gallery::make(name), 0.0);
    EXPECT_TRUE(rep.found) << name;
    EXPECT_LE(rep.k, 2) << name;
    EXPECT_TRUE(std::isfinite(rep.sup)) << name;
  }
}

TEST(GrowthBound, BackwardHeatReportsFailure) {
  const auto rep = growth_bound_check(gallery::make("backward-heat"), 0.0);
  EXPECT_FALSE(rep.found);
  EXPECT_EQ(rep.k, -1);
  EXPECT_FALSE(rep.message.empty());
}

TEST(GrowthBound, UnderestimatedBoundPeaksAtHorizon) {
  // heat shifted by +1 has s0 = 1; claiming s0 = 0 leaves e^{0.9 t} unweighted
  GrowthConfig cfg;
  cfg.shells = 4;
  const auto rep = growth_bound_check(gallery::make("heat").shifted(1.0), 0.0, cfg);
  EXPECT_TRUE(rep.found);
  EXPECT_NEAR(rep.sup, std::exp(0.9 * 10.0), 1e-9 * std::exp(9.0));
  EXPECT_TRUE(rep.sup_at_horizon);
}

TEST(GrowthBound, InfiniteBoundRejected) {
  EXPECT_THROW(growth_bound_check(gallery::make("heat"), INFINITY), PreconditionError);
}

}  // namespace
}  // namespace evolsym
