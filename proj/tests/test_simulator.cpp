#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "hawkes_lab/error.hpp"
#include "hawkes_lab/moments.hpp"
#include "hawkes_lab/rng.hpp"
#include "hawkes_lab/simulator.hpp"
#include "test_support.hpp"

using namespace hawkes_lab;
using fixtures::fig1_model;

namespace {

// Direct kernel sum: baseline plus every event in [start, t) (or [start, t]
// for the right limit).
Vector intensity_oracle(const SimulatedPath& path, const HawkesModel& model, double t, bool right_limit) {
  const std::size_t d = model.dim();
  Vector lam(d);
  for (std::size_t i = 0; i < d; ++i)
    lam[i] = path.baseline[i] + path.initial_excess[i] * std::exp(-model.beta()[i] * (t - path.start_time));
  for (const auto& e : path.events) {
    if (e.time > t || (e.time == t && !right_limit)) break;
    for (std::size_t i = 0; i < d; ++i)
      lam[i] += model.alpha()(i, e.component) * e.mark * std::exp(-model.beta()[i] * (t - e.time));
  }
  return lam;
}

void check_path_invariants(const SimulatedPath& p, const HawkesModel& m) {
  const std::size_t d = m.dim();
  Vector L(d, 0.0);
  std::vector<std::uint64_t> H(d, 0);
  double last = p.start_time;
  for (const auto& e : p.events) {
    ASSERT_GT(e.time, last);
    ASSERT_LE(e.time, p.horizon);
    ASSERT_LT(e.component, d);
    ASSERT_GT(e.mark, 0.0);
    last = e.time;
    L[e.component] += e.mark;
    ++H[e.component];
  }
  EXPECT_EQ(H, p.H_T);
  for (std::size_t i = 0; i < d; ++i) {
    EXPECT_NEAR(L[i], p.L_T[i], 1e-9 * (1.0 + L[i]));
    EXPECT_GE(p.lambda_T[i], m.mu()[i]);
    EXPECT_GE(p.int_lambda[i], m.mu()[i] * p.horizon * (1 - 1e-15));
  }
}

}  // namespace

TEST(Simulate, DeterministicForSeed) {
  const auto m = fig1_model();
  const auto a = simulate(m, 50.0, 1234);
  const auto b = simulate(m, 50.0, 1234);
  EXPECT_EQ(a, b);
  const auto c = simulate(m, 50.0, 1235);
  EXPECT_NE(a.events, c.events);
}

TEST(Simulate, PathInvariants) {
  const auto m = fig1_model();
  for (std::uint64_t seed = 0; seed < 20; ++seed) check_path_invariants(simulate(m, 30.0, seed), m);
  const HawkesModel g({0.5, 0.0, 1.0}, Matrix{{0.2, 0.1, 0.0}, {0.3, 0.1, 0.2}, {0.0, 0.4, 0.3}}, {1.0, 2.0, 1.5},
                      {MarkDistribution::gamma(0.5, 1.0), MarkDistribution::constant(2.0),
                       MarkDistribution::exponential(3.0)});
  for (std::uint64_t seed = 0; seed < 20; ++seed) check_path_invariants(simulate(g, 40.0, seed), g);
}

TEST(Simulate, ZeroBaselineHasNoEvents) {
  const HawkesModel m({0.0, 0.0}, Matrix{{0.5, 2.0}, {2.0, 0.5}}, {4.0, 4.0},
                      {MarkDistribution::exponential(1.0), MarkDistribution::exponential(1.0)});
  const auto p = simulate(m, 100.0, 3);
  EXPECT_TRUE(p.events.empty());
  EXPECT_EQ(p.L_T, (Vector{0.0, 0.0}));
  EXPECT_EQ(p.int_lambda, (Vector{0.0, 0.0}));
  EXPECT_EQ(p.H_T, (std::vector<std::uint64_t>{0, 0}));
}

TEST(Simulate, RejectsUnstableModel) {
  EXPECT_THROW(simulate(fig1_model(2.4), 10.0, 1), AssumptionError);
}

TEST(Simulate, RejectsBadHorizon) {
  EXPECT_THROW(simulate(fig1_model(), 0.0, 1), ValidationError);
  EXPECT_THROW(simulate(fig1_model(), -1.0, 1), ValidationError);
}

TEST(Simulate, EventCapRaisesRunaway) {
  SimulationOptions opts;
  opts.max_events = 50;
  EXPECT_THROW(simulate(fig1_model(), 100.0, 1, opts), RunawayProcessError);
}

TEST(Simulate, RefreshIntervalDoesNotChangeLaw) {
  // Different refresh schedules consume randomness differently but must give
  // the same mean count.
  const auto m = fig1_model();
  std::vector<double> a, b;
  SimulationOptions fast;
  fast.refresh_interval = 0.05;
  for (std::uint64_t i = 0; i < 2000; ++i) {
    a.push_back(static_cast<double>(simulate(m, 20.0, derive_stream_key(5, i)).H_T[0]));
    b.push_back(static_cast<double>(simulate(m, 20.0, derive_stream_key(6, i), fast).H_T[0]));
  }
  const auto sa = fixtures::mean_se(a), sb = fixtures::mean_se(b);
  EXPECT_LT(std::abs(sa.mean - sb.mean), 4 * std::hypot(sa.se, sb.se));
}

TEST(IntensityAt, StartIsBaseline) {
  const auto m = fig1_model();
  const auto p = simulate(m, 10.0, 9);
  EXPECT_EQ(intensity_at(p, m, 0.0), m.mu());
}

TEST(IntensityAt, SingleEvent) {
  const auto m = fig1_model();
  SimulatedPath p;
  p.horizon = 3.0;
  p.baseline = m.mu();
  p.initial_excess = {0.0, 0.0};
  p.events = {{1.0, 0, 2.0}};
  const Vector lam = intensity_at(p, m, 2.0);
  EXPECT_NEAR(lam[0], 2.0 + 0.5 * 2.0 * std::exp(-4.0), 1e-15);
  EXPECT_NEAR(lam[1], 3.0 + 2.0 * 2.0 * std::exp(-4.0), 1e-15);
  // Left limit: the event at t=1 is not yet counted.
  EXPECT_EQ(intensity_at(p, m, 1.0), m.mu());
}

TEST(IntensityAt, MatchesDirectSumAndStoredTerminalState) {
  const auto m = fig1_model();
  const auto p = simulate(m, 20.0, 21);
  ASSERT_FALSE(p.events.empty());
  for (double t : {0.3, 1.7, 5.0, 12.25, 19.9}) {
    const Vector ours = intensity_at(p, m, t), ref = intensity_oracle(p, m, t, false);
    for (std::size_t i = 0; i < 2; ++i) EXPECT_NEAR(ours[i], ref[i], 1e-12 * ref[i]);
  }
  const Vector at_T = intensity_at(p, m, p.horizon);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_NEAR(at_T[i], p.lambda_T[i], 1e-12 * at_T[i]);
  // Just after the last event the left limit equals the post-jump state.
  const double t_last = p.events.back().time;
  const Vector just_after = intensity_at(p, m, std::nextafter(t_last, 1e9));
  const Vector post_jump = intensity_oracle(p, m, t_last, true);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_NEAR(just_after[i], post_jump[i], 1e-12 * post_jump[i]);
  EXPECT_THROW(intensity_at(p, m, 20.5), ValidationError);
  EXPECT_THROW(intensity_at(p, m, -0.1), ValidationError);
}

TEST(IntegratedIntensity, MatchesTrapezoidQuadrature) {
  const auto m = fig1_model();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto p = simulate(m, 20.0, derive_stream_key(77, seed));
    const Vector quad = fixtures::trapezoid_int_lambda(p, m, 100000);
    for (std::size_t i = 0; i < 2; ++i) EXPECT_NEAR(p.int_lambda[i], quad[i], 1e-6 * quad[i]);
  }
}

TEST(PathFunctionals, FullHorizonMatchesSimulatorState) {
  const auto m = fig1_model();
  const auto p = simulate(m, 200.0, 31);
  const auto f = path_functionals(p, m, p.horizon);
  EXPECT_EQ(f.H, p.H_T);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_NEAR(f.L[i], p.L_T[i], 1e-10 * p.L_T[i]);
    EXPECT_NEAR(f.int_lambda[i], p.int_lambda[i], 1e-10 * p.int_lambda[i]);
    EXPECT_NEAR(f.lambda[i], p.lambda_T[i], 1e-10 * p.lambda_T[i]);
  }
}

TEST(PathFunctionals, TruncatedHorizonMatchesOracle) {
  const auto m = fig1_model();
  const auto p = simulate(m, 20.0, 32);
  for (double h : {0.0, 3.3, 10.0, 17.5}) {
    const auto f = path_functionals(p, m, h);
    std::vector<std::uint64_t> H(2, 0);
    Vector L(2, 0.0), ilam(2);
    for (const auto& e : p.events)
      if (e.time <= h) {
        ++H[e.component];
        L[e.component] += e.mark;
      }
    for (std::size_t i = 0; i < 2; ++i) {
      ilam[i] = m.mu()[i] * h;
      for (const auto& e : p.events)
        if (e.time <= h)
          ilam[i] += m.alpha()(i, e.component) * e.mark * (1 - std::exp(-m.beta()[i] * (h - e.time))) / m.beta()[i];
    }
    EXPECT_EQ(f.H, H);
    const Vector lam = intensity_oracle(p, m, h, true);
    for (std::size_t i = 0; i < 2; ++i) {
      EXPECT_NEAR(f.L[i], L[i], 1e-10 * (1 + L[i]));
      EXPECT_NEAR(f.int_lambda[i], ilam[i], 1e-10 * (1 + ilam[i]));
      EXPECT_NEAR(f.lambda[i], lam[i], 1e-10 * lam[i]);
    }
  }
  EXPECT_THROW(path_functionals(p, m, 21.0), ValidationError);
}

TEST(SimulateStatistics, PoissonCountsMeanAndVariance) {
  const auto m = fixtures::poisson_model({2.0, 3.0});
  const std::size_t n = 20000;
  std::vector<double> h0(n), h1(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto p = simulate(m, 50.0, derive_stream_key(101, k));
    h0[k] = static_cast<double>(p.H_T[0]);
    h1[k] = static_cast<double>(p.H_T[1]);
  }
  const double target[2] = {100.0, 150.0};
  const std::vector<double>* hs[2] = {&h0, &h1};
  for (int c = 0; c < 2; ++c) {
    const auto ms = fixtures::mean_se(*hs[c]);
    EXPECT_LT(std::abs(ms.mean - target[c]), 4 * ms.se);
    std::vector<double> sq(n);
    for (std::size_t k = 0; k < n; ++k) sq[k] = ((*hs[c])[k] - ms.mean) * ((*hs[c])[k] - ms.mean);
    const auto vs = fixtures::mean_se(sq);
    EXPECT_LT(std::abs(vs.mean * n / (n - 1) - target[c]), 4 * vs.se);
  }
}

TEST(SimulateStatistics, PoissonInterEventTimesKs) {
  const auto m = fixtures::poisson_model({2.0});
  const auto p = simulate(m, 50500.0, 55);
  ASSERT_GE(p.events.size(), 100000u);
  std::vector<double> gaps;
  double last = 0.0;
  for (std::size_t k = 0; k < 100000; ++k) {
    gaps.push_back(p.events[k].time - last);
    last = p.events[k].time;
  }
  const double d = fixtures::ks_statistic(gaps, [](double x) { return fixtures::exponential_cdf(x, 2.0); });
  EXPECT_GT(fixtures::ks_pvalue(d, gaps.size()), 1e-3);
}

TEST(SimulateStatistics, TimeRescalingKs) {
  const auto m = fig1_model();
  const auto p = simulate(m, 4000.0, 56);
  const std::size_t d = m.dim();
  // Cumulative compensator of each component, advanced event by event.
  Vector excess(d, 0.0), Lambda(d, 0.0), Lambda_at_last(d, 0.0);
  std::vector<std::vector<double>> rescaled(d);
  double t_prev = 0.0;
  for (const auto& e : p.events) {
    const double dt = e.time - t_prev;
    for (std::size_t i = 0; i < d; ++i) {
      Lambda[i] += m.mu()[i] * dt + excess[i] * (-std::expm1(-m.beta()[i] * dt)) / m.beta()[i];
      excess[i] *= std::exp(-m.beta()[i] * dt);
    }
    rescaled[e.component].push_back(Lambda[e.component] - Lambda_at_last[e.component]);
    Lambda_at_last[e.component] = Lambda[e.component];
    for (std::size_t i = 0; i < d; ++i) excess[i] += m.alpha()(i, e.component) * e.mark;
    t_prev = e.time;
  }
  for (std::size_t i = 0; i < d; ++i) {
    ASSERT_GT(rescaled[i].size(), 10000u);
    const double stat = fixtures::ks_statistic(rescaled[i], [](double x) { return fixtures::exponential_cdf(x, 1.0); });
    EXPECT_GT(fixtures::ks_pvalue(stat, rescaled[i].size()), 1e-3) << "component " << i;
  }
}

TEST(SimulateStatistics, CompensatedLossHasZeroMean) {
  const auto m = fig1_model();
  const std::size_t n = 20000;
  std::vector<double> g0(n), g1(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto p = simulate(m, 50.0, derive_stream_key(102, k));
    g0[k] = p.L_T[0] - p.int_lambda[0];
    g1[k] = p.L_T[1] - p.int_lambda[1];
  }
  for (const auto* g : {&g0, &g1}) {
    const auto ms = fixtures::mean_se(*g);
    EXPECT_LT(std::abs(ms.mean), 4 * ms.se);
  }
}

TEST(SimulateStatistics, LongRunLossRate) {
  const auto m = fig1_model();
  const std::size_t n = 10000;
  const double T = 1000.0;
  std::vector<double> r0(n), r1(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto p = simulate(m, T, derive_stream_key(103, k));
    r0[k] = p.L_T[0] / T;
    r1[k] = p.L_T[1] / T;
  }
  // E[L_T]/T = lambda_bar + O(1/T); the transient term is included exactly.
  const Vector expected = integrated_mean_intensity(m, T);
  const auto a = fixtures::mean_se(r0), b = fixtures::mean_se(r1);
  EXPECT_LT(std::abs(a.mean - expected[0] / T), 4 * a.se);
  EXPECT_LT(std::abs(b.mean - expected[1] / T), 4 * b.se);
  EXPECT_NEAR(a.mean, 52.0 / 8.25, 0.05);
  EXPECT_NEAR(b.mean, 58.0 / 8.25, 0.05);
}
