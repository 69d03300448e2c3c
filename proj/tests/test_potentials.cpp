// Potential families: closed-form moments, Campbell quadrature, cloud
// sampling laws, truncation policies, covariances, and the indexed
// evaluation engine.  Frozen numeric constants live in oracle_values.hpp.
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "oracle_values.hpp"
#include "rplab/environment.hpp"
#include "rplab/potentials.hpp"
#include "rplab/stats.hpp"

using namespace rplab;
namespace orc = rplab::oracle;

namespace {
const PotentialSpec kLac = PotentialSpec::lacoin(2, 3.0, 1.5);
}

TEST_SUITE("potentials") {

TEST_CASE("spec validation accepts the families and rejects the degenerate") {
  CHECK(kLac.validate_message().empty());
  CHECK(PotentialSpec::zero(1).validate_message().empty());
  CHECK(PotentialSpec::constant(3, 0.5).validate_message().empty());
  CHECK(PotentialSpec::polytail(2, 3.0, 0.7).validate_message().empty());
  CHECK(PotentialSpec::ruess(0.5, 0.2, 3.0, 0.4).validate_message().empty());

  // gamma + delta - d <= 0 makes the Lacoin potential a.s. infinite.
  const PotentialSpec bad = PotentialSpec::lacoin(2, 0.4, 1.5);
  CHECK_FALSE(bad.validate_message().empty());
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  CHECK_THROWS_AS(PotentialSpec::ruess(0.5, 2.0, 1.0, 0.4).validate(),
                  std::invalid_argument);
  PotentialSpec wrong_d = kLac;
  wrong_d.dimension = 4;
  CHECK_FALSE(wrong_d.validate_message().empty());
}

TEST_CASE("declared essential infima") {
  CHECK(PotentialSpec::zero(2).vbar() == 0.0);
  CHECK(PotentialSpec::constant(2, 0.8).vbar() == 0.8);
  CHECK(kLac.vbar() == 0.0);
  CHECK(PotentialSpec::polytail(2, 3.0, 0.7).vbar() == 0.0);
  CHECK(PotentialSpec::ruess(0.5, 0.2, 3.0, 0.4).vbar() == 0.2);
}

TEST_CASE("closed-form moments match the frozen constants") {
  const Moments m2 = closed_form_moments(2, 3.0, 1.5);
  CHECK(m2.mean == doctest::Approx(orc::kBallMean_d2_g3_d15).epsilon(1e-12));
  CHECK(m2.variance == doctest::Approx(orc::kBallVar_d2_g3_d15).epsilon(1e-12));
  const Moments m1 = closed_form_moments(1, 2.0, 2.0);
  CHECK(m1.mean == doctest::Approx(orc::kBallMean_d1_g2_d2).epsilon(1e-12));
  CHECK_THROWS_AS(closed_form_moments(2, 0.3, 1.5), std::invalid_argument);
}

TEST_CASE("mark tail law and halo intensities") {
  // P(r >= s) = s^-delta documents the mark distribution.
  CHECK(std::pow(2.0, -1.5) ==
        doctest::Approx(orc::kMarkTail_2_d15).epsilon(1e-14));
  // Expected sampled counts for an explicit cutoff.
  CHECK(expected_cloud_size(kLac, 1.0, 128.0) ==
        doctest::Approx(orc::kHaloCount_L1_M128).epsilon(1e-10));
  CHECK(expected_cloud_size(kLac, 16.0, 128.0) ==
        doctest::Approx(orc::kHaloCount_L16_M128).epsilon(1e-10));
  // The sampler's own cutoff is at least that deep.
  CHECK(lacoin_mark_cutoff(kLac, 1.0) >= 128.0);
}

TEST_CASE("sampled cloud counts follow the Campbell intensity") {
  CounterRng master(31415);
  const int n_env = 300;
  std::vector<double> below128(n_env), below2(n_env), total(n_env);
  for (int e = 0; e < n_env; ++e) {
    const PointCloud cloud = sample_cloud(kLac, 1.0, master.child(e).key());
    CHECK(cloud.mark_cutoff >= 128.0);
    double c128 = 0.0, c2 = 0.0;
    for (double r : cloud.marks) {
      if (r < 128.0) c128 += 1.0;
      if (r < 2.0) c2 += 1.0;
    }
    below128[e] = c128;
    below2[e] = c2;
    total[e] = static_cast<double>(cloud.size());
  }
  const double tol128 = 4.0 * std::sqrt(orc::kHaloCount_L1_M128 / n_env);
  CHECK(std::fabs(summarize(below128).mean - orc::kHaloCount_L1_M128) < tol128);

  const double e2 = expected_cloud_size(kLac, 1.0, 2.0);
  CHECK(std::fabs(summarize(below2).mean - e2) < 4.0 * std::sqrt(e2 / n_env));

  const double eall = expected_cloud_size(kLac, 1.0);
  CHECK(std::fabs(summarize(total).mean - eall) < 4.0 * std::sqrt(eall / n_env));

  // Large window spot check.
  CounterRng m16(27183);
  std::vector<double> big(12);
  for (int e = 0; e < 12; ++e) {
    const PointCloud cloud = sample_cloud(kLac, 16.0, m16.child(e).key());
    double c = 0.0;
    for (double r : cloud.marks)
      if (r < 128.0) c += 1.0;
    big[e] = c;
  }
  CHECK(std::fabs(summarize(big).mean - orc::kHaloCount_L16_M128) <
        4.0 * std::sqrt(orc::kHaloCount_L16_M128 / 12.0));
}

TEST_CASE("campbell exponential moment quadrature agrees with the frozen grid") {
  CHECK(exp_moment_log(2, 3.0, 1.5, 0.5, 0.0) ==
        doctest::Approx(orc::kCampbellLog_s05_R0).epsilon(1e-7));
  CHECK(exp_moment_log(2, 3.0, 1.5, 0.5, 1.0) ==
        doctest::Approx(orc::kCampbellLog_s05_R1).epsilon(1e-7));
  CHECK(exp_moment_log(2, 3.0, 1.5, 1.0, 0.0) ==
        doctest::Approx(orc::kCampbellLog_s10_R0).epsilon(1e-7));
  CHECK(exp_moment_log(2, 3.0, 1.5, 1.0, 1.0) ==
        doctest::Approx(orc::kCampbellLog_s10_R1).epsilon(1e-7));
  CHECK(exp_moment(2, 3.0, 1.5, 0.5, 0.0) ==
        doctest::Approx(std::exp(orc::kCampbellLog_s05_R0)).epsilon(1e-7));

  // Small-s derivative reproduces the first halo moment; and the R=0 halo
  // mean must agree with the ball-count closed form (two independent
  // derivations of the same quantity).
  CHECK(exp_moment_log(2, 3.0, 1.5, 1e-6, 1.0) / 1e-6 ==
        doctest::Approx(orc::kHaloMean_R1).epsilon(1e-4));
  CHECK(orc::kHaloMean_R0 ==
        doctest::Approx(orc::kBallMean_d2_g3_d15).epsilon(1e-9));
}

TEST_CASE("empirical moments of V(0) match the closed forms") {
  CounterRng master(1618);
  const int n_env = 4000;
  std::vector<double> v(n_env);
  for (int e = 0; e < n_env; ++e) {
    const PointCloud cloud = sample_cloud(kLac, 1.0, master.child(e).key());
    v[e] = eval_potential(kLac, cloud, vec0());
  }
  const Summary s = summarize(v);
  CHECK(std::fabs(s.mean - orc::kBallMean_d2_g3_d15) < 4.0 * s.std_error);
  CHECK(std::fabs(s.var - orc::kBallVar_d2_g3_d15) < 0.10);
}

TEST_CASE("empirical exponential moments match the Campbell quadrature") {
  CounterRng master(2718);
  const int n_env = 10000;
  std::vector<double> w0(n_env), w1(n_env);
  for (int e = 0; e < n_env; ++e) {
    const PointCloud cloud = sample_cloud(kLac, 1.0, master.child(e).key());
    w0[e] = std::exp(0.5 * eval_potential(kLac, cloud, vec0()));
    // Halo statistic for R = 1: every ball intersecting B(0,1).
    double t = 0.0;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      const double r = cloud.marks[i];
      if (norm(cloud.centers[i]) <= r + 1.0) t += std::pow(r, -kLac.gamma);
    }
    w1[e] = std::exp(0.5 * t);
  }
  const Summary s0 = summarize(w0), s1 = summarize(w1);
  CHECK(std::fabs(s0.mean - std::exp(orc::kCampbellLog_s05_R0)) <
        4.0 * s0.std_error);
  CHECK(std::fabs(s1.mean - std::exp(orc::kCampbellLog_s05_R1)) <
        4.0 * s1.std_error);
}

TEST_CASE("exact covariance curve and its log-log slope") {
  CHECK(lacoin_covariance_exact(2, 3.0, 1.5, 1.0) ==
        doctest::Approx(orc::kCovExact_x1).epsilon(1e-8));
  CHECK(lacoin_covariance_exact(2, 3.0, 1.5, 2.0) ==
        doctest::Approx(orc::kCovExact_x2).epsilon(1e-8));
  CHECK(lacoin_covariance_exact(2, 3.0, 1.5, 4.0) ==
        doctest::Approx(orc::kCovExact_x4).epsilon(1e-8));
  CHECK(lacoin_covariance_exact(2, 3.0, 1.5, 8.0) ==
        doctest::Approx(orc::kCovExact_x8).epsilon(1e-8));
  CHECK(lacoin_covariance_exact(2, 3.0, 1.5, 16.0) ==
        doctest::Approx(orc::kCovExact_x16).epsilon(1e-8));
  // Zero distance reduces to the variance.
  CHECK(lacoin_covariance_exact(2, 3.0, 1.5, 0.0) ==
        doctest::Approx(orc::kBallVar_d2_g3_d15).epsilon(1e-8));

  const std::vector<double> lx = {std::log(2.0), std::log(4.0), std::log(8.0),
                                  std::log(16.0)};
  const std::vector<double> lc = {
      std::log(orc::kCovExact_x2), std::log(orc::kCovExact_x4),
      std::log(orc::kCovExact_x8), std::log(orc::kCovExact_x16)};
  CHECK(fit_line(lx, lc).slope ==
        doctest::Approx(orc::kCovExactSlope_2_16).epsilon(1e-9));
}

TEST_CASE("shared-ball covariance estimator is unbiased") {
  CounterRng master(5772);
  const int n_env = 3000;
  const Vec x = vec(2.0);
  std::vector<double> t(n_env);
  for (int e = 0; e < n_env; ++e) {
    const PointCloud cloud = sample_cloud(kLac, 2.0, master.child(e).key());
    t[e] = shared_ball_covariance(kLac, cloud, x);
  }
  const Summary s = summarize(t);
  CHECK(std::fabs(s.mean - orc::kCovExact_x2) < 4.0 * s.std_error);
}

TEST_CASE("product covariance estimator agrees at short range") {
  const CovarianceEstimate c = empirical_covariance(kLac, vec(1.0), 3000, 424242);
  CHECK(c.n_env == 3000);
  CHECK(c.std_error > 0.0);
  CHECK(std::fabs(c.value - orc::kCovExact_x1) < 5.0 * c.std_error);
}

TEST_CASE("truncation radius policy") {
  const TruncationPolicy policy{0.01, 5.0, 1e-6};
  const double R = truncation_radius(policy, kLac);
  CHECK(R == doctest::Approx(orc::kTruncR_example).epsilon(1e-12));
  CHECK(R >= orc::kTruncRStar_example);
  TruncationPolicy tighter = policy;
  tighter.target_sup_error = 0.001;
  CHECK(truncation_radius(tighter, kLac) > R);
}

TEST_CASE("cloud sampling is deterministic in the seed") {
  const PointCloud a = sample_cloud(kLac, 2.0, 909);
  const PointCloud b = sample_cloud(kLac, 2.0, 909);
  const PointCloud c = sample_cloud(kLac, 2.0, 910);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.centers[i] == b.centers[i]);
    CHECK(a.marks[i] == b.marks[i]);
  }
  CHECK(a.size() != c.size());  // overwhelmingly likely for Poisson counts
  CHECK_THROWS_AS(sample_cloud(PotentialSpec::zero(2), 1.0, 1),
                  std::invalid_argument);
}

TEST_CASE("window restriction is an exact coupling on the smaller window") {
  const PointCloud full = sample_cloud(kLac, 8.0, 515151);
  const PointCloud small = restrict_cloud(kLac, full, 4.0);
  CHECK(small.size() <= full.size());
  CHECK(small.window_radius == 4.0);
  CounterRng rng(7);
  for (int i = 0; i < 40; ++i) {
    Vec p = vec0();
    for (int k = 0; k < 2; ++k) p[k] = 3.9 * (2.0 * rng.next_double() - 1.0);
    if (norm(p) > 3.9) continue;
    CHECK(eval_potential(kLac, small, p) ==
          doctest::Approx(eval_potential(kLac, full, p)).epsilon(1e-14));
  }
  CHECK_THROWS_AS(restrict_cloud(kLac, small, 6.0), std::invalid_argument);
}

TEST_CASE("evaluation outside the guaranteed window throws") {
  const PointCloud cloud = sample_cloud(kLac, 2.0, 11);
  CHECK_THROWS_AS(eval_potential(kLac, cloud, vec(5.0, 0.0)),
                  std::domain_error);
}

TEST_CASE("stationarity: V(0) and V(x) share a distribution across clouds") {
  CounterRng master(161803);
  const int n = 700;
  std::vector<double> at0(n), atx(n);
  const Vec x = vec(0.6, 0.35);
  for (int i = 0; i < n; ++i) {
    const PointCloud c0 = sample_cloud(kLac, 1.0, master.child({1, (std::uint64_t)i}).key());
    const PointCloud c1 = sample_cloud(kLac, 1.0, master.child({2, (std::uint64_t)i}).key());
    at0[i] = eval_potential(kLac, c0, vec0());
    atx[i] = eval_potential(kLac, c1, x);
  }
  CHECK(ks_two_sample_pvalue(at0, atx) > 1e-4);
}

TEST_CASE("ruess potential is two-valued with the right level probability") {
  const PotentialSpec spec = PotentialSpec::ruess(0.5, 0.2, 3.0, 0.4);
  CounterRng master(99);
  int high = 0;
  const int n_env = 600;
  for (int e = 0; e < n_env; ++e) {
    const PointCloud cloud = sample_cloud(spec, 4.0, master.child(e).key());
    CounterRng prng(1234 + e);
    for (int i = 0; i < 20; ++i) {
      Vec p = vec(3.5 * (2.0 * prng.next_double() - 1.0),
                  3.5 * (2.0 * prng.next_double() - 1.0));
      if (norm(p) > 3.9) p = vec0();
      const double v = eval_potential(spec, cloud, p);
      CHECK((std::fabs(v - 0.2) < 1e-12 || std::fabs(v - 3.0) < 1e-12));
    }
    if (std::fabs(eval_potential(spec, cloud, vec0()) - 3.0) < 1e-12) ++high;
  }
  // P(V(0) = M) = exp(-2 nu R): no line passes within the halfwidth.
  const double p_high = std::exp(-2.0 * 0.5 * 0.4);
  const double se = std::sqrt(p_high * (1.0 - p_high) / n_env);
  CHECK(std::fabs(static_cast<double>(high) / n_env - p_high) < 4.0 * se);
}

TEST_CASE("polytail sampling reproduces the compensated closed-form mean") {
  const PotentialSpec spec = PotentialSpec::polytail(2, 3.0, 0.7);
  // Campbell: E V = c9 L_d g/(g-d), Var V = c9^2 L_d 2g/(2g-d).
  Moments closed;
  closed.mean = spec.c9 * unit_ball_volume(2) * spec.gamma / (spec.gamma - 2.0);
  closed.variance = spec.c9 * spec.c9 * unit_ball_volume(2) * 2.0 *
                    spec.gamma / (2.0 * spec.gamma - 2.0);
  CounterRng master(7070);
  const int n_env = 600;
  std::vector<double> v(n_env);
  for (int e = 0; e < n_env; ++e) {
    const PointCloud cloud = sample_cloud(spec, 1.0, master.child(e).key());
    v[e] = eval_potential(spec, cloud, vec0());
  }
  const Summary s = summarize(v);
  CHECK(std::fabs(s.mean - closed.mean) < 4.0 * s.std_error);
  CHECK(std::fabs(s.var - closed.variance) <
        4.0 * std::sqrt(2.0 / n_env) * closed.variance + 0.2);
}

TEST_CASE("indexed field evaluation matches the direct sum") {
  const PointCloud cloud = sample_cloud(kLac, 20.0, 33);
  const PotentialField field(kLac, cloud);
  CHECK(field.has_grid());
  CounterRng rng(3);
  for (int i = 0; i < 100; ++i) {
    Vec p = vec0();
    for (int k = 0; k < 2; ++k) p[k] = 19.0 * (2.0 * rng.next_double() - 1.0);
    if (norm(p) > 19.5) continue;
    const double direct = eval_potential(kLac, cloud, p);
    CHECK(field.eval_exact(p) == doctest::Approx(direct).epsilon(1e-9));
    // Near/far split is an exact decomposition.
    CHECK(field.eval_near(p) + field.far_field_at(p) ==
          doctest::Approx(direct).epsilon(1e-9));
  }
  // Lattice sup dominates the center value.
  CHECK(field.sup_on_ball(vec(1.0, 1.0), 1.0, 0.05) >=
        field.eval_exact(vec(1.0, 1.0)) - 1e-12);
}

TEST_CASE("path potential freezes exactly the far-field difference") {
  const PointCloud cloud = sample_cloud(kLac, 20.0, 44);
  const PotentialField field(kLac, cloud);
  const Vec anchor = vec(2.0, -1.0);
  const PathPotential pp(field, anchor);
  CounterRng rng(8);
  for (int i = 0; i < 30; ++i) {
    Vec p = vec(15.0 * (2.0 * rng.next_double() - 1.0),
                15.0 * (2.0 * rng.next_double() - 1.0));
    if (norm(p) > 19.0) continue;
    const double gap = pp(p) - field.eval_exact(p);
    const double expected = field.far_field_at(anchor) - field.far_field_at(p);
    CHECK(gap == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("environment bundles cloud, field and path potential") {
  const Environment env = Environment::prepare(kLac, 6.0, 2024);
  CHECK(env.window_radius == 6.0);
  CHECK(env.cloud.seed == 2024);
  const Vec p = vec(1.0, 2.0);
  CHECK(env.eval(p) == doctest::Approx(eval_potential(kLac, env.cloud, p)).epsilon(1e-9));

  const Environment zero = Environment::prepare(PotentialSpec::zero(2), 0.0, 1);
  CHECK(zero.path_potential(vec0())(vec(3.0, 4.0)) == 0.0);
  const Environment cst = Environment::prepare(PotentialSpec::constant(2, 0.7), 0.0, 1);
  CHECK(cst.path_potential(vec0())(vec(3.0, 4.0)) == 0.7);
}

}  // TEST_SUITE("potentials")
