// Random-stream and reduction-helper behaviour: determinism, substream
// independence, distributional moments, and the estimation utilities every
// other suite relies on.
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "rplab/rng.hpp"
#include "rplab/stats.hpp"

using namespace rplab;

TEST_SUITE("rng") {

TEST_CASE("identical seeds reproduce the stream exactly") {
  CounterRng a(42), b(42);
  for (int i = 0; i < 64; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("child derivation folds associatively and diverges by index") {
  CounterRng root(7);
  CHECK(root.child({3, 9}).key() == root.child(3).child(9).key());
  CHECK(root.child(0).key() != root.child(1).key());
  CHECK(root.child(0).key() != root.key());
  CHECK(root.child({1, 2}).key() != root.child({2, 1}).key());
  // Deriving children does not consume from the parent.
  CounterRng c(7);
  (void)c.child(5);
  CounterRng d(7);
  CHECK(c.next_u64() == d.next_u64());
}

TEST_CASE("uniform doubles live on [0,1) with the right mean") {
  CounterRng rng(123);
  const int n = 100000;
  double sum = 0.0, lo = 1.0, hi = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.next_double();
    sum += u;
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  CHECK(lo >= 0.0);
  CHECK(hi < 1.0);
  CHECK(std::fabs(sum / n - 0.5) < 0.004);  // 4 sigma = 4/(sqrt(12 n))
}

TEST_CASE("open-interval uniforms avoid the endpoints") {
  CounterRng rng(5);
  for (int i = 0; i < 20000; ++i) {
    const double u = rng.next_open();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("normal moments") {
  CounterRng rng(99);
  const int n = 100000;
  std::vector<double> xs(n);
  for (double& x : xs) x = rng.next_normal();
  const Summary s = summarize(xs);
  CHECK(std::fabs(s.mean) < 0.013);       // 4 sigma
  CHECK(std::fabs(s.var - 1.0) < 0.018);  // 4 * sqrt(2/n)
}

TEST_CASE("poisson moments in both sampling regimes") {
  CounterRng rng(2024);
  // Small-mean Knuth inversion.
  {
    const int n = 60000;
    std::vector<double> xs(n);
    for (double& x : xs) x = static_cast<double>(rng.next_poisson(3.7));
    const Summary s = summarize(xs);
    CHECK(std::fabs(s.mean - 3.7) < 0.032);
    CHECK(std::fabs(s.var - 3.7) < 0.10);
  }
  // Large mean goes through the recursive split.
  {
    const int n = 20000;
    std::vector<double> xs(n);
    for (double& x : xs) x = static_cast<double>(rng.next_poisson(50.0));
    const Summary s = summarize(xs);
    CHECK(std::fabs(s.mean - 50.0) < 0.20);
    CHECK(std::fabs(s.var - 50.0) < 2.1);
  }
  CHECK(rng.next_poisson(0.0) == 0);
  CHECK(rng.next_poisson(-1.0) == 0);
}

}  // TEST_SUITE("rng")

TEST_SUITE("stats") {

TEST_CASE("pairwise sum equals sequential summation") {
  CounterRng rng(1);
  std::vector<double> xs(1537);
  double naive = 0.0;
  for (double& x : xs) {
    x = rng.next_normal() * 3.0;
    naive += x;
  }
  CHECK(pairwise_sum(xs) == doctest::Approx(naive).epsilon(1e-12));
  CHECK(pairwise_sum(std::span<const double>{}) == 0.0);
}

TEST_CASE("summarize computes textbook values") {
  const std::vector<double> xs = {1.0, 2.0, 3.0, 4.0};
  const Summary s = summarize(xs);
  CHECK(s.n == 4);
  CHECK(s.mean == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(s.var == doctest::Approx(5.0 / 3.0).epsilon(1e-15));
  CHECK(s.std_error == doctest::Approx(std::sqrt(5.0 / 12.0)).epsilon(1e-15));
}

TEST_CASE("line fit recovers an exact line with zero slope error") {
  const std::vector<double> x = {0.0, 1.0, 2.0, 3.0, 4.0};
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = 2.0 * x[i] + 1.0;
  const LineFit f = fit_line(x, y);
  CHECK(f.slope == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(f.intercept == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(f.slope_se < 1e-12);
  CHECK_THROWS_AS(fit_line(std::vector<double>{1.0}, std::vector<double>{1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      fit_line(std::vector<double>{1.0, 1.0}, std::vector<double>{1.0, 2.0}),
      std::invalid_argument);
}

TEST_CASE("bootstrap standard error: degenerate and calibrated cases") {
  const std::vector<double> flat(50, 3.25);
  CHECK(bootstrap_se(flat, 200, CounterRng(9)) == 0.0);

  CounterRng rng(77);
  std::vector<double> xs(400);
  for (double& x : xs) x = rng.next_normal();
  const double se = bootstrap_se(xs, 400, CounterRng(10));
  // True SE of the mean is 1/20; allow generous slack for both the sample
  // spread and the resampling noise.
  CHECK(se > 0.035);
  CHECK(se < 0.068);

  CHECK(bootstrap_se(std::vector<double>{1.0}, 200, CounterRng(1)) == 0.0);
}

TEST_CASE("two-sample KS separates a shift and accepts equality") {
  CounterRng rng(31);
  std::vector<double> a(3000), b(3000), c(3000);
  for (double& x : a) x = rng.next_normal();
  for (double& x : b) x = rng.next_normal();
  for (double& x : c) x = rng.next_normal() + 0.25;
  CHECK(ks_two_sample_pvalue(a, b) > 1e-4);
  CHECK(ks_two_sample_pvalue(a, c) < 1e-6);
}

TEST_CASE("concave projection: fixed points, repairs, idempotence") {
  const std::vector<double> t = {0.0, 1.0, 2.0, 3.0};

  // Concave increasing data is a fixed point.
  const std::vector<double> good = {0.0, 1.0, 1.7, 2.1};
  const ConcaveFit fg = concave_increasing_projection(t, good);
  for (std::size_t i = 0; i < good.size(); ++i)
    CHECK(fg.values[i] == doctest::Approx(good[i]).epsilon(1e-12));
  CHECK(fg.projection_distance < 1e-12);

  // A convex violator is pooled; hand-computed three-point case.
  const std::vector<double> t3 = {0.0, 1.0, 2.0};
  const std::vector<double> bad = {0.0, 1.0, 3.0};
  const ConcaveFit fb = concave_increasing_projection(t3, bad);
  CHECK(fb.values[0] == doctest::Approx(-1.0 / 6.0).epsilon(1e-12));
  CHECK(fb.values[1] == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK(fb.values[2] == doctest::Approx(17.0 / 6.0).epsilon(1e-12));
  CHECK(fb.projection_distance == doctest::Approx(1.0 / 3.0).epsilon(1e-9));

  // Output is concave with non-negative slopes; projecting again is a no-op.
  CounterRng rng(4);
  std::vector<double> noisy(t.size());
  for (double& v : noisy) v = rng.next_normal();
  const ConcaveFit f1 = concave_increasing_projection(t, noisy);
  for (std::size_t i = 0; i + 2 < t.size(); ++i) {
    const double s0 = f1.values[i + 1] - f1.values[i];
    const double s1 = f1.values[i + 2] - f1.values[i + 1];
    CHECK(s1 <= s0 + 1e-12);
    CHECK(s0 >= -1e-12);
  }
  const ConcaveFit f2 = concave_increasing_projection(t, f1.values);
  CHECK(f2.projection_distance < 1e-9);
}

}  // TEST_SUITE("stats")
