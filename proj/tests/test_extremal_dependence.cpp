#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "hrcp/bhr.hpp"
#include "hrcp/dependence.hpp"
#include "hrcp/error.hpp"
#include "hrcp/random.hpp"

using namespace hrcp;

namespace {

// rank / (n + 1) by direct counting; distinct values assumed.
std::vector<double> slow_pit(const std::vector<double>& v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::size_t below = 0;
    for (double w : v) below += w < v[i] ? 1 : 0;
    out[i] = static_cast<double>(below + 1) / static_cast<double>(v.size() + 1);
  }
  return out;
}

BivariateSeries bhr_series(double lam, std::size_t n, std::uint64_t seed) {
  RandomStream rs(seed);
  return BivariateSeries(sample_bhr(DependenceParam(lam), n, rs));
}

}  // namespace

TEST_CASE("threshold chi counts") {
  // Ranks 1..40 for x, y identical except the top pair swapped.
  std::vector<double> xs, ys;
  for (int i = 1; i <= 40; ++i) {
    xs.push_back(i);
    ys.push_back(i);
  }
  std::swap(ys[39], ys[0]);
  const BivariateSeries s(xs, ys);
  // u = 0.9: rank/(41) > 0.9 <=> rank >= 37, four x exceedances; y loses index 39.
  const auto up = empirical_chi_upper(s, 0.9);
  CHECK(up.n_marginal == 4);
  CHECK(up.n_exceed == 3);
  CHECK(up.chi_hat == doctest::Approx(0.75));
  const auto lo = empirical_chi_lower(s, 0.1);
  CHECK(lo.n_marginal == 4);
  CHECK(lo.n_exceed == 3);
  CHECK(up.reported() == doctest::Approx(0.75));
  CHECK_THROWS_AS(empirical_chi_upper(s.slice(0, 19), 0.9), InputError);
  CHECK_THROWS_AS(empirical_chi_upper(s, 1.0), InputError);
}

TEST_CASE("madogram against a brute-force oracle") {
  RandomStream rs(3);
  std::vector<double> z(80);
  for (auto& v : z) v = rs.gumbel();
  const auto f = slow_pit(z);
  for (std::size_t h : {1u, 2u, 5u, 30u}) {
    double s = 0.0;
    for (std::size_t t = 0; t + h < z.size(); ++t) s += std::abs(f[t + h] - f[t]);
    const double want = 0.5 * s / static_cast<double>(z.size() - h);
    CHECK(f_madogram(z, h) == doctest::Approx(want).epsilon(1e-14));
  }
  CHECK_THROWS_AS(f_madogram(z, 0), InputError);
  CHECK_THROWS_AS(f_madogram(z, 70), InputError);

  const auto s = bhr_series(1.0, 60, 9);
  const auto fx = slow_pit(s.xs()), fy = slow_pit(s.ys());
  double acc = 0.0;
  for (std::size_t t = 0; t < fx.size(); ++t) acc += std::abs(fx[t] - fy[t]);
  CHECK(cross_madogram(s) == doctest::Approx(0.5 * acc / 60.0).epsilon(1e-14));
}

TEST_CASE("madogram to chi map") {
  CHECK(chi_from_madogram(0.0) == 1.0);
  CHECK(chi_from_madogram(1.0 / 6.0) == doctest::Approx(0.0).epsilon(1e-14));
  // nu = (theta - 1) / (2 (theta + 1)) for extremal coefficient theta.
  const double theta = 1.37;
  CHECK(chi_from_madogram((theta - 1) / (2 * (theta + 1))) == doctest::Approx(2 - theta));
  CHECK_THROWS_AS(chi_from_madogram(0.5), std::invalid_argument);
  CHECK_THROWS_AS(chi_from_madogram(-0.1), std::invalid_argument);
}

TEST_CASE("estimators approach the analytic chi") {
  for (double lam : {0.5, 2.0, 4.0}) {
    CAPTURE(lam);
    const auto s = bhr_series(lam, 40000, 100 + static_cast<std::uint64_t>(lam * 10));
    const double chi = chi_of_lambda(DependenceParam(lam));
    CHECK(std::abs(madogram_chi(s) - chi) < 0.02);
    // Threshold chi carries a sub-asymptotic bias that shrinks as u -> 1.
    CHECK(std::abs(empirical_chi_upper(s, 0.98).chi_hat - chi) < 0.05);
  }
  // Comonotone pairs: chi exactly 1.
  std::vector<double> xs(100), ys(100);
  RandomStream rs(5);
  for (std::size_t i = 0; i < 100; ++i) ys[i] = 2 * (xs[i] = rs.gumbel()) + 1;
  CHECK(madogram_chi(BivariateSeries(xs, ys)) == doctest::Approx(1.0));
}

TEST_CASE("lagged chi of an iid series is near zero") {
  RandomStream rs(12);
  std::vector<double> z(5000);
  for (auto& v : z) v = rs.gumbel();
  const auto chis = lagged_madogram_chi(z, 5);
  REQUIRE(chis.size() == 5);
  for (double c : chis) CHECK(std::abs(c) < 0.05);
}

TEST_CASE("independence permutation test") {
  const RandomStream st(31);
  const auto dep = independence_bootstrap_test(bhr_series(2.0, 300, 1), 400, 0.05, st);
  CHECK(dep.reject);
  CHECK(dep.replicates == 400);
  CHECK(dep.observed_chi > dep.critical_value);
  // Deterministic in the stream.
  CHECK(independence_bootstrap_test(bhr_series(2.0, 300, 1), 400, 0.05, st) == dep);

  int rejections = 0;
  for (std::uint64_t k = 0; k < 40; ++k) {
    RandomStream rs(1000 + k);
    std::vector<double> xs(200), ys(200);
    for (auto& v : xs) v = rs.gumbel();
    for (auto& v : ys) v = rs.gumbel();
    rejections += independence_bootstrap_test(BivariateSeries(xs, ys), 200, 0.05, st.substream(k)).reject;
  }
  CHECK(rejections <= 7);  // Binomial(40, 0.05): P(X > 7) < 0.002
  CHECK_THROWS_AS(independence_bootstrap_test(bhr_series(1.0, 100, 2), 199, 0.05, st), InputError);
}
