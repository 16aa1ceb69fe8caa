#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "hrcp/bhr.hpp"
#include "hrcp/changepoint.hpp"
#include "hrcp/error.hpp"
#include "hrcp/random.hpp"
#include "oracles.hpp"

using namespace hrcp;

namespace {

BivariateSeries null_data(double lam, std::size_t T, std::uint64_t seed) {
  RandomStream rs(seed);
  return BivariateSeries(sample_bhr(DependenceParam(lam), T, rs));
}

BivariateSeries step_data(double l1, double l2, std::size_t T, std::size_t tau, std::uint64_t seed) {
  RandomStream rs(seed);
  auto a = sample_bhr(DependenceParam(l1), tau, rs);
  const auto b = sample_bhr(DependenceParam(l2), T - tau, rs);
  a.insert(a.end(), b.begin(), b.end());
  return BivariateSeries(std::move(a));
}

// Maximum of the log-likelihood over a dense log-spaced grid.
double dense_grid_max(const BivariateSeries& d) {
  double best = -INFINITY;
  const int n = 3000;
  for (int i = 0; i <= n; ++i) {
    const double lam = std::exp(std::log(kLambdaMin) + (std::log(kLambdaMax) - std::log(kLambdaMin)) * i / n);
    best = std::max(best, loglik_h0(d, DependenceParam(lam)));
  }
  return best;
}

}  // namespace

TEST_CASE("method names") {
  CHECK(to_string(Method::LRT) == "LRT");
  CHECK(method_from_string("mic") == Method::MIC);
  CHECK_THROWS_AS(method_from_string("aic"), InputError);
}

TEST_CASE("trimming bound") {
  CHECK(trim_bound(50) == 6);
  CHECK(trim_bound(200) == 10);
  CHECK(trim_bound(1000) == 12);
  CHECK(trim_bound(2) == 0);
}

TEST_CASE("null log-likelihood is the sum of finite-difference log densities") {
  const auto d = null_data(1.3, 25, 2);
  double want = 0.0;
  for (const auto& p : d) want += std::log(oracle::mixed_fd_density(p.x, p.y, 1.3));
  CHECK(loglik_h0(d, DependenceParam(1.3)) == doctest::Approx(want).epsilon(1e-7));
}

TEST_CASE("segment log-likelihood splits additively") {
  const auto d = null_data(0.8, 40, 6);
  const DependenceParam a(0.6), b(2.2);
  CHECK(loglik_ha(d, 13, a, b) ==
        doctest::Approx(loglik_h0(d.slice(0, 13), a) + loglik_h0(d.slice(13, 40), b)).epsilon(1e-13));
  CHECK_THROWS_AS(loglik_ha(d, 0, a, b), InputError);
  CHECK_THROWS_AS(loglik_ha(d, 40, a, b), InputError);
}

TEST_CASE("MLE reaches the global maximum of a dense grid") {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    for (double lam : {0.05, 0.5, 2.0, 6.0}) {
      CAPTURE(seed);
      CAPTURE(lam);
      const auto d = null_data(lam, 12 + 7 * seed, seed);
      const auto fit = mle_h0(d);
      CHECK(fit.converged);
      CHECK(fit.loglik == doctest::Approx(loglik_h0(d, fit.lambda_at_optimum)).epsilon(1e-14));
      CHECK(fit.loglik >= dense_grid_max(d) - 1e-9);
    }
  }
  CHECK_THROWS_AS(mle_h0(null_data(1.0, 1, 1)), InputError);
  CHECK_THROWS_AS(mle_ha(null_data(1.0, 10, 1), 1), InputError);
}

TEST_CASE("near-comonotone data pins the estimate to the upper boundary") {
  RandomStream rs(8);
  std::vector<GumbelPair> p(40);
  for (auto& q : p) {
    const double g = rs.gumbel();
    q = {g, g + 1e-7 * (rs.uniform() - 0.5)};
  }
  const auto fit = mle_h0(BivariateSeries(p));
  CHECK(fit.at_boundary);
  CHECK(fit.lambda_at_optimum.lambda() == doctest::Approx(kLambdaMax).epsilon(1e-6));
}

TEST_CASE("profiles agree with brute-force segment fits") {
  const auto d = step_data(0.5, 3.0, 60, 25, 4);
  const auto lr = lr_profile(d);
  const auto mic = mic_profile(d);
  const std::size_t tau0 = trim_bound(60);
  REQUIRE(lr.size() == 60 - 2 * tau0 - 1);
  const double l0 = mle_h0(d).loglik;
  const double lnT = std::log(60.0);
  for (std::size_t i = 0; i < lr.size(); ++i) {
    const std::size_t tau = tau0 + 1 + i;
    const auto [pre, post] = mle_ha(d, tau);
    const double la = pre.loglik + post.loglik;
    CHECK(lr[i] == doctest::Approx(2 * (la - l0)).epsilon(1e-8));
    const double c = 2.0 * static_cast<double>(tau) / 60.0 - 1.0;
    CHECK(mic[i] == doctest::Approx(-2 * la + (2 + c * c) * lnT).epsilon(1e-10));
  }
  CHECK(mic_null(d) == doctest::Approx(-2 * l0 + lnT).epsilon(1e-12));
}

TEST_CASE("profile strategies agree") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const auto d = seed % 2 ? null_data(1.5, 80, seed) : step_data(0.3, 2.5, 80, 30, seed);
    const auto cold = scan_changepoints(d, ProfileStrategy::ColdSerial);
    const auto par = scan_changepoints(d, ProfileStrategy::Parallel);
    const auto inc = scan_changepoints(d, ProfileStrategy::Incremental);
    CHECK(cold.lr_values() == par.lr_values());
    const auto a = cold.lr_values(), b = inc.lr_values();
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(b[i] == doctest::Approx(a[i]).epsilon(1e-8).scale(1));
    CHECK(lrt_statistic(cold).tau_hat == lrt_statistic(inc).tau_hat);
  }
}

TEST_CASE("LR is nonnegative and MIC never exceeds LRT") {
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    const double lam = 0.2 + 0.05 * static_cast<double>(seed % 80);
    const auto d = null_data(lam, 30 + seed % 40, 500 + seed);
    const auto scan = scan_changepoints(d);
    REQUIRE(scan.all_converged());
    const auto lr = scan.lr_values();
    for (double v : lr) REQUIRE(v >= 0.0);
    const auto z = lrt_statistic(scan);
    const auto s = mic_statistic(scan);
    CHECK(s.statistic <= z.statistic + 1e-12);
    // S' = max [LR(tau) - (2 tau / T - 1)^2 ln T].
    const double T = static_cast<double>(d.size());
    double best = -INFINITY;
    for (std::size_t i = 0; i < lr.size(); ++i) {
      const double c = 2.0 * static_cast<double>(scan.first_tau() + i) / T - 1.0;
      best = std::max(best, lr[i] - c * c * std::log(T));
    }
    CHECK(s.statistic == doctest::Approx(best).epsilon(1e-9));
  }
}

TEST_CASE("results carry consistent fields") {
  const auto d = step_data(0.5, 4.0, 200, 100, 17);
  const auto r = detect_changepoint(d);
  CHECK(r.lrt.method == Method::LRT);
  CHECK(r.mic.method == Method::MIC);
  CHECK(r.lrt.first_tau == trim_bound(200) + 1);
  const auto it = std::max_element(r.lrt.profile.begin(), r.lrt.profile.end());
  CHECK(r.lrt.tau_hat == r.lrt.first_tau + static_cast<std::size_t>(it - r.lrt.profile.begin()));
  CHECK(*it == r.lrt.statistic);
  const auto jt = std::min_element(r.mic.profile.begin(), r.mic.profile.end());
  CHECK(r.mic.tau_hat == r.mic.first_tau + static_cast<std::size_t>(jt - r.mic.profile.begin()));
  CHECK(r.mic.statistic == doctest::Approx(r.mic.mic_null - *jt + std::log(200.0)));
  CHECK(r.lrt.lambda_pre.lambda() < r.lrt.lambda_post.lambda());
  CHECK(r.lrt.tau_hat >= 97);
  CHECK(r.lrt.tau_hat <= 103);
}

TEST_CASE("planted changes are located") {
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto r = detect_changepoint(step_data(0.5, 4.0, 200, 50, 900 + seed));
    hits += (r.lrt.tau_hat + 3 >= 50 && r.lrt.tau_hat <= 53) ? 1 : 0;
  }
  CHECK(hits >= 17);
}

TEST_CASE("time reversal mirrors the estimate") {
  int mismatches = 0;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const auto d = seed % 3 == 0 ? step_data(0.4, 3.0, 90, 30 + seed % 20, seed)
                                 : null_data(1.0 + 0.1 * static_cast<double>(seed % 7), 90, seed);
    const auto a = detect_changepoint(d);
    const auto b = detect_changepoint(d.reversed());
    mismatches += a.lrt.tau_hat + b.lrt.tau_hat != 90;
    mismatches += a.mic.tau_hat + b.mic.tau_hat != 90;
    CHECK(a.lrt.statistic == doctest::Approx(b.lrt.statistic).epsilon(1e-7));
  }
  CHECK(mismatches == 0);
}

TEST_CASE("too-short series are rejected") {
  CHECK_THROWS_AS(scan_changepoints(null_data(1.0, 5, 1)), InputError);
  CHECK_NOTHROW(scan_changepoints(null_data(1.0, 2 * trim_bound(20) + 2, 1)));
}
