#include <doctest.h>

#include <array>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <vector>

#include "hrcp/bhr.hpp"
#include "hrcp/error.hpp"
#include "hrcp/normal.hpp"
#include "hrcp/optimize.hpp"
#include "hrcp/random.hpp"
#include "hrcp/series.hpp"
#include "hrcp/stats.hpp"
#include "oracles.hpp"

using namespace hrcp;

TEST_CASE("philox known answers") {
  using A4 = std::array<std::uint32_t, 4>;
  using A2 = std::array<std::uint32_t, 2>;
  CHECK(philox4x32_10(A4{0, 0, 0, 0}, A2{0, 0}) ==
        A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32_10(A4{~0u, ~0u, ~0u, ~0u}, A2{~0u, ~0u}) ==
        A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32_10(A4{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                      A2{0xa4093822, 0x299f31d0}) ==
        A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("random streams are reproducible and separated") {
  RandomStream a(42), b(42);
  for (int i = 0; i < 100; ++i) REQUIRE(a() == b());

  const RandomStream root(7);
  auto s1 = root.substream(1), s1b = root.substream(1), s2 = root.substream(2);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 1000; ++i) {
    const auto v = s1();
    CHECK(v == s1b());
    seen.insert(v);
    seen.insert(s2());
  }
  CHECK(seen.size() == 2000);
  CHECK(RandomStream(1).substream(5)() != RandomStream(2).substream(5)());
  CHECK(root.substream(1).substream(2)() != root.substream(2).substream(1)());
}

TEST_CASE("uniform, gumbel and bounded integers") {
  RandomStream rs(2024);
  double sum = 0.0, sumsq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rs.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    sumsq += u * u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.005));
  CHECK(sumsq / n - (sum / n) * (sum / n) == doctest::Approx(1.0 / 12).epsilon(0.01));

  std::vector<double> g(50000);
  for (auto& v : g) v = rs.gumbel();
  const double d = oracle::ks_statistic(g, oracle::std_gumbel_cdf);
  CHECK(oracle::ks_pvalue(d, g.size()) > 0.01);

  std::array<int, 7> counts{};
  const int m = 70000;
  for (int i = 0; i < m; ++i) ++counts[rs.below(7)];
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - m / 7.0) * (c - m / 7.0) / (m / 7.0);
  CHECK(chi2 < 22.46);  // chi^2_6 upper 0.001 point
}

TEST_CASE("normal helpers match high-precision values") {
  CHECK(norm_cdf(0.0) == 0.5);
  CHECK(norm_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-13));
  CHECK(norm_quantile(norm_cdf(-2.3)) == doctest::Approx(-2.3).epsilon(1e-12));
  struct Row { double z, logcdf; };
  for (auto r : {Row{-40, -804.60844201375378817}, Row{-10, -53.231285150512470578},
                 Row{-3, -6.6077262215103495433}, Row{0, -0.69314718055994530942},
                 Row{2, -0.023012909328963488465}, Row{8, -6.2209605742717858094e-16}}) {
    CAPTURE(r.z);
    CHECK(log_norm_cdf(r.z) == doctest::Approx(r.logcdf).epsilon(1e-12));
  }
  CHECK(norm_sf(9.0) == doctest::Approx(1.1285884059538408e-19).epsilon(1e-12));
}

TEST_CASE("brent maximizer") {
  auto r = brent_maximize([](double x) { return -(x - 1.3) * (x - 1.3); }, -5.0, 5.0);
  CHECK(r.converged);
  CHECK(std::abs(r.x - 1.3) < 1e-8);
  auto s = brent_maximize([](double x) { return std::sin(x); }, 0.0, 3.0);
  CHECK(std::abs(s.x - std::numbers::pi / 2) < 1e-8);
  // Monotone objective: maximizer at the bracket edge.
  auto e = brent_maximize([](double x) { return x; }, 0.0, 1.0);
  CHECK(e.x > 1.0 - 1e-7);
}

TEST_CASE("dependence parameter validation") {
  CHECK_THROWS_AS(DependenceParam(0.0), std::invalid_argument);
  CHECK_THROWS_AS(DependenceParam(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(DependenceParam(std::numeric_limits<double>::infinity()), std::invalid_argument);
  CHECK_THROWS_AS(DependenceParam(std::nan("")), std::invalid_argument);
  CHECK(DependenceParam(2.0).lambda() == 2.0);
}

// x, y, Lambda, H, log h; log h from a 40-digit mixed derivative of H.
struct Frozen { double x, y, lam, cdf, logpdf; };
constexpr Frozen kFrozen[] = {
    {0, 0, 1, 0.18587339814818439986, -1.8704099841928499957},
    {0.3, -0.7, 0.5, 0.067186878567164068063, -2.3422279779457923668},
    {-1.2, 2.5, 2.0, 0.036148167724808165315, -11.187702993240202607},
    {1.5, 1.4, 4.0, 0.75417353384543920529, -1.9062691179961442929},
    {3.0, -0.5, 0.1, 0.1829562292697794723, -4.1985083390679920898},
    {-0.4, -0.9, 10.0, 0.085403540163279009029, -4.0850078406583994783},
    {2.2, 4.1, 0.8, 0.88714885569473521947, -5.7519568239928547518},
};

TEST_CASE("cdf and density against frozen high-precision values") {
  for (const auto& f : kFrozen) {
    CAPTURE(f.x);
    CAPTURE(f.y);
    CAPTURE(f.lam);
    CHECK(bhr_cdf(f.x, f.y, DependenceParam(f.lam)) == doctest::Approx(f.cdf).epsilon(1e-13));
    CHECK(bhr_log_pdf({f.x, f.y}, DependenceParam(f.lam)) == doctest::Approx(f.logpdf).epsilon(1e-12));
  }
}

TEST_CASE("cdf limits and margins") {
  const DependenceParam lam(1.7);
  for (double x : {-2.0, 0.0, 1.5, 4.0}) {
    CHECK(bhr_cdf(x, std::numeric_limits<double>::infinity(), lam) ==
          doctest::Approx(oracle::std_gumbel_cdf(x)).epsilon(1e-14));
    CHECK(bhr_cdf(std::numeric_limits<double>::infinity(), x, lam) ==
          doctest::Approx(oracle::std_gumbel_cdf(x)).epsilon(1e-14));
    CHECK(bhr_cdf(x, -std::numeric_limits<double>::infinity(), lam) == 0.0);
  }
  // Lambda -> 0: independence; Lambda -> infinity: comonotone.
  const double x = 0.4, y = -0.3;
  CHECK(bhr_cdf(x, y, DependenceParam(1e-3)) ==
        doctest::Approx(oracle::std_gumbel_cdf(x) * oracle::std_gumbel_cdf(y)).epsilon(1e-12));
  CHECK(bhr_cdf(x, y, DependenceParam(1e4)) ==
        doctest::Approx(oracle::std_gumbel_cdf(std::min(x, y))).epsilon(1e-3));
}

TEST_CASE("density equals the mixed finite difference of the cdf") {
  double worst = 0.0;
  for (double lam : {0.1, 0.5, 1.0, 2.0, 4.0, 8.0}) {
    for (double x = -1.5; x <= 4.0; x += 0.55) {
      for (double y = -1.5; y <= 4.0; y += 0.55) {
        const double fd = oracle::mixed_fd_density(x, y, lam);
        if (fd < 1e-6) continue;  // relative error meaningless at FD noise level
        const double h = std::exp(bhr_log_pdf({x, y}, DependenceParam(lam)));
        worst = std::max(worst, std::abs(h - fd) / fd);
      }
    }
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("density integrates to one") {
  const auto nodes = oracle::gauss_legendre(400, -5.0, 25.0);
  for (double lam : {0.1, 0.5, 1.0, 2.0, 4.0}) {
    CAPTURE(lam);
    double total = 0.0;
    for (const auto& [x, wx] : nodes) {
      for (const auto& [y, wy] : nodes) {
        total += wx * wy * std::exp(bhr_log_pdf({x, y}, DependenceParam(lam)));
      }
    }
    CHECK(std::abs(total - 1.0) < 1e-3);
  }
}

TEST_CASE("exchangeability is exact") {
  RandomStream rs(99);
  for (int i = 0; i < 2000; ++i) {
    const double x = 6 * rs.uniform() - 2, y = 6 * rs.uniform() - 2;
    const DependenceParam lam(0.05 + 10 * rs.uniform());
    REQUIRE(bhr_cdf(x, y, lam) == bhr_cdf(y, x, lam));
    REQUIRE(bhr_log_pdf({x, y}, lam) == bhr_log_pdf({y, x}, lam));
  }
}

TEST_CASE("chi and its inverse") {
  CHECK(chi_of_lambda(DependenceParam(0.1)) == doctest::Approx(1.5239706048321138e-23).epsilon(1e-10));
  CHECK(chi_of_lambda(DependenceParam(1.0)) == doctest::Approx(0.3173105078629141).epsilon(1e-13));
  CHECK(chi_of_lambda(DependenceParam(2.5)) == doctest::Approx(0.68915651677935167).epsilon(1e-13));
  CHECK(DependenceParam(2.0).chi() == doctest::Approx(0.61707507745197379).epsilon(1e-13));
  for (double lam = 0.05; lam < 40; lam *= 1.3) {
    CAPTURE(lam);
    const double back = lambda_of_chi(chi_of_lambda(DependenceParam(lam))).lambda();
    CHECK(std::abs(back - lam) / lam < 1e-8);
  }
  CHECK_THROWS_AS(lambda_of_chi(0.0), std::invalid_argument);
  CHECK_THROWS_AS(lambda_of_chi(1.0), std::invalid_argument);
  // V(1,1) = 2 - chi on unit margins.
  CHECK(DependenceParam(1.3).v11() == doctest::Approx(2.0 - DependenceParam(1.3).chi()));
}

TEST_CASE("conditional cdf against frozen values") {
  struct Row { double y, x, lam, c; };
  for (auto r : {Row{0.2, 0.5, 1.0, 0.44190157142607143541}, Row{1.5, -1.0, 0.5, 0.82133349847473019706},
                 Row{2.3, 2.0, 3.0, 0.7707402317564061869}, Row{-2.0, 0.0, 0.2, 0.00061797944433481406671}}) {
    CAPTURE(r.y);
    CHECK(conditional_cdf_y_given_x(r.y, r.x, DependenceParam(r.lam)) == doctest::Approx(r.c).epsilon(1e-12));
    CHECK(log_conditional_cdf_y_given_x(r.y, r.x, DependenceParam(r.lam)) ==
          doctest::Approx(std::log(r.c)).epsilon(1e-12));
  }
  // Far tails stay finite in log space and ordered.
  const DependenceParam lam(2.0);
  CHECK(std::isfinite(log_conditional_cdf_y_given_x(-30.0, 5.0, lam)));
  double prev = -std::numeric_limits<double>::infinity();
  for (double y = -8; y < 15; y += 0.25) {
    const double c = log_conditional_cdf_y_given_x(y, 0.7, lam);
    CHECK(c >= prev);
    prev = c;
  }
}

TEST_CASE("sampler is deterministic and has standard Gumbel margins") {
  RandomStream a(5), b(5);
  CHECK(sample_bhr(DependenceParam(1.5), 50, a) == sample_bhr(DependenceParam(1.5), 50, b));
  RandomStream zero(1);
  CHECK_THROWS_AS(sample_bhr(DependenceParam(1.0), 0, zero), std::invalid_argument);

  RandomStream rs(11);
  const auto pts = sample_bhr(DependenceParam(2.0), 20000, rs);
  std::vector<double> xs, ys;
  for (auto p : pts) {
    xs.push_back(p.x);
    ys.push_back(p.y);
  }
  CHECK(oracle::ks_pvalue(oracle::ks_statistic(xs, oracle::std_gumbel_cdf), xs.size()) > 0.01);
  CHECK(oracle::ks_pvalue(oracle::ks_statistic(ys, oracle::std_gumbel_cdf), ys.size()) > 0.01);
}

TEST_CASE("sampler cell frequencies match cdf rectangles") {
  const DependenceParam lam(1.2);
  const std::array<double, 5> cuts{-std::numeric_limits<double>::infinity(), -0.3, 0.5, 1.6,
                                   std::numeric_limits<double>::infinity()};
  RandomStream rs(77);
  const std::size_t n = 100000;
  std::array<std::array<int, 4>, 4> counts{};
  for (const auto& p : sample_bhr(lam, n, rs)) {
    int i = 0, j = 0;
    while (p.x > cuts[i + 1]) ++i;
    while (p.y > cuts[j + 1]) ++j;
    ++counts[i][j];
  }
  double chi2 = 0.0;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const double pr = bhr_cdf(cuts[i + 1], cuts[j + 1], lam) - bhr_cdf(cuts[i], cuts[j + 1], lam) -
                        bhr_cdf(cuts[i + 1], cuts[j], lam) + bhr_cdf(cuts[i], cuts[j], lam);
      const double e = pr * n;
      chi2 += (counts[i][j] - e) * (counts[i][j] - e) / e;
    }
  }
  CHECK(chi2 < 37.70);  // chi^2_15 upper 0.001 point
}

TEST_CASE("bivariate series") {
  const BivariateSeries s(std::vector<GumbelPair>{{1, 2}, {3, 4}, {5, 6}});
  CHECK(s.size() == 3);
  CHECK(s.reversed()[0] == GumbelPair{5, 6});
  CHECK(s.slice(1, 3).size() == 2);
  CHECK(s.slice(1, 3)[0] == GumbelPair{3, 4});
  CHECK(s.slice(0, 1).concat(s.slice(1, 3)) == s);
  CHECK(s.xs() == std::vector<double>{1, 3, 5});
  CHECK(s.ys() == std::vector<double>{2, 4, 6});
  const std::vector<double> xs{1, 2}, ys{3, std::nan("")};
  CHECK_THROWS_AS(BivariateSeries(xs, ys), InputError);
  const std::vector<double> shorter{1};
  CHECK_THROWS(BivariateSeries(xs, shorter));
}

TEST_CASE("descriptive statistics") {
  const std::vector<double> v{4, 1, 10, 2, 3};
  CHECK(quantile_type7(v, 0.9) == doctest::Approx(7.6));
  CHECK(quantile_type7(v, 0.5) == doctest::Approx(3.0));
  CHECK(quantile_type7(v, 0.0) == 1.0);
  CHECK(quantile_type7(v, 1.0) == 10.0);
  CHECK(average_ranks(std::vector<double>{3, 1, 3, 2}) == std::vector<double>{3.5, 1, 3.5, 2});
  CHECK(mean(v) == doctest::Approx(4.0));
  CHECK(stddev(std::vector<double>{2, 4, 4, 4, 5, 5, 7, 9}) == doctest::Approx(std::sqrt(32.0 / 7)));
}
