#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "threadlens/stats.hpp"
#include "threadlens/synth.hpp"

using namespace threadlens;

TEST_CASE("ccdf walks distinct values from fraction one") {
  auto curve = ccdf({5.0, 1.0, 1.0, 2.0});
  REQUIRE(curve.ok());
  REQUIRE(curve->points.size() == 3);
  CHECK(curve->points[0].value == 1.0);
  CHECK(curve->points[0].fraction == 1.0);
  CHECK(curve->points[1].value == 2.0);
  CHECK(curve->points[1].fraction == 0.5);
  CHECK(curve->points[2].value == 5.0);
  CHECK(curve->points[2].fraction == 0.25);
  CHECK(curve->total_n == 4);

  CHECK(ccdf({}).error().code == Errc::empty_input);
  CHECK(ccdf({1.0, 0.0}).error().code == Errc::nonpositive_value);
  CHECK(ccdf({1.0, -2.0}).error().code == Errc::nonpositive_value);
}

TEST_CASE("linear histogram covers the range with half-open bins") {
  auto h = make_histogram({0.0, 0.5, 1.5}, BinSpec::linear(1.0));
  REQUIRE(h.ok());
  CHECK(h->bin_edges == std::vector<double>{0.0, 1.0, 2.0});
  CHECK(h->counts == std::vector<std::uint64_t>{2, 1});
  CHECK(h->total_n == 3);

  CHECK(make_histogram({}, BinSpec::linear(1.0)).error().code == Errc::empty_input);
  CHECK(make_histogram({1.0}, BinSpec::linear(0.0)).error().code == Errc::invalid_param);
}

TEST_CASE("logarithmic histogram grows a zero bucket when needed") {
  auto h = make_histogram({0.0, 1.0, 2.0, 8.0}, BinSpec::logarithmic(2.0));
  REQUIRE(h.ok());
  CHECK(h->bin_edges == std::vector<double>{0.0, 1.0, 2.0, 4.0, 8.0, 16.0});
  CHECK(h->counts == std::vector<std::uint64_t>{1, 1, 1, 0, 1});

  CHECK(make_histogram({-1.0, 2.0}, BinSpec::logarithmic(2.0)).error().code ==
        Errc::invalid_param);
  CHECK(make_histogram({1.0, 2.0}, BinSpec::logarithmic(1.0)).error().code ==
        Errc::invalid_param);
}

TEST_CASE("every value lands inside the edge span") {
  std::vector<double> values;
  for (int i = 0; i < 500; ++i) values.push_back(0.37 * i + 0.001);
  for (auto spec : {BinSpec::linear(3.0), BinSpec::logarithmic(1.3)}) {
    auto h = make_histogram(values, spec);
    REQUIRE(h.ok());
    CHECK(h->bin_edges.front() <= 0.001);
    CHECK(h->bin_edges.back() > values.back());
    std::uint64_t total = 0;
    for (auto c : h->counts) total += c;
    CHECK(total == values.size());
  }
}

TEST_CASE("power-law estimator matches the closed form on tiny samples") {
  const double e1 = std::exp(1.0);
  auto fit = fit_powerlaw_mle({e1, e1 * e1}, 1.0);
  REQUIRE(fit.ok());
  // sum of logs is 3, so alpha = 1 + 2/3
  CHECK(fit->exponent_or_mu == Catch::Approx(1.0 + 2.0 / 3.0).epsilon(1e-12));
  CHECK(fit->std_error == Catch::Approx((2.0 / 3.0) / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(fit->n_tail == 2);
  CHECK(fit->xmin == 1.0);
}

TEST_CASE("four identical log-unit samples give exactly alpha two") {
  const double e1 = std::exp(1.0);
  auto fit = fit_powerlaw_mle({e1, e1, e1, e1}, 1.0);
  REQUIRE(fit.ok());
  CHECK(fit->exponent_or_mu == 2.0);
  CHECK(fit->std_error == 0.5);
}

TEST_CASE("power-law estimator rejects degenerate input") {
  CHECK(fit_powerlaw_mle({2.0, 3.0}, 0.0).error().code == Errc::invalid_param);
  CHECK(fit_powerlaw_mle({2.0, 3.0}, -1.0).error().code == Errc::invalid_param);
  CHECK(fit_powerlaw_mle({5.0}, 1.0).error().code == Errc::too_few_samples);
  CHECK(fit_powerlaw_mle({0.5, 0.7}, 1.0).error().code == Errc::too_few_samples);
  CHECK(fit_powerlaw_mle({2.0, 2.0, 2.0}, 2.0).error().code == Errc::degenerate_tail);
}

TEST_CASE("estimator recovers a planted exponent") {
  auto sample = sample_pareto(2.5, 1.0, 20'000, 7);
  REQUIRE(sample.ok());
  auto fit = fit_powerlaw_mle(*sample, 1.0);
  REQUIRE(fit.ok());
  CHECK(fit->exponent_or_mu == Catch::Approx(2.5).margin(0.05));
  CHECK(fit->n_tail == sample->size());
  CHECK(fit->ks_stat < 0.02);

  auto scanned = scan_xmin_ks(*sample);
  REQUIRE(scanned.ok());
  CHECK(scanned->exponent_or_mu == Catch::Approx(2.5).margin(0.15));
}

TEST_CASE("xmin scan requires distinct values and positive samples") {
  std::vector<double> few = {1, 1, 2, 2, 3, 3, 4, 4, 5};
  CHECK(scan_xmin_ks(few).error().code == Errc::too_few_distinct);
  std::vector<double> bad = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, -1};
  CHECK(scan_xmin_ks(bad).error().code == Errc::nonpositive_value);
}

TEST_CASE("ks statistic checks both corners of each step") {
  std::vector<double> one = {1.0};
  const double d = detail::ks_statistic(std::span<const double>(one),
                                        [](double) { return 0.5; });
  CHECK(d == 0.5);

  std::vector<double> two = {1.0, 2.0};
  // model puts all mass below: F = 1 everywhere, worst corner is f - 0/2
  const double d2 = detail::ks_statistic(std::span<const double>(two),
                                         [](double) { return 1.0; });
  CHECK(d2 == 1.0);
}

TEST_CASE("lognormal estimator is exact on a two-point sample") {
  const double e1 = std::exp(1.0);
  auto fit = fit_lognormal_mle({1.0, e1});
  REQUIRE(fit.ok());
  // logs are {0, 1}: mu 0.5, population sigma 0.5
  CHECK(fit->exponent_or_mu == 0.5);
  CHECK(fit->sigma == 0.5);
  CHECK(fit->n_tail == 2);

  CHECK(fit_lognormal_mle({3.0}).error().code == Errc::too_few_samples);
  CHECK(fit_lognormal_mle({3.0, 3.0, 3.0}).error().code == Errc::zero_variance);
  CHECK(fit_lognormal_mle({1.0, -1.0}).error().code == Errc::nonpositive_value);
}

TEST_CASE("hurwitz zeta series matches independent references") {
  // zeta(2, 1) = pi^2 / 6
  const double pi = std::acos(-1.0);
  CHECK(detail::hurwitz_zeta(2.0, 1.0) == Catch::Approx(pi * pi / 6.0).epsilon(1e-12));

  // brute-force partial sum; the remainder collapses onto its integral
  // approximation to within ~1e-16 at this depth
  const double alpha = 2.5, q = 3.0;
  double direct = 0.0;
  const int K = 2'000'000;
  for (int k = K - 1; k >= 0; --k) direct += std::pow(q + k, -alpha);
  const double tail = std::pow(q + K, 1.0 - alpha) / (alpha - 1.0);
  CHECK(std::abs(detail::hurwitz_zeta(alpha, q) - (direct + tail)) < 1e-9);
}

TEST_CASE("discrete power-law fit recovers an exactly planted exponent") {
  // exact zeta sampler: inverse CDF over a long truncated table
  const double alpha = 2.5;
  const std::size_t kmax = 1'000'000;  // truncation mass ~1e-9, far below noise
  std::vector<double> cdf(kmax);
  double acc = 0.0;
  for (std::size_t k = 1; k <= kmax; ++k) {
    acc += std::pow(static_cast<double>(k), -alpha);
    cdf[k - 1] = acc;
  }
  std::mt19937_64 gen(123);
  std::vector<double> sample(30'000);
  for (auto& v : sample) {
    const double u = acc * (static_cast<double>(gen() >> 11) * 0x1.0p-53);
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    v = static_cast<double>((it - cdf.begin()) + 1);
  }

  auto fit = fit_powerlaw_discrete(sample, 1.0);
  REQUIRE(fit.ok());
  CHECK(fit->exponent_or_mu == Catch::Approx(alpha).margin(0.05));
  CHECK(fit->std_error > 0.0);
  CHECK(fit->std_error < 0.05);
  CHECK(fit->n_tail == sample.size());

  CHECK(fit_powerlaw_discrete(sample, 0.5).error().code == Errc::invalid_param);
}

TEST_CASE("density grid counts cells and averages columns") {
  std::vector<std::pair<double, double>> pairs = {
      {0.5, 0.5}, {0.5, 1.5}, {1.5, 1.5}};
  auto g = density_grid_2d(pairs, BinSpec::linear(1.0), BinSpec::linear(1.0));
  REQUIRE(g.ok());
  REQUIRE(g->nx() == 2);
  REQUIRE(g->ny() == 2);
  CHECK(g->at(0, 0) == 1);
  CHECK(g->at(0, 1) == 1);
  CHECK(g->at(1, 0) == 0);
  CHECK(g->at(1, 1) == 1);
  CHECK(g->col_count == std::vector<std::uint64_t>{2, 1});
  CHECK(g->col_mean_y[0] == 1.0);
  CHECK(g->col_mean_y[1] == 1.5);
  CHECK(g->total_n == 3);

  CHECK(density_grid_2d({}, BinSpec::linear(1.0), BinSpec::linear(1.0)).error().code ==
        Errc::empty_input);
}
