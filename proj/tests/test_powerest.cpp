#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "kinship/error.hpp"
#include "kinship/powerest.hpp"
#include "kinship/random.hpp"
#include "kinship/special_functions.hpp"

using namespace kinship;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

SampleMatrix matrix(std::vector<double> values, std::vector<std::uint16_t> tags = {}) {
  SampleMatrix m;
  m.statistics = {Statistic::LAF};
  if (tags.empty()) tags.assign(values.size(), 0);
  m.values = {std::move(values)};
  m.tags = std::move(tags);
  return m;
}

std::vector<double> uniforms(std::size_t n, std::uint64_t seed) {
  RandomStream rng(seed);
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform();
  return v;
}

}  // namespace

TEST_SUITE("powerest") {
  TEST_CASE("threshold is the order statistic with strict exceedance") {
    std::vector<double> s{3, 1, 4, 10, 5, 9, 2, 6, 8, 7};
    const auto t = null_threshold(s, 0.2);
    CHECK(t.log_value == 8.0);
    CHECK(t.exceedances == 2);
    CHECK(t.realized_fpr() == doctest::Approx(0.2));

    const std::vector<double> flat(50, 1.5);
    const auto tf = null_threshold(flat, 0.1);
    CHECK(tf.log_value == 1.5);
    CHECK(tf.realized_fpr() == 0.0);

    CHECK(null_threshold(s, 1.0).log_value == -kInf);
    CHECK(null_threshold(s, 0.05).unstable);
  }

  TEST_CASE("uniform order-statistic oracle") {
    const auto u = uniforms(1'000'000, 8);
    const double alpha = 0.0002;
    const auto t = null_threshold(u, alpha);
    const double sigma = std::sqrt(alpha * (1 - alpha) / 1e6);
    CHECK(std::abs(t.log_value - (1 - alpha)) < 4 * sigma);
    CHECK(t.realized_fpr() <= alpha);
  }

  TEST_CASE("realized FPR never exceeds alpha") {
    auto u = uniforms(5000, 9);
    for (double& x : u) x = std::floor(x * 50);  // heavy ties
    for (double alpha : {0.001, 0.01, 0.05, 0.2, 0.5}) {
      const auto t = null_threshold(u, alpha);
      CHECK(t.realized_fpr() <= alpha);
    }
  }

  TEST_CASE("infinite sentinels") {
    const std::vector<double> null{-kInf, 0.0, 1.0, kInf};
    const auto t = null_threshold(null, 0.25);
    CHECK(t.log_value == 1.0);
    const std::vector<double> alt{-kInf, kInf, 1.0, 2.0};
    CHECK(power(alt, t.log_value).successes == 2);
  }

  TEST_CASE("Clopper-Pearson against beta quantiles") {
    using boost::math::ibeta_inv;
    const auto ci = clopper_pearson(50, 100);
    CHECK(std::abs(ci.low - ibeta_inv(50.0, 51.0, 0.025)) < 1e-9);
    CHECK(std::abs(ci.high - ibeta_inv(51.0, 50.0, 0.975)) < 1e-9);
    CHECK(ci.low == doctest::Approx(0.3983).epsilon(1e-3));
    CHECK(ci.high == doctest::Approx(0.6017).epsilon(1e-3));

    // The published band (0.7805, 0.7821) is centred on ~0.7813: it is the
    // exact interval of ~781,300 successes, shown with power rounded to 0.781.
    const auto big = clopper_pearson(781000, 1'000'000);
    CHECK(std::abs(big.low - ibeta_inv(781000.0, 219001.0, 0.025)) < 1e-9);
    CHECK(std::abs((big.high - big.low) - (0.7821 - 0.7805)) < 1e-4);
    const auto shifted = clopper_pearson(781300, 1'000'000);
    CHECK(std::round(shifted.low * 1e4) / 1e4 == doctest::Approx(0.7805));
    CHECK(std::round(shifted.high * 1e4) / 1e4 == doctest::Approx(0.7821));

    const auto zero = clopper_pearson(0, 1000);
    CHECK(zero.low == 0.0);
    CHECK(zero.high == doctest::Approx(1 - std::pow(0.025, 1.0 / 1000)).epsilon(1e-12));
    const auto all = clopper_pearson(1000, 1000);
    CHECK(all.high == 1.0);

    for (std::uint64_t n : {10u, 37u, 500u}) {
      for (std::uint64_t k = 1; k < n; k += n / 7 + 1) {
        const auto c = clopper_pearson(k, n);
        CHECK(std::abs(c.low - ibeta_inv(double(k), double(n - k + 1), 0.025)) < 1e-9);
        CHECK(std::abs(c.high - ibeta_inv(double(k + 1), double(n - k), 0.975)) < 1e-9);
      }
    }
  }

  TEST_CASE("CI width shrinks like n^-1/2") {
    const auto a = clopper_pearson(300, 1000);
    const auto b = clopper_pearson(30000, 100000);
    const double ratio = (a.high - a.low) / (b.high - b.low);
    CHECK(ratio == doctest::Approx(10.0).epsilon(0.02));
  }

  TEST_CASE("special functions against Boost") {
    for (double p : {1e-10, 1e-4, 0.025, 0.3, 0.5, 0.9, 0.975, 1 - 1e-9}) {
      CHECK(std::abs(normal_quantile(p) - boost::math::quantile(boost::math::normal(), p)) < 1e-9);
    }
    for (double x : {0.01, 0.2, 0.5, 0.77, 0.999}) {
      for (auto [a, b] : {std::pair{0.5, 0.5}, {2.0, 3.0}, {50.0, 51.0}, {1000.0, 20.0}}) {
        CHECK(std::abs(incomplete_beta(x, a, b) - boost::math::ibeta(a, b, x)) < 1e-12);
      }
    }
    CHECK(normal_quantile(0.0) == -kInf);
    CHECK(normal_quantile(1.0) == kInf);
  }

  TEST_CASE("power with exact interval") {
    const std::vector<double> alt{0.5, 1.5, 2.5, 3.5};
    const auto p = power(alt, 1.5);
    CHECK(p.successes == 2);
    CHECK(p.power == 0.5);
    CHECK(p.ci.low <= p.power);
    CHECK(p.power <= p.ci.high);
    // monotone transforms commute with the comparison
    std::vector<double> lin(alt.size());
    std::transform(alt.begin(), alt.end(), lin.begin(), [](double v) { return std::exp(v); });
    CHECK(power(lin, std::exp(1.5)).successes == 2);
  }

  TEST_CASE("power curve: monotone, alpha = 1 gives power 1, self-calibration") {
    const auto null = uniforms(200'000, 1);
    const auto alt = uniforms(200'000, 2);
    const auto grid = log_spaced_grid(1e-3, 1.0, 20);
    CHECK(grid.front() == doctest::Approx(1e-3));
    CHECK(grid.back() == 1.0);
    const auto curve = power_curve(Statistic::LAF, null, alt, grid);
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
      CHECK(curve.points[i].power >= curve.points[i - 1].power);
    }
    CHECK(curve.points.back().power == 1.0);
    for (const auto& pt : curve.points) {
      const double sigma = std::sqrt(pt.alpha * (1 - pt.alpha) / 200'000.0 * 2);
      CHECK(std::abs(pt.power - pt.alpha) <= 4 * sigma + 1e-12);
    }
    const auto def = default_alpha_grid();
    CHECK(def.size() == 30);
    CHECK(def.front() == doctest::Approx(1e-6));
    CHECK(def.back() == doctest::Approx(4e-5));
  }

  TEST_CASE("per-subpopulation power and recombination") {
    const auto m = matrix({5, 5, 5, 5, -1, -1, -1, -1}, {0, 0, 0, 0, 1, 1, 1, 1});
    CHECK(subpop_power(m, Statistic::LAF, 0.0, 0).power == 1.0);
    CHECK(subpop_power(m, Statistic::LAF, 0.0, 1).power == 0.0);
    CHECK_THROWS_AS(subpop_power(m, Statistic::LAF, 0.0, 2), KinshipError);

    const auto null = uniforms(10'000, 3);
    auto alt_values = uniforms(10'000, 4);
    std::vector<std::uint16_t> tags(alt_values.size());
    for (std::size_t i = 0; i < tags.size(); ++i) tags[i] = static_cast<std::uint16_t>(i % 3);
    const auto alt = matrix(alt_values, tags);
    const std::vector<std::string> names{"a", "b", "c"};
    const auto r = power_report(matrix(null), alt, Statistic::LAF, 0.05, names);
    double recombined = 0;
    std::uint64_t n = 0;
    for (const auto& sp : r.per_subpop) {
      recombined += static_cast<double>(sp.estimate.trials) / 10'000.0 * sp.estimate.power;
      n += sp.estimate.trials;
    }
    CHECK(n == 10'000);
    CHECK(recombined == doctest::Approx(r.power.power).epsilon(1e-14));

    const auto single = power_report(matrix(null), matrix(alt_values), Statistic::LAF, 0.05,
                                     std::vector<std::string>{"only"});
    CHECK(single.per_subpop[0].estimate.power == single.power.power);
  }

  TEST_CASE("difference-in-power Wald interval") {
    const auto d = power_diff_ci(0.8, 10'000, 0.7, 10'000);
    const double half = 1.959963984540054 * std::sqrt(0.8 * 0.2 / 1e4 + 0.7 * 0.3 / 1e4);
    CHECK(std::abs(d.estimate - 0.1) < 1e-12);
    CHECK(std::abs(d.low - (0.1 - half)) < 1e-12);
    CHECK(std::abs(d.high - (0.1 + half)) < 1e-12);
    CHECK(half == doctest::Approx(0.01192).epsilon(1e-3));

    const auto sym = power_diff_ci(0.4, 500, 0.4, 800);
    CHECK(sym.low == doctest::Approx(-sym.high));
    CHECK(power_diff_ci(0.5, 20, 0.5, 100).small_sample);

    const auto wide = power_diff_ci(0.5, 10, 0.5, 10, 1.0);
    CHECK(wide.low == -1.0);
    CHECK(wide.high == 1.0);
  }

  TEST_CASE("CSV round trips") {
    const std::vector<PowerRow> rows{{Statistic::LAF, 2e-4, 4870.332343030882, 0.6415, 0.63, 0.65},
                                     {Statistic::CB, 2e-5, 1e300, 0.0, 0.0, 3.7e-6}};
    std::ostringstream out;
    write_power_csv(out, rows);
    std::istringstream in(out.str());
    CHECK(read_power_csv(in) == rows);

    PowerCurve c{Statistic::RMAX, "", {{1e-6, 0, 0.25, true}, {1e-5, 0, 0.5, false}}};
    std::ostringstream cout_;
    write_curve_csv(cout_, std::vector<PowerCurve>{c});
    std::istringstream cin_(cout_.str());
    const auto back = read_curve_csv(cin_);
    REQUIRE(back.size() == 1);
    CHECK(back[0].statistic == Statistic::RMAX);
    REQUIRE(back[0].points.size() == 2);
    CHECK(back[0].points[1].power == 0.5);
    CHECK(back[0].points[0].alpha == 1e-6);

    const std::vector<NamedDiffCI> diffs{{"North", "South", power_diff_ci(0.7, 100, 0.6, 120)}};
    std::ostringstream dout;
    write_diff_csv(dout, diffs);
    std::istringstream din(dout.str());
    const auto dback = read_diff_csv(din);
    REQUIRE(dback.size() == 1);
    CHECK(dback[0].subpop_j == "South");
    CHECK(dback[0].ci.estimate == diffs[0].ci.estimate);
    CHECK(dback[0].ci.low == diffs[0].ci.low);
  }
}
