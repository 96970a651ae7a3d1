#include <doctest.h>

#include <cmath>
#include <memory>
#include <sstream>

#include "kinship/error.hpp"
#include "kinship/mcengine.hpp"
#include "kinship/synth.hpp"
#include "test_support.hpp"

using namespace kinship;
using kinship::testing::make_table;

namespace {

SimConfig config_for(FrequencyTable t, std::uint64_t replicates, std::uint64_t seed = 42) {
  SimConfig cfg;
  cfg.table = std::make_shared<const FrequencyTable>(std::move(t));
  cfg.replicates = replicates;
  cfg.seed = seed;
  return cfg;
}

FrequencyTable small_synth(std::size_t k, std::size_t loci) {
  SynthSpec s;
  s.subpop_names.clear();
  for (std::size_t i = 0; i < k; ++i) s.subpop_names.push_back("S" + std::to_string(i + 1));
  s.num_loci = loci;
  s.alleles_per_locus = 6;
  s.divergence = 0.1;
  s.seed = 5;
  return synthesize_table(s);
}

}  // namespace

TEST_SUITE("mcengine") {
  TEST_CASE("config validation") {
    SimConfig cfg = config_for(make_table({{{0.5, 0.5}}}), 0);
    CHECK_THROWS_AS(cfg.validate(), KinshipError);
    cfg.replicates = 1;
    cfg.statistics.clear();
    CHECK_THROWS_AS(cfg.validate(), KinshipError);
    SimConfig none;
    CHECK_THROWS_AS(none.validate(), KinshipError);
  }

  TEST_CASE("determinism across runs and worker counts") {
    SimConfig cfg = config_for(small_synth(3, 4), 5000);
    cfg.workers = 1;
    const auto a = simulate_null(cfg);
    const auto alt1 = simulate_alt(cfg);
    for (unsigned w : {2u, 3u, 8u}) {
      cfg.workers = w;
      CHECK(simulate_null(cfg) == a);
      CHECK(simulate_alt(cfg) == alt1);
    }
    cfg.replicates = 1;
    CHECK(simulate_null(cfg) == simulate_null(cfg));
  }

  TEST_CASE("replicate i depends only on (seed, i)") {
    SimConfig cfg = config_for(small_synth(2, 3), 100);
    const auto small = simulate_null(cfg);
    cfg.replicates = 300;
    const auto large = simulate_null(cfg);
    for (std::size_t s = 0; s < small.statistics.size(); ++s) {
      for (std::size_t i = 0; i < 100; ++i) CHECK(small.values[s][i] == large.values[s][i]);
    }
    cfg.seed = 43;
    CHECK_FALSE(simulate_null(cfg).values == large.values);
  }

  TEST_CASE("theta0 == theta1 gives zero log-LRs") {
    SimConfig cfg = config_for(make_table({{{0.3, 0.7}, {0.2, 0.2, 0.6}}}), 1000);
    cfg.theta1 = ThetaIBD::unrelated();
    const auto m = simulate_null(cfg);
    for (const auto& col : m.values) {
      for (double v : col) CHECK(v == 0.0);
    }
  }

  TEST_CASE("null LR has mean 1") {
    SimConfig cfg = config_for(make_table({{{0.3, 0.7}}}), 400'000);
    cfg.statistics = {Statistic::LAF};
    const auto m = simulate_null(cfg);
    // exact moments by enumeration of the 2-allele table
    const std::vector<double> f{0.3, 0.7};
    const std::vector<std::pair<int, int>> gs{{0, 0}, {0, 1}, {1, 1}};
    auto hwe = [&](std::pair<int, int> g) {
      return g.first == g.second ? f[g.first] * f[g.first] : 2 * f[g.first] * f[g.second];
    };
    auto p1 = [&](std::pair<int, int> g1, std::pair<int, int> g2) {
      // P(g2 | g1, one allele IBD): average over the transmitted slot
      double total = 0;
      for (int slot : {g1.first, g1.second}) {
        const int other = g2.first == slot ? g2.second : (g2.second == slot ? g2.first : -1);
        if (other >= 0) total += 0.5 * f[other];
      }
      return total;
    };
    double second_moment = 0;
    for (auto g1 : gs) {
      for (auto g2 : gs) {
        const double p0 = hwe(g1) * hwe(g2);
        const double alt = 0.25 * p0 + 0.5 * hwe(g1) * p1(g1, g2) + 0.25 * (g1 == g2 ? hwe(g1) : 0.0);
        second_moment += alt * alt / p0;
      }
    }
    const double sigma = std::sqrt((second_moment - 1.0) / static_cast<double>(cfg.replicates));
    double mean = 0;
    for (double v : m.column(Statistic::LAF)) mean += std::exp(v);
    mean /= static_cast<double>(cfg.replicates);
    CHECK(std::abs(mean - 1.0) < 4 * sigma);
  }

  TEST_CASE("parent-child alternative pairs always share an allele") {
    SimConfig cfg = config_for(small_synth(2, 5), 20'000);
    cfg.theta1 = ThetaIBD::parent_child();
    const PairSampler sampler(cfg);
    std::vector<IndexedGenotype> a(sampler.num_loci()), b(sampler.num_loci());
    for (std::uint64_t i = 0; i < cfg.replicates; ++i) {
      sampler.draw_alt(i, a, b);
      for (std::size_t l = 0; l < a.size(); ++l) {
        CHECK((a[l].a == b[l].a || a[l].a == b[l].b || a[l].b == b[l].a || a[l].b == b[l].b));
      }
    }
    // every structurally impossible pair would show up as -inf
    const auto m = simulate_alt(cfg);
    for (double v : m.column(Statistic::LAF)) CHECK(std::isfinite(v));
  }

  TEST_CASE("subpopulation tags follow the proportions") {
    SimConfig cfg = config_for(make_table({{{0.5, 0.5}}, {{0.4, 0.6}}, {{0.1, 0.9}}}, {0.2, 0.3, 0.5}),
                               200'000);
    cfg.statistics = {Statistic::MAX};
    for (const auto& m : {simulate_null(cfg), simulate_alt(cfg)}) {
      std::array<double, 3> counts{};
      for (auto t : m.tags) counts.at(t) += 1;
      const std::array<double, 3> p{0.2, 0.3, 0.5};
      for (std::size_t k = 0; k < 3; ++k) {
        const double sigma = std::sqrt(p[k] * (1 - p[k]) / 200'000.0);
        CHECK(std::abs(counts[k] / 200'000.0 - p[k]) < 4 * sigma);
      }
    }
  }

  TEST_CASE("null pairs draw subpops independently unless asked otherwise") {
    SimConfig cfg = config_for(make_table({{{0.98, 0.02}}, {{0.02, 0.98}}}), 20'000);
    const PairSampler independent(cfg);
    cfg.null_same_subpop = true;
    const PairSampler same(cfg);
    std::vector<IndexedGenotype> a(1), b(1);
    auto mixed_fraction = [&](const PairSampler& s) {
      int mixed = 0;
      for (std::uint64_t i = 0; i < 20'000; ++i) {
        s.draw_null(i, a, b);
        mixed += (a[0] == IndexedGenotype::make(0, 0)) != (b[0] == IndexedGenotype::make(0, 0));
      }
      return mixed / 20'000.0;
    };
    CHECK(mixed_fraction(independent) > 0.4);
    CHECK(mixed_fraction(same) < 0.1);
  }

  TEST_CASE("sample CSV round trip") {
    SimConfig cfg = config_for(small_synth(2, 3), 200);
    cfg.theta1 = ThetaIBD::parent_child();
    const auto m = simulate_alt(cfg);
    std::ostringstream out;
    write_sample_csv(out, m);
    std::istringstream in(out.str());
    CHECK(read_sample_csv(in) == m);
  }
}
