#include "kinship/synth.hpp"

#include <cmath>
#include <random>
#include <span>

#include "kinship/error.hpp"

namespace kinship {

namespace {

std::vector<double> dirichlet(std::span<const double> concentration, std::mt19937_64& rng) {
  std::vector<double> out(concentration.size());
  double total = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::gamma_distribution<double> gamma(concentration[i], 1.0);
    out[i] = gamma(rng);
    total += out[i];
  }
  if (!(total > 0.0)) return {concentration.begin(), concentration.end()};
  for (double& v : out) v /= total;
  return out;
}

}  // namespace

FrequencyTable synthesize_table(const SynthSpec& spec) {
  const std::size_t k = spec.subpop_names.size();
  if (k == 0) throw KinshipError(ErrorCode::InvalidArgument, "no subpopulations");
  if (spec.alleles_per_locus < 2) {
    throw KinshipError(ErrorCode::InvalidArgument, "need at least 2 alleles per locus");
  }
  if (!(spec.divergence >= 0.0) || !std::isfinite(spec.divergence)) {
    throw KinshipError(ErrorCode::InvalidArgument, "divergence must be >= 0");
  }
  std::vector<std::string> panel = spec.panel;
  if (panel.empty()) {
    for (std::size_t l = 0; l < spec.num_loci; ++l) panel.push_back("L" + std::to_string(l + 1));
  }
  std::vector<double> props = spec.proportions;
  if (props.empty()) props.assign(k, 1.0 / static_cast<double>(k));
  if (props.size() != k || (!spec.sample_sizes.empty() && spec.sample_sizes.size() != k)) {
    throw KinshipError(ErrorCode::InvalidArgument, "per-subpop list has the wrong length");
  }
  double total = 0.0;
  for (double p : props) total += p;
  if (std::abs(total - 1.0) > kProportionTolerance) {
    throw KinshipError(ErrorCode::ProportionSumOutOfTolerance, "synthetic proportions");
  }

  std::vector<Subpopulation> subpops;
  for (std::size_t s = 0; s < k; ++s) {
    Subpopulation sp{spec.subpop_names[s], props[s] / total, std::nullopt};
    if (!spec.sample_sizes.empty()) sp.sample_size = spec.sample_sizes[s];
    subpops.push_back(std::move(sp));
  }

  std::mt19937_64 rng(spec.seed);
  std::vector<Allele> alphabet;
  for (std::size_t a = 0; a < spec.alleles_per_locus; ++a) {
    alphabet.emplace_back(std::to_string(a + 8));
  }
  const std::vector<double> flat(spec.alleles_per_locus, 1.0);
  std::vector<std::vector<AlleleDistribution>> dists(k);
  for (std::size_t l = 0; l < panel.size(); ++l) {
    const auto base = dirichlet(flat, rng);
    std::vector<double> concentration(base);
    if (spec.divergence > 0.0) {
      for (double& c : concentration) c /= spec.divergence;
    }
    for (std::size_t s = 0; s < k; ++s) {
      auto f = spec.divergence > 0.0 ? dirichlet(concentration, rng) : base;
      dists[s].emplace_back(alphabet, apply_floor(f, spec.floor));
    }
  }
  return FrequencyTable(std::move(panel), std::move(subpops), std::move(dists), spec.floor);
}

double mean_total_variation(const FrequencyTable& table, std::size_t s1, std::size_t s2) {
  double sum = 0.0;
  for (std::size_t l = 0; l < table.num_loci(); ++l) {
    const auto f = table.distribution(s1, l).freqs();
    const auto g = table.distribution(s2, l).freqs();
    double tv = 0.0;
    for (std::size_t a = 0; a < f.size(); ++a) tv += std::abs(f[a] - g[a]);
    sum += 0.5 * tv;
  }
  return sum / static_cast<double>(table.num_loci());
}

}  // namespace kinship
