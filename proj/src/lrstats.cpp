#include "kinship/lrstats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kinship/error.hpp"
#include "text_util.hpp"

namespace kinship {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double safe_log(double p) { return p > 0.0 ? std::log(p) : -kInf; }

}  // namespace

std::string_view to_string(Statistic stat) {
  switch (stat) {
    case Statistic::LAF: return "LAF";
    case Statistic::AVG: return "AVG";
    case Statistic::MAX: return "MAX";
    case Statistic::MIN: return "MIN";
    case Statistic::RMAX: return "RMAX";
    case Statistic::RMIN: return "RMIN";
    case Statistic::CB: return "CB";
  }
  return "?";
}

Statistic parse_statistic(std::string_view name) {
  std::string upper(detail::trim(name));
  for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (upper.starts_with("LR")) upper.erase(0, 2);
  for (Statistic s : kAllStatistics) {
    if (to_string(s) == upper) return s;
  }
  throw KinshipError(ErrorCode::InvalidArgument, "unknown statistic '" + std::string(name) + "'");
}

std::vector<Statistic> parse_statistic_list(std::string_view text) {
  if (detail::trim(text) == "all") return {kAllStatistics.begin(), kAllStatistics.end()};
  std::vector<Statistic> out;
  for (const auto& item : detail::split(text, ',')) {
    const Statistic s = parse_statistic(item);
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  }
  if (out.empty()) throw KinshipError(ErrorCode::InvalidArgument, "no statistics requested");
  return out;
}

double log_ratio(double log_num, double log_den) noexcept {
  if (log_num == -kInf) return -kInf;
  if (log_den == -kInf) return kInf;
  return log_num - log_den;
}

void derive_statistics(LrBreakdown& b, std::span<const double> proportions) {
  const std::size_t k = b.loglik_null.size();
  double max_lr = -kInf;
  double min_lr = kInf;
  double max_alt = -kInf;
  double min_alt = kInf;
  double max_null = -kInf;
  double min_null = kInf;
  for (std::size_t i = 0; i < k; ++i) {
    const double r = b.subpop_log_lr(i);
    max_lr = std::max(max_lr, r);
    min_lr = std::min(min_lr, r);
    max_alt = std::max(max_alt, b.loglik_alt[i]);
    min_alt = std::min(min_alt, b.loglik_alt[i]);
    max_null = std::max(max_null, b.loglik_null[i]);
    min_null = std::min(min_null, b.loglik_null[i]);
  }

  double avg = max_lr;
  if (std::isfinite(max_lr)) {
    double acc = 0.0;
    for (std::size_t i = 0; i < k; ++i) acc += proportions[i] * std::exp(b.subpop_log_lr(i) - max_lr);
    avg = std::clamp(max_lr + std::log(acc), min_lr, max_lr);
  }

  auto& s = b.stats;
  s[static_cast<std::size_t>(Statistic::LAF)] = log_ratio(b.local_alt, b.local_null);
  s[static_cast<std::size_t>(Statistic::AVG)] = avg;
  s[static_cast<std::size_t>(Statistic::MAX)] = max_lr;
  s[static_cast<std::size_t>(Statistic::MIN)] = min_lr;
  s[static_cast<std::size_t>(Statistic::RMAX)] = log_ratio(max_alt, max_null);
  s[static_cast<std::size_t>(Statistic::RMIN)] = log_ratio(min_alt, min_null);
  s[static_cast<std::size_t>(Statistic::CB)] = log_ratio(b.pooled_alt, b.pooled_null);
}

LrEvaluator::LrEvaluator(const FrequencyTable& table, const ThetaIBD& theta0,
                         const ThetaIBD& theta1, PoolWeights cb_weights)
    : panel_(table.panel().begin(), table.panel().end()),
      proportions_(table.proportions()),
      theta0_(theta0),
      theta1_(theta1) {
  const FrequencyTable local = local_average(table);
  const FrequencyTable pooled = pooled_frequencies(table, cb_weights);
  const std::size_t k = table.num_subpops();
  freqs_.resize(k + 2);
  for (std::size_t l = 0; l < panel_.size(); ++l) {
    alphabets_.push_back(table.distribution(0, l));
    for (std::size_t s = 0; s < k; ++s) {
      const auto f = table.distribution(s, l).freqs();
      freqs_[s].emplace_back(f.begin(), f.end());
    }
    const auto fl = local.distribution(0, l).freqs();
    freqs_[k].emplace_back(fl.begin(), fl.end());
    const auto fp = pooled.distribution(0, l).freqs();
    freqs_[k + 1].emplace_back(fp.begin(), fp.end());
  }
}

std::vector<IndexedGenotype> LrEvaluator::index_profile(const Profile& profile) const {
  if (profile.size() != panel_.size()) {
    throw KinshipError(ErrorCode::PanelMismatch,
                       "profile has " + std::to_string(profile.size()) + " loci, panel has " +
                           std::to_string(panel_.size()));
  }
  std::vector<IndexedGenotype> out;
  out.reserve(panel_.size());
  for (std::size_t l = 0; l < panel_.size(); ++l) {
    const LocusGenotype* g = profile.find(panel_[l]);
    if (!g) throw KinshipError(ErrorCode::PanelMismatch, "profile lacks locus " + panel_[l]);
    out.push_back(to_indexed(*g, alphabets_[l]));
  }
  return out;
}

void LrEvaluator::evaluate(std::span<const IndexedGenotype> first,
                           std::span<const IndexedGenotype> second, LrBreakdown& out) const {
  const std::size_t k = proportions_.size();
  out.loglik_null.assign(k, 0.0);
  out.loglik_alt.assign(k, 0.0);
  std::array<double, 2> local{};
  std::array<double, 2> pooled{};
  for (std::size_t set = 0; set < k + 2; ++set) {
    double null_sum = 0.0;
    double alt_sum = 0.0;
    const auto& per_locus = freqs_[set];
    for (std::size_t l = 0; l < per_locus.size(); ++l) {
      const IbdComponents c = ibd_components(first[l], second[l], per_locus[l]);
      null_sum += safe_log(c.combine(theta0_));
      alt_sum += safe_log(c.combine(theta1_));
    }
    if (set < k) {
      out.loglik_null[set] = null_sum;
      out.loglik_alt[set] = alt_sum;
    } else if (set == k) {
      local = {null_sum, alt_sum};
    } else {
      pooled = {null_sum, alt_sum};
    }
  }
  out.local_null = local[0];
  out.local_alt = local[1];
  out.pooled_null = pooled[0];
  out.pooled_alt = pooled[1];
  derive_statistics(out, proportions_);
}

double loglik(const ProfilePair& pair, const ThetaIBD& theta, const FrequencyTable& table,
              std::size_t subpop) {
  if (subpop >= table.num_subpops()) {
    throw KinshipError(ErrorCode::InvalidArgument, "subpopulation index out of range");
  }
  if (pair.first.size() != table.num_loci() || pair.second.size() != table.num_loci()) {
    throw KinshipError(ErrorCode::PanelMismatch, "profile loci do not match the panel");
  }
  double sum = 0.0;
  for (std::size_t l = 0; l < table.num_loci(); ++l) {
    const auto& locus = table.panel()[l];
    const LocusGenotype* g1 = pair.first.find(locus);
    const LocusGenotype* g2 = pair.second.find(locus);
    if (!g1 || !g2) throw KinshipError(ErrorCode::PanelMismatch, "profile lacks locus " + locus);
    sum += log_pair_probability(*g1, *g2, theta, table.distribution(subpop, l));
  }
  return sum;
}

LrBreakdown lr_all(const ProfilePair& pair, const ThetaIBD& theta0, const ThetaIBD& theta1,
                   const FrequencyTable& table, PoolWeights cb_weights) {
  const LrEvaluator evaluator(table, theta0, theta1, cb_weights);
  const auto x1 = evaluator.index_profile(pair.first);
  const auto x2 = evaluator.index_profile(pair.second);
  LrBreakdown out;
  evaluator.evaluate(x1, x2, out);
  return out;
}

LrBreakdown lr_all(const ProfilePair& pair, const ThetaIBD& theta0, const ThetaIBD& theta1,
                   const FrequencyTable& table) {
  return lr_all(pair, theta0, theta1, table, default_pool_weights(table));
}

}  // namespace kinship
