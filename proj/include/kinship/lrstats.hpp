#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kinship/frequency_table.hpp"
#include "kinship/pairprob.hpp"
#include "kinship/profile.hpp"

namespace kinship {

/// LR-based statistics for combining subpopulation information.
///   LAF   LR under the proportion-weighted local average frequencies
///   AVG   proportion-weighted mean of per-subpop LRs
///   MAX   largest per-subpop LR
///   MIN   smallest per-subpop LR
///   RMAX  max_k L(theta1 | f_k) / max_k L(theta0 | f_k)
///   RMIN  min_k L(theta1 | f_k) / min_k L(theta0 | f_k)
///   CB    LR under a single pooled frequency set
enum class Statistic : std::uint8_t { LAF, AVG, MAX, MIN, RMAX, RMIN, CB };
inline constexpr std::size_t kNumStatistics = 7;
inline constexpr std::array<Statistic, kNumStatistics> kAllStatistics{
    Statistic::LAF, Statistic::AVG,  Statistic::MAX, Statistic::MIN,
    Statistic::RMAX, Statistic::RMIN, Statistic::CB};

std::string_view to_string(Statistic stat);
Statistic parse_statistic(std::string_view name);
/// Comma-separated names, or "all".
std::vector<Statistic> parse_statistic_list(std::string_view text);

/// log(num / den) with sentinels: -inf numerator -> -inf; finite numerator
/// over -inf denominator -> +inf; both -inf -> -inf.
double log_ratio(double log_num, double log_den) noexcept;

struct LrBreakdown {
  std::vector<double> loglik_null;  // log L(theta0 | f_k), k = 1..K
  std::vector<double> loglik_alt;   // log L(theta1 | f_k)
  double local_null = 0.0;
  double local_alt = 0.0;
  double pooled_null = 0.0;
  double pooled_alt = 0.0;
  std::array<double, kNumStatistics> stats{};  // log scale, indexed by Statistic

  double value(Statistic s) const { return stats[static_cast<std::size_t>(s)]; }
  double subpop_log_lr(std::size_t k) const { return log_ratio(loglik_alt[k], loglik_null[k]); }
};

/// Fills `b.stats` from the stored log-likelihoods and the mixing proportions.
void derive_statistics(LrBreakdown& b, std::span<const double> proportions);

/// Sum over panel loci of log pair probabilities of the pair under subpop
/// `subpop` of `table`. Throws PanelMismatch / UnknownAllele.
double loglik(const ProfilePair& pair, const ThetaIBD& theta, const FrequencyTable& table,
              std::size_t subpop = 0);

/// Every statistic for one profile pair.
LrBreakdown lr_all(const ProfilePair& pair, const ThetaIBD& theta0, const ThetaIBD& theta1,
                   const FrequencyTable& table, PoolWeights cb_weights);
LrBreakdown lr_all(const ProfilePair& pair, const ThetaIBD& theta0, const ThetaIBD& theta1,
                   const FrequencyTable& table);

/// Precompiled evaluator over alphabet indices; the simulation hot path.
/// Holds copies of all frequency sets, so it outlives the source table.
class LrEvaluator {
 public:
  LrEvaluator(const FrequencyTable& table, const ThetaIBD& theta0, const ThetaIBD& theta1,
              PoolWeights cb_weights);

  /// Genotypes are indexed by panel position, alleles by the table alphabet.
  void evaluate(std::span<const IndexedGenotype> first, std::span<const IndexedGenotype> second,
                LrBreakdown& out) const;

  /// Maps a profile onto panel order and alphabet indices.
  std::vector<IndexedGenotype> index_profile(const Profile& profile) const;

  std::size_t num_subpops() const noexcept { return proportions_.size(); }
  std::size_t num_loci() const noexcept { return panel_.size(); }

 private:
  std::vector<std::string> panel_;
  std::vector<AlleleDistribution> alphabets_;  // per locus, for indexing
  std::vector<double> proportions_;
  // freqs_[set][locus]; sets 0..K-1 are subpops, K is local, K+1 is pooled
  std::vector<std::vector<std::vector<double>>> freqs_;
  ThetaIBD theta0_;
  ThetaIBD theta1_;
};

}  // namespace kinship
