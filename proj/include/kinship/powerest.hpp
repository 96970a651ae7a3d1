#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "kinship/lrstats.hpp"
#include "kinship/mcengine.hpp"

namespace kinship {

// Significance levels used for the three standard tests.
inline constexpr double kParentChildAlpha = 2e-5;
inline constexpr double kFullSibAlpha = 2e-4;
inline constexpr double kHalfSibAlpha = 2e-3;
// alpha * B below this makes the empirical quantile unstable.
inline constexpr double kStableQuantileCount = 10.0;

struct Threshold {
  double log_value = 0.0;
  double alpha = 0.0;
  std::uint64_t exceedances = 0;  // null samples strictly above log_value
  std::uint64_t samples = 0;
  bool unstable = false;          // alpha * B < kStableQuantileCount

  double realized_fpr() const {
    return samples ? static_cast<double>(exceedances) / static_cast<double>(samples) : 0.0;
  }
};

/// The ceil(B(1 - alpha))-th order statistic of the null sample: the smallest
/// sample value c with #{x > c} / B <= alpha. alpha = 1 gives -infinity.
Threshold null_threshold(std::span<const double> null_samples, double alpha);
/// Same, for an already ascending-sorted sample.
Threshold threshold_from_sorted(std::span<const double> sorted, double alpha);

struct ProportionCI {
  double low = 0.0;
  double high = 1.0;
};

/// Exact (Clopper-Pearson) two-sided interval at `level`.
ProportionCI clopper_pearson(std::uint64_t successes, std::uint64_t trials, double level = 0.95);

struct PowerEstimate {
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;
  double power = 0.0;
  ProportionCI ci;
};

/// Fraction of alternative samples strictly above the threshold, with an
/// exact 95% interval.
PowerEstimate power(std::span<const double> alt_samples, double threshold_log);

struct CurvePoint {
  double alpha = 0.0;
  double threshold_log = 0.0;
  double power = 0.0;
  bool unstable = false;
};

struct PowerCurve {
  Statistic statistic = Statistic::LAF;
  std::string label;  // subpopulation name for per-subpop curves, empty otherwise
  std::vector<CurvePoint> points;
};

/// `count` log-spaced values from `low` to `high` inclusive.
std::vector<double> log_spaced_grid(double low, double high, std::size_t count);
/// 30 points from 1e-6 to 4e-5.
std::vector<double> default_alpha_grid();

PowerCurve power_curve(Statistic stat, std::span<const double> null_samples,
                       std::span<const double> alt_samples, std::span<const double> alpha_grid);

/// Power restricted to alternative replicates tagged with `subpop`; the
/// denominator is the number of such replicates. Throws EmptySubpopSample.
PowerEstimate subpop_power(const SampleMatrix& alt, Statistic stat, double threshold_log,
                           std::size_t subpop);

/// Per-subpop power curve over the thresholds of `null_samples`.
PowerCurve subpop_power_curve(Statistic stat, std::span<const double> null_samples,
                              const SampleMatrix& alt, std::size_t subpop,
                              std::span<const double> alpha_grid, std::string label);

struct DiffCI {
  std::size_t subpop_i = 0;
  std::size_t subpop_j = 0;
  double estimate = 0.0;
  double low = 0.0;
  double high = 0.0;
  bool small_sample = false;  // n_i or n_j below 30
};

/// Wald interval for beta_i - beta_j:
///   (b_i - b_j) +/- z_{(1-level)/2} sqrt(b_i(1-b_i)/n_i + b_j(1-b_j)/n_j),
/// clipped to [-1, 1].
DiffCI power_diff_ci(double power_i, std::uint64_t n_i, double power_j, std::uint64_t n_j,
                     double level = 0.95);

struct SubpopPower {
  std::string name;
  PowerEstimate estimate;
};

struct PowerReport {
  Statistic statistic = Statistic::LAF;
  double alpha = 0.0;
  Threshold threshold;
  PowerEstimate power;
  std::vector<SubpopPower> per_subpop;
};

PowerReport power_report(const SampleMatrix& null_samples, const SampleMatrix& alt_samples,
                         Statistic stat, double alpha, std::span<const std::string> subpop_names);

// Writers emit fixed formatting so fixed-seed runs are byte-identical.
struct PowerRow {
  Statistic statistic = Statistic::LAF;
  double alpha = 0.0;
  double threshold = 0.0;  // linear scale
  double power = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;

  friend bool operator==(const PowerRow&, const PowerRow&) = default;
};
PowerRow to_row(const PowerReport& report);

void write_power_csv(std::ostream& out, std::span<const PowerRow> rows);
std::vector<PowerRow> read_power_csv(std::istream& in);
void write_curve_csv(std::ostream& out, std::span<const PowerCurve> curves);
std::vector<PowerCurve> read_curve_csv(std::istream& in);

struct NamedDiffCI {
  std::string subpop_i;
  std::string subpop_j;
  DiffCI ci;
};
void write_diff_csv(std::ostream& out, std::span<const NamedDiffCI> rows);
std::vector<NamedDiffCI> read_diff_csv(std::istream& in);

}  // namespace kinship
