#include "kinship/powerest.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>

#include <fmt/format.h>

#include "kinship/error.hpp"
#include "kinship/special_functions.hpp"
#include "text_util.hpp"

namespace kinship {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kSmallSample = 30;

void check_alpha(double alpha) {
  if (!(alpha > 0.0) || alpha > 1.0) {
    throw KinshipError(ErrorCode::InvalidArgument, fmt::format("alpha {} not in (0, 1]", alpha));
  }
}

std::uint64_t count_above(std::span<const double> sorted, double threshold) {
  const auto it = std::upper_bound(sorted.begin(), sorted.end(), threshold);
  return static_cast<std::uint64_t>(sorted.end() - it);
}

std::vector<double> sorted_copy(std::span<const double> values) {
  std::vector<double> out(values.begin(), values.end());
  std::sort(out.begin(), out.end());
  return out;
}

PowerEstimate estimate(std::uint64_t successes, std::uint64_t trials) {
  PowerEstimate e;
  e.successes = successes;
  e.trials = trials;
  e.power = trials ? static_cast<double>(successes) / static_cast<double>(trials) : 0.0;
  e.ci = clopper_pearson(successes, trials);
  return e;
}

double parse_field(const std::string& text, const std::string& where) {
  const auto v = detail::parse_double(text);
  if (!v) throw KinshipError(ErrorCode::MalformedRow, where + ": bad number '" + text + "'");
  return *v;
}

std::vector<std::vector<std::string>> read_rows(std::istream& in,
                                                const std::vector<std::string>& header) {
  std::string line;
  if (!std::getline(in, line) || detail::split(detail::trim(line), ',') != header) {
    throw KinshipError(ErrorCode::MalformedRow, "unexpected CSV header");
  }
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    auto fields = detail::split(detail::trim(line), ',');
    if (fields.size() != header.size()) {
      throw KinshipError(ErrorCode::MalformedRow, "row has wrong number of fields: " + line);
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

}  // namespace

Threshold threshold_from_sorted(std::span<const double> sorted, double alpha) {
  check_alpha(alpha);
  if (sorted.empty()) throw KinshipError(ErrorCode::InvalidArgument, "empty null sample");
  const auto n = static_cast<std::uint64_t>(sorted.size());
  const double expected = alpha * static_cast<double>(n);
  // floor(alpha * B), guarded against 0.0002 * 1e6 = 199.99999999999997
  const auto allowed = std::min<std::uint64_t>(
      n, static_cast<std::uint64_t>(std::floor(expected * (1.0 + 1e-12))));
  Threshold t;
  t.alpha = alpha;
  t.samples = n;
  t.unstable = expected < kStableQuantileCount;
  const std::uint64_t rank = n - allowed;  // 1-based order statistic
  t.log_value = rank == 0 ? -kInf : sorted[rank - 1];
  t.exceedances = count_above(sorted, t.log_value);
  return t;
}

Threshold null_threshold(std::span<const double> null_samples, double alpha) {
  const auto sorted = sorted_copy(null_samples);
  return threshold_from_sorted(sorted, alpha);
}

ProportionCI clopper_pearson(std::uint64_t successes, std::uint64_t trials, double level) {
  if (trials == 0 || successes > trials) {
    throw KinshipError(ErrorCode::InvalidArgument, "clopper_pearson: need 0 <= k <= n, n > 0");
  }
  if (!(level > 0.0) || !(level < 1.0)) {
    throw KinshipError(ErrorCode::InvalidArgument, "clopper_pearson: level not in (0, 1)");
  }
  const double tail = 0.5 * (1.0 - level);
  const auto k = static_cast<double>(successes);
  const auto n = static_cast<double>(trials);
  ProportionCI ci;
  ci.low = successes == 0 ? 0.0 : beta_quantile(tail, k, n - k + 1.0);
  ci.high = successes == trials ? 1.0 : beta_quantile(1.0 - tail, k + 1.0, n - k);
  return ci;
}

PowerEstimate power(std::span<const double> alt_samples, double threshold_log) {
  if (alt_samples.empty()) throw KinshipError(ErrorCode::InvalidArgument, "empty alt sample");
  const auto successes = static_cast<std::uint64_t>(std::count_if(
      alt_samples.begin(), alt_samples.end(), [&](double x) { return x > threshold_log; }));
  return estimate(successes, alt_samples.size());
}

std::vector<double> log_spaced_grid(double low, double high, std::size_t count) {
  if (!(low > 0.0) || !(high >= low) || count == 0) {
    throw KinshipError(ErrorCode::InvalidArgument, "bad alpha grid bounds");
  }
  if (count == 1) return {low};
  std::vector<double> grid(count);
  const double step = std::log(high / low) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) {
    grid[i] = low * std::exp(step * static_cast<double>(i));
  }
  grid.front() = low;
  grid.back() = high;
  return grid;
}

std::vector<double> default_alpha_grid() { return log_spaced_grid(1e-6, 4e-5, 30); }

PowerCurve power_curve(Statistic stat, std::span<const double> null_samples,
                       std::span<const double> alt_samples, std::span<const double> alpha_grid) {
  if (!std::is_sorted(alpha_grid.begin(), alpha_grid.end())) {
    throw KinshipError(ErrorCode::InvalidArgument, "alpha grid must be ascending");
  }
  if (alt_samples.empty()) throw KinshipError(ErrorCode::InvalidArgument, "empty alt sample");
  const auto null_sorted = sorted_copy(null_samples);
  const auto alt_sorted = sorted_copy(alt_samples);
  PowerCurve curve;
  curve.statistic = stat;
  for (double alpha : alpha_grid) {
    const Threshold t = threshold_from_sorted(null_sorted, alpha);
    const auto hits = count_above(alt_sorted, t.log_value);
    curve.points.push_back({alpha, t.log_value,
                            static_cast<double>(hits) / static_cast<double>(alt_sorted.size()),
                            t.unstable});
  }
  return curve;
}

PowerEstimate subpop_power(const SampleMatrix& alt, Statistic stat, double threshold_log,
                           std::size_t subpop) {
  const auto values = alt.column(stat);
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (alt.tags[i] != subpop) continue;
    ++trials;
    if (values[i] > threshold_log) ++successes;
  }
  if (trials == 0) {
    throw KinshipError(ErrorCode::EmptySubpopSample,
                       "no alternative replicates tagged with subpop " + std::to_string(subpop));
  }
  return estimate(successes, trials);
}

PowerCurve subpop_power_curve(Statistic stat, std::span<const double> null_samples,
                              const SampleMatrix& alt, std::size_t subpop,
                              std::span<const double> alpha_grid, std::string label) {
  const auto values = alt.column(stat);
  std::vector<double> selected;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (alt.tags[i] == subpop) selected.push_back(values[i]);
  }
  if (selected.empty()) {
    throw KinshipError(ErrorCode::EmptySubpopSample,
                       "no alternative replicates tagged with subpop " + std::to_string(subpop));
  }
  PowerCurve curve = power_curve(stat, null_samples, selected, alpha_grid);
  curve.label = std::move(label);
  return curve;
}

DiffCI power_diff_ci(double power_i, std::uint64_t n_i, double power_j, std::uint64_t n_j,
                     double level) {
  if (n_i == 0 || n_j == 0) throw KinshipError(ErrorCode::InvalidArgument, "empty subpop sample");
  if (!(level > 0.0) || level > 1.0) {
    throw KinshipError(ErrorCode::InvalidArgument, "level not in (0, 1]");
  }
  for (double b : {power_i, power_j}) {
    if (!(b >= 0.0) || b > 1.0) throw KinshipError(ErrorCode::InvalidArgument, "power not in [0,1]");
  }
  DiffCI ci;
  ci.estimate = power_i - power_j;
  ci.small_sample = n_i < kSmallSample || n_j < kSmallSample;
  const double z = normal_quantile(1.0 - 0.5 * (1.0 - level));
  if (!std::isfinite(z)) {
    ci.low = -1.0;
    ci.high = 1.0;
    return ci;
  }
  const double se = std::sqrt(power_i * (1.0 - power_i) / static_cast<double>(n_i) +
                              power_j * (1.0 - power_j) / static_cast<double>(n_j));
  ci.low = std::max(-1.0, ci.estimate - z * se);
  ci.high = std::min(1.0, ci.estimate + z * se);
  return ci;
}

PowerReport power_report(const SampleMatrix& null_samples, const SampleMatrix& alt_samples,
                         Statistic stat, double alpha, std::span<const std::string> subpop_names) {
  PowerReport report;
  report.statistic = stat;
  report.alpha = alpha;
  report.threshold = null_threshold(null_samples.column(stat), alpha);
  report.power = power(alt_samples.column(stat), report.threshold.log_value);
  for (std::size_t k = 0; k < subpop_names.size(); ++k) {
    const bool present =
        std::find(alt_samples.tags.begin(), alt_samples.tags.end(), k) != alt_samples.tags.end();
    SubpopPower sp{subpop_names[k], {}};
    if (present) sp.estimate = subpop_power(alt_samples, stat, report.threshold.log_value, k);
    report.per_subpop.push_back(std::move(sp));
  }
  return report;
}

PowerRow to_row(const PowerReport& report) {
  return {report.statistic, report.alpha, std::exp(report.threshold.log_value),
          report.power.power, report.power.ci.low, report.power.ci.high};
}

void write_power_csv(std::ostream& out, std::span<const PowerRow> rows) {
  out << "statistic,alpha,threshold,power,ci_low,ci_high\n";
  for (const auto& r : rows) {
    out << fmt::format("{},{},{},{},{},{}\n", to_string(r.statistic), r.alpha, r.threshold,
                       r.power, r.ci_low, r.ci_high);
  }
}

std::vector<PowerRow> read_power_csv(std::istream& in) {
  std::vector<PowerRow> out;
  for (const auto& f :
       read_rows(in, {"statistic", "alpha", "threshold", "power", "ci_low", "ci_high"})) {
    out.push_back({parse_statistic(f[0]), parse_field(f[1], "power"), parse_field(f[2], "power"),
                   parse_field(f[3], "power"), parse_field(f[4], "power"),
                   parse_field(f[5], "power")});
  }
  return out;
}

void write_curve_csv(std::ostream& out, std::span<const PowerCurve> curves) {
  out << "statistic,alpha,power\n";
  for (const auto& c : curves) {
    for (const auto& p : c.points) {
      out << fmt::format("{},{},{}\n", to_string(c.statistic), p.alpha, p.power);
    }
  }
}

std::vector<PowerCurve> read_curve_csv(std::istream& in) {
  std::vector<PowerCurve> curves;
  for (const auto& f : read_rows(in, {"statistic", "alpha", "power"})) {
    const Statistic stat = parse_statistic(f[0]);
    if (curves.empty() || curves.back().statistic != stat) {
      curves.push_back(PowerCurve{stat, {}, {}});
    }
    CurvePoint p;
    p.alpha = parse_field(f[1], "curve");
    p.power = parse_field(f[2], "curve");
    curves.back().points.push_back(p);
  }
  return curves;
}

void write_diff_csv(std::ostream& out, std::span<const NamedDiffCI> rows) {
  out << "subpop_i,subpop_j,estimate,ci_low,ci_high\n";
  for (const auto& r : rows) {
    out << fmt::format("{},{},{},{},{}\n", r.subpop_i, r.subpop_j, r.ci.estimate, r.ci.low,
                       r.ci.high);
  }
}

std::vector<NamedDiffCI> read_diff_csv(std::istream& in) {
  std::vector<NamedDiffCI> out;
  for (const auto& f : read_rows(in, {"subpop_i", "subpop_j", "estimate", "ci_low", "ci_high"})) {
    NamedDiffCI row;
    row.subpop_i = f[0];
    row.subpop_j = f[1];
    row.ci.estimate = parse_field(f[2], "diff");
    row.ci.low = parse_field(f[3], "diff");
    row.ci.high = parse_field(f[4], "diff");
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace kinship
