#include "kinship/mcengine.hpp"

#include <algorithm>
#include <exception>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <thread>

#include "kinship/error.hpp"
#include "text_util.hpp"

namespace kinship {

namespace {

constexpr std::uint64_t kNullDomain = 1;
constexpr std::uint64_t kAltDomain = 2;

enum class PairKind { Null, Alt };

unsigned resolve_workers(unsigned requested, std::uint64_t replicates) {
  unsigned n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::uint64_t>(n, replicates));
}

SampleMatrix simulate(const SimConfig& cfg, PairKind kind) {
  cfg.validate();
  const FrequencyTable& table = *cfg.table;
  const PairSampler sampler(cfg);
  const LrEvaluator evaluator(table, cfg.theta0, cfg.theta1, cfg.cb_weights);

  const std::uint64_t total = cfg.replicates;
  SampleMatrix out;
  out.statistics = cfg.statistics;
  out.values.assign(cfg.statistics.size(), std::vector<double>(total));
  out.tags.assign(total, 0);

  // Each worker owns a contiguous block; replicate i writes only slot i.
  const auto run_block = [&](std::uint64_t begin, std::uint64_t end) {
    std::vector<IndexedGenotype> first(table.num_loci());
    std::vector<IndexedGenotype> second(table.num_loci());
    LrBreakdown b;
    for (std::uint64_t i = begin; i < end; ++i) {
      out.tags[i] = kind == PairKind::Null ? sampler.draw_null(i, first, second)
                                           : sampler.draw_alt(i, first, second);
      evaluator.evaluate(first, second, b);
      for (std::size_t s = 0; s < cfg.statistics.size(); ++s) {
        out.values[s][i] = b.value(cfg.statistics[s]);
      }
    }
  };

  const unsigned workers = resolve_workers(cfg.workers, total);
  if (workers <= 1) {
    run_block(0, total);
    return out;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      const std::uint64_t begin = total * w / workers;
      const std::uint64_t end = total * (w + 1) / workers;
      threads.emplace_back([&, w, begin, end] {
        try {
          run_block(begin, end);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace

void SimConfig::validate() const {
  if (!table) throw KinshipError(ErrorCode::InvalidConfig, "no frequency table");
  if (replicates < 1) throw KinshipError(ErrorCode::InvalidConfig, "replicate count must be >= 1");
  if (statistics.empty()) throw KinshipError(ErrorCode::InvalidConfig, "no statistics requested");
  if (table->num_subpops() > std::numeric_limits<std::uint16_t>::max()) {
    throw KinshipError(ErrorCode::InvalidConfig, "too many subpopulations");
  }
  if (cb_weights == PoolWeights::SampleSizes && !table->has_sample_sizes()) {
    throw KinshipError(ErrorCode::MissingSampleSizes, "CB pooling by sample sizes needs sample_sizes");
  }
}

std::span<const double> SampleMatrix::column(Statistic stat) const {
  const auto it = std::find(statistics.begin(), statistics.end(), stat);
  if (it == statistics.end()) {
    throw KinshipError(ErrorCode::InvalidArgument,
                       "statistic " + std::string(to_string(stat)) + " was not simulated");
  }
  return values[static_cast<std::size_t>(it - statistics.begin())];
}

PairSampler::PairSampler(const SimConfig& cfg)
    : seed_(cfg.seed),
      theta1_(cfg.theta1),
      null_same_subpop_(cfg.null_same_subpop),
      num_loci_(cfg.table->num_loci()),
      subpop_sampler_(cfg.table->proportions()) {
  const FrequencyTable& table = *cfg.table;
  allele_samplers_.resize(table.num_subpops());
  for (std::size_t s = 0; s < table.num_subpops(); ++s) {
    for (std::size_t l = 0; l < table.num_loci(); ++l) {
      allele_samplers_[s].emplace_back(table.distribution(s, l).freqs());
    }
  }
}

std::uint16_t PairSampler::draw_null(std::uint64_t replicate, std::span<IndexedGenotype> first,
                                     std::span<IndexedGenotype> second) const {
  RandomStream rng(seed_, kNullDomain, replicate);
  const std::uint16_t k1 = subpop_sampler_.draw(rng);
  const std::uint16_t k2 = null_same_subpop_ ? k1 : subpop_sampler_.draw(rng);
  for (std::size_t l = 0; l < num_loci_; ++l) first[l] = sample_genotype(allele_samplers_[k1][l], rng);
  for (std::size_t l = 0; l < num_loci_; ++l) {
    second[l] = sample_genotype(allele_samplers_[k2][l], rng);
  }
  return k1;
}

std::uint16_t PairSampler::draw_alt(std::uint64_t replicate, std::span<IndexedGenotype> first,
                                    std::span<IndexedGenotype> second) const {
  RandomStream rng(seed_, kAltDomain, replicate);
  const std::uint16_t k = subpop_sampler_.draw(rng);
  for (std::size_t l = 0; l < num_loci_; ++l) {
    first[l] = sample_genotype(allele_samplers_[k][l], rng);
    second[l] = sample_related(first[l], theta1_, allele_samplers_[k][l], rng);
  }
  return k;
}

SampleMatrix simulate_null(const SimConfig& cfg) { return simulate(cfg, PairKind::Null); }

SampleMatrix simulate_alt(const SimConfig& cfg) { return simulate(cfg, PairKind::Alt); }

void write_sample_csv(std::ostream& out, const SampleMatrix& samples) {
  out << "replicate,subpop_tag";
  for (Statistic s : samples.statistics) out << ',' << to_string(s);
  out << '\n';
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  for (std::size_t i = 0; i < samples.replicates(); ++i) {
    out << i << ',' << samples.tags[i];
    for (const auto& column : samples.values) out << ',' << column[i];
    out << '\n';
  }
  out.precision(old_precision);
}

SampleMatrix read_sample_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw KinshipError(ErrorCode::MalformedRow, "empty sample file");
  const auto header = detail::split(detail::trim(line), ',');
  if (header.size() < 3 || header[0] != "replicate" || header[1] != "subpop_tag") {
    throw KinshipError(ErrorCode::MalformedRow, "bad sample header");
  }
  SampleMatrix samples;
  for (std::size_t c = 2; c < header.size(); ++c) {
    samples.statistics.push_back(parse_statistic(header[c]));
  }
  samples.values.resize(samples.statistics.size());
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split(line, ',');
    const auto where = "samples:" + std::to_string(line_no);
    if (fields.size() != header.size()) throw KinshipError(ErrorCode::MalformedRow, where);
    const auto rep = detail::parse_double(fields[0]);
    const auto tag = detail::parse_double(fields[1]);
    if (!rep || *rep != static_cast<double>(samples.replicates()) || !tag || *tag < 0) {
      throw KinshipError(ErrorCode::MalformedRow, where + ": bad replicate/tag");
    }
    samples.tags.push_back(static_cast<std::uint16_t>(*tag));
    for (std::size_t c = 2; c < fields.size(); ++c) {
      const auto v = detail::parse_double(fields[c]);
      if (!v) throw KinshipError(ErrorCode::MalformedRow, where + ": bad value");
      samples.values[c - 2].push_back(*v);
    }
  }
  return samples;
}

}  // namespace kinship
