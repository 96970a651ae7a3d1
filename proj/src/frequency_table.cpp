#include "kinship/frequency_table.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "kinship/error.hpp"
#include "text_util.hpp"

namespace kinship {

namespace {

constexpr double kTableSumTolerance = 1e-6;

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    out += items[i];
  }
  return out;
}

std::string format_number(double v) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return os.str();
}

std::string join(const std::vector<double>& items) {
  std::vector<std::string> parts;
  parts.reserve(items.size());
  for (double v : items) parts.push_back(format_number(v));
  return join(parts);
}

std::vector<double> parse_number_list(const std::string& value, const std::string& where) {
  std::vector<double> out;
  for (const auto& item : detail::split(value, ',')) {
    const auto v = detail::parse_double(item);
    if (!v) throw KinshipError(ErrorCode::InvalidMetadata, where + ": bad number '" + item + "'");
    out.push_back(*v);
  }
  return out;
}

}  // namespace

AlleleDistribution::AlleleDistribution(std::vector<Allele> alleles, std::vector<double> freqs)
    : alleles_(std::move(alleles)), freqs_(std::move(freqs)) {
  if (alleles_.size() != freqs_.size() || alleles_.empty()) {
    throw KinshipError(ErrorCode::InvalidArgument, "allele/frequency length mismatch");
  }
  std::set<std::string> seen;
  for (const auto& a : alleles_) {
    if (!seen.insert(a.label()).second) {
      throw KinshipError(ErrorCode::DuplicateAllele, "allele " + a.label() + " listed twice");
    }
  }
}

std::optional<std::size_t> AlleleDistribution::index_of(const Allele& allele) const {
  for (std::size_t i = 0; i < alleles_.size(); ++i) {
    if (alleles_[i] == allele) return i;
  }
  return std::nullopt;
}

double AlleleDistribution::frequency(const Allele& allele) const {
  const auto idx = index_of(allele);
  if (!idx) throw KinshipError(ErrorCode::UnknownAllele, "allele " + allele.label());
  return freqs_[*idx];
}

std::vector<double> apply_floor(std::span<const double> raw, double floor) {
  if (!(floor > 0.0) || floor * static_cast<double>(raw.size()) >= 1.0) {
    throw KinshipError(ErrorCode::InvalidArgument,
                       "frequency floor must be positive and below 1/#alleles");
  }
  double total = 0.0;
  for (double v : raw) {
    if (!std::isfinite(v) || v < 0.0) {
      throw KinshipError(ErrorCode::NonPositiveFrequency, "frequency " + format_number(v));
    }
    total += v;
  }
  if (!(total > 0.0)) {
    throw KinshipError(ErrorCode::NonPositiveFrequency, "frequencies sum to zero");
  }
  std::vector<double> out(raw.begin(), raw.end());
  for (double& v : out) v /= total;

  std::vector<bool> pinned(out.size(), false);
  while (true) {
    std::size_t num_pinned = 0;
    double free_mass = 0.0;
    bool changed = false;
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (!pinned[i] && out[i] < floor) {
        pinned[i] = true;
        changed = true;
      }
      if (pinned[i]) {
        ++num_pinned;
      } else {
        free_mass += out[i];
      }
    }
    if (!changed) break;
    const double scale = (1.0 - static_cast<double>(num_pinned) * floor) / free_mass;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = pinned[i] ? floor : out[i] * scale;
  }
  return out;
}

TableMetadata read_metadata(std::istream& in, const std::string& source_name) {
  TableMetadata meta;
  std::string line;
  std::size_t line_no = 0;
  bool have_names = false;
  bool have_props = false;
  std::set<std::string> keys;
  while (std::getline(in, line)) {
    ++line_no;
    auto text = detail::trim(line);
    if (const auto hash = text.find('#'); hash != std::string_view::npos) {
      text = detail::trim(text.substr(0, hash));
    }
    if (text.empty()) continue;
    const auto where = source_name + ":" + std::to_string(line_no);
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw KinshipError(ErrorCode::InvalidMetadata, where + ": expected 'key = value'");
    }
    const std::string key(detail::trim(text.substr(0, eq)));
    const std::string value(detail::trim(text.substr(eq + 1)));
    if (!keys.insert(key).second) {
      throw KinshipError(ErrorCode::InvalidMetadata, where + ": duplicate key '" + key + "'");
    }
    if (key == "subpops") {
      meta.subpop_names = detail::split(value, ',');
      have_names = true;
    } else if (key == "proportions") {
      meta.proportions = parse_number_list(value, where);
      have_props = true;
    } else if (key == "sample_sizes") {
      meta.sample_sizes = parse_number_list(value, where);
    } else if (key == "panel") {
      meta.panel = detail::split(value, ',');
    } else if (key == "floor") {
      const auto v = detail::parse_double(value);
      if (!v) throw KinshipError(ErrorCode::InvalidMetadata, where + ": bad floor");
      meta.floor = *v;
    } else if (key == "freqs") {
      meta.freqs_path = value;
    } else {
      throw KinshipError(ErrorCode::InvalidMetadata, where + ": unknown key '" + key + "'");
    }
  }
  if (!have_names || !have_props) {
    throw KinshipError(ErrorCode::InvalidMetadata,
                       source_name + ": 'subpops' and 'proportions' are required");
  }
  return meta;
}

void write_metadata(std::ostream& out, const TableMetadata& meta) {
  out << "subpops = " << join(meta.subpop_names) << '\n';
  out << "proportions = " << join(meta.proportions) << '\n';
  if (!meta.sample_sizes.empty()) out << "sample_sizes = " << join(meta.sample_sizes) << '\n';
  if (!meta.panel.empty()) out << "panel = " << join(meta.panel) << '\n';
  out << "floor = " << format_number(meta.floor) << '\n';
  if (!meta.freqs_path.empty()) out << "freqs = " << meta.freqs_path << '\n';
}

PoolWeights parse_pool_weights(const std::string& name) {
  if (name == "census") return PoolWeights::Census;
  if (name == "samples") return PoolWeights::SampleSizes;
  if (name == "equal") return PoolWeights::Equal;
  throw KinshipError(ErrorCode::InvalidArgument, "unknown weight scheme '" + name + "'");
}

std::string_view to_string(PoolWeights weights) {
  switch (weights) {
    case PoolWeights::Census: return "census";
    case PoolWeights::SampleSizes: return "samples";
    case PoolWeights::Equal: return "equal";
  }
  return "?";
}

FrequencyTable::FrequencyTable(std::vector<std::string> panel, std::vector<Subpopulation> subpops,
                               std::vector<std::vector<AlleleDistribution>> dists, double floor)
    : panel_(std::move(panel)), subpops_(std::move(subpops)), dists_(std::move(dists)),
      floor_(floor) {
  if (panel_.empty()) throw KinshipError(ErrorCode::InvalidArgument, "empty locus panel");
  if (subpops_.empty()) throw KinshipError(ErrorCode::InvalidArgument, "no subpopulations");
  if (!(floor_ > 0.0)) throw KinshipError(ErrorCode::InvalidArgument, "floor must be positive");
  if (std::set<std::string>(panel_.begin(), panel_.end()).size() != panel_.size()) {
    throw KinshipError(ErrorCode::PanelMismatch, "duplicate locus in panel");
  }
  double total = 0.0;
  for (const auto& s : subpops_) {
    if (!(s.proportion > 0.0) || s.proportion > 1.0) {
      throw KinshipError(ErrorCode::InvalidMetadata, "proportion of " + s.name + " not in (0,1]");
    }
    total += s.proportion;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw KinshipError(ErrorCode::ProportionSumOutOfTolerance, "proportions sum to " +
                                                                   format_number(total));
  }
  if (dists_.size() != subpops_.size()) {
    throw KinshipError(ErrorCode::MissingLocusForSubpop, "distribution/subpop count mismatch");
  }
  for (std::size_t s = 0; s < dists_.size(); ++s) {
    if (dists_[s].size() != panel_.size()) {
      throw KinshipError(ErrorCode::MissingLocusForSubpop, subpops_[s].name);
    }
    for (std::size_t l = 0; l < panel_.size(); ++l) {
      const auto& d = dists_[s][l];
      if (!std::equal(d.alleles().begin(), d.alleles().end(), dists_[0][l].alleles().begin(),
                      dists_[0][l].alleles().end())) {
        throw KinshipError(ErrorCode::InvalidArgument,
                           "alphabet of " + panel_[l] + " differs between subpopulations");
      }
      double sum = 0.0;
      for (double f : d.freqs()) {
        if (!(f > 0.0)) {
          throw KinshipError(ErrorCode::NonPositiveFrequency, subpops_[s].name + "/" + panel_[l]);
        }
        sum += f;
      }
      if (std::abs(sum - 1.0) > kTableSumTolerance) {
        throw KinshipError(ErrorCode::InvalidArgument, subpops_[s].name + "/" + panel_[l] +
                                                           " frequencies sum to " +
                                                           format_number(sum));
      }
    }
  }
}

bool FrequencyTable::has_sample_sizes() const {
  return std::all_of(subpops_.begin(), subpops_.end(),
                     [](const Subpopulation& s) { return s.sample_size.has_value(); });
}

std::optional<std::size_t> FrequencyTable::locus_index(const std::string& locus) const {
  const auto it = std::find(panel_.begin(), panel_.end(), locus);
  if (it == panel_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - panel_.begin());
}

std::vector<double> FrequencyTable::proportions() const {
  std::vector<double> out;
  out.reserve(subpops_.size());
  for (const auto& s : subpops_) out.push_back(s.proportion);
  return out;
}

TableMetadata FrequencyTable::metadata() const {
  TableMetadata meta;
  for (const auto& s : subpops_) {
    meta.subpop_names.push_back(s.name);
    meta.proportions.push_back(s.proportion);
  }
  if (has_sample_sizes()) {
    for (const auto& s : subpops_) meta.sample_sizes.push_back(*s.sample_size);
  }
  meta.panel = panel_;
  meta.floor = floor_;
  return meta;
}

FrequencyTable load_frequency_table(std::istream& csv, const TableMetadata& meta,
                                    const std::string& source_name) {
  const std::size_t num_subpops = meta.subpop_names.size();
  if (num_subpops == 0) throw KinshipError(ErrorCode::InvalidMetadata, "no subpopulations");
  if (meta.proportions.size() != num_subpops) {
    throw KinshipError(ErrorCode::InvalidMetadata, "proportions count != subpops count");
  }
  if (!meta.sample_sizes.empty() && meta.sample_sizes.size() != num_subpops) {
    throw KinshipError(ErrorCode::InvalidMetadata, "sample_sizes count != subpops count");
  }
  if (std::set<std::string>(meta.subpop_names.begin(), meta.subpop_names.end()).size() !=
      num_subpops) {
    throw KinshipError(ErrorCode::InvalidMetadata, "duplicate subpopulation name");
  }

  double prop_total = 0.0;
  for (std::size_t s = 0; s < num_subpops; ++s) {
    const double p = meta.proportions[s];
    if (!(p > 0.0) || p > 1.0) {
      throw KinshipError(ErrorCode::InvalidMetadata,
                         "proportion of " + meta.subpop_names[s] + " not in (0,1]");
    }
    prop_total += p;
  }
  if (std::abs(prop_total - 1.0) > kProportionTolerance) {
    throw KinshipError(ErrorCode::ProportionSumOutOfTolerance,
                       "proportions sum to " + format_number(prop_total));
  }

  std::vector<std::string> panel = meta.panel;
  const bool panel_from_csv = panel.empty();

  // (subpop, locus) -> allele -> raw frequency
  std::map<std::pair<std::size_t, std::string>, std::map<std::string, double>> raw;
  std::map<std::string, std::set<Allele>> alphabets;

  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(csv, line)) {
    ++line_no;
    const auto text = detail::trim(line);
    if (text.empty()) continue;
    const auto where = source_name + ":" + std::to_string(line_no);
    const auto fields = detail::split(text, ',');
    if (!header_seen) {
      if (fields != std::vector<std::string>{"subpop", "locus", "allele", "freq"}) {
        throw KinshipError(ErrorCode::MalformedRow,
                           where + ": expected header 'subpop,locus,allele,freq'");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != 4 || fields[0].empty() || fields[1].empty() || fields[2].empty()) {
      throw KinshipError(ErrorCode::MalformedRow, where + ": expected 4 non-empty fields");
    }
    const auto name_it = std::find(meta.subpop_names.begin(), meta.subpop_names.end(), fields[0]);
    if (name_it == meta.subpop_names.end()) {
      throw KinshipError(ErrorCode::MalformedRow, where + ": unknown subpop '" + fields[0] + "'");
    }
    const auto subpop = static_cast<std::size_t>(name_it - meta.subpop_names.begin());
    const auto& locus = fields[1];
    if (std::find(panel.begin(), panel.end(), locus) == panel.end()) {
      if (!panel_from_csv) {
        throw KinshipError(ErrorCode::MalformedRow, where + ": locus '" + locus +
                                                        "' is not in the panel");
      }
      panel.push_back(locus);
    }
    const auto freq = detail::parse_double(fields[3]);
    if (!freq) throw KinshipError(ErrorCode::MalformedRow, where + ": bad frequency");
    if (!std::isfinite(*freq) || *freq < 0.0) {
      throw KinshipError(ErrorCode::NonPositiveFrequency, where + ": frequency " + fields[3]);
    }
    auto& cell = raw[{subpop, locus}];
    if (!cell.emplace(fields[2], *freq).second) {
      throw KinshipError(ErrorCode::DuplicateAllele,
                         where + ": " + fields[0] + "/" + locus + " allele " + fields[2]);
    }
    alphabets[locus].insert(Allele(fields[2]));
  }
  if (!header_seen) throw KinshipError(ErrorCode::MalformedRow, source_name + ": empty file");
  if (panel.empty()) throw KinshipError(ErrorCode::MalformedRow, source_name + ": no data rows");

  std::vector<Subpopulation> subpops;
  for (std::size_t s = 0; s < num_subpops; ++s) {
    Subpopulation sp{meta.subpop_names[s], meta.proportions[s] / prop_total, std::nullopt};
    if (!meta.sample_sizes.empty()) {
      if (!(meta.sample_sizes[s] > 0.0)) {
        throw KinshipError(ErrorCode::InvalidMetadata, "sample size must be positive");
      }
      sp.sample_size = meta.sample_sizes[s];
    }
    subpops.push_back(std::move(sp));
  }

  std::vector<std::vector<AlleleDistribution>> dists(num_subpops);
  for (std::size_t s = 0; s < num_subpops; ++s) {
    for (const auto& locus : panel) {
      const auto cell = raw.find({s, locus});
      if (cell == raw.end()) {
        throw KinshipError(ErrorCode::MissingLocusForSubpop,
                           source_name + ": " + meta.subpop_names[s] + " has no rows for " + locus);
      }
      const auto& alphabet = alphabets.at(locus);
      std::vector<Allele> alleles(alphabet.begin(), alphabet.end());
      std::vector<double> values;
      values.reserve(alleles.size());
      for (const auto& a : alleles) {
        const auto it = cell->second.find(a.label());
        values.push_back(it == cell->second.end() ? 0.0 : it->second);
      }
      try {
        dists[s].emplace_back(std::move(alleles), apply_floor(values, meta.floor));
      } catch (const KinshipError& e) {
        throw KinshipError(e.code(), source_name + ": " + meta.subpop_names[s] + "/" + locus +
                                         ": " + e.what());
      }
    }
  }
  return FrequencyTable(std::move(panel), std::move(subpops), std::move(dists), meta.floor);
}

void write_frequency_csv(std::ostream& out, const FrequencyTable& table) {
  out << "subpop,locus,allele,freq\n";
  for (std::size_t s = 0; s < table.num_subpops(); ++s) {
    for (std::size_t l = 0; l < table.num_loci(); ++l) {
      const auto& d = table.distribution(s, l);
      for (std::size_t a = 0; a < d.size(); ++a) {
        out << table.subpops()[s].name << ',' << table.panel()[l] << ',' << d.alleles()[a].label()
            << ',' << format_number(d.freqs()[a]) << '\n';
      }
    }
  }
}

FrequencyTable pool_with_weights(const FrequencyTable& table, std::span<const double> weights,
                                 const std::string& name) {
  if (weights.size() != table.num_subpops()) {
    throw KinshipError(ErrorCode::InvalidArgument, "one weight per subpopulation required");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw KinshipError(ErrorCode::InvalidArgument, "pooling weights must be non-negative");
    }
    total += w;
  }
  if (!(total > 0.0)) throw KinshipError(ErrorCode::InvalidArgument, "pooling weights sum to 0");

  std::vector<AlleleDistribution> pooled;
  pooled.reserve(table.num_loci());
  for (std::size_t l = 0; l < table.num_loci(); ++l) {
    const auto alleles = table.distribution(0, l).alleles();
    std::vector<double> f(alleles.size(), 0.0);
    for (std::size_t s = 0; s < table.num_subpops(); ++s) {
      const double w = weights[s] / total;
      const auto src = table.distribution(s, l).freqs();
      for (std::size_t a = 0; a < f.size(); ++a) f[a] += w * src[a];
    }
    pooled.emplace_back(std::vector<Allele>(alleles.begin(), alleles.end()), std::move(f));
  }
  std::vector<std::string> panel(table.panel().begin(), table.panel().end());
  std::vector<std::vector<AlleleDistribution>> dists{std::move(pooled)};
  return FrequencyTable(std::move(panel), {Subpopulation{name, 1.0, std::nullopt}},
                        std::move(dists), table.floor());
}

FrequencyTable local_average(const FrequencyTable& table) {
  return pool_with_weights(table, table.proportions(), "local");
}

FrequencyTable pooled_frequencies(const FrequencyTable& table, PoolWeights weights) {
  std::vector<double> w;
  switch (weights) {
    case PoolWeights::Census:
      w = table.proportions();
      break;
    case PoolWeights::SampleSizes:
      if (!table.has_sample_sizes()) {
        throw KinshipError(ErrorCode::MissingSampleSizes,
                           "table metadata carries no per-subpop sample sizes");
      }
      for (const auto& s : table.subpops()) w.push_back(*s.sample_size);
      break;
    case PoolWeights::Equal:
      w.assign(table.num_subpops(), 1.0);
      break;
  }
  return pool_with_weights(table, w, "pooled");
}

PoolWeights default_pool_weights(const FrequencyTable& table) {
  return table.has_sample_sizes() ? PoolWeights::SampleSizes : PoolWeights::Equal;
}

}  // namespace kinship
