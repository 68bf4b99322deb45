#include "marginforge/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "marginforge/error.hpp"
#include "marginforge/random.hpp"

namespace marginforge {
namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

void fnv_mix(std::uint64_t& h, const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

double parse_real(std::string_view tok, std::size_t line, const char* what) {
  double v = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (first != last && *first == '+') ++first;  // from_chars rejects '+'
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    throw ParseError(line, std::string("malformed ") + what + " '" +
                               std::string(tok) + "'");
  if (!std::isfinite(v))
    throw ParseError(line, std::string("non-finite ") + what + " '" +
                               std::string(tok) + "'");
  return v;
}

void append_real(std::string& out, double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

}  // namespace

Dataset::Dataset(std::vector<SparseVector> samples, std::vector<Label> labels)
    : samples_(std::move(samples)), labels_(std::move(labels)) {
  if (samples_.size() != labels_.size())
    throw ContractError("dataset: sample and label counts differ");
  std::uint64_t h = kFnvOffset;
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (labels_[i] != 1 && labels_[i] != -1)
      throw ContractError("dataset: labels must be +1 or -1");
    dim_ = std::max(dim_, samples_[i].max_index());
    fnv_mix(h, &labels_[i], sizeof(Label));
    const auto n = static_cast<std::uint64_t>(samples_[i].size());
    fnv_mix(h, &n, sizeof(n));
    for (const Feature& f : samples_[i].entries()) {
      fnv_mix(h, &f.index, sizeof(f.index));
      fnv_mix(h, &f.value, sizeof(f.value));
    }
  }
  if (!samples_.empty()) dim_ = std::max(dim_, std::int32_t{1});
  fingerprint_ = h;
}

std::pair<std::size_t, std::size_t> Dataset::class_counts() const noexcept {
  auto pos = static_cast<std::size_t>(
      std::count(labels_.begin(), labels_.end(), Label{1}));
  return {pos, labels_.size() - pos};
}

std::pair<std::size_t, std::size_t> Dataset::class_counts(
    std::span<const std::size_t> view) const noexcept {
  std::size_t pos = 0;
  for (std::size_t i : view) pos += labels_[i] > 0;
  return {pos, view.size() - pos};
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  std::vector<SparseVector> s;
  std::vector<Label> y;
  s.reserve(indices.size());
  y.reserve(indices.size());
  for (std::size_t i : indices) {
    if (i >= samples_.size()) throw ContractError("subset: index out of range");
    s.push_back(samples_[i]);
    y.push_back(labels_[i]);
  }
  return Dataset(std::move(s), std::move(y));
}

Dataset parse_libsvm(std::istream& in) {
  std::vector<SparseVector> samples;
  std::vector<Label> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view rest(line);
    std::vector<std::string_view> tokens;
    std::size_t pos = 0;
    while (pos < rest.size()) {
      while (pos < rest.size() && is_space(rest[pos])) ++pos;
      std::size_t end = pos;
      while (end < rest.size() && !is_space(rest[end])) ++end;
      if (end > pos) tokens.push_back(rest.substr(pos, end - pos));
      pos = end;
    }
    if (tokens.empty()) continue;

    const double label = parse_real(tokens[0], line_no, "label");
    std::vector<Feature> entries;
    entries.reserve(tokens.size() - 1);
    for (std::size_t t = 1; t < tokens.size(); ++t) {
      std::string_view tok = tokens[t];
      const auto colon = tok.find(':');
      if (colon == std::string_view::npos || colon == 0)
        throw ParseError(line_no, "malformed feature '" + std::string(tok) + "'");
      std::int32_t idx = 0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + colon, idx);
      if (ec != std::errc() || ptr != tok.data() + colon || idx < 1)
        throw ParseError(line_no, "malformed index '" + std::string(tok) + "'");
      const double value = parse_real(tok.substr(colon + 1), line_no, "value");
      if (!entries.empty()) {
        if (idx == entries.back().index)
          throw ParseError(line_no, "duplicate index " + std::to_string(idx));
        if (idx < entries.back().index)
          throw ParseError(line_no, "non-ascending index " + std::to_string(idx));
      }
      entries.push_back({idx, value});
    }
    samples.emplace_back(std::move(entries));
    labels.push_back(label > 0 ? Label{1} : Label{-1});
  }
  if (in.bad()) throw IoError("read failure while parsing LibSVM input");
  return Dataset(std::move(samples), std::move(labels));
}

Dataset parse_libsvm(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_libsvm(in);
}

Dataset load_libsvm(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset '" + path + "'");
  return parse_libsvm(in);
}

std::string to_libsvm(const Dataset& data) {
  std::string out;
  for (std::size_t i = 0; i < data.size(); ++i) {
    out += data.label(i) > 0 ? "+1" : "-1";
    for (const Feature& f : data.sample(i).entries()) {
      out += ' ';
      out += std::to_string(f.index);
      out += ':';
      append_real(out, f.value);
    }
    out += '\n';
  }
  return out;
}

void write_libsvm(std::ostream& out, const Dataset& data) {
  out << to_libsvm(data);
}

void save_libsvm(const std::string& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write dataset '" + path + "'");
  write_libsvm(out, data);
}

TrainTestSplit split(const Dataset& data, double test_fraction,
                     std::uint64_t seed) {
  if (data.empty()) throw ConfigError("split: dataset is empty");
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw ConfigError("split: test fraction must lie in (0, 1)");
  const std::size_t n = data.size();
  // Guard against 0.8 * 10 landing a hair above 8.
  auto n_train = static_cast<std::size_t>(
      std::ceil((1.0 - test_fraction) * static_cast<double>(n) - 1e-9));
  n_train = std::min(n_train, n);

  Rng rng(seed);
  auto perm = rng.permutation(n);
  TrainTestSplit out;
  out.train_indices.assign(perm.begin(), perm.begin() + n_train);
  out.test_indices.assign(perm.begin() + n_train, perm.end());
  std::sort(out.train_indices.begin(), out.train_indices.end());
  std::sort(out.test_indices.begin(), out.test_indices.end());
  out.train = data.subset(out.train_indices);
  out.test = data.subset(out.test_indices);
  return out;
}

std::size_t subsample_size(std::size_t n, double delta, std::size_t bags) {
  if (!(delta > 0.0 && delta < 1.0))
    throw ConfigError("delta must lie in (0, 1)");
  if (bags == 0) throw ConfigError("number of subsamples must be >= 1");
  return static_cast<std::size_t>(
      std::floor(delta * static_cast<double>(n) / static_cast<double>(bags)));
}

SubsamplePlan draw_disjoint_subsamples(std::size_t n, double delta,
                                       std::size_t bags, std::uint64_t seed) {
  const std::size_t ns = subsample_size(n, delta, bags);
  if (ns == 0)
    throw ConfigError("subsample size floor(delta*n/L) is zero (n=" +
                      std::to_string(n) + ", L=" + std::to_string(bags) + ")");
  if (ns < 2)
    throw ConfigError(
        "subsample size floor(delta*n/L) is 1; each subsample needs room for "
        "both classes");

  Rng rng(seed);
  auto perm = rng.permutation(n);
  SubsamplePlan plan;
  plan.subsample_size = ns;
  plan.seed = seed;
  plan.subsamples.resize(bags);
  for (std::size_t b = 0; b < bags; ++b) {
    auto first = perm.begin() + static_cast<std::ptrdiff_t>(b * ns);
    plan.subsamples[b].assign(first, first + static_cast<std::ptrdiff_t>(ns));
    std::sort(plan.subsamples[b].begin(), plan.subsamples[b].end());
  }
  plan.pooled.assign(perm.begin(),
                     perm.begin() + static_cast<std::ptrdiff_t>(bags * ns));
  std::sort(plan.pooled.begin(), plan.pooled.end());
  return plan;
}

MinMaxScaler MinMaxScaler::fit(const Dataset& data) {
  MinMaxScaler s;
  const auto d = static_cast<std::size_t>(data.dim());
  s.lo_.assign(d, 0.0);
  s.hi_.assign(d, 0.0);
  // Absent entries are zeros, so 0 is always inside [lo, hi].
  for (const SparseVector& x : data.samples())
    for (const Feature& f : x.entries()) {
      auto k = static_cast<std::size_t>(f.index - 1);
      s.lo_[k] = std::min(s.lo_[k], f.value);
      s.hi_[k] = std::max(s.hi_[k], f.value);
    }
  return s;
}

Dataset MinMaxScaler::transform(const Dataset& data) const {
  std::vector<SparseVector> out;
  out.reserve(data.size());
  for (const SparseVector& x : data.samples()) {
    std::vector<double> dense(lo_.size(), 0.0);
    for (const Feature& f : x.entries()) {
      auto k = static_cast<std::size_t>(f.index - 1);
      if (k >= lo_.size()) continue;  // unseen feature: dropped
      dense[k] = f.value;
    }
    for (std::size_t k = 0; k < dense.size(); ++k) {
      const double range = hi_[k] - lo_[k];
      dense[k] = range > 0.0 ? std::clamp((dense[k] - lo_[k]) / range, 0.0, 1.0)
                             : 0.0;
    }
    out.push_back(SparseVector::from_dense(dense));
  }
  return Dataset(std::move(out), std::vector<Label>(data.labels().begin(),
                                                    data.labels().end()));
}

}  // namespace marginforge
