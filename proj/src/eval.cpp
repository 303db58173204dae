#include "ncd/eval.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <numeric>

#include "ncd/errors.hpp"
#include "ncd/rng.hpp"

namespace ncd {

namespace {

void check_pair(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    throw ArgumentError("correlation inputs differ in length (" + std::to_string(xs.size()) + " vs " +
                        std::to_string(ys.size()) + ")");
  }
  if (xs.size() < 3) {
    throw ArgumentError("correlation needs at least 3 points");
  }
}

struct Totals {
  std::size_t compressed = 0;
  std::size_t bytes = 0;
  std::size_t chars = 0;
};

Totals measure(const CompressorBackend& backend, const LabeledCorpus& sample) {
  Totals t;
  for (const auto& d : sample.docs) {
    t.compressed += compressed_len(backend, d.text).bytes;
    t.bytes += d.text.size();
    t.chars += char_count(d.text);
  }
  return t;
}

double bits_per_char(const Totals& t) {
  if (t.chars == 0) {
    throw DomainError("bits per character is undefined for a sample without characters");
  }
  return 8.0 * static_cast<double>(t.compressed) / static_cast<double>(t.chars);
}

}  // namespace

double accuracy(std::span<const int> scores) {
  if (scores.empty()) {
    throw DomainError("accuracy of an empty score list");
  }
  const long correct = std::accumulate(scores.begin(), scores.end(), 0L);
  return static_cast<double>(correct) / static_cast<double>(scores.size());
}

std::string_view to_string(CiMethod method) { return method == CiMethod::StudentT ? "student_t" : "normal"; }

CiMethod parse_ci_method(std::string_view name) {
  if (name == "student_t") return CiMethod::StudentT;
  if (name == "normal") return CiMethod::Normal;
  throw ArgumentError("unknown CI method '" + std::string(name) + "' (expected student_t or normal)");
}

CiSummary trial_ci(std::span<const double> values, CiMethod method) {
  if (values.size() < 2) {
    throw DomainError("a confidence interval needs at least 2 trial values");
  }
  const auto n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));

  double critical = 1.96;
  if (method == CiMethod::StudentT) {
    boost::math::students_t dist(n - 1.0);
    critical = boost::math::quantile(dist, 0.975);
  }
  CiSummary ci;
  ci.mean = mean;
  ci.half_width = critical * sd / std::sqrt(n);
  ci.n_trials = values.size();
  ci.method = method;
  return ci;
}

double bpc(const CompressorBackend& backend, const LabeledCorpus& corpus, std::size_t sample_size,
           std::uint64_t seed) {
  if (corpus.empty()) {
    throw DataError("bits per character of an empty corpus");
  }
  if (sample_size == 0) {
    throw ArgumentError("bpc sample size must be positive");
  }
  return bits_per_char(measure(backend, random_subset(corpus, sample_size, seed)));
}

BpcSplit bpc_split(const CompressorBackend& backend, const LabeledCorpus& train, const LabeledCorpus* test,
                   std::size_t sample_size, std::uint64_t seed) {
  if (train.empty() || (test && test->empty())) {
    throw DataError("bits per character of an empty corpus");
  }
  Totals tr = measure(backend, random_subset(train, sample_size, derive_seed(seed, 0)));
  BpcSplit out;
  out.train = bits_per_char(tr);
  Totals pooled = tr;
  if (test) {
    Totals te = measure(backend, random_subset(*test, sample_size, derive_seed(seed, 1)));
    out.test = bits_per_char(te);
    pooled.compressed += te.compressed;
    pooled.bytes += te.bytes;
    pooled.chars += te.chars;
  } else {
    out.test = out.train;
  }
  out.pooled = bits_per_char(pooled);
  out.compression_ratio = static_cast<double>(pooled.bytes) / static_cast<double>(pooled.compressed);
  return out;
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    // Positions i..j (0-based) share the mean of ranks i+1..j+1.
    const double mid = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t p = i; p <= j; ++p) ranks[order[p]] = mid;
    i = j + 1;
  }
  return ranks;
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
  check_pair(xs, ys);
  const auto n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw DomainError("correlation is undefined for a constant input");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double spearman(std::span<const double> xs, std::span<const double> ys) {
  check_pair(xs, ys);
  auto rx = average_ranks(xs);
  auto ry = average_ranks(ys);
  return pearson(rx, ry);
}

double normalized_rank_percentage(double target, std::span<const double> all) {
  if (all.empty()) {
    throw ArgumentError("normalized rank needs at least one accuracy");
  }
  if (std::find(all.begin(), all.end(), target) == all.end()) {
    throw ArgumentError("target accuracy is not among the compared accuracies");
  }
  const auto better = static_cast<std::size_t>(std::count_if(all.begin(), all.end(), [&](double a) { return a > target; }));
  return static_cast<double>(better + 1) / static_cast<double>(all.size());
}

}  // namespace ncd
