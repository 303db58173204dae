#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ncd/classifiers.hpp"
#include "ncd/compressor.hpp"
#include "ncd/corpus.hpp"

namespace ncd {

/// Mean of a 0/1 score vector. Throws DomainError when empty.
double accuracy(std::span<const int> scores);

enum class CiMethod { StudentT, Normal };

std::string_view to_string(CiMethod method);
CiMethod parse_ci_method(std::string_view name);

struct CiSummary {
  double mean = 0.0;
  double half_width = 0.0;
  std::size_t n_trials = 0;
  double level = 0.95;
  CiMethod method = CiMethod::StudentT;
};

/// 95% interval of the mean. StudentT uses t(0.975, n-1) * s / sqrt(n), Normal
/// uses 1.96 * s / sqrt(n), with s the sample standard deviation.
/// Needs at least two values.
CiSummary trial_ci(std::span<const double> values, CiMethod method = CiMethod::StudentT);

struct TrialResult {
  std::uint64_t seed = 0;
  std::size_t n_test = 0;
  std::size_t n_correct = 0;
  double accuracy = 0.0;  // n_correct / n_test exactly
  ScoringMode scoring = ScoringMode::MaxPossible;
  TiePolicy policy = TiePolicy::NearestAmongTied;
  std::string backend;
  std::size_t k = kDefaultK;
};

struct AnalysisRecord {
  std::string dataset;
  std::optional<double> bpc;
  std::optional<double> compression_ratio;
  std::optional<std::size_t> vocab_size;
  std::optional<double> normalized_rank;
};

/// Compressed bits per Unicode character over a seeded sample of up to
/// `sample_size` documents (the whole corpus when it is smaller):
/// 8 * sum C(doc) / sum charlen(doc).
double bpc(const CompressorBackend& backend, const LabeledCorpus& corpus, std::size_t sample_size,
           std::uint64_t seed);

/// Bits per character for train and test sampled independently, and pooled.
struct BpcSplit {
  double train = 0.0;
  double test = 0.0;
  double pooled = 0.0;
  double compression_ratio = 0.0;  // pooled sum of bytes / pooled sum of compressed bytes
};

BpcSplit bpc_split(const CompressorBackend& backend, const LabeledCorpus& train, const LabeledCorpus* test,
                   std::size_t sample_size, std::uint64_t seed);

/// Pearson correlation of average ranks. Needs equal lengths >= 3 and
/// non-constant inputs.
double spearman(std::span<const double> xs, std::span<const double> ys);

double pearson(std::span<const double> xs, std::span<const double> ys);

/// Average (mid) ranks, 1-based, ascending.
std::vector<double> average_ranks(std::span<const double> values);

/// Rank of `target` in descending order (1 = best, ties share the best rank)
/// divided by the number of accuracies. `target` must be one of them.
double normalized_rank_percentage(double target, std::span<const double> all);

}  // namespace ncd
