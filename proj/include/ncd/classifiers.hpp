#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ncd/compressor.hpp"
#include "ncd/corpus.hpp"

namespace ncd {

/// How a vote tie among the k neighbors is resolved.
enum class TiePolicy {
  /// The tied label whose closest member is nearest wins; equal distances fall back to the lowest label id.
  NearestAmongTied,
  LowestLabelId,
};

/// Strict: the decision rule's single prediction must equal gold.
/// MaxPossible: correct when gold is among the labels tied for the top vote count.
enum class ScoringMode { Strict, MaxPossible };

std::string_view to_string(TiePolicy policy);
std::string_view to_string(ScoringMode mode);
TiePolicy parse_tie_policy(std::string_view name);
ScoringMode parse_scoring_mode(std::string_view name);

inline constexpr std::size_t kDefaultK = 2;

struct Neighbor {
  std::size_t index = 0;
  double distance = 0.0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// The k smallest distances in ascending order; equal distances keep
/// ascending train index. Throws ArgumentError for k == 0 or k > row.size().
std::vector<Neighbor> knn_neighbors(std::span<const double> row, std::size_t k);

/// Labels that reach the maximum vote count among the k neighbors, ascending.
std::vector<LabelId> vote_max_labels(std::span<const double> row, std::span<const LabelId> labels, std::size_t k);

LabelId knn_predict(std::span<const double> row, std::span<const LabelId> labels, std::size_t k, TiePolicy policy);

/// 1 when the row counts as correct under `mode`, else 0.
int knn_score(std::span<const double> row, std::span<const LabelId> labels, std::size_t k, LabelId gold,
              ScoringMode mode, TiePolicy policy);

/// Per-class compressor model for the cross-entropy rule
/// argmin_c C(d_c ⊔ d_u) - C(d_c).
class CeModel {
public:
  struct ClassBuffer {
    LabelId label = 0;
    std::string buffer;
    CompressedLength base_len;
  };

  CeModel(CompressorBackend backend, std::vector<ClassBuffer> classes);

  const CompressorBackend& backend() const noexcept { return backend_; }
  const std::vector<ClassBuffer>& classes() const noexcept { return classes_; }

private:
  CompressorBackend backend_;
  std::vector<ClassBuffer> classes_;
};

/// Joins each class's training documents in training order with one space
/// and measures the joined buffer once. Every declared class must have at
/// least one document, otherwise DataError.
CeModel ce_train(const CompressorBackend& backend, const LabeledCorpus& train);

/// Class with the smallest C(d_c ⊔ d_u) - C(d_c); ties go to the lowest label id.
LabelId ce_predict(const CeModel& model, std::string_view text);

enum class LengthUnit { Chars, Bytes };

/// |len(test) - len(train_j)| for each training document. Chars counts
/// Unicode scalar values.
std::vector<double> textlength_distance_row(std::string_view test, std::span<const Document> train,
                                            LengthUnit unit = LengthUnit::Chars);

}  // namespace ncd
