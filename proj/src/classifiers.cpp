#include "ncd/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "ncd/distance.hpp"
#include "ncd/errors.hpp"

namespace ncd {

namespace {

void check_k(std::size_t k, std::size_t cols) {
  if (k == 0) {
    throw ArgumentError("k must be positive");
  }
  if (k > cols) {
    throw ArgumentError("k = " + std::to_string(k) + " exceeds the " + std::to_string(cols) + " training documents");
  }
}

struct Tally {
  std::size_t votes = 0;
  double nearest = std::numeric_limits<double>::infinity();
};

// Vote counts per label among the k neighbors, keyed by label id.
std::map<LabelId, Tally> tally(std::span<const double> row, std::span<const LabelId> labels, std::size_t k) {
  if (labels.size() != row.size()) {
    throw ArgumentError("distance row has " + std::to_string(row.size()) + " entries but " +
                        std::to_string(labels.size()) + " labels were given");
  }
  std::map<LabelId, Tally> votes;
  for (const Neighbor& n : knn_neighbors(row, k)) {
    Tally& t = votes[labels[n.index]];
    ++t.votes;
    t.nearest = std::min(t.nearest, n.distance);
  }
  return votes;
}

}  // namespace

std::string_view to_string(TiePolicy policy) {
  return policy == TiePolicy::NearestAmongTied ? "nearest" : "lowest-label";
}

std::string_view to_string(ScoringMode mode) { return mode == ScoringMode::Strict ? "strict" : "max-possible"; }

TiePolicy parse_tie_policy(std::string_view name) {
  if (name == "nearest") return TiePolicy::NearestAmongTied;
  if (name == "lowest-label") return TiePolicy::LowestLabelId;
  throw ArgumentError("unknown tie policy '" + std::string(name) + "' (expected nearest or lowest-label)");
}

ScoringMode parse_scoring_mode(std::string_view name) {
  if (name == "strict") return ScoringMode::Strict;
  if (name == "max-possible") return ScoringMode::MaxPossible;
  throw ArgumentError("unknown scoring mode '" + std::string(name) + "' (expected strict or max-possible)");
}

std::vector<Neighbor> knn_neighbors(std::span<const double> row, std::size_t k) {
  check_k(k, row.size());
  std::vector<std::size_t> idx(row.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  auto closer = [&](std::size_t a, std::size_t b) { return row[a] < row[b] || (row[a] == row[b] && a < b); };
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(), closer);
  std::vector<Neighbor> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    out.push_back({idx[i], row[idx[i]]});
  }
  return out;
}

std::vector<LabelId> vote_max_labels(std::span<const double> row, std::span<const LabelId> labels, std::size_t k) {
  auto votes = tally(row, labels, k);
  std::size_t best = 0;
  for (const auto& [label, t] : votes) best = std::max(best, t.votes);
  std::vector<LabelId> out;
  for (const auto& [label, t] : votes) {
    if (t.votes == best) out.push_back(label);
  }
  return out;
}

LabelId knn_predict(std::span<const double> row, std::span<const LabelId> labels, std::size_t k, TiePolicy policy) {
  auto votes = tally(row, labels, k);
  // std::map iterates in ascending label id, so strict comparisons keep the lowest id on ties.
  auto best = votes.begin();
  for (auto it = std::next(votes.begin()); it != votes.end(); ++it) {
    const Tally& cand = it->second;
    const Tally& cur = best->second;
    if (cand.votes > cur.votes ||
        (policy == TiePolicy::NearestAmongTied && cand.votes == cur.votes && cand.nearest < cur.nearest)) {
      best = it;
    }
  }
  return best->first;
}

int knn_score(std::span<const double> row, std::span<const LabelId> labels, std::size_t k, LabelId gold,
              ScoringMode mode, TiePolicy policy) {
  if (mode == ScoringMode::Strict) {
    return knn_predict(row, labels, k, policy) == gold ? 1 : 0;
  }
  auto tied = vote_max_labels(row, labels, k);
  return std::binary_search(tied.begin(), tied.end(), gold) ? 1 : 0;
}

CeModel::CeModel(CompressorBackend backend, std::vector<ClassBuffer> classes)
    : backend_(std::move(backend)), classes_(std::move(classes)) {
  if (classes_.empty()) {
    throw DataError("cross-entropy model has no classes");
  }
}

CeModel ce_train(const CompressorBackend& backend, const LabeledCorpus& train) {
  std::vector<CeModel::ClassBuffer> classes(train.label_names.size());
  std::vector<bool> seen(classes.size(), false);
  for (const auto& doc : train.docs) {
    if (!doc.label || *doc.label >= classes.size()) {
      throw DataError("training document " + std::to_string(doc.id) + " has no valid label");
    }
    auto& cls = classes[*doc.label];
    if (seen[*doc.label]) {
      cls.buffer.push_back(kJoinSeparator);
    }
    cls.buffer.append(doc.text);
    seen[*doc.label] = true;
  }
  for (std::size_t c = 0; c < classes.size(); ++c) {
    if (!seen[c]) {
      throw DataError("class \"" + train.label_names[c] + "\" has no training documents");
    }
    classes[c].label = static_cast<LabelId>(c);
    classes[c].base_len = compressed_len(backend, classes[c].buffer);
  }
  return CeModel(backend, std::move(classes));
}

LabelId ce_predict(const CeModel& model, std::string_view text) {
  LabelId best_label = 0;
  double best_cost = std::numeric_limits<double>::infinity();
  for (const auto& cls : model.classes()) {
    const double joint = static_cast<double>(joint_len(model.backend(), cls.buffer, text).bytes);
    const double cost = joint - static_cast<double>(cls.base_len.bytes);
    if (cost < best_cost) {
      best_cost = cost;
      best_label = cls.label;
    }
  }
  return best_label;
}

std::vector<double> textlength_distance_row(std::string_view test, std::span<const Document> train,
                                            LengthUnit unit) {
  auto length = [unit](std::string_view s) {
    return static_cast<double>(unit == LengthUnit::Chars ? char_count(s) : s.size());
  };
  const double own = length(test);
  std::vector<double> row;
  row.reserve(train.size());
  for (const auto& doc : train) {
    row.push_back(std::abs(own - length(doc.text)));
  }
  return row;
}

}  // namespace ncd
