#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "ncd/corpus.hpp"
#include "ncd/eval.hpp"

namespace ncd {

using Json = nlohmann::ordered_json;

inline constexpr const char* kVersion = NCD_VERSION;

/// Few-shot evaluation output. The leading fields (dataset through analysis)
/// form the fixed report schema; the rest carry both scoring modes and both
/// interval methods side by side.
struct EvalReport {
  std::string dataset;
  std::string backend;
  std::size_t k = kDefaultK;
  ScoringMode scoring = ScoringMode::MaxPossible;
  TiePolicy policy = TiePolicy::NearestAmongTied;
  std::optional<std::size_t> shots;
  std::vector<TrialResult> trials;
  CiSummary ci;
  AnalysisRecord analysis;

  std::string classifier = "knn";
  std::vector<TrialResult> strict_trials;
  std::vector<TrialResult> max_possible_trials;
};

Json to_json(const TrialResult& trial);
Json to_json(const CiSummary& ci);
Json to_json(const AnalysisRecord& record);
Json to_json(const CorpusStats& stats);
Json to_json(const EvalReport& report);

}  // namespace ncd
