#include "ncd/report.hpp"

namespace ncd {

namespace {

template <typename T>
Json optional_json(const std::optional<T>& value) {
  return value ? Json(*value) : Json(nullptr);
}

Json trials_json(const std::vector<TrialResult>& trials) {
  Json arr = Json::array();
  for (const auto& t : trials) arr.push_back(to_json(t));
  return arr;
}

Json ci_pair(const std::vector<TrialResult>& trials) {
  std::vector<double> acc;
  for (const auto& t : trials) acc.push_back(t.accuracy);
  Json out = Json::object();
  if (acc.size() < 2) {
    out["student_t"] = nullptr;
    out["normal"] = nullptr;
    return out;
  }
  out["student_t"] = to_json(trial_ci(acc, CiMethod::StudentT));
  out["normal"] = to_json(trial_ci(acc, CiMethod::Normal));
  return out;
}

}  // namespace

Json to_json(const TrialResult& trial) {
  Json j;
  j["seed"] = trial.seed;
  j["n_test"] = trial.n_test;
  j["n_correct"] = trial.n_correct;
  j["accuracy"] = trial.accuracy;
  j["scoring"] = to_string(trial.scoring);
  j["policy"] = to_string(trial.policy);
  j["backend"] = trial.backend;
  j["k"] = trial.k;
  return j;
}

Json to_json(const CiSummary& ci) {
  Json j;
  j["mean"] = ci.mean;
  j["half_width"] = ci.half_width;
  j["n_trials"] = ci.n_trials;
  j["level"] = ci.level;
  j["method"] = to_string(ci.method);
  return j;
}

Json to_json(const AnalysisRecord& record) {
  Json j;
  j["dataset"] = record.dataset;
  j["bpc"] = optional_json(record.bpc);
  j["compression_ratio"] = optional_json(record.compression_ratio);
  j["vocab_size"] = optional_json(record.vocab_size);
  j["normalized_rank"] = optional_json(record.normalized_rank);
  return j;
}

Json to_json(const CorpusStats& stats) {
  Json j;
  j["n_docs"] = stats.n_docs;
  j["n_classes"] = stats.n_classes;
  j["avg_words"] = stats.avg_words;
  j["avg_chars"] = stats.avg_chars;
  j["vocab_size"] = stats.vocab_size;
  return j;
}

Json to_json(const EvalReport& report) {
  Json j;
  j["dataset"] = report.dataset;
  j["backend"] = report.backend;
  j["k"] = report.k;
  j["scoring"] = to_string(report.scoring);
  j["policy"] = to_string(report.policy);
  j["shots"] = optional_json(report.shots);
  j["trials"] = trials_json(report.trials);
  if (report.trials.size() >= 2) {
    j["ci"] = to_json(report.ci);
  } else {
    j["ci"] = nullptr;
  }
  j["analysis"] = to_json(report.analysis);
  j["classifier"] = report.classifier;
  j["trials_by_scoring"] = {{"strict", trials_json(report.strict_trials)},
                            {"max-possible", trials_json(report.max_possible_trials)}};
  j["ci_by_scoring"] = {{"strict", ci_pair(report.strict_trials)},
                        {"max-possible", ci_pair(report.max_possible_trials)}};
  return j;
}

}  // namespace ncd
