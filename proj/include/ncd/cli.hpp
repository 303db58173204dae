#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ncd/classifiers.hpp"
#include "ncd/report.hpp"

namespace ncd::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kBackend = 3 };

enum class Classifier { Knn, Ce, TextLength };

std::string_view to_string(Classifier c);
Classifier parse_classifier(std::string_view name);

/// A dataset for `analyze`: a training file and an optional test file.
struct DatasetSpec {
  std::string name;
  std::filesystem::path train;
  std::optional<std::filesystem::path> test;
};

/// Fully resolved run configuration. Every field has a default.
struct RunConfig {
  std::string command;
  std::optional<std::filesystem::path> train_path;
  std::optional<std::filesystem::path> test_path;
  std::optional<std::string> format;  // csv | jsonl; by extension when unset
  std::vector<std::string> backends = {"gzip"};
  std::optional<int> level;
  std::size_t k = kDefaultK;
  ScoringMode scoring = ScoringMode::MaxPossible;
  TiePolicy policy = TiePolicy::NearestAmongTied;
  Classifier classifier = Classifier::Knn;
  LengthUnit length_unit = LengthUnit::Chars;
  std::optional<std::size_t> shots;
  std::size_t trials = 5;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  std::optional<std::size_t> test_sample;  // fewshot defaults to 1000
  std::filesystem::path out = "ncd-out";
  std::optional<std::filesystem::path> matrix_cache;
  bool timestamp = true;
  std::string dataset_name;  // defaults to the train file stem

  // analyze
  std::vector<DatasetSpec> datasets;
  std::optional<std::filesystem::path> accuracies;
  std::optional<std::filesystem::path> points;
  std::string target_method = "gzip";
  std::size_t bpc_sample = 1000;
};

inline constexpr std::size_t kDefaultTestSample = 1000;

/// Resolved config as JSON. Execution-only settings (worker count) are left
/// out so that outputs do not depend on them.
Json config_json(const RunConfig& config);

int cmd_classify(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_fewshot(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_analyze(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_stats(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_matrix(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches to a subcommand. NCD_WORKERS is the fallback
/// for --workers.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ncd::cli
