#include "ncd/cli.hpp"

#include <CLI11.hpp>
#include <array>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "ncd/classifiers.hpp"
#include "ncd/compressor.hpp"
#include "ncd/corpus.hpp"
#include "ncd/distance.hpp"
#include "ncd/errors.hpp"
#include "ncd/eval.hpp"
#include "ncd/rng.hpp"

namespace ncd::cli {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return ec == std::errc{} ? std::string(buf.data(), end) : std::string("nan");
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::array<char, 32> buf{};
  std::strftime(buf.data(), buf.size(), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf.data();
}

// Header shared by every JSON output: version, resolved config and, unless
// disabled, the run-specific fields that legitimately vary between runs.
Json envelope(const RunConfig& config) {
  Json j;
  j["version"] = kVersion;
  j["config"] = config_json(config);
  if (config.timestamp) {
    j["runtime"] = {{"generated_at", utc_now()}, {"workers", config.workers}};
  }
  return j;
}

std::string comment_line(const RunConfig& config) { return "# " + envelope(config).dump() + "\n"; }

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << content)) {
    throw DataError("cannot write " + path.string());
  }
}

void require_file(const std::optional<fs::path>& path, const char* what) {
  if (!path) {
    throw ArgumentError(std::string("--") + what + " is required for this command");
  }
  if (!fs::is_regular_file(*path)) {
    throw DataError(std::string(what) + " file not found: " + path->string());
  }
}

void prepare_out(const RunConfig& config) {
  std::error_code ec;
  fs::create_directories(config.out, ec);
  if (ec || !fs::is_directory(config.out)) {
    throw DataError("cannot create output directory " + config.out.string());
  }
  if (config.matrix_cache) {
    auto parent = config.matrix_cache->parent_path();
    if (!parent.empty() && !fs::is_directory(parent)) {
      throw DataError("matrix cache directory does not exist: " + parent.string());
    }
  }
}

CorpusFormat format_for(const RunConfig& config, const fs::path& path) {
  return config.format ? parse_format(*config.format) : format_from_extension(path);
}

CompressorBackend single_backend(const RunConfig& config) {
  if (config.backends.size() != 1) {
    throw ArgumentError("this command takes exactly one --backend");
  }
  return CompressorBackend::from_name(config.backends.front(), config.level);
}

struct Splits {
  LabeledCorpus train;
  LabeledCorpus test;
};

Splits load_splits(const RunConfig& config) {
  Splits s;
  s.train = load_corpus(*config.train_path, format_for(config, *config.train_path));
  s.test = load_corpus(*config.test_path, format_for(config, *config.test_path), s.train.label_names);
  return s;
}

std::string dataset_name(const RunConfig& config) {
  if (!config.dataset_name.empty()) return config.dataset_name;
  return config.train_path ? config.train_path->stem().string() : std::string("dataset");
}

struct RowScore {
  LabelId predicted = 0;
  int strict = 0;
  int max_possible = 0;
};

// Predictions for every test document under the configured classifier.
std::vector<RowScore> score_split(const RunConfig& config, const CompressorBackend& backend,
                                  const LabeledCorpus& train, const LabeledCorpus& test,
                                  const DistanceMatrix* cached) {
  if (config.classifier != Classifier::Ce && config.k > train.size()) {
    throw ArgumentError("k = " + std::to_string(config.k) + " exceeds the " + std::to_string(train.size()) +
                        " training documents");
  }
  const auto labels = train.labels();
  std::vector<RowScore> out(test.size());
  auto gold_of = [&](std::size_t i) -> std::optional<LabelId> { return test.docs[i].label; };

  if (config.classifier == Classifier::Ce) {
    CeModel model = ce_train(backend, train);
    for (std::size_t i = 0; i < test.size(); ++i) {
      out[i].predicted = ce_predict(model, test.docs[i].text);
      out[i].strict = out[i].max_possible = (gold_of(i) == out[i].predicted) ? 1 : 0;
    }
    return out;
  }

  auto score_row = [&](std::size_t i, std::span<const double> row) {
    out[i].predicted = knn_predict(row, labels, config.k, config.policy);
    if (auto gold = gold_of(i)) {
      out[i].strict = out[i].predicted == *gold ? 1 : 0;
      out[i].max_possible = knn_score(row, labels, config.k, *gold, ScoringMode::MaxPossible, config.policy);
    }
  };

  if (config.classifier == Classifier::TextLength) {
    for (std::size_t i = 0; i < test.size(); ++i) {
      score_row(i, textlength_distance_row(test.docs[i].text, train.docs, config.length_unit));
    }
    return out;
  }

  DistanceMatrix computed;
  const DistanceMatrix* matrix = cached;
  if (!matrix) {
    computed = distance_matrix(backend, test.docs, train.docs, config.workers);
    matrix = &computed;
  }
  for (std::size_t i = 0; i < test.size(); ++i) {
    score_row(i, matrix->row(i));
  }
  return out;
}

TrialResult make_trial(const RunConfig& config, const std::string& backend, std::uint64_t seed,
                       const std::vector<RowScore>& scores, ScoringMode mode) {
  std::vector<int> flags;
  flags.reserve(scores.size());
  for (const auto& s : scores) flags.push_back(mode == ScoringMode::Strict ? s.strict : s.max_possible);
  TrialResult t;
  t.seed = seed;
  t.n_test = scores.size();
  t.n_correct = static_cast<std::size_t>(std::count(flags.begin(), flags.end(), 1));
  t.accuracy = accuracy(flags);
  t.scoring = mode;
  t.policy = config.policy;
  t.backend = config.classifier == Classifier::TextLength ? std::string("textlength") : backend;
  t.k = config.k;
  return t;
}

DistanceMatrix matrix_with_cache(const RunConfig& config, const CompressorBackend& backend, const Splits& s,
                                 std::ostream& err) {
  if (config.matrix_cache && fs::exists(*config.matrix_cache)) {
    DistanceMatrix m = load_matrix_binary(*config.matrix_cache);
    if (m.rows() != s.test.size() || m.cols() != s.train.size()) {
      throw DataError("matrix cache " + config.matrix_cache->string() + " is " + std::to_string(m.rows()) + "x" +
                      std::to_string(m.cols()) + " but the corpora need " + std::to_string(s.test.size()) + "x" +
                      std::to_string(s.train.size()));
    }
    err << "using cached matrix " << config.matrix_cache->string() << "\n";
    return m;
  }
  DistanceMatrix m = distance_matrix(backend, s.test.docs, s.train.docs, config.workers);
  if (config.matrix_cache) {
    save_matrix_binary(m, *config.matrix_cache);
  }
  return m;
}

int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const BackendError& e) {
    err << "backend error: " << e.what() << "\n";
    return kBackend;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kData;
  } catch (const DomainError& e) {
    err << "data error: " << e.what() << "\n";
    return kData;
  } catch (const fs::filesystem_error& e) {
    err << "data error: " << e.what() << "\n";
    return kData;
  }
}

// dataset -> (method -> accuracy), datasets kept in first-appearance order.
struct AccuracyTable {
  std::vector<std::string> datasets;
  std::map<std::string, std::vector<std::pair<std::string, double>>> rows;

  std::optional<double> find(const std::string& dataset, const std::string& method) const {
    auto it = rows.find(dataset);
    if (it == rows.end()) return std::nullopt;
    for (const auto& [m, a] : it->second) {
      if (m == method) return a;
    }
    return std::nullopt;
  }

  std::vector<double> all(const std::string& dataset) const {
    std::vector<double> out;
    if (auto it = rows.find(dataset); it != rows.end()) {
      for (const auto& [m, a] : it->second) out.push_back(a);
    }
    return out;
  }
};

// Reads a headed CSV into name -> column maps; '#' lines are skipped.
std::vector<std::map<std::string, std::string>> read_table(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<std::string> header;
  std::vector<std::map<std::string, std::string>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.emplace_back();
    if (header.empty()) {
      header = cells;
      continue;
    }
    if (cells.size() != header.size()) {
      throw ParseError(path.string(), line_no, "expected " + std::to_string(header.size()) + " fields");
    }
    std::map<std::string, std::string> row;
    for (std::size_t c = 0; c < header.size(); ++c) row[header[c]] = cells[c];
    row["__line"] = std::to_string(line_no);
    out.push_back(std::move(row));
  }
  if (header.empty()) throw ParseError(path.string(), 1, "empty file");
  return out;
}

std::optional<double> parse_number(const fs::path& path, const std::map<std::string, std::string>& row,
                                   const std::string& column) {
  auto it = row.find(column);
  if (it == row.end() || it->second.empty()) return std::nullopt;
  double v = 0.0;
  const std::string& s = it->second;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ParseError(path.string(), std::stoul(row.at("__line")), "column " + column + " is not a number: " + s);
  }
  return v;
}

AccuracyTable load_accuracies(const fs::path& path) {
  AccuracyTable table;
  for (const auto& row : read_table(path)) {
    for (const char* col : {"dataset", "method", "accuracy"}) {
      if (!row.contains(col)) {
        throw ParseError(path.string(), 1, std::string("missing required column \"") + col + "\"");
      }
    }
    const auto& dataset = row.at("dataset");
    if (!table.rows.contains(dataset)) table.datasets.push_back(dataset);
    auto acc = parse_number(path, row, "accuracy");
    if (!acc) throw ParseError(path.string(), std::stoul(row.at("__line")), "missing accuracy");
    table.rows[dataset].emplace_back(row.at("method"), *acc);
  }
  return table;
}

struct AnalysisRow {
  AnalysisRecord record;
  std::string backend;
  std::optional<double> bpc_train;
  std::optional<double> bpc_test;
  std::optional<double> accuracy;
};

template <typename T>
std::string cell(const std::optional<T>& v) {
  if (!v) return "";
  if constexpr (std::is_floating_point_v<T>) {
    return num(*v);
  } else {
    return std::to_string(*v);
  }
}

Json correlation(const std::vector<AnalysisRow>& rows, const std::function<std::optional<double>(const AnalysisRow&)>& fx,
                 const std::function<std::optional<double>(const AnalysisRow&)>& fy) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& r : rows) {
    auto x = fx(r);
    auto y = fy(r);
    if (x && y) {
      xs.push_back(*x);
      ys.push_back(*y);
    }
  }
  Json j;
  j["n"] = xs.size();
  try {
    j["spearman"] = spearman(xs, ys);
    j["pearson"] = pearson(xs, ys);
  } catch (const Error& e) {
    j["spearman"] = nullptr;
    j["pearson"] = nullptr;
    j["note"] = e.what();
  }
  return j;
}

}  // namespace

std::string_view to_string(Classifier c) {
  switch (c) {
    case Classifier::Knn: return "knn";
    case Classifier::Ce: return "ce";
    case Classifier::TextLength: return "textlength";
  }
  return "knn";
}

Classifier parse_classifier(std::string_view name) {
  if (name == "knn") return Classifier::Knn;
  if (name == "ce") return Classifier::Ce;
  if (name == "textlength") return Classifier::TextLength;
  throw ArgumentError("unknown classifier '" + std::string(name) + "' (expected knn, ce or textlength)");
}

Json config_json(const RunConfig& config) {
  auto path_or_null = [](const std::optional<fs::path>& p) { return p ? Json(p->string()) : Json(nullptr); };
  Json j;
  j["command"] = config.command;
  j["train"] = path_or_null(config.train_path);
  j["test"] = path_or_null(config.test_path);
  j["format"] = config.format ? Json(*config.format) : Json("auto");
  j["backend"] = config.backends;
  j["level"] = config.level ? Json(*config.level) : Json("default");
  j["k"] = config.k;
  j["scoring"] = to_string(config.scoring);
  j["tie_policy"] = to_string(config.policy);
  j["classifier"] = to_string(config.classifier);
  j["length_unit"] = config.length_unit == LengthUnit::Chars ? "chars" : "bytes";
  j["shots"] = config.shots ? Json(*config.shots) : Json(nullptr);
  j["trials"] = config.trials;
  j["seed"] = config.seed;
  j["test_sample"] = config.test_sample ? Json(*config.test_sample) : Json(nullptr);
  j["out"] = config.out.string();
  j["matrix_cache"] = path_or_null(config.matrix_cache);
  j["dataset_name"] = config.dataset_name;
  j["sampler_version"] = SampleRng::kVersion;
  if (config.command == "analyze") {
    Json ds = Json::array();
    for (const auto& d : config.datasets) {
      ds.push_back({{"name", d.name}, {"train", d.train.string()}, {"test", path_or_null(d.test)}});
    }
    j["datasets"] = ds;
    j["accuracies"] = path_or_null(config.accuracies);
    j["points"] = path_or_null(config.points);
    j["method"] = config.target_method;
    j["bpc_sample"] = config.bpc_sample;
  }
  return j;
}

int cmd_classify(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    require_file(config.train_path, "train");
    require_file(config.test_path, "test");
    const CompressorBackend backend = single_backend(config);
    if (config.k == 0) throw ArgumentError("k must be positive");
    prepare_out(config);

    const Splits s = load_splits(config);
    if (config.classifier != Classifier::Ce && config.k > s.train.size()) {
      throw ArgumentError("k = " + std::to_string(config.k) + " exceeds the " + std::to_string(s.train.size()) +
                          " training documents");
    }
    std::optional<DistanceMatrix> matrix;
    if (config.classifier == Classifier::Knn) {
      matrix = matrix_with_cache(config, backend, s, err);
    }
    auto scores = score_split(config, backend, s.train, s.test, matrix ? &*matrix : nullptr);

    std::string csv = comment_line(config);
    csv += "test_index,predicted_label,gold_label,correct_strict,correct_max_possible\n";
    std::vector<int> strict;
    std::vector<int> max_possible;
    auto quote = [](const std::string& v) {
      if (v.find_first_of(",\"\n\r") == std::string::npos) return v;
      std::string q = "\"";
      for (char c : v) {
        if (c == '"') q += '"';
        q += c;
      }
      return q + "\"";
    };
    for (std::size_t i = 0; i < scores.size(); ++i) {
      const auto& gold = s.test.docs[i].label;
      csv += std::to_string(i) + "," + quote(s.train.label_names[scores[i].predicted]) + ",";
      if (gold) {
        csv += quote(s.test.label_names[*gold]) + "," + std::to_string(scores[i].strict) + "," +
               std::to_string(scores[i].max_possible) + "\n";
        strict.push_back(scores[i].strict);
        max_possible.push_back(scores[i].max_possible);
      } else {
        csv += ",,\n";
      }
    }
    write_file(config.out / "predictions.csv", csv);

    Json summary = envelope(config);
    summary["dataset"] = dataset_name(config);
    summary["n_train"] = s.train.size();
    summary["n_test"] = s.test.size();
    summary["n_scored"] = strict.size();
    summary["accuracy_strict"] = strict.empty() ? Json(nullptr) : Json(accuracy(strict));
    summary["accuracy_max_possible"] = max_possible.empty() ? Json(nullptr) : Json(accuracy(max_possible));
    write_file(config.out / "summary.json", summary.dump(2) + "\n");

    out << "classified " << s.test.size() << " documents";
    if (!strict.empty()) {
      out << ": accuracy strict " << num(accuracy(strict)) << ", max-possible " << num(accuracy(max_possible));
    }
    out << "\n";
    return static_cast<int>(kOk);
  });
}

int cmd_fewshot(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    require_file(config.train_path, "train");
    require_file(config.test_path, "test");
    if (!config.shots || *config.shots == 0) throw ArgumentError("fewshot needs a positive --shots");
    if (config.trials == 0) throw ArgumentError("--trials must be positive");
    if (config.k == 0) throw ArgumentError("k must be positive");
    const CompressorBackend backend = single_backend(config);
    const std::size_t shots = *config.shots;
    const std::size_t test_sample = config.test_sample.value_or(kDefaultTestSample);
    if (test_sample == 0) throw ArgumentError("--test-sample must be positive");
    prepare_out(config);

    const Splits s = load_splits(config);
    const std::size_t train_size = shots * s.train.label_names.size();
    if (config.classifier != Classifier::Ce && config.k > train_size) {
      throw ArgumentError("k = " + std::to_string(config.k) + " exceeds the " + std::to_string(train_size) +
                          " sampled training documents");
    }

    EvalReport report;
    report.dataset = dataset_name(config);
    report.backend = config.classifier == Classifier::TextLength ? std::string("textlength") : backend.name();
    report.k = config.k;
    report.scoring = config.scoring;
    report.policy = config.policy;
    report.shots = shots;
    report.classifier = std::string(to_string(config.classifier));

    for (std::size_t t = 0; t < config.trials; ++t) {
      const std::uint64_t seed = config.seed + t;
      LabeledCorpus train = few_shot_sample(s.train, shots, seed);
      LabeledCorpus test = random_subset(s.test, test_sample, derive_seed(seed, 1));
      for (const auto& d : test.docs) {
        if (!d.label) throw DataError("test document " + std::to_string(d.id) + " has no label");
      }
      auto scores = score_split(config, backend, train, test, nullptr);
      report.strict_trials.push_back(make_trial(config, backend.name(), seed, scores, ScoringMode::Strict));
      report.max_possible_trials.push_back(make_trial(config, backend.name(), seed, scores, ScoringMode::MaxPossible));
      const auto& chosen = config.scoring == ScoringMode::Strict ? report.strict_trials : report.max_possible_trials;
      err << "trial " << t + 1 << "/" << config.trials << " seed " << seed << ": accuracy "
          << num(chosen.back().accuracy) << "\n";
    }
    report.trials = config.scoring == ScoringMode::Strict ? report.strict_trials : report.max_possible_trials;
    if (report.trials.size() >= 2) {
      std::vector<double> acc;
      for (const auto& t : report.trials) acc.push_back(t.accuracy);
      report.ci = trial_ci(acc, CiMethod::StudentT);
    } else {
      report.ci.mean = report.trials.front().accuracy;
      report.ci.n_trials = 1;
    }

    BpcSplit split = bpc_split(backend, s.train, &s.test, kDefaultTestSample, config.seed);
    report.analysis.dataset = report.dataset;
    report.analysis.bpc = split.pooled;
    report.analysis.compression_ratio = split.compression_ratio;
    report.analysis.vocab_size = corpus_stats(s.train).vocab_size;

    Json j = envelope(config);
    const Json body = to_json(report);
    for (const auto& [key, value] : body.items()) j[key] = value;
    write_file(config.out / "report.json", j.dump(2) + "\n");

    out << report.dataset << " " << report.backend << " " << shots << "-shot: mean " << num(report.ci.mean);
    if (report.trials.size() >= 2) out << " +/- " << num(report.ci.half_width);
    out << " (" << to_string(config.scoring) << ")\n";
    return static_cast<int>(kOk);
  });
}

int cmd_analyze(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    std::vector<DatasetSpec> datasets = config.datasets;
    if (config.train_path) {
      datasets.push_back({dataset_name(config), *config.train_path, config.test_path});
    }
    for (const auto& d : datasets) {
      require_file(std::optional<fs::path>(d.train), "train");
      if (d.test) require_file(d.test, "test");
    }
    if (config.accuracies) require_file(config.accuracies, "accuracies");
    if (config.points) require_file(config.points, "points");
    if (datasets.empty() && !config.accuracies && !config.points) {
      throw ArgumentError("analyze needs --dataset/--train, --accuracies or --points");
    }
    std::vector<CompressorBackend> backends;
    for (const auto& name : config.backends) backends.push_back(CompressorBackend::from_name(name, config.level));
    if (config.bpc_sample == 0) throw ArgumentError("--bpc-sample must be positive");
    prepare_out(config);

    AccuracyTable acc;
    if (config.accuracies) acc = load_accuracies(*config.accuracies);
    auto rank_for = [&](const std::string& dataset) -> std::optional<double> {
      auto target = acc.find(dataset, config.target_method);
      if (!target) return std::nullopt;
      return normalized_rank_percentage(*target, acc.all(dataset));
    };

    std::vector<AnalysisRow> rows;
    for (const auto& d : datasets) {
      LabeledCorpus train = load_corpus(d.train, format_for(config, d.train));
      std::optional<LabeledCorpus> test;
      if (d.test) test = load_corpus(*d.test, format_for(config, *d.test), train.label_names);
      const std::size_t vocab = corpus_stats(train).vocab_size;
      for (const auto& backend : backends) {
        BpcSplit split = bpc_split(backend, train, test ? &*test : nullptr, config.bpc_sample, config.seed);
        AnalysisRow row;
        row.record.dataset = d.name;
        row.record.bpc = split.pooled;
        row.record.compression_ratio = split.compression_ratio;
        row.record.vocab_size = vocab;
        row.record.normalized_rank = rank_for(d.name);
        row.backend = backend.name();
        row.bpc_train = split.train;
        if (test) row.bpc_test = split.test;
        row.accuracy = acc.find(d.name, backend.name());
        rows.push_back(std::move(row));
      }
    }
    if (datasets.empty()) {
      for (const auto& name : acc.datasets) {
        AnalysisRow row;
        row.record.dataset = name;
        row.record.normalized_rank = rank_for(name);
        row.accuracy = acc.find(name, config.target_method);
        rows.push_back(std::move(row));
      }
    }
    if (config.points) {
      for (const auto& p : read_table(*config.points)) {
        AnalysisRow row;
        row.record.dataset = p.contains("dataset") ? p.at("dataset") : std::string();
        row.backend = p.contains("backend") ? p.at("backend") : std::string();
        row.record.bpc = parse_number(*config.points, p, "bpc");
        row.record.compression_ratio = parse_number(*config.points, p, "compression_ratio");
        if (auto v = parse_number(*config.points, p, "vocab_size")) row.record.vocab_size = static_cast<std::size_t>(*v);
        row.record.normalized_rank = parse_number(*config.points, p, "normalized_rank");
        row.accuracy = parse_number(*config.points, p, "accuracy");
        rows.push_back(std::move(row));
      }
    }

    std::string csv = comment_line(config);
    csv += "dataset,backend,bpc,bpc_train,bpc_test,compression_ratio,vocab_size,accuracy,normalized_rank\n";
    Json records = Json::array();
    for (const auto& r : rows) {
      csv += r.record.dataset + "," + r.backend + "," + cell(r.record.bpc) + "," + cell(r.bpc_train) + "," +
             cell(r.bpc_test) + "," + cell(r.record.compression_ratio) + "," + cell(r.record.vocab_size) + "," +
             cell(r.accuracy) + "," + cell(r.record.normalized_rank) + "\n";
      Json rec = to_json(r.record);
      rec["backend"] = r.backend;
      rec["bpc_train"] = r.bpc_train ? Json(*r.bpc_train) : Json(nullptr);
      rec["bpc_test"] = r.bpc_test ? Json(*r.bpc_test) : Json(nullptr);
      rec["accuracy"] = r.accuracy ? Json(*r.accuracy) : Json(nullptr);
      records.push_back(rec);
    }
    write_file(config.out / "analysis.csv", csv);

    auto vocab = [](const AnalysisRow& r) -> std::optional<double> {
      return r.record.vocab_size ? std::optional<double>(static_cast<double>(*r.record.vocab_size)) : std::nullopt;
    };
    auto bpc_of = [](const AnalysisRow& r) { return r.record.bpc; };
    auto ratio = [](const AnalysisRow& r) { return r.record.compression_ratio; };
    auto rank = [](const AnalysisRow& r) { return r.record.normalized_rank; };
    auto accuracy_of = [](const AnalysisRow& r) { return r.accuracy; };
    Json j = envelope(config);
    j["rows"] = records;
    j["correlations"] = {
        {"bpc_vs_normalized_rank", correlation(rows, bpc_of, rank)},
        {"vocab_size_vs_normalized_rank", correlation(rows, vocab, rank)},
        {"compression_ratio_vs_accuracy", correlation(rows, ratio, accuracy_of)},
        {"bpc_vs_accuracy", correlation(rows, bpc_of, accuracy_of)},
        {"vocab_size_vs_accuracy", correlation(rows, vocab, accuracy_of)},
    };
    write_file(config.out / "analysis.json", j.dump(2) + "\n");
    out << "analyzed " << rows.size() << " rows -> " << (config.out / "analysis.csv").string() << "\n";
    return static_cast<int>(kOk);
  });
}

int cmd_stats(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    require_file(config.train_path, "train");
    if (config.test_path) require_file(config.test_path, "test");
    prepare_out(config);
    LabeledCorpus train = load_corpus(*config.train_path, format_for(config, *config.train_path));
    Json j = envelope(config);
    j["dataset"] = dataset_name(config);
    j["train"] = to_json(corpus_stats(train));
    j["label_names"] = train.label_names;
    if (config.test_path) {
      LabeledCorpus test = load_corpus(*config.test_path, format_for(config, *config.test_path), train.label_names);
      j["test"] = to_json(corpus_stats(test));
    }
    const std::string text = j.dump(2) + "\n";
    write_file(config.out / "stats.json", text);
    out << text;
    return static_cast<int>(kOk);
  });
}

int cmd_matrix(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    require_file(config.train_path, "train");
    require_file(config.test_path, "test");
    const CompressorBackend backend = single_backend(config);
    prepare_out(config);
    const Splits s = load_splits(config);
    DistanceMatrix m = distance_matrix(backend, s.test.docs, s.train.docs, config.workers);
    const fs::path binary = config.matrix_cache.value_or(config.out / "matrix.ncdm");
    save_matrix_binary(m, binary);
    std::ostringstream csv;
    csv << comment_line(config);
    write_matrix_csv(m, csv);
    write_file(config.out / "matrix.csv", csv.str());
    Json j = envelope(config);
    j["rows"] = m.rows();
    j["cols"] = m.cols();
    j["binary"] = binary.string();
    write_file(config.out / "summary.json", j.dump(2) + "\n");
    out << "wrote " << m.rows() << "x" << m.cols() << " matrix to " << binary.string() << "\n";
    return static_cast<int>(kOk);
  });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Text classification with compressors and nearest neighbors"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  RunConfig config;
  if (const char* env = std::getenv("NCD_WORKERS")) {
    try {
      config.workers = std::stoul(env);
    } catch (const std::exception&) {
      err << "error: NCD_WORKERS must be a positive integer\n";
      return kUsage;
    }
  } else {
    config.workers = std::max(1u, std::thread::hardware_concurrency());
  }

  std::string format;
  std::string scoring = "max-possible";
  std::string policy = "nearest";
  std::string classifier = "knn";
  std::vector<std::string> dataset_args;
  bool no_timestamp = false;
  bool length_bytes = false;
  int level = 0;
  std::size_t shots = 0;
  std::size_t test_sample = 0;
  std::string train;
  std::string test;
  std::string matrix_cache;
  std::string accuracies;
  std::string points;

  auto common = [&](CLI::App* sub, bool needs_test) {
    sub->add_option("--train", train, "Training corpus (CSV or JSONL)");
    sub->add_option("--test", test, needs_test ? "Test corpus" : "Optional test corpus");
    sub->add_option("--format", format, "csv or jsonl (default: by file extension)")
        ->check(CLI::IsMember({"csv", "jsonl"}));
    sub->add_option("--backend", config.backends, "gzip, bz2, lzma, zstd or identity")->expected(1, -1);
    sub->add_option("--level", level, "Compression level (default: algorithm default)");
    sub->add_option("--seed", config.seed, "Base seed");
    sub->add_option("--workers", config.workers, "Worker threads (fallback: NCD_WORKERS)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--out", config.out, "Output directory");
    sub->add_option("--name", config.dataset_name, "Dataset name used in reports");
    sub->add_flag("--no-timestamp", no_timestamp, "Omit run-specific fields so outputs are byte-stable");
  };
  auto knn_opts = [&](CLI::App* sub) {
    sub->add_option("--k", config.k, "Number of neighbors");
    sub->add_option("--scoring", scoring, "max-possible or strict")->check(CLI::IsMember({"max-possible", "strict"}));
    sub->add_option("--tie-policy", policy, "nearest or lowest-label")
        ->check(CLI::IsMember({"nearest", "lowest-label"}));
    sub->add_option("--classifier", classifier, "knn, ce or textlength")
        ->check(CLI::IsMember({"knn", "ce", "textlength"}));
    sub->add_flag("--textlength-bytes", length_bytes, "TextLength counts bytes instead of characters");
  };

  auto* classify = app.add_subcommand("classify", "Predict labels for a test corpus");
  common(classify, true);
  knn_opts(classify);
  classify->add_option("--matrix-cache", matrix_cache, "Binary matrix file reused across runs");

  auto* fewshot = app.add_subcommand("fewshot", "Seeded n-shot trials with confidence intervals");
  common(fewshot, true);
  knn_opts(fewshot);
  fewshot->add_option("--shots", shots, "Training documents per class");
  fewshot->add_option("--trials", config.trials, "Number of trials (seeds seed..seed+trials-1)");
  fewshot->add_option("--test-sample", test_sample, "Test documents sampled per trial (default 1000)");

  auto* analyze = app.add_subcommand("analyze", "Bits per character, compression ratio and correlations");
  common(analyze, false);
  analyze->add_option("--dataset", dataset_args, "NAME=TRAIN[,TEST]; repeatable");
  analyze->add_option("--accuracies", accuracies, "CSV with dataset,method,accuracy");
  analyze->add_option("--points", points, "CSV of precomputed analysis rows");
  analyze->add_option("--method", config.target_method, "Method ranked by normalized rank");
  analyze->add_option("--bpc-sample", config.bpc_sample, "Documents sampled per split for bpc");

  auto* stats = app.add_subcommand("stats", "Corpus statistics as JSON");
  common(stats, false);

  auto* matrix = app.add_subcommand("matrix", "Compute and store the NCD matrix");
  common(matrix, true);
  matrix->add_option("--matrix-cache", matrix_cache, "Binary output path (default OUT/matrix.ncdm)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion& e) {
    out << kVersion << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    std::ostringstream msg;
    app.exit(e, msg, msg);
    err << msg.str();
    return e.get_exit_code() == 0 ? kOk : kUsage;
  }

  try {
    for (auto* sub : {classify, fewshot, analyze, stats, matrix}) {
      if (sub->parsed()) {
        config.command = sub->get_name();
        auto given = [sub](const char* flag) {
          const CLI::Option* opt = sub->get_option_no_throw(flag);
          return opt != nullptr && opt->count() > 0;
        };
        if (given("--level")) config.level = level;
        if (given("--shots")) config.shots = shots;
        if (given("--test-sample")) config.test_sample = test_sample;
      }
    }
    if (!format.empty()) config.format = format;
    if (!train.empty()) config.train_path = train;
    if (!test.empty()) config.test_path = test;
    if (!matrix_cache.empty()) config.matrix_cache = matrix_cache;
    if (!accuracies.empty()) config.accuracies = accuracies;
    if (!points.empty()) config.points = points;
    config.scoring = parse_scoring_mode(scoring);
    config.policy = parse_tie_policy(policy);
    config.classifier = parse_classifier(classifier);
    config.length_unit = length_bytes ? LengthUnit::Bytes : LengthUnit::Chars;
    config.timestamp = !no_timestamp;
    if (config.workers == 0) throw ArgumentError("worker count must be positive");
    for (const auto& arg : dataset_args) {
      auto eq = arg.find('=');
      if (eq == std::string::npos || eq == 0) throw ArgumentError("--dataset expects NAME=TRAIN[,TEST]: " + arg);
      DatasetSpec spec;
      spec.name = arg.substr(0, eq);
      std::string files = arg.substr(eq + 1);
      auto comma = files.find(',');
      spec.train = files.substr(0, comma);
      if (comma != std::string::npos) spec.test = files.substr(comma + 1);
      config.datasets.push_back(std::move(spec));
    }
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  if (config.command == "classify") return cmd_classify(config, out, err);
  if (config.command == "fewshot") return cmd_fewshot(config, out, err);
  if (config.command == "analyze") return cmd_analyze(config, out, err);
  if (config.command == "stats") return cmd_stats(config, out, err);
  return cmd_matrix(config, out, err);
}

}  // namespace ncd::cli
