#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ncd {

using LabelId = std::uint32_t;

struct Document {
  std::size_t id = 0;
  std::string text;  // UTF-8 bytes
  std::optional<LabelId> label;
};

/// Ordered documents plus the label vocabulary (id -> name).
struct LabeledCorpus {
  std::vector<Document> docs;
  std::vector<std::string> label_names;

  std::size_t size() const noexcept { return docs.size(); }
  bool empty() const noexcept { return docs.empty(); }

  /// Label ids of every document in order. Throws DataError on an unlabeled document.
  std::vector<LabelId> labels() const;
};

struct CorpusStats {
  std::size_t n_docs = 0;
  std::size_t n_classes = 0;
  double avg_words = 0.0;
  double avg_chars = 0.0;
  std::size_t vocab_size = 0;
};

enum class CorpusFormat { Csv, Jsonl };

CorpusFormat parse_format(std::string_view name);

/// Guesses the format from the file extension (".jsonl"/".json" -> Jsonl, otherwise Csv).
CorpusFormat format_from_extension(const std::filesystem::path& path);

/// Loads a labeled corpus.
///
/// CSV files need a header naming a `text` and a `label` column (RFC 4180
/// quoting, other columns ignored). JSONL files hold one object per line with
/// `text` and `label` fields. Labels are interned to dense ids in
/// first-appearance order, continuing from `known_labels` when given, so that
/// a test split can share the training split's ids. Every error carries the
/// offending line number.
LabeledCorpus load_corpus(const std::filesystem::path& path, CorpusFormat format,
                          const std::vector<std::string>& known_labels = {});

LabeledCorpus parse_corpus(std::string_view content, CorpusFormat format, const std::string& source = "<memory>",
                           const std::vector<std::string>& known_labels = {});

/// Writes the corpus in the given format; load_corpus() reads it back unchanged.
void save_corpus(const LabeledCorpus& corpus, const std::filesystem::path& path, CorpusFormat format);
std::string serialize_corpus(const LabeledCorpus& corpus, CorpusFormat format);

/// Number of Unicode scalar values in a UTF-8 string.
std::size_t char_count(std::string_view utf8);

bool is_valid_utf8(std::string_view bytes);

/// Tokens separated by Unicode whitespace. Case and punctuation are kept.
std::vector<std::string_view> whitespace_tokens(std::string_view utf8);

CorpusStats corpus_stats(const LabeledCorpus& corpus);

/// Draws exactly `n` documents per class without replacement. Output is
/// ordered by class id, then by draw order; documents keep their ids.
/// Throws SamplingError naming the first class with fewer than `n` documents.
LabeledCorpus few_shot_sample(const LabeledCorpus& corpus, std::size_t n, std::uint64_t seed);

/// Uniform sample of `n` documents without replacement, in draw order. When
/// `n` is at least the corpus size the whole corpus is returned in load order.
LabeledCorpus random_subset(const LabeledCorpus& corpus, std::size_t n, std::uint64_t seed);

}  // namespace ncd
