#include "ncd/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <json.hpp>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "ncd/errors.hpp"
#include "ncd/rng.hpp"

namespace ncd {

namespace {

class LabelInterner {
public:
  explicit LabelInterner(const std::vector<std::string>& known) : names_(known) {
    for (std::size_t i = 0; i < names_.size(); ++i) {
      ids_.emplace(names_[i], static_cast<LabelId>(i));
    }
  }

  LabelId intern(const std::string& name) {
    auto [it, inserted] = ids_.try_emplace(name, static_cast<LabelId>(names_.size()));
    if (inserted) {
      names_.push_back(name);
    }
    return it->second;
  }

  std::vector<std::string> release() { return std::move(names_); }

private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, LabelId> ids_;
};

struct CsvRecord {
  std::vector<std::string> fields;
  std::size_t line = 0;  // line on which the record starts
};

// RFC 4180 reader. Accepts LF or CRLF line endings; quoted fields may span lines.
class CsvReader {
public:
  CsvReader(std::string_view content, const std::string& source) : in_(content), source_(source) {}

  bool next(CsvRecord& record) {
    record.fields.clear();
    if (pos_ >= in_.size()) {
      return false;
    }
    record.line = line_;
    std::string field;
    bool quoted = false;
    bool after_quote = false;
    while (pos_ < in_.size()) {
      char c = in_[pos_++];
      if (quoted) {
        if (c == '"') {
          if (pos_ < in_.size() && in_[pos_] == '"') {
            field.push_back('"');
            ++pos_;
          } else {
            quoted = false;
            after_quote = true;
          }
        } else {
          if (c == '\n') {
            ++line_;
          }
          field.push_back(c);
        }
        continue;
      }
      if (c == ',') {
        record.fields.push_back(std::move(field));
        field.clear();
        after_quote = false;
      } else if (c == '\n' || c == '\r') {
        if (c == '\r' && pos_ < in_.size() && in_[pos_] == '\n') {
          ++pos_;
        }
        ++line_;
        record.fields.push_back(std::move(field));
        return true;
      } else if (c == '"') {
        if (!field.empty() || after_quote) {
          throw ParseError(source_, line_, "unexpected quote inside an unquoted field");
        }
        quoted = true;
      } else {
        if (after_quote) {
          throw ParseError(source_, line_, "characters after a closing quote");
        }
        field.push_back(c);
      }
    }
    if (quoted) {
      throw ParseError(source_, record.line, "unterminated quoted field");
    }
    record.fields.push_back(std::move(field));
    return true;
  }

private:
  std::string_view in_;
  const std::string& source_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

bool blank_record(const CsvRecord& r) { return r.fields.size() == 1 && r.fields[0].empty(); }

LabeledCorpus parse_csv(std::string_view content, const std::string& source, LabelInterner& labels) {
  CsvReader reader(content, source);
  CsvRecord header;
  if (!reader.next(header) || blank_record(header)) {
    throw ParseError(source, 1, "empty file");
  }
  if (!header.fields.empty() && header.fields[0].starts_with("\xEF\xBB\xBF")) {
    header.fields[0].erase(0, 3);
  }
  auto column = [&](const std::string& name) -> std::size_t {
    auto it = std::find(header.fields.begin(), header.fields.end(), name);
    if (it == header.fields.end()) {
      throw ParseError(source, header.line, "missing required column \"" + name + "\"");
    }
    return static_cast<std::size_t>(std::distance(header.fields.begin(), it));
  };
  const std::size_t text_col = column("text");
  const std::size_t label_col = column("label");

  LabeledCorpus corpus;
  CsvRecord record;
  while (reader.next(record)) {
    if (blank_record(record)) {
      continue;
    }
    if (record.fields.size() != header.fields.size()) {
      throw ParseError(source, record.line,
                       "expected " + std::to_string(header.fields.size()) + " fields, found " +
                           std::to_string(record.fields.size()));
    }
    std::string& text = record.fields[text_col];
    if (!is_valid_utf8(text)) {
      throw ParseError(source, record.line, "text is not valid UTF-8");
    }
    Document doc;
    doc.id = corpus.docs.size();
    doc.text = std::move(text);
    if (!record.fields[label_col].empty()) {
      doc.label = labels.intern(record.fields[label_col]);
    }
    corpus.docs.push_back(std::move(doc));
  }
  if (corpus.docs.empty()) {
    throw ParseError(source, 1, "no documents after the header");
  }
  return corpus;
}

LabeledCorpus parse_jsonl(std::string_view content, const std::string& source, LabelInterner& labels) {
  LabeledCorpus corpus;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    ++line_no;
    std::size_t end = content.find('\n', pos);
    if (end == std::string_view::npos) {
      end = content.size();
    }
    std::string_view line = content.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') {
      line.remove_suffix(1);
    }
    if (line.find_first_not_of(" \t") == std::string_view::npos) {
      continue;
    }
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(source, line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) {
      throw ParseError(source, line_no, "expected a JSON object");
    }
    for (const char* key : {"text", "label"}) {
      if (!obj.contains(key)) {
        throw ParseError(source, line_no, std::string("missing field \"") + key + "\"");
      }
    }
    const auto& text = obj["text"];
    const auto& label = obj["label"];
    if (!text.is_string()) {
      throw ParseError(source, line_no, "field \"text\" must be a string");
    }
    Document doc;
    doc.id = corpus.docs.size();
    doc.text = text.get<std::string>();
    if (label.is_string()) {
      doc.label = labels.intern(label.get<std::string>());
    } else if (label.is_number_integer()) {
      doc.label = labels.intern(label.dump());
    } else if (!label.is_null()) {
      throw ParseError(source, line_no, "field \"label\" must be a string");
    }
    corpus.docs.push_back(std::move(doc));
  }
  if (corpus.docs.empty()) {
    throw ParseError(source, 1, "empty file");
  }
  return corpus;
}

// Decodes one scalar starting at `i`; returns 0 length on malformed input.
std::size_t decode_utf8(std::string_view s, std::size_t i, char32_t& cp) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  std::size_t len = 0;
  char32_t min = 0;
  if (b0 < 0x80) {
    cp = b0;
    return 1;
  } else if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
    min = 0x80;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
    min = 0x800;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
    min = 0x10000;
  } else {
    return 0;
  }
  if (i + len > s.size()) {
    return 0;
  }
  for (std::size_t k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) {
      return 0;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
    return 0;
  }
  return len;
}

bool is_unicode_space(char32_t cp) {
  return (cp >= 0x09 && cp <= 0x0D) || cp == 0x20 || cp == 0x85 || cp == 0xA0 || cp == 0x1680 ||
         (cp >= 0x2000 && cp <= 0x200A) || cp == 0x2028 || cp == 0x2029 || cp == 0x202F || cp == 0x205F ||
         cp == 0x3000;
}

std::string csv_quote(std::string_view field) {
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') {
      out.push_back('"');
    }
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

std::vector<LabelId> LabeledCorpus::labels() const {
  std::vector<LabelId> out;
  out.reserve(docs.size());
  for (const auto& d : docs) {
    if (!d.label) {
      throw DataError("document " + std::to_string(d.id) + " has no label");
    }
    out.push_back(*d.label);
  }
  return out;
}

CorpusFormat parse_format(std::string_view name) {
  if (name == "csv") {
    return CorpusFormat::Csv;
  }
  if (name == "jsonl") {
    return CorpusFormat::Jsonl;
  }
  throw ArgumentError("unknown corpus format '" + std::string(name) + "' (expected csv or jsonl)");
}

CorpusFormat format_from_extension(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  return (ext == ".jsonl" || ext == ".json") ? CorpusFormat::Jsonl : CorpusFormat::Csv;
}

LabeledCorpus parse_corpus(std::string_view content, CorpusFormat format, const std::string& source,
                          const std::vector<std::string>& known_labels) {
  LabelInterner labels(known_labels);
  LabeledCorpus corpus =
      format == CorpusFormat::Csv ? parse_csv(content, source, labels) : parse_jsonl(content, source, labels);
  corpus.label_names = labels.release();
  return corpus;
}

LabeledCorpus load_corpus(const std::filesystem::path& path, CorpusFormat format,
                          const std::vector<std::string>& known_labels) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open corpus file " + path.string());
  }
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_corpus(content, format, path.string(), known_labels);
}

std::string serialize_corpus(const LabeledCorpus& corpus, CorpusFormat format) {
  std::string out;
  // Unlabeled documents are written with an empty CSV label or a JSON null.
  auto label_of = [&](const Document& d) -> const std::string* {
    if (!d.label) {
      return nullptr;
    }
    if (*d.label >= corpus.label_names.size()) {
      throw DataError("document " + std::to_string(d.id) + " has label id " + std::to_string(*d.label) +
                      " outside the vocabulary");
    }
    return &corpus.label_names[*d.label];
  };
  if (format == CorpusFormat::Csv) {
    out = "text,label\n";
    for (const auto& d : corpus.docs) {
      const std::string* label = label_of(d);
      out += csv_quote(d.text) + "," + (label ? csv_quote(*label) : std::string()) + "\n";
    }
  } else {
    for (const auto& d : corpus.docs) {
      nlohmann::ordered_json obj;
      obj["text"] = d.text;
      const std::string* label = label_of(d);
      obj["label"] = label ? nlohmann::ordered_json(*label) : nlohmann::ordered_json(nullptr);
      out += obj.dump() + "\n";
    }
  }
  return out;
}

void save_corpus(const LabeledCorpus& corpus, const std::filesystem::path& path, CorpusFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError("cannot write corpus file " + path.string());
  }
  out << serialize_corpus(corpus, format);
}

bool is_valid_utf8(std::string_view bytes) {
  char32_t cp = 0;
  for (std::size_t i = 0; i < bytes.size();) {
    std::size_t len = decode_utf8(bytes, i, cp);
    if (len == 0) {
      return false;
    }
    i += len;
  }
  return true;
}

std::size_t char_count(std::string_view utf8) {
  // Counts lead bytes; for valid UTF-8 this equals the scalar count.
  return static_cast<std::size_t>(
      std::count_if(utf8.begin(), utf8.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

std::vector<std::string_view> whitespace_tokens(std::string_view utf8) {
  std::vector<std::string_view> tokens;
  std::size_t start = std::string_view::npos;
  char32_t cp = 0;
  for (std::size_t i = 0; i < utf8.size();) {
    std::size_t len = decode_utf8(utf8, i, cp);
    if (len == 0) {
      len = 1;
      cp = 0xFFFD;
    }
    if (is_unicode_space(cp)) {
      if (start != std::string_view::npos) {
        tokens.push_back(utf8.substr(start, i - start));
        start = std::string_view::npos;
      }
    } else if (start == std::string_view::npos) {
      start = i;
    }
    i += len;
  }
  if (start != std::string_view::npos) {
    tokens.push_back(utf8.substr(start));
  }
  return tokens;
}

CorpusStats corpus_stats(const LabeledCorpus& corpus) {
  if (corpus.empty()) {
    throw DataError("corpus statistics need at least one document");
  }
  std::unordered_set<std::string_view> vocab;
  std::size_t words = 0;
  std::size_t chars = 0;
  for (const auto& d : corpus.docs) {
    auto tokens = whitespace_tokens(d.text);
    words += tokens.size();
    chars += char_count(d.text);
    vocab.insert(tokens.begin(), tokens.end());
  }
  CorpusStats stats;
  stats.n_docs = corpus.size();
  stats.n_classes = corpus.label_names.size();
  stats.avg_words = static_cast<double>(words) / static_cast<double>(corpus.size());
  stats.avg_chars = static_cast<double>(chars) / static_cast<double>(corpus.size());
  stats.vocab_size = vocab.size();
  return stats;
}

LabeledCorpus few_shot_sample(const LabeledCorpus& corpus, std::size_t n, std::uint64_t seed) {
  if (n == 0) {
    throw ArgumentError("few-shot sample size must be positive");
  }
  std::vector<std::vector<std::size_t>> by_class(corpus.label_names.size());
  for (std::size_t i = 0; i < corpus.docs.size(); ++i) {
    const auto& label = corpus.docs[i].label;
    if (!label || *label >= by_class.size()) {
      throw DataError("document " + std::to_string(corpus.docs[i].id) + " has no valid label");
    }
    by_class[*label].push_back(i);
  }
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    if (by_class[c].size() < n) {
      throw SamplingError("class \"" + corpus.label_names[c] + "\" has " + std::to_string(by_class[c].size()) +
                          " documents, fewer than the requested " + std::to_string(n));
    }
  }

  SampleRng rng(seed);
  LabeledCorpus out;
  out.label_names = corpus.label_names;
  out.docs.reserve(n * by_class.size());
  for (auto& pool : by_class) {
    // Partial Fisher-Yates: position i receives a uniform draw from [i, size).
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
      std::swap(pool[i], pool[j]);
      out.docs.push_back(corpus.docs[pool[i]]);
    }
  }
  return out;
}

LabeledCorpus random_subset(const LabeledCorpus& corpus, std::size_t n, std::uint64_t seed) {
  if (n >= corpus.size()) {
    return corpus;
  }
  std::vector<std::size_t> pool(corpus.size());
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  SampleRng rng(seed);
  LabeledCorpus out;
  out.label_names = corpus.label_names;
  out.docs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
    std::swap(pool[i], pool[j]);
    out.docs.push_back(corpus.docs[pool[i]]);
  }
  return out;
}

}  // namespace ncd
