#include "ncd/distance.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <cstdio>
#include <exception>
#include <cstring>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <ostream>
#include <thread>

namespace ncd {

namespace {

struct Failure {
  std::size_t unit = 0;
  std::size_t col = 0;
  std::exception_ptr error;
};

// Runs body(unit) for unit in [0, count) on `workers` threads, handing out
// units in increasing order. Once a unit throws no new units are started;
// units already claimed finish, so the failure kept (lowest unit, then lowest
// column) is the same for every worker count.
std::optional<Failure> parallel_units(std::size_t count, std::size_t workers,
                                      const std::function<void(std::size_t)>& body) {
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::mutex mu;
  std::optional<Failure> first;

  auto run = [&] {
    while (!stop.load(std::memory_order_relaxed)) {
      std::size_t unit = next.fetch_add(1);
      if (unit >= count) {
        return;
      }
      try {
        body(unit);
      } catch (const MatrixCellError& e) {
        std::lock_guard lock(mu);
        if (!first || e.row() < first->unit || (e.row() == first->unit && e.col() < first->col)) {
          first = Failure{e.row(), e.col(), std::current_exception()};
        }
        stop = true;
      } catch (...) {
        std::lock_guard lock(mu);
        if (!first || unit < first->unit) {
          first = Failure{unit, 0, std::current_exception()};
        }
        stop = true;
      }
    }
  };

  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    run();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back(run);
    }
  }
  return first;
}

std::vector<CompressedLength> single_lengths(const CompressorBackend& backend, std::span<const std::string_view> docs,
                                             std::size_t workers, const char* role) {
  std::vector<CompressedLength> out(docs.size());
  auto failure = parallel_units(docs.size(), workers, [&](std::size_t i) { out[i] = compressed_len(backend, docs[i]); });
  if (failure) {
    try {
      std::rethrow_exception(failure->error);
    } catch (const BackendError& e) {
      throw BackendError(std::string(role) + " document " + std::to_string(failure->unit) + ": " + e.what());
    }
  }
  return out;
}

DistanceMatrix build(const CompressorBackend& backend, std::span<const std::string_view> test,
                     std::span<const std::string_view> train, std::size_t workers) {
  if (test.empty() || train.empty()) {
    throw ArgumentError("distance matrix needs non-empty test and train sets");
  }
  if (workers == 0) {
    throw ArgumentError("worker count must be positive");
  }
  auto test_len = single_lengths(backend, test, workers, "test");
  auto train_len = single_lengths(backend, train, workers, "train");

  const std::size_t rows = test.size();
  const std::size_t cols = train.size();
  std::vector<double> values(rows * cols);
  auto failure = parallel_units(rows, workers, [&](std::size_t i) {
    for (std::size_t j = 0; j < cols; ++j) {
      CompressedLength joint;
      try {
        joint = joint_len(backend, test[i], train[j]);
      } catch (const BackendError& e) {
        throw MatrixCellError(i, j, e.what());
      }
      try {
        values[i * cols + j] = ncd_from_lengths(test_len[i], train_len[j], joint);
      } catch (const DomainError& e) {
        throw DomainError("cell (" + std::to_string(i) + ", " + std::to_string(j) + "): " + e.what());
      }
    }
  });
  if (failure) {
    std::rethrow_exception(failure->error);
  }
  return DistanceMatrix(rows, cols, std::move(values), backend.name(), std::move(test_len), std::move(train_len));
}

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(std::is_unsigned_v<T>);
  std::array<char, sizeof(T)> buf{};
  for (std::size_t b = 0; b < sizeof(T); ++b) {
    buf[b] = static_cast<char>((value >> (8 * b)) & 0xFF);
  }
  out.write(buf.data(), buf.size());
}

template <typename T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> buf{};
  if (!in.read(reinterpret_cast<char*>(buf.data()), buf.size())) {
    throw DataError("matrix file is truncated");
  }
  T value = 0;
  for (std::size_t b = 0; b < sizeof(T); ++b) {
    value |= static_cast<T>(buf[b]) << (8 * b);
  }
  return value;
}

constexpr std::array<char, 4> kMagic = {'N', 'C', 'D', 'M'};

}  // namespace

CompressedLength joint_len(const CompressorBackend& backend, std::string_view x, std::string_view y) {
  std::string joined;
  joined.reserve(x.size() + 1 + y.size());
  joined.append(x);
  joined.push_back(kJoinSeparator);
  joined.append(y);
  return compressed_len(backend, joined);
}

double ncd_from_lengths(CompressedLength cx, CompressedLength cy, CompressedLength cxy) {
  const auto [lo, hi] = std::minmax(cx.bytes, cy.bytes);
  if (hi == 0) {
    throw DomainError("NCD is undefined when both compressed lengths are zero");
  }
  return (static_cast<double>(cxy.bytes) - static_cast<double>(lo)) / static_cast<double>(hi);
}

NcdValue ncd(const CompressorBackend& backend, std::string_view x, std::string_view y) {
  return {ncd_from_lengths(compressed_len(backend, x), compressed_len(backend, y), joint_len(backend, x, y))};
}

DistanceMatrix::DistanceMatrix(std::size_t rows, std::size_t cols, std::vector<double> values,
                               std::string backend_name, std::vector<CompressedLength> test_lengths,
                               std::vector<CompressedLength> train_lengths)
    : rows_(rows),
      cols_(cols),
      values_(std::move(values)),
      backend_name_(std::move(backend_name)),
      test_lengths_(std::move(test_lengths)),
      train_lengths_(std::move(train_lengths)) {
  if (values_.size() != rows_ * cols_) {
    throw DataError("matrix holds " + std::to_string(values_.size()) + " values, expected " +
                    std::to_string(rows_ * cols_));
  }
}

DistanceMatrix distance_matrix(const CompressorBackend& backend, std::span<const Document> test,
                               std::span<const Document> train, std::size_t workers) {
  std::vector<std::string_view> test_text;
  std::vector<std::string_view> train_text;
  test_text.reserve(test.size());
  train_text.reserve(train.size());
  for (const auto& d : test) test_text.push_back(d.text);
  for (const auto& d : train) train_text.push_back(d.text);
  return build(backend, test_text, train_text, workers);
}

DistanceMatrix distance_matrix(const CompressorBackend& backend, std::span<const std::string> test,
                               std::span<const std::string> train, std::size_t workers) {
  std::vector<std::string_view> test_text(test.begin(), test.end());
  std::vector<std::string_view> train_text(train.begin(), train.end());
  return build(backend, test_text, train_text, workers);
}

void write_matrix_csv(const DistanceMatrix& matrix, std::ostream& out) {
  out << "test_index";
  for (std::size_t j = 0; j < matrix.cols(); ++j) {
    out << ',' << j;
  }
  out << '\n';
  std::array<char, 32> buf{};
  for (std::size_t i = 0; i < matrix.rows(); ++i) {
    out << i;
    for (double v : matrix.row(i)) {
      std::snprintf(buf.data(), buf.size(), "%.17g", v);
      out << ',' << buf.data();
    }
    out << '\n';
  }
}

void write_matrix_binary(const DistanceMatrix& matrix, std::ostream& out) {
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kMatrixFormatVersion);
  put_le<std::uint64_t>(out, matrix.rows());
  put_le<std::uint64_t>(out, matrix.cols());
  for (double v : matrix.values()) {
    put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
  }
  if (!out) {
    throw DataError("failed to write matrix");
  }
}

DistanceMatrix read_matrix_binary(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw DataError("not an NCDM matrix file (bad magic)");
  }
  auto version = get_le<std::uint32_t>(in);
  if (version != kMatrixFormatVersion) {
    throw DataError("unsupported NCDM version " + std::to_string(version));
  }
  auto rows = get_le<std::uint64_t>(in);
  auto cols = get_le<std::uint64_t>(in);
  if (cols != 0 && rows > std::numeric_limits<std::size_t>::max() / 8 / cols) {
    throw DataError("NCDM dimensions overflow");
  }
  std::vector<double> values(rows * cols);
  for (double& v : values) {
    v = std::bit_cast<double>(get_le<std::uint64_t>(in));
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw DataError("trailing bytes after NCDM payload");
  }
  return DistanceMatrix(rows, cols, std::move(values));
}

void save_matrix_binary(const DistanceMatrix& matrix, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError("cannot write matrix file " + path.string());
  }
  write_matrix_binary(matrix, out);
}

DistanceMatrix load_matrix_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open matrix file " + path.string());
  }
  return read_matrix_binary(in);
}

}  // namespace ncd
