#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ncd/compressor.hpp"
#include "ncd/corpus.hpp"
#include "ncd/errors.hpp"

namespace ncd {

/// Byte placed between the two halves of every concatenation.
inline constexpr char kJoinSeparator = ' ';

/// Raw NCD. Real compressors only approximate Kolmogorov complexity, so values
/// slightly below 0 or above 1 are legitimate and are stored unclamped.
struct NcdValue {
  double value = 0.0;
};

/// C(x ⊔ y), where ⊔ joins x and y with exactly one ASCII space.
CompressedLength joint_len(const CompressorBackend& backend, std::string_view x, std::string_view y);

/// (C(xy) - min(C(x), C(y))) / max(C(x), C(y)) from already-known lengths.
/// Throws DomainError when both lengths are zero.
double ncd_from_lengths(CompressedLength cx, CompressedLength cy, CompressedLength cxy);

NcdValue ncd(const CompressorBackend& backend, std::string_view x, std::string_view y);

/// Dense test x train NCD matrix, row-major. Row i is test document i,
/// column j is train document j, and every cell concatenates test before train.
class DistanceMatrix {
public:
  DistanceMatrix() = default;
  DistanceMatrix(std::size_t rows, std::size_t cols, std::vector<double> values, std::string backend_name = {},
                 std::vector<CompressedLength> test_lengths = {}, std::vector<CompressedLength> train_lengths = {});

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  const std::string& backend_name() const noexcept { return backend_name_; }

  double at(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }
  std::span<const double> row(std::size_t i) const { return {values_.data() + i * cols_, cols_}; }
  std::span<const double> values() const noexcept { return values_; }

  /// Cached single-document lengths; empty when the matrix was read from disk.
  const std::vector<CompressedLength>& test_lengths() const noexcept { return test_lengths_; }
  const std::vector<CompressedLength>& train_lengths() const noexcept { return train_lengths_; }

  friend bool operator==(const DistanceMatrix& a, const DistanceMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.values_ == b.values_;
  }

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
  std::string backend_name_;
  std::vector<CompressedLength> test_lengths_;
  std::vector<CompressedLength> train_lengths_;
};

/// Backend failure while filling a matrix cell; carries the cell coordinates.
class MatrixCellError : public BackendError {
public:
  MatrixCellError(std::size_t row, std::size_t col, const std::string& what)
      : BackendError("cell (" + std::to_string(row) + ", " + std::to_string(col) + "): " + what),
        row_(row),
        col_(col) {}

  std::size_t row() const noexcept { return row_; }
  std::size_t col() const noexcept { return col_; }

private:
  std::size_t row_;
  std::size_t col_;
};

/// Builds the full matrix with `workers` threads.
///
/// Single-document lengths are computed once per document and reused for
/// every pair. Cells are independent, so the result is bit-identical for any
/// worker count. On failure the error for the lowest (row, col) is rethrown.
DistanceMatrix distance_matrix(const CompressorBackend& backend, std::span<const Document> test,
                               std::span<const Document> train, std::size_t workers = 1);

DistanceMatrix distance_matrix(const CompressorBackend& backend, std::span<const std::string> test,
                               std::span<const std::string> train, std::size_t workers = 1);

/// CSV export: a header row of train indices, then one row per test document
/// prefixed by its test index.
void write_matrix_csv(const DistanceMatrix& matrix, std::ostream& out);

/// Binary export: "NCDM", u32 version, u64 rows, u64 cols, then rows*cols
/// IEEE-754 doubles, all little-endian.
void write_matrix_binary(const DistanceMatrix& matrix, std::ostream& out);
DistanceMatrix read_matrix_binary(std::istream& in);

void save_matrix_binary(const DistanceMatrix& matrix, const std::filesystem::path& path);
DistanceMatrix load_matrix_binary(const std::filesystem::path& path);

inline constexpr std::uint32_t kMatrixFormatVersion = 1;

}  // namespace ncd
