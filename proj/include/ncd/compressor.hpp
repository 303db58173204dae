#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ncd {

enum class Algorithm { Gzip, Bz2, Lzma, Zstd, Identity };

/// Length in bytes of a complete compressed container (header and trailer included).
struct CompressedLength {
  std::size_t bytes = 0;

  friend auto operator<=>(const CompressedLength&, const CompressedLength&) = default;
};

/// A named, deterministic length-measuring compressor.
///
/// Instances are immutable and hold no compressor state; every call to
/// compressed_len() creates and tears down its own stream, so one backend may
/// be shared freely between threads.
class CompressorBackend {
public:
  /// Builds a backend from its CLI name ("gzip", "bz2", "lzma", "zstd",
  /// "identity"). Without a level the algorithm default is used: gzip 9,
  /// bz2 9, lzma preset 6, zstd 3, identity 0. Illegal levels throw
  /// ArgumentError; they are never clamped.
  static CompressorBackend from_name(std::string_view name, std::optional<int> level = std::nullopt);

  CompressorBackend(Algorithm algorithm, int level);

  Algorithm algorithm() const noexcept { return algorithm_; }
  const std::string& name() const noexcept { return name_; }
  int level() const noexcept { return level_; }

  /// Maximum back-reference distance in bytes. Informational only.
  std::size_t window_note() const noexcept { return window_; }

  bool is_identity() const noexcept { return algorithm_ == Algorithm::Identity; }

  static int default_level(Algorithm algorithm);
  static std::pair<int, int> level_range(Algorithm algorithm);
  static const std::vector<std::string>& names();

private:
  Algorithm algorithm_;
  int level_;
  std::string name_;
  std::size_t window_;
};

std::string_view algorithm_name(Algorithm algorithm);

/// Byte length of the full compressed container for `payload`. Empty payloads
/// are legal. Throws BackendError if the library fails.
CompressedLength compressed_len(const CompressorBackend& backend, std::string_view payload);

/// |payload| / compressed_len(payload). Throws DomainError on empty payload.
double compression_ratio(const CompressorBackend& backend, std::string_view payload);

}  // namespace ncd
