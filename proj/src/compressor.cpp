#include "ncd/compressor.hpp"

#include <lzma.h>
#include <zlib.h>

#include <array>
#include <climits>
#include <limits>
#include <memory>

#include "ncd/errors.hpp"

#if __has_include(<bzlib.h>)
#include <bzlib.h>
#else
extern "C" {
int BZ2_bzBuffToBuffCompress(char* dest, unsigned int* dest_len, char* source, unsigned int source_len,
                             int block_size_100k, int verbosity, int work_factor);
}
#define BZ_OK 0
#endif

#if __has_include(<zstd.h>)
#include <zstd.h>
#else
extern "C" {
std::size_t ZSTD_compress(void* dst, std::size_t dst_capacity, const void* src, std::size_t src_size,
                          int compression_level);
std::size_t ZSTD_compressBound(std::size_t src_size);
unsigned ZSTD_isError(std::size_t code);
const char* ZSTD_getErrorName(std::size_t code);
int ZSTD_minCLevel(void);
int ZSTD_maxCLevel(void);
}
#endif

namespace ncd {

namespace {

constexpr std::size_t kDeflateWindow = 32 * 1024;

// xz preset dictionary sizes, indexed by preset.
constexpr std::array<std::size_t, 10> kLzmaDict = {
    256u << 10, 1u << 20, 2u << 20, 4u << 20, 4u << 20, 8u << 20, 8u << 20, 16u << 20, 32u << 20, 64u << 20};

std::size_t zstd_window(int level) {
  // Default window log for large inputs in the zstd parameter tables.
  int log = 21;
  if (level <= 1) {
    log = 19;
  } else if (level == 2) {
    log = 20;
  } else if (level >= 17) {
    log = 23;
  } else if (level >= 8) {
    log = 22;
  }
  return std::size_t{1} << log;
}

std::size_t window_for(Algorithm algorithm, int level) {
  switch (algorithm) {
    case Algorithm::Gzip: return kDeflateWindow;
    case Algorithm::Bz2: return static_cast<std::size_t>(level) * 100000;
    case Algorithm::Lzma: return kLzmaDict[static_cast<std::size_t>(level)];
    case Algorithm::Zstd: return zstd_window(level);
    case Algorithm::Identity: return 0;
  }
  return 0;
}

std::size_t gzip_len(std::string_view payload, int level) {
  z_stream stream{};
  // windowBits 15 + 16 selects the gzip wrapper (10-byte header, 8-byte trailer).
  if (deflateInit2(&stream, level, Z_DEFLATED, 15 + 16, 8, Z_DEFAULT_STRATEGY) != Z_OK) {
    throw BackendError("gzip: deflateInit2 failed");
  }
  std::unique_ptr<z_stream, decltype(&deflateEnd)> guard(&stream, &deflateEnd);

  std::vector<unsigned char> out(deflateBound(&stream, static_cast<uLong>(payload.size())));
  stream.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(payload.data()));
  stream.avail_in = static_cast<uInt>(payload.size());
  stream.next_out = out.data();
  stream.avail_out = static_cast<uInt>(out.size());
  int rc = deflate(&stream, Z_FINISH);
  if (rc != Z_STREAM_END) {
    throw BackendError("gzip: deflate returned " + std::to_string(rc));
  }
  return static_cast<std::size_t>(stream.total_out);
}

std::size_t bz2_len(std::string_view payload, int level) {
  // Worst case documented by bzip2: 1% + 600 bytes.
  std::vector<char> out(payload.size() + payload.size() / 100 + 601);
  auto out_len = static_cast<unsigned int>(out.size());
  int rc = BZ2_bzBuffToBuffCompress(out.data(), &out_len, const_cast<char*>(payload.data()),
                                    static_cast<unsigned int>(payload.size()), level, 0, 0);
  if (rc != BZ_OK) {
    throw BackendError("bz2: BZ2_bzBuffToBuffCompress returned " + std::to_string(rc));
  }
  return out_len;
}

std::size_t lzma_len(std::string_view payload, int level) {
  // Streaming encoder: its block header omits the sizes, matching what the
  // xz tool and liblzma stream wrappers emit.
  lzma_stream strm = LZMA_STREAM_INIT;
  lzma_ret rc = lzma_easy_encoder(&strm, static_cast<std::uint32_t>(level), LZMA_CHECK_CRC64);
  if (rc != LZMA_OK) {
    throw BackendError("lzma: lzma_easy_encoder returned " + std::to_string(static_cast<int>(rc)));
  }
  std::vector<std::uint8_t> out(lzma_stream_buffer_bound(payload.size()));
  strm.next_in = reinterpret_cast<const std::uint8_t*>(payload.data());
  strm.avail_in = payload.size();
  strm.next_out = out.data();
  strm.avail_out = out.size();
  rc = lzma_code(&strm, LZMA_FINISH);
  const std::size_t written = strm.total_out;
  lzma_end(&strm);
  if (rc != LZMA_STREAM_END) {
    throw BackendError("lzma: lzma_code returned " + std::to_string(static_cast<int>(rc)));
  }
  return written;
}

std::size_t zstd_len(std::string_view payload, int level) {
  std::vector<char> out(ZSTD_compressBound(payload.size()));
  std::size_t rc = ZSTD_compress(out.data(), out.size(), payload.data(), payload.size(), level);
  if (ZSTD_isError(rc)) {
    throw BackendError(std::string("zstd: ") + ZSTD_getErrorName(rc));
  }
  return rc;
}

}  // namespace

std::string_view algorithm_name(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::Gzip: return "gzip";
    case Algorithm::Bz2: return "bz2";
    case Algorithm::Lzma: return "lzma";
    case Algorithm::Zstd: return "zstd";
    case Algorithm::Identity: return "identity";
  }
  return "unknown";
}

const std::vector<std::string>& CompressorBackend::names() {
  static const std::vector<std::string> all = {"gzip", "bz2", "lzma", "zstd", "identity"};
  return all;
}

int CompressorBackend::default_level(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::Gzip: return 9;
    case Algorithm::Bz2: return 9;
    case Algorithm::Lzma: return 6;
    case Algorithm::Zstd: return 3;
    case Algorithm::Identity: return 0;
  }
  return 0;
}

std::pair<int, int> CompressorBackend::level_range(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::Gzip: return {0, 9};
    case Algorithm::Bz2: return {1, 9};
    case Algorithm::Lzma: return {0, 9};
    case Algorithm::Zstd: return {ZSTD_minCLevel(), ZSTD_maxCLevel()};
    case Algorithm::Identity: return {0, 0};
  }
  return {0, 0};
}

CompressorBackend::CompressorBackend(Algorithm algorithm, int level)
    : algorithm_(algorithm), level_(level), name_(algorithm_name(algorithm)) {
  auto [lo, hi] = level_range(algorithm);
  if (level < lo || level > hi) {
    throw ArgumentError("level " + std::to_string(level) + " is outside the legal range [" + std::to_string(lo) +
                        ", " + std::to_string(hi) + "] for backend " + name_);
  }
  window_ = window_for(algorithm, level);
}

CompressorBackend CompressorBackend::from_name(std::string_view name, std::optional<int> level) {
  static constexpr std::array<Algorithm, 5> all = {Algorithm::Gzip, Algorithm::Bz2, Algorithm::Lzma, Algorithm::Zstd,
                                                   Algorithm::Identity};
  for (Algorithm a : all) {
    if (algorithm_name(a) == name) {
      return CompressorBackend(a, level.value_or(default_level(a)));
    }
  }
  throw ArgumentError("unknown backend '" + std::string(name) + "' (expected gzip, bz2, lzma, zstd or identity)");
}

CompressedLength compressed_len(const CompressorBackend& backend, std::string_view payload) {
  if (backend.algorithm() != Algorithm::Identity && payload.size() > std::numeric_limits<unsigned int>::max()) {
    throw BackendError(backend.name() + ": payload of " + std::to_string(payload.size()) + " bytes is too large");
  }
  switch (backend.algorithm()) {
    case Algorithm::Gzip: return {gzip_len(payload, backend.level())};
    case Algorithm::Bz2: return {bz2_len(payload, backend.level())};
    case Algorithm::Lzma: return {lzma_len(payload, backend.level())};
    case Algorithm::Zstd: return {zstd_len(payload, backend.level())};
    case Algorithm::Identity: return {payload.size()};
  }
  throw BackendError("unreachable backend");
}

double compression_ratio(const CompressorBackend& backend, std::string_view payload) {
  if (payload.empty()) {
    throw DomainError("compression ratio is undefined for an empty payload");
  }
  return static_cast<double>(payload.size()) / static_cast<double>(compressed_len(backend, payload).bytes);
}

}  // namespace ncd
