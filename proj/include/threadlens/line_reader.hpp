#pragma once

#include <cstdio>
#include <cstring>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "threadlens/records.hpp"

#if defined(THREADLENS_HAVE_ZLIB)
#include <zlib.h>
#endif
#if defined(THREADLENS_HAVE_ZSTD)
#include <zstd.h>
#endif

namespace threadlens {

class ByteSource {
 public:
  virtual ~ByteSource() = default;
  // Returns bytes read; 0 means EOF. Negative never returned: errors throw
  // via the Result on open or set fail().
  virtual std::size_t read(char* buf, std::size_t n) = 0;
  virtual bool failed() const = 0;
};

namespace detail {

class PlainSource final : public ByteSource {
 public:
  explicit PlainSource(std::FILE* f) : f_(f) {}
  ~PlainSource() override {
    if (f_) std::fclose(f_);
  }
  std::size_t read(char* buf, std::size_t n) override {
    const std::size_t got = std::fread(buf, 1, n, f_);
    if (got < n && std::ferror(f_)) fail_ = true;
    return got;
  }
  bool failed() const override { return fail_; }

 private:
  std::FILE* f_;
  bool fail_ = false;
};

#if defined(THREADLENS_HAVE_ZLIB)
class GzipSource final : public ByteSource {
 public:
  explicit GzipSource(gzFile f) : f_(f) {}
  ~GzipSource() override {
    if (f_) gzclose(f_);
  }
  std::size_t read(char* buf, std::size_t n) override {
    const int got = gzread(f_, buf, static_cast<unsigned>(n));
    if (got < 0) {
      fail_ = true;
      return 0;
    }
    if (got == 0) {
      // A truncated stream reports plain EOF here with the error code on
      // the side; treating it as end-of-data would silently drop the tail.
      int errnum = 0;
      gzerror(f_, &errnum);
      if (errnum < 0) fail_ = true;
    }
    return static_cast<std::size_t>(got);
  }
  bool failed() const override { return fail_; }

 private:
  gzFile f_;
  bool fail_ = false;
};
#endif

#if defined(THREADLENS_HAVE_ZSTD)
class ZstdSource final : public ByteSource {
 public:
  explicit ZstdSource(std::FILE* f)
      : f_(f), dctx_(ZSTD_createDStream()), in_buf_(ZSTD_DStreamInSize()) {
    in_.src = in_buf_.data();
    in_.size = 0;
    in_.pos = 0;
  }
  ~ZstdSource() override {
    if (dctx_) ZSTD_freeDStream(dctx_);
    if (f_) std::fclose(f_);
  }
  std::size_t read(char* buf, std::size_t n) override {
    ZSTD_outBuffer out{buf, n, 0};
    while (out.pos < out.size) {
      if (in_.pos == in_.size) {
        const std::size_t got = std::fread(in_buf_.data(), 1, in_buf_.size(), f_);
        if (got == 0) {
          if (std::ferror(f_)) fail_ = true;
          break;
        }
        in_.size = got;
        in_.pos = 0;
      }
      const std::size_t rc = ZSTD_decompressStream(dctx_, &out, &in_);
      if (ZSTD_isError(rc)) {
        fail_ = true;
        break;
      }
    }
    return out.pos;
  }
  bool failed() const override { return fail_; }

 private:
  std::FILE* f_;
  ZSTD_DStream* dctx_;
  std::vector<char> in_buf_;
  ZSTD_inBuffer in_{};
  bool fail_ = false;
};
#endif

inline bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.substr(s.size() - suffix.size()) == suffix;
}

}  // namespace detail

// Compression is detected by file extension: .gz, .zst/.zstd, otherwise plain.
inline Result<std::unique_ptr<ByteSource>> open_byte_source(
    const std::string& path) {
  using detail::ends_with;
  if (ends_with(path, ".gz") || ends_with(path, ".gzip")) {
#if defined(THREADLENS_HAVE_ZLIB)
    gzFile f = gzopen(path.c_str(), "rb");
    if (!f) return make_error(Errc::io_error, "cannot open " + path);
    return std::unique_ptr<ByteSource>(new detail::GzipSource(f));
#else
    return make_error(Errc::unsupported_compression,
                      "built without zlib: " + path);
#endif
  }
  if (ends_with(path, ".zst") || ends_with(path, ".zstd")) {
#if defined(THREADLENS_HAVE_ZSTD)
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) return make_error(Errc::io_error, "cannot open " + path);
    return std::unique_ptr<ByteSource>(new detail::ZstdSource(f));
#else
    return make_error(Errc::unsupported_compression,
                      "built without zstd: " + path);
#endif
  }
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) return make_error(Errc::io_error, "cannot open " + path);
  return std::unique_ptr<ByteSource>(new detail::PlainSource(f));
}

// A chunk holds whole lines only (the final line may lack a trailing
// newline). Chunks never span file boundaries.
struct LineChunk {
  std::string data;
  std::size_t index = 0;
};

class ChunkedLineReader {
 public:
  static constexpr std::size_t kDefaultChunkBytes = 4u << 20;

  ChunkedLineReader(std::vector<std::string> paths,
                    std::size_t chunk_bytes = kDefaultChunkBytes)
      : paths_(std::move(paths)), chunk_bytes_(chunk_bytes) {}

  // Returns the next chunk, std::nullopt at end of all inputs.
  Result<std::optional<LineChunk>> next() {
    while (true) {
      if (!src_) {
        if (path_pos_ >= paths_.size()) return std::optional<LineChunk>{};
        auto opened = open_byte_source(paths_[path_pos_]);
        if (!opened) return opened.error();
        src_ = std::move(*opened);
      }

      LineChunk chunk;
      chunk.data = std::move(carry_);
      carry_.clear();
      chunk.data.resize(chunk.data.size() + chunk_bytes_);
      const std::size_t head = chunk.data.size() - chunk_bytes_;
      const std::size_t got = src_->read(chunk.data.data() + head, chunk_bytes_);
      if (src_->failed()) {
        return make_error(Errc::io_error, "read failed: " + paths_[path_pos_]);
      }
      chunk.data.resize(head + got);

      if (got == 0) {
        src_.reset();
        ++path_pos_;
        if (chunk.data.empty()) continue;  // nothing carried, move on
        chunk.index = next_index_++;
        return std::optional<LineChunk>(std::move(chunk));
      }

      const auto last_nl = chunk.data.rfind('\n');
      if (last_nl == std::string::npos) {
        // No full line yet; keep accumulating.
        carry_ = std::move(chunk.data);
        continue;
      }
      carry_.assign(chunk.data, last_nl + 1, std::string::npos);
      chunk.data.resize(last_nl + 1);
      chunk.index = next_index_++;
      return std::optional<LineChunk>(std::move(chunk));
    }
  }

 private:
  std::vector<std::string> paths_;
  std::size_t chunk_bytes_;
  std::size_t path_pos_ = 0;
  std::size_t next_index_ = 0;
  std::unique_ptr<ByteSource> src_;
  std::string carry_;
};

// Calls fn for every non-empty line in the chunk. Carriage returns before
// the newline are trimmed.
template <class Fn>
void split_lines(std::string_view data, Fn&& fn) {
  std::size_t pos = 0;
  while (pos < data.size()) {
    auto nl = data.find('\n', pos);
    if (nl == std::string_view::npos) nl = data.size();
    std::string_view line = data.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) fn(line);
    pos = nl + 1;
  }
}

// Sequential convenience wrapper.
template <class Fn>
Result<bool> for_each_line(const std::string& path, Fn&& fn) {
  ChunkedLineReader reader({path});
  while (true) {
    auto chunk = reader.next();
    if (!chunk) return chunk.error();
    if (!chunk->has_value()) return true;
    split_lines((**chunk).data, fn);
  }
}

}  // namespace threadlens
