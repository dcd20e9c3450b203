#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

namespace threadlens {

// Sentinel values used by the public dumps. The deleted sentinel is never an
// identity: two "[deleted]" strings do not compare as the same author.
inline constexpr std::string_view kDeletedAuthor = "[deleted]";
inline constexpr std::string_view kRemovedBody = "[removed]";

inline bool is_deleted_author(std::string_view author) {
  return author == kDeletedAuthor || author.empty();
}

// True only when both sides are real identities and equal.
inline bool same_author(std::string_view a, std::string_view b) {
  if (is_deleted_author(a) || is_deleted_author(b)) return false;
  return a == b;
}

enum class Errc {
  malformed_json,
  bad_encoding,
  missing_field,
  invalid_timestamp,
  self_parent,
  empty_input,
  too_few_samples,
  too_few_distinct,
  degenerate_tail,
  nonpositive_value,
  zero_variance,
  invalid_param,
  no_first_level,
  zero_activity,
  inconsistent_spec,
  io_error,
  unsupported_compression,
  bad_config,
};

struct Error {
  Errc code;
  std::string detail;
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::malformed_json: return "malformed-json";
    case Errc::bad_encoding: return "bad-encoding";
    case Errc::missing_field: return "missing-field";
    case Errc::invalid_timestamp: return "invalid-timestamp";
    case Errc::self_parent: return "self-parent";
    case Errc::empty_input: return "empty-input";
    case Errc::too_few_samples: return "too-few-samples";
    case Errc::too_few_distinct: return "too-few-distinct";
    case Errc::degenerate_tail: return "degenerate-tail";
    case Errc::nonpositive_value: return "nonpositive-value";
    case Errc::zero_variance: return "zero-variance";
    case Errc::invalid_param: return "invalid-param";
    case Errc::no_first_level: return "no-first-level";
    case Errc::zero_activity: return "zero-activity";
    case Errc::inconsistent_spec: return "inconsistent-spec";
    case Errc::io_error: return "io-error";
    case Errc::unsupported_compression: return "unsupported-compression";
    case Errc::bad_config: return "bad-config";
  }
  return "unknown";
}

// Minimal value-or-error carrier. The hot parse paths use this instead of
// exceptions so malformed lines stay cheap to skip.
template <class T>
class Result {
 public:
  Result(T value) : v_(std::move(value)) {}  // NOLINT(google-explicit-constructor)
  Result(Error err) : v_(std::move(err)) {}  // NOLINT(google-explicit-constructor)

  bool ok() const { return std::holds_alternative<T>(v_); }
  explicit operator bool() const { return ok(); }

  T& value() & { return std::get<T>(v_); }
  const T& value() const& { return std::get<T>(v_); }
  T&& value() && { return std::get<T>(std::move(v_)); }
  const Error& error() const { return std::get<Error>(v_); }

  T& operator*() & { return value(); }
  const T& operator*() const& { return value(); }
  T* operator->() { return &value(); }
  const T* operator->() const { return &value(); }

 private:
  std::variant<T, Error> v_;
};

inline Error make_error(Errc code, std::string detail = {}) {
  return Error{code, std::move(detail)};
}

// Dump identifiers may carry a thing-type prefix ("t3_" for posts, "t1_" for
// comments). Matching is done on the stripped form; stripping is configurable
// because the convention is not guaranteed across dump vintages.
struct IdPolicy {
  bool strip_type_prefixes = true;

  std::string_view key(std::string_view id) const {
    if (strip_type_prefixes && id.size() >= 3 && id[0] == 't' && id[1] >= '1' &&
        id[1] <= '6' && id[2] == '_') {
      return id.substr(3);
    }
    return id;
  }

  bool same_id(std::string_view a, std::string_view b) const {
    return key(a) == key(b);
  }
};

// Post ids and comment ids live in separate namespaces, so the stripped key
// alone cannot say whether a parent reference points at the post or at a
// comment whose number happens to match. The raw prefix is authoritative
// when present; unprefixed ids fall back to key comparison with the link.
inline bool parent_is_post_level(std::string_view parent_id, std::string_view link_id,
                                 const IdPolicy& ids) {
  auto prefixed = [](std::string_view id, char kind) {
    return id.size() >= 3 && id[0] == 't' && id[1] == kind && id[2] == '_';
  };
  if (prefixed(parent_id, '1')) return false;
  if (prefixed(parent_id, '3')) return true;
  return ids.key(parent_id) == ids.key(link_id);
}

// Half-open time window [start, end) in epoch seconds.
struct Period {
  std::int64_t start = 0;
  std::int64_t end = 0;

  bool valid() const { return start < end; }
  bool contains(std::int64_t t) const { return t >= start && t < end; }
};

struct PostRecord {
  std::string id;  // the dump's "name" field, kept verbatim
  std::string author;
  std::int64_t created_utc = 0;
  std::uint32_t declared_num_comments = 0;
  std::optional<std::int32_t> score;
  std::string body_or_title;
  bool deleted_author = false;
};

struct CommentRecord {
  std::string id;
  std::string author;
  std::int64_t created_utc = 0;
  std::string link_id;    // owning post
  std::string parent_id;  // post or an earlier comment
  std::string body;
  std::optional<std::int32_t> score;
  bool deleted_author = false;
  bool removed = false;  // body was the removed sentinel
};

// Mergeable ingest counters. Merging shard stats in any order and grouping
// reproduces the single-pass totals.
struct IngestStats {
  std::uint64_t total_lines = 0;
  std::uint64_t post_lines = 0;
  std::uint64_t comment_lines = 0;
  std::uint64_t malformed_post_lines = 0;
  std::uint64_t malformed_comment_lines = 0;

  std::uint64_t posts_kept = 0;
  std::uint64_t posts_dropped_out_of_period = 0;
  std::uint64_t duplicate_post_ids = 0;
  std::uint64_t posts_with_deleted_author = 0;

  std::uint64_t comments_kept = 0;
  std::uint64_t comments_dropped_out_of_period = 0;
  std::uint64_t comments_dropped_missing_post = 0;
  std::uint64_t comments_with_deleted_author = 0;
  std::uint64_t removed_comments = 0;

  // Distinct post ids (normalized form) referenced by in-period comments with
  // no post record at all, not even one outside the period.
  std::set<std::string> disconnected_post_ids;

  std::uint64_t malformed_lines() const {
    return malformed_post_lines + malformed_comment_lines;
  }

  void merge(const IngestStats& o) {
    total_lines += o.total_lines;
    post_lines += o.post_lines;
    comment_lines += o.comment_lines;
    malformed_post_lines += o.malformed_post_lines;
    malformed_comment_lines += o.malformed_comment_lines;
    posts_kept += o.posts_kept;
    posts_dropped_out_of_period += o.posts_dropped_out_of_period;
    duplicate_post_ids += o.duplicate_post_ids;
    posts_with_deleted_author += o.posts_with_deleted_author;
    comments_kept += o.comments_kept;
    comments_dropped_out_of_period += o.comments_dropped_out_of_period;
    comments_dropped_missing_post += o.comments_dropped_missing_post;
    comments_with_deleted_author += o.comments_with_deleted_author;
    removed_comments += o.removed_comments;
    disconnected_post_ids.insert(o.disconnected_post_ids.begin(),
                                 o.disconnected_post_ids.end());
  }

  bool operator==(const IngestStats& o) const = default;
};

}  // namespace threadlens
