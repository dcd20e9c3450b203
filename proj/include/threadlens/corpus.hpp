#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "threadlens/json_line.hpp"
#include "threadlens/records.hpp"

namespace threadlens {

// Interns author handles to dense ids. The deleted sentinel (and the empty
// handle) intern like any other string but carry the deleted flag, so two
// deleted entries never compare as the same identity.
class AuthorTable {
 public:
  std::uint32_t intern(std::string_view name) {
    auto it = index_.find(name);
    if (it != index_.end()) return it->second;
    names_.emplace_back(name);
    deleted_.push_back(is_deleted_author(name) ? 1 : 0);
    const auto id = static_cast<std::uint32_t>(names_.size() - 1);
    index_.emplace(std::string_view(names_.back()), id);
    return id;
  }

  const std::string& name(std::uint32_t id) const { return names_[id]; }
  bool deleted(std::uint32_t id) const { return deleted_[id] != 0; }
  std::size_t size() const { return names_.size(); }

  // True only when both ids refer to the same real identity.
  bool same_identity(std::uint32_t a, std::uint32_t b) const {
    return a == b && !deleted(a);
  }

 private:
  std::deque<std::string> names_;  // stable addresses for the index views
  std::vector<std::uint8_t> deleted_;
  std::unordered_map<std::string_view, std::uint32_t> index_;
};

// Compact per-comment payload retained by the pipeline; bodies are reduced
// to their Unicode length at this point.
struct CommentLite {
  std::string id;          // raw, as in the dump
  std::string parent_key;  // normalized; empty means "attached to the post"
  std::int64_t created_utc = 0;
  std::uint32_t author_id = 0;
  std::uint32_t char_len = 0;
  std::int32_t score_value = 0;
  bool has_score = false;
  bool removed = false;
  bool deleted_author = false;
};

struct PostLite {
  std::string id;  // raw
  std::int64_t created_utc = 0;
  std::uint32_t author_id = 0;
  std::uint32_t declared_num_comments = 0;
  std::int32_t score_value = 0;
  bool has_score = false;
  bool deleted_author = false;
  bool kept = true;
};

inline PostLite to_lite(const PostRecord& rec, AuthorTable& authors) {
  PostLite p;
  p.id = rec.id;
  p.created_utc = rec.created_utc;
  p.author_id = authors.intern(rec.author);
  p.declared_num_comments = rec.declared_num_comments;
  if (rec.score) {
    p.score_value = *rec.score;
    p.has_score = true;
  }
  p.deleted_author = rec.deleted_author;
  return p;
}

inline CommentLite to_lite(const CommentRecord& rec, AuthorTable& authors,
                           const IdPolicy& ids) {
  CommentLite c;
  c.id = rec.id;
  if (!parent_is_post_level(rec.parent_id, rec.link_id, ids))
    c.parent_key.assign(ids.key(rec.parent_id));
  c.created_utc = rec.created_utc;
  c.author_id = authors.intern(rec.author);
  c.char_len = utf8_length(rec.body);
  if (rec.score) {
    c.score_value = *rec.score;
    c.has_score = true;
  }
  c.removed = rec.removed;
  c.deleted_author = rec.deleted_author;
  return c;
}

namespace detail {

struct TransparentStringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const noexcept {
    return std::hash<std::string_view>{}(s);
  }
};

}  // namespace detail

// Two-pass corpus filter in compact form. Pass 1 indexes every post record
// (kept or not); pass 2 attaches in-period comments to kept posts. The
// callers feed records in a deterministic order (chunk order), which fixes
// duplicate resolution and group layout.
class CorpusStore {
 public:
  explicit CorpusStore(Period period, IdPolicy ids = {})
      : period_(period), ids_(ids) {}

  void add_post(const PostRecord& rec) {
    const bool kept = period_.contains(rec.created_utc);
    auto key = std::string(ids_.key(rec.id));
    auto [it, inserted] =
        post_index_.try_emplace(std::move(key), static_cast<std::uint32_t>(posts_.size()));
    if (!inserted) {
      ++stats_.duplicate_post_ids;
      return;
    }
    PostLite p = to_lite(rec, authors_);
    p.kept = kept;
    posts_.push_back(std::move(p));
    groups_.emplace_back();
    if (kept) {
      ++stats_.posts_kept;
      if (rec.deleted_author) ++stats_.posts_with_deleted_author;
    } else {
      ++stats_.posts_dropped_out_of_period;
    }
  }

  void add_comment(const CommentRecord& rec) {
    if (!period_.contains(rec.created_utc)) {
      ++stats_.comments_dropped_out_of_period;
      return;
    }
    const auto key = ids_.key(rec.link_id);
    auto it = post_index_.find(key);
    if (it == post_index_.end()) {
      ++stats_.comments_dropped_missing_post;
      stats_.disconnected_post_ids.emplace(key);
      return;
    }
    const auto idx = it->second;
    if (!posts_[idx].kept) {
      ++stats_.comments_dropped_missing_post;
      return;
    }
    ++stats_.comments_kept;
    if (rec.deleted_author) ++stats_.comments_with_deleted_author;
    if (rec.removed) ++stats_.removed_comments;
    groups_[idx].push_back(to_lite(rec, authors_, ids_));
  }

  const std::vector<PostLite>& posts() const { return posts_; }
  std::vector<CommentLite>& group(std::size_t post_idx) { return groups_[post_idx]; }
  const std::vector<CommentLite>& group(std::size_t post_idx) const {
    return groups_[post_idx];
  }
  AuthorTable& authors() { return authors_; }
  const AuthorTable& authors() const { return authors_; }
  IngestStats& stats() { return stats_; }
  const IngestStats& stats() const { return stats_; }
  const IdPolicy& ids() const { return ids_; }
  const Period& period() const { return period_; }

 private:
  Period period_;
  IdPolicy ids_;
  std::vector<PostLite> posts_;
  std::unordered_map<std::string, std::uint32_t, detail::TransparentStringHash,
                     std::equal_to<>>
      post_index_;
  std::vector<std::vector<CommentLite>> groups_;
  AuthorTable authors_;
  IngestStats stats_;
};

// Record-level filter preserving full records and input order. Matches the
// CorpusStore rules exactly; used where the caller wants records back rather
// than the compact pipeline form.
struct FilterResult {
  std::vector<PostRecord> posts;
  std::vector<CommentRecord> comments;
  IngestStats stats;
};

inline FilterResult filter_corpus(const std::vector<PostRecord>& posts,
                                  const std::vector<CommentRecord>& comments,
                                  Period period, IdPolicy ids = {}) {
  FilterResult out;
  out.stats.total_lines = posts.size() + comments.size();
  out.stats.post_lines = posts.size();
  out.stats.comment_lines = comments.size();

  std::unordered_map<std::string, bool> post_kept;  // normalized id -> kept
  post_kept.reserve(posts.size());
  for (const auto& p : posts) {
    const bool kept = period.contains(p.created_utc);
    auto [it, inserted] = post_kept.try_emplace(std::string(ids.key(p.id)), kept);
    if (!inserted) {
      ++out.stats.duplicate_post_ids;
      continue;
    }
    if (kept) {
      ++out.stats.posts_kept;
      if (p.deleted_author) ++out.stats.posts_with_deleted_author;
      out.posts.push_back(p);
    } else {
      ++out.stats.posts_dropped_out_of_period;
    }
  }

  for (const auto& c : comments) {
    if (!period.contains(c.created_utc)) {
      ++out.stats.comments_dropped_out_of_period;
      continue;
    }
    const auto key = ids.key(c.link_id);
    auto it = post_kept.find(std::string(key));
    if (it == post_kept.end()) {
      ++out.stats.comments_dropped_missing_post;
      out.stats.disconnected_post_ids.emplace(key);
      continue;
    }
    if (!it->second) {
      ++out.stats.comments_dropped_missing_post;
      continue;
    }
    ++out.stats.comments_kept;
    if (c.deleted_author) ++out.stats.comments_with_deleted_author;
    if (c.removed) ++out.stats.removed_comments;
    out.comments.push_back(c);
  }
  return out;
}

}  // namespace threadlens
