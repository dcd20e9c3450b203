#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "threadlens/corpus.hpp"
#include "threadlens/records.hpp"

namespace threadlens {

struct AuthorMetrics {
  std::uint64_t posts_created = 0;
  std::uint64_t comments_made = 0;
  std::uint64_t effective_comments_received = 0;  // A: on own posts, from others
  std::uint64_t comments_on_others = 0;           // B: own comments on others' posts
  std::uint32_t in_degree = 0;                    // distinct commenters on own posts
  std::uint32_t out_degree = 0;                   // distinct post authors commented on
};

// A/(A+B); undefined when the author has no interactions either way.
inline std::optional<double> interaction_score(std::uint64_t a, std::uint64_t b) {
  if (a + b == 0) return std::nullopt;
  return static_cast<double>(a) / static_cast<double>(a + b);
}

enum class AuthorCategory { producer_only, consumer_only, both };

inline const char* author_category_name(AuthorCategory c) {
  switch (c) {
    case AuthorCategory::producer_only: return "producer_only";
    case AuthorCategory::consumer_only: return "consumer_only";
    case AuthorCategory::both: return "both";
  }
  return "unknown";
}

inline Result<AuthorCategory> categorize_author(const AuthorMetrics& m) {
  if (m.posts_created == 0 && m.comments_made == 0)
    return make_error(Errc::zero_activity, "author has neither posts nor comments");
  if (m.comments_made == 0) return AuthorCategory::producer_only;
  if (m.posts_created == 0) return AuthorCategory::consumer_only;
  return AuthorCategory::both;
}

// Event-sharded accumulation of per-author activity. Interaction edges run
// from the comment author to the post author; self loops and any event with
// a sentinel on either side stay out of the per-author table and land in the
// aggregate buckets, which keep the comment-conservation identity exact:
// sum(A) + own_post_comments + deleted_author_comments +
// comments_on_sentinel_posts + comments_on_disconnected = total comments fed.
class AuthorAccumulator {
 public:
  struct Aggregates {
    std::uint64_t deleted_author_posts = 0;
    std::uint64_t deleted_author_comments = 0;
    std::uint64_t comments_on_sentinel_posts = 0;
    std::uint64_t own_post_comments = 0;
    std::uint64_t comments_on_disconnected = 0;

    void merge(const Aggregates& o) {
      deleted_author_posts += o.deleted_author_posts;
      deleted_author_comments += o.deleted_author_comments;
      comments_on_sentinel_posts += o.comments_on_sentinel_posts;
      own_post_comments += o.own_post_comments;
      comments_on_disconnected += o.comments_on_disconnected;
    }
  };

  void add_post(std::uint32_t author_id, const AuthorTable& authors) {
    if (authors.deleted(author_id)) {
      ++agg_.deleted_author_posts;
      return;
    }
    ++row(author_id).posts_created;
  }

  // post_author absent = the owning post is not in the corpus.
  void add_comment(std::uint32_t commenter, std::optional<std::uint32_t> post_author,
                   const AuthorTable& authors) {
    if (!post_author) {
      ++agg_.comments_on_disconnected;
      return;
    }
    if (authors.deleted(commenter)) {
      ++agg_.deleted_author_comments;
      return;
    }
    ++row(commenter).comments_made;
    if (authors.deleted(*post_author)) {
      ++agg_.comments_on_sentinel_posts;
      return;
    }
    if (commenter == *post_author) {
      ++agg_.own_post_comments;
      return;
    }
    ++row(commenter).comments_on_others;
    ++row(*post_author).effective_comments_received;
    edges_.push_back((static_cast<std::uint64_t>(commenter) << 32) | *post_author);
  }

  void merge(AuthorAccumulator&& other) {
    if (other.table_.size() > table_.size()) table_.resize(other.table_.size());
    for (std::size_t i = 0; i < other.table_.size(); ++i) {
      auto& d = table_[i];
      const auto& s = other.table_[i];
      d.posts_created += s.posts_created;
      d.comments_made += s.comments_made;
      d.effective_comments_received += s.effective_comments_received;
      d.comments_on_others += s.comments_on_others;
    }
    edges_.insert(edges_.end(), other.edges_.begin(), other.edges_.end());
    agg_.merge(other.agg_);
    other.table_.clear();
    other.edges_.clear();
  }

  struct Finalized {
    std::vector<std::uint32_t> active_ids;  // ascending author-table ids
    std::vector<AuthorMetrics> metrics;     // aligned with active_ids
    Aggregates aggregates;
  };

  // Deduplicates interaction edges into degrees and drops inactive rows.
  // Consumes the accumulator.
  Finalized finalize() && {
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
    for (std::uint64_t e : edges_) {
      const auto u = static_cast<std::uint32_t>(e >> 32);
      const auto v = static_cast<std::uint32_t>(e & 0xffffffffu);
      ++row(u).out_degree;
      ++row(v).in_degree;
    }
    Finalized out;
    out.aggregates = agg_;
    for (std::uint32_t id = 0; id < table_.size(); ++id) {
      const auto& m = table_[id];
      if (m.posts_created == 0 && m.comments_made == 0) continue;
      out.active_ids.push_back(id);
      out.metrics.push_back(m);
    }
    table_.clear();
    edges_.clear();
    return out;
  }

  const Aggregates& aggregates() const { return agg_; }

 private:
  AuthorMetrics& row(std::uint32_t id) {
    if (id >= table_.size()) table_.resize(id + 1);
    return table_[id];
  }

  std::vector<AuthorMetrics> table_;  // indexed by author-table id
  std::vector<std::uint64_t> edges_;  // (commenter << 32) | post author
  Aggregates agg_;
};

// Cumulative author fraction over the ratio A / posts_created, for authors
// with at least one post. The unity split compares A against posts_created
// as integers, so the boundary is exact.
struct RatioCurve {
  std::vector<std::pair<double, double>> points;  // (ratio, fraction of authors <= ratio)
  std::uint64_t below_unity = 0;
  std::uint64_t at_unity = 0;
  std::uint64_t above_unity = 0;
  std::uint64_t n_authors = 0;
};

inline RatioCurve comments_per_post_curve(const std::vector<AuthorMetrics>& metrics) {
  RatioCurve out;
  std::vector<double> ratios;
  for (const auto& m : metrics) {
    if (m.posts_created == 0) continue;
    ++out.n_authors;
    if (m.effective_comments_received < m.posts_created)
      ++out.below_unity;
    else if (m.effective_comments_received == m.posts_created)
      ++out.at_unity;
    else
      ++out.above_unity;
    ratios.push_back(static_cast<double>(m.effective_comments_received) /
                     static_cast<double>(m.posts_created));
  }
  std::sort(ratios.begin(), ratios.end());
  const double n = static_cast<double>(ratios.size());
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    if (i + 1 == ratios.size() || ratios[i + 1] != ratios[i])
      out.points.emplace_back(ratios[i], static_cast<double>(i + 1) / n);
  }
  return out;
}

}  // namespace threadlens
