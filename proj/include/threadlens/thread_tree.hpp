#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "threadlens/corpus.hpp"
#include "threadlens/records.hpp"

namespace threadlens {

// Discussion tree for one post. Comments are held in canonical order
// (created_utc ascending, raw id as tie-break); parent links are indices
// into that order. A comment whose parent id resolves to nothing in the
// group becomes an orphan root: it attaches at post level and is flagged,
// so size-based measures can exclude its subtree while time-based measures
// still see the comment.
struct ThreadTree {
  std::string post_id;  // raw
  std::int64_t post_created = 0;
  std::uint32_t post_author_id = 0;
  bool post_author_deleted = false;

  std::vector<CommentLite> comments;       // canonical order
  std::vector<std::int32_t> parent;        // -1 = attached to the post
  std::vector<std::uint8_t> orphan;        // 1 = unresolvable parent (or cut cycle)
  std::vector<std::int32_t> first_level;   // indices with parent -1 and not orphan
  std::vector<std::int32_t> orphan_roots;  // indices with parent -1 and orphan
  std::vector<std::int64_t> offsets;       // seconds since post creation, nondecreasing
  std::uint32_t clamped_offsets = 0;       // comments timestamped before the post
};

inline void sort_canonical(std::vector<CommentLite>& comments) {
  std::sort(comments.begin(), comments.end(),
            [](const CommentLite& a, const CommentLite& b) {
              if (a.created_utc != b.created_utc) return a.created_utc < b.created_utc;
              return a.id < b.id;
            });
}

inline ThreadTree build_thread(const PostLite& post, std::vector<CommentLite> comments,
                               IdPolicy ids = {}) {
  ThreadTree t;
  t.post_id = post.id;
  t.post_created = post.created_utc;
  t.post_author_id = post.author_id;
  t.post_author_deleted = post.deleted_author;
  sort_canonical(comments);
  t.comments = std::move(comments);

  const auto n = static_cast<std::int32_t>(t.comments.size());
  t.parent.assign(static_cast<std::size_t>(n), -1);
  t.orphan.assign(static_cast<std::size_t>(n), 0);

  std::unordered_map<std::string_view, std::int32_t> by_key;
  by_key.reserve(static_cast<std::size_t>(n));
  for (std::int32_t i = 0; i < n; ++i) by_key.emplace(ids.key(t.comments[i].id), i);

  for (std::int32_t i = 0; i < n; ++i) {
    const auto& pk = t.comments[i].parent_key;
    if (pk.empty()) continue;  // attaches to the post
    auto it = by_key.find(std::string_view(pk));
    if (it == by_key.end() || it->second == i) {
      t.orphan[static_cast<std::size_t>(i)] = 1;
    } else {
      t.parent[static_cast<std::size_t>(i)] = it->second;
    }
  }

  // Cut reference cycles: walk each unresolved chain; on meeting the walk's
  // own path again, detach the smallest-index member of the cycle as an
  // orphan root. Indices are canonical, so the cut is order-independent.
  std::vector<std::uint8_t> state(static_cast<std::size_t>(n), 0);  // 0 new, 1 on path, 2 done
  std::vector<std::int32_t> path;
  for (std::int32_t i = 0; i < n; ++i) {
    if (state[static_cast<std::size_t>(i)] != 0) continue;
    path.clear();
    std::int32_t v = i;
    while (v >= 0 && state[static_cast<std::size_t>(v)] == 0) {
      state[static_cast<std::size_t>(v)] = 1;
      path.push_back(v);
      v = t.parent[static_cast<std::size_t>(v)];
    }
    if (v >= 0 && state[static_cast<std::size_t>(v)] == 1) {
      auto cycle_start = std::find(path.begin(), path.end(), v);
      std::int32_t cut = *std::min_element(cycle_start, path.end());
      t.parent[static_cast<std::size_t>(cut)] = -1;
      t.orphan[static_cast<std::size_t>(cut)] = 1;
    }
    for (std::int32_t u : path) state[static_cast<std::size_t>(u)] = 2;
  }

  for (std::int32_t i = 0; i < n; ++i) {
    if (t.parent[static_cast<std::size_t>(i)] != -1) continue;
    if (t.orphan[static_cast<std::size_t>(i)])
      t.orphan_roots.push_back(i);
    else
      t.first_level.push_back(i);
  }

  t.offsets.reserve(static_cast<std::size_t>(n));
  for (std::int32_t i = 0; i < n; ++i) {
    auto off = t.comments[static_cast<std::size_t>(i)].created_utc - t.post_created;
    if (off < 0) {
      off = 0;
      ++t.clamped_offsets;
    }
    t.offsets.push_back(off);
  }
  // Clamping can locally disorder an otherwise sorted sequence only by
  // raising early values to 0, which keeps it nondecreasing.
  return t;
}

// Comment counts of the subtrees hanging off each first-level comment, the
// root included in its own count. Orphan-rooted subtrees are totalled
// separately and take no part in the first-level breakdown.
struct SubtreeSizes {
  std::vector<std::uint32_t> first_level;  // aligned with tree.first_level
  std::uint64_t orphan_comment_total = 0;
};

inline SubtreeSizes first_level_subtree_sizes(const ThreadTree& t) {
  const auto n = static_cast<std::int32_t>(t.comments.size());
  std::vector<std::uint32_t> size(static_cast<std::size_t>(n), 1);

  // Children in CSR form, then accumulate sizes bottom-up along a DFS
  // finish order. The parent array is acyclic after cycle cutting.
  std::vector<std::int32_t> child_count(static_cast<std::size_t>(n), 0);
  for (std::int32_t i = 0; i < n; ++i) {
    const auto p = t.parent[static_cast<std::size_t>(i)];
    if (p >= 0) ++child_count[static_cast<std::size_t>(p)];
  }
  std::vector<std::int32_t> start(static_cast<std::size_t>(n) + 1, 0);
  for (std::int32_t i = 0; i < n; ++i)
    start[static_cast<std::size_t>(i) + 1] = start[static_cast<std::size_t>(i)] +
                                             child_count[static_cast<std::size_t>(i)];
  std::vector<std::int32_t> child(static_cast<std::size_t>(start[static_cast<std::size_t>(n)]));
  {
    std::vector<std::int32_t> cursor(start.begin(), start.end() - 1);
    for (std::int32_t i = 0; i < n; ++i) {
      const auto p = t.parent[static_cast<std::size_t>(i)];
      if (p >= 0) child[static_cast<std::size_t>(cursor[static_cast<std::size_t>(p)]++)] = i;
    }
  }

  std::vector<std::int32_t> order;  // DFS preorder over all roots
  order.reserve(static_cast<std::size_t>(n));
  std::vector<std::int32_t> stack;
  auto run_root = [&](std::int32_t r) {
    stack.push_back(r);
    while (!stack.empty()) {
      const auto v = stack.back();
      stack.pop_back();
      order.push_back(v);
      for (auto c = start[static_cast<std::size_t>(v)];
           c < start[static_cast<std::size_t>(v) + 1]; ++c)
        stack.push_back(child[static_cast<std::size_t>(c)]);
    }
  };
  for (auto r : t.first_level) run_root(r);
  for (auto r : t.orphan_roots) run_root(r);

  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const auto p = t.parent[static_cast<std::size_t>(*it)];
    if (p >= 0) size[static_cast<std::size_t>(p)] += size[static_cast<std::size_t>(*it)];
  }

  SubtreeSizes out;
  out.first_level.reserve(t.first_level.size());
  for (auto r : t.first_level) out.first_level.push_back(size[static_cast<std::size_t>(r)]);
  for (auto r : t.orphan_roots) out.orphan_comment_total += size[static_cast<std::size_t>(r)];
  return out;
}

// Per-post activity measures. Age and latency are only defined when the
// post has at least one comment.
struct PostMetrics {
  std::uint32_t total_comments = 0;
  std::uint32_t effective_comments = 0;  // by identities other than the post author
  std::optional<std::int64_t> age_seconds;
  std::optional<std::int64_t> first_comment_latency;
  bool first_comment_same_author = false;
  std::uint32_t first_comment_char_len = 0;
};

inline PostMetrics post_metrics(const ThreadTree& t, const AuthorTable& authors) {
  PostMetrics m;
  m.total_comments = static_cast<std::uint32_t>(t.comments.size());
  for (const auto& c : t.comments)
    if (!authors.same_identity(c.author_id, t.post_author_id)) ++m.effective_comments;
  if (!t.comments.empty()) {
    m.age_seconds = t.offsets.back();
    m.first_comment_latency = t.offsets.front();
    const auto& first = t.comments.front();
    m.first_comment_same_author = authors.same_identity(first.author_id, t.post_author_id);
    m.first_comment_char_len = first.char_len;
  }
  return m;
}

// Offsets of all comments (orphans included) since post creation, sorted.
inline const std::vector<std::int64_t>& comment_time_series(const ThreadTree& t) {
  return t.offsets;
}

}  // namespace threadlens
