#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "threadlens/corpus.hpp"
#include "threadlens/records.hpp"
#include "threadlens/thread_tree.hpp"

namespace threadlens {

struct LimelightResult {
  std::string post_id;
  double score = 0.0;  // in (0, 1]
  std::string hog_comment_id;
  std::string hog_author;
  bool hog_author_is_post_author = false;
  std::uint32_t n_first_level = 0;
};

// Largest first-level subtree's share of all first-level subtree comments.
// Orphan-rooted subtrees count in neither numerator nor denominator. Ties
// for the largest subtree go to the earliest first-level comment (the
// first-level list is already in canonical time/id order).
inline Result<LimelightResult> limelight_score(const ThreadTree& tree,
                                               const AuthorTable& authors) {
  if (tree.first_level.empty())
    return make_error(Errc::no_first_level, "post has no resolvable first-level comment");
  const SubtreeSizes sizes = first_level_subtree_sizes(tree);
  std::uint64_t total = 0;
  std::size_t best = 0;
  for (std::size_t j = 0; j < sizes.first_level.size(); ++j) {
    total += sizes.first_level[j];
    if (sizes.first_level[j] > sizes.first_level[best]) best = j;
  }
  const auto& hog = tree.comments[static_cast<std::size_t>(tree.first_level[best])];
  LimelightResult out;
  out.post_id = tree.post_id;
  out.score = static_cast<double>(sizes.first_level[best]) / static_cast<double>(total);
  out.hog_comment_id = hog.id;
  out.hog_author = authors.name(hog.author_id);
  out.hog_author_is_post_author = authors.same_identity(hog.author_id, tree.post_author_id);
  out.n_first_level = static_cast<std::uint32_t>(tree.first_level.size());
  return out;
}

// Fraction of posts whose hog comment is by someone other than the post
// author. The deleted sentinel always counts as distinct.
inline Result<double> hog_author_distinct_fraction(const std::vector<LimelightResult>& results) {
  if (results.empty()) return make_error(Errc::empty_input, "no limelight results");
  std::uint64_t distinct = 0;
  for (const auto& r : results)
    if (!r.hog_author_is_post_author) ++distinct;
  return static_cast<double>(distinct) / static_cast<double>(results.size());
}

}  // namespace threadlens
