#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "threadlens/records.hpp"
#include "threadlens/thread_tree.hpp"

namespace threadlens {

// Thresholds for the behavioral classifiers. Comparison directions are part
// of the contract: mayfly and min-chars are strict, the cyborg latency bound
// is inclusive, popularity is strict.
struct ClassifierConfig {
  std::int64_t mayfly_threshold_s = 86'400;
  std::int64_t cyborg_latency_s = 6;        // first comment within this many seconds
  std::uint32_t cyborg_min_chars = 100;     // strictly more characters than this
  double bloomer_fraction = 0.75;
  std::int64_t early_cutoff_s = 86'400;
  std::int64_t late_cutoff_s = 2'592'000;
  std::uint32_t popular_min_comments = 500;    // strictly more comments than this
  std::uint32_t limelight_min_comments = 500;  // at least this many comments

  enum class SuccessMode { comments_only, comments_or_score };
  SuccessMode success_mode = SuccessMode::comments_or_score;

  std::optional<Error> validate() const {
    if (mayfly_threshold_s <= 0 || cyborg_latency_s <= 0 || early_cutoff_s <= 0 ||
        late_cutoff_s <= 0)
      return make_error(Errc::bad_config, "thresholds must be positive");
    if (early_cutoff_s >= late_cutoff_s)
      return make_error(Errc::bad_config, "early cutoff must be below late cutoff");
    if (!(bloomer_fraction > 0.0) || !(bloomer_fraction < 1.0))
      return make_error(Errc::bad_config, "bloomer fraction must lie in (0,1)");
    return std::nullopt;
  }
};

// Age strictly under the threshold. Posts without an age (zero comments)
// are not classified; callers count them as excluded.
inline std::optional<bool> classify_mayfly(const PostMetrics& m, const ClassifierConfig& cfg) {
  if (!m.age_seconds) return std::nullopt;
  return *m.age_seconds < cfg.mayfly_threshold_s;
}

enum class CyborgClass { cyborg_like, fast_same_author_short, not_fast_same_author };

inline const char* cyborg_class_name(CyborgClass c) {
  switch (c) {
    case CyborgClass::cyborg_like: return "cyborg_like";
    case CyborgClass::fast_same_author_short: return "fast_same_author_short";
    case CyborgClass::not_fast_same_author: return "not_fast_same_author";
  }
  return "unknown";
}

// First comment within the latency bound AND by the post's own author splits
// further on body length; everything else (including zero-comment posts) is
// the complement class.
inline CyborgClass classify_cyborg(const PostMetrics& m, const ClassifierConfig& cfg) {
  if (!m.first_comment_latency) return CyborgClass::not_fast_same_author;
  const bool fast = *m.first_comment_latency <= cfg.cyborg_latency_s;
  if (!fast || !m.first_comment_same_author) return CyborgClass::not_fast_same_author;
  return m.first_comment_char_len > cfg.cyborg_min_chars ? CyborgClass::cyborg_like
                                                         : CyborgClass::fast_same_author_short;
}

// Any reaction from someone other than the author. Score 1 is the
// submitter's own default vote, so only a score != 1 counts as a vote.
inline bool is_successful(const PostMetrics& m, std::optional<std::int32_t> post_score,
                          const ClassifierConfig& cfg) {
  if (m.effective_comments >= 1) return true;
  if (cfg.success_mode == ClassifierConfig::SuccessMode::comments_or_score && post_score &&
      *post_score != 1)
    return true;
  return false;
}

enum class EvolutionKind { early_bloomer, steady, late_bloomer };

inline const char* evolution_kind_name(EvolutionKind k) {
  switch (k) {
    case EvolutionKind::early_bloomer: return "early_bloomer";
    case EvolutionKind::steady: return "steady";
    case EvolutionKind::late_bloomer: return "late_bloomer";
  }
  return "unknown";
}

struct EvolutionClass {
  EvolutionKind kind = EvolutionKind::steady;
  std::int64_t t75_seconds = 0;
};

// Smallest offset at which the cumulative count first reaches
// ceil(fraction * total). offsets must be sorted nondecreasing and nonempty.
inline std::int64_t quantile_offset(std::span<const std::int64_t> offsets, double fraction) {
  const double scaled = fraction * static_cast<double>(offsets.size());
  auto target = static_cast<std::size_t>(std::ceil(scaled - 1e-9));
  if (target < 1) target = 1;
  if (target > offsets.size()) target = offsets.size();
  return offsets[target - 1];
}

// Only posts strictly above the popularity threshold are classified; callers
// count the excluded remainder.
inline std::optional<EvolutionClass> classify_evolution(std::span<const std::int64_t> offsets,
                                                        const ClassifierConfig& cfg) {
  if (offsets.size() <= cfg.popular_min_comments) return std::nullopt;
  EvolutionClass out;
  out.t75_seconds = quantile_offset(offsets, cfg.bloomer_fraction);
  if (out.t75_seconds <= cfg.early_cutoff_s)
    out.kind = EvolutionKind::early_bloomer;
  else if (out.t75_seconds > cfg.late_cutoff_s)
    out.kind = EvolutionKind::late_bloomer;
  else
    out.kind = EvolutionKind::steady;
  return out;
}

}  // namespace threadlens
