#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "threadlens/classifiers.hpp"
#include "threadlens/records.hpp"
#include "threadlens/table_io.hpp"

namespace threadlens {

// Deterministic RNG. mt19937_64 has a standard-pinned sequence; the value
// mappings are hand-rolled because the std distributions are
// implementation-defined and would break byte-identical regeneration.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  double u01() {  // [0, 1)
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  std::uint64_t uniform(std::uint64_t lo, std::uint64_t hi) {  // inclusive bounds
    const std::uint64_t span = hi - lo + 1;
    if (span == 0) return gen_();  // lo == 0, hi == UINT64_MAX
    const std::uint64_t limit = span * (UINT64_MAX / span);
    std::uint64_t x = gen_();
    while (x >= limit) x = gen_();
    return lo + x % span;
  }

  std::int64_t uniform_i64(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(uniform(0, static_cast<std::uint64_t>(hi - lo)));
  }

  double uniform_real(double lo, double hi) { return lo + (hi - lo) * u01(); }

  bool coin(double p) { return u01() < p; }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(uniform(0, i - 1));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 gen_;
};

// Inverse-CDF Pareto draw: x = xmin * u^(-1/(alpha-1)), u in (0, 1].
inline double pareto_quantile(double alpha, double xmin, double u) {
  return xmin * std::pow(u, -1.0 / (alpha - 1.0));
}

inline Result<std::vector<double>> sample_pareto(double alpha, double xmin, std::size_t n,
                                                 std::uint64_t seed) {
  if (!(alpha > 1.0) || !std::isfinite(alpha))
    return make_error(Errc::invalid_param, "pareto alpha must exceed 1");
  if (!(xmin > 0.0) || !std::isfinite(xmin))
    return make_error(Errc::invalid_param, "pareto xmin must be positive");
  if (n < 1) return make_error(Errc::invalid_param, "need at least one sample");
  Rng rng(seed);
  std::vector<double> out(n);
  for (auto& v : out) v = pareto_quantile(alpha, xmin, 1.0 - rng.u01());
  return out;
}

// Generator configuration, read from a plain key = value file. Labels are
// planted as exact integer counts derived from the fractions, so an analysis
// pass recovers them with zero tolerance.
struct CorpusSpec {
  std::uint64_t seed = 1;
  std::uint64_t n_posts = 1000;
  std::int64_t period_start = 1'199'145'600;  // default window: one calendar year
  std::int64_t period_end = 1'230'768'000;

  enum class Law { pareto, fixed };
  Law comment_law = Law::pareto;
  double pareto_alpha = 2.5;
  double pareto_xmin = 1.0;
  std::uint32_t fixed_k = 3;

  double fraction_zero_comment = 0.1;
  double fraction_mayfly = 0.5;
  double fraction_cyborg = 0.05;
  double fraction_fast_short = 0.0;
  double fraction_self_only = 0.0;
  double fraction_deleted_author = 0.0;
  double fraction_deleted_comment = 0.0;
  double fraction_removed_comment = 0.0;

  std::uint64_t n_popular = 0;
  std::uint32_t popular_comments_min = 501;
  std::uint32_t popular_comments_max = 1200;
  double fraction_early = 0.5;
  double fraction_steady = 0.3;
  double fraction_late = 0.2;
  double hog_distinct_fraction = 0.97;
  double limelight_low = 0.35;   // planted hog share of the comment count
  double limelight_high = 0.85;

  std::uint64_t author_pool = 200;
  std::uint64_t n_out_of_period_posts = 0;
  std::uint64_t n_ghost_comments = 0;
  bool emit_truth = true;

  ClassifierConfig thresholds;  // the boundaries the planted labels target
};

namespace synth_detail {

struct Targets {
  std::uint64_t n_zero = 0, n_popular = 0, n_ordinary = 0;
  std::uint64_t n_early = 0, n_steady = 0, n_late = 0;
  std::uint64_t n_cyborg = 0, n_fast_short = 0, n_self_only = 0, n_deleted = 0;
  std::uint64_t n_mayfly = 0, n_hog_distinct = 0;
};

inline std::uint64_t frac_count(double f, std::uint64_t n) {
  return static_cast<std::uint64_t>(std::llround(f * static_cast<double>(n)));
}

}  // namespace synth_detail

inline std::optional<Error> validate_spec(const CorpusSpec& s) {
  using synth_detail::frac_count;
  if (s.n_posts < 1) return make_error(Errc::inconsistent_spec, "n_posts must be at least 1");
  if (s.author_pool < 2 || s.author_pool > 100'000'000)
    return make_error(Errc::inconsistent_spec, "author_pool must lie in [2, 1e8]");
  if (!Period{s.period_start, s.period_end}.valid())
    return make_error(Errc::inconsistent_spec, "period_start must precede period_end");
  if (s.period_end - s.period_start < 63LL * 86'400)
    return make_error(Errc::inconsistent_spec, "period must span at least 63 days");
  if (s.comment_law == CorpusSpec::Law::pareto &&
      (!(s.pareto_alpha > 1.0) || !(s.pareto_xmin > 0.0)))
    return make_error(Errc::inconsistent_spec, "pareto law needs alpha > 1 and xmin > 0");
  if (s.comment_law == CorpusSpec::Law::fixed && s.fixed_k < 1)
    return make_error(Errc::inconsistent_spec, "fixed law needs k >= 1");
  for (double f : {s.fraction_zero_comment, s.fraction_mayfly, s.fraction_cyborg,
                   s.fraction_fast_short, s.fraction_self_only, s.fraction_deleted_author,
                   s.fraction_deleted_comment, s.fraction_removed_comment, s.fraction_early,
                   s.fraction_steady, s.fraction_late, s.hog_distinct_fraction})
    if (!(f >= 0.0) || !(f <= 1.0))
      return make_error(Errc::inconsistent_spec, "fractions must lie in [0,1]");
  if (!(s.limelight_low > 0.0) || !(s.limelight_high <= 1.0) || s.limelight_low > s.limelight_high)
    return make_error(Errc::inconsistent_spec,
                      "limelight score range must satisfy 0 < low <= high <= 1");
  if (auto err = s.thresholds.validate()) return err;
  if (std::min(s.thresholds.popular_min_comments, s.thresholds.limelight_min_comments) < 2)
    return make_error(Errc::inconsistent_spec, "popularity thresholds too low to plant around");
  if (s.n_popular > 0) {
    if (s.popular_comments_min <= s.thresholds.popular_min_comments ||
        s.popular_comments_min < s.thresholds.limelight_min_comments)
      return make_error(Errc::inconsistent_spec,
                        "popular_comments_min must clear the popularity thresholds");
    if (s.popular_comments_min < 8)
      return make_error(Errc::inconsistent_spec, "popular posts need at least 8 comments");
    if (s.popular_comments_max < s.popular_comments_min)
      return make_error(Errc::inconsistent_spec, "popular_comments_max below popular_comments_min");
    const double fsum = s.fraction_early + s.fraction_steady + s.fraction_late;
    if (std::abs(fsum - 1.0) > 1e-6)
      return make_error(Errc::inconsistent_spec, "evolution fractions must sum to 1");
    if (frac_count(s.fraction_early, s.n_popular) + frac_count(s.fraction_late, s.n_popular) >
        s.n_popular)
      return make_error(Errc::inconsistent_spec,
                        "evolution fractions round above the popular count");
  }
  const std::uint64_t n_zero = frac_count(s.fraction_zero_comment, s.n_posts);
  if (n_zero + s.n_popular > s.n_posts)
    return make_error(Errc::inconsistent_spec, "zero-comment plus popular posts exceed n_posts");
  const std::uint64_t n_ordinary = s.n_posts - n_zero - s.n_popular;
  if (frac_count(s.fraction_cyborg, s.n_posts) + frac_count(s.fraction_fast_short, s.n_posts) +
          frac_count(s.fraction_self_only, s.n_posts) +
          frac_count(s.fraction_deleted_author, s.n_posts) >
      n_ordinary)
    return make_error(Errc::inconsistent_spec,
                      "special ordinary-post roles exceed the ordinary count");
  if (frac_count(s.fraction_mayfly, s.n_posts) >
      n_ordinary + frac_count(s.fraction_early, s.n_popular))
    return make_error(Errc::inconsistent_spec,
                      "mayfly fraction exceeds posts whose age can fall under one day");
  return std::nullopt;
}

inline Result<synth_detail::Targets> derive_targets(const CorpusSpec& s) {
  if (auto err = validate_spec(s)) return *err;
  using synth_detail::frac_count;
  synth_detail::Targets t;
  t.n_zero = frac_count(s.fraction_zero_comment, s.n_posts);
  t.n_popular = s.n_popular;
  t.n_ordinary = s.n_posts - t.n_zero - t.n_popular;
  t.n_early = frac_count(s.fraction_early, s.n_popular);
  t.n_late = frac_count(s.fraction_late, s.n_popular);
  t.n_steady = t.n_popular - t.n_early - t.n_late;
  t.n_cyborg = frac_count(s.fraction_cyborg, s.n_posts);
  t.n_fast_short = frac_count(s.fraction_fast_short, s.n_posts);
  t.n_self_only = frac_count(s.fraction_self_only, s.n_posts);
  t.n_deleted = frac_count(s.fraction_deleted_author, s.n_posts);
  t.n_mayfly = frac_count(s.fraction_mayfly, s.n_posts);
  t.n_hog_distinct = frac_count(s.hog_distinct_fraction, s.n_popular);
  return t;
}

// key = value lines; '#' starts a comment; unknown keys are errors.
inline Result<CorpusSpec> parse_corpus_spec(std::string_view text) {
  CorpusSpec spec;
  std::size_t pos = 0, lineno = 0;
  auto fail = [&](const std::string& what) {
    return make_error(Errc::bad_config, "spec line " + std::to_string(lineno) + ": " + what);
  };
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    auto trim = [](std::string_view v) {
      while (!v.empty() && (v.front() == ' ' || v.front() == '\t' || v.front() == '\r'))
        v.remove_prefix(1);
      while (!v.empty() && (v.back() == ' ' || v.back() == '\t' || v.back() == '\r'))
        v.remove_suffix(1);
      return v;
    };
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) return fail("expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string val(trim(line.substr(eq + 1)));
    if (key.empty() || val.empty()) return fail("empty key or value");

    auto as_u64 = [&](std::uint64_t& out) -> bool {
      try {
        std::size_t used = 0;
        out = std::stoull(val, &used);
        return used == val.size();
      } catch (...) {
        return false;
      }
    };
    auto as_i64 = [&](std::int64_t& out) -> bool {
      try {
        std::size_t used = 0;
        out = std::stoll(val, &used);
        return used == val.size();
      } catch (...) {
        return false;
      }
    };
    auto as_f64 = [&](double& out) -> bool {
      try {
        std::size_t used = 0;
        out = std::stod(val, &used);
        return used == val.size();
      } catch (...) {
        return false;
      }
    };
    auto as_u32 = [&](std::uint32_t& out) -> bool {
      std::uint64_t v = 0;
      if (!as_u64(v) || v > UINT32_MAX) return false;
      out = static_cast<std::uint32_t>(v);
      return true;
    };

    bool ok = true;
    if (key == "seed") ok = as_u64(spec.seed);
    else if (key == "n_posts") ok = as_u64(spec.n_posts);
    else if (key == "period_start") ok = as_i64(spec.period_start);
    else if (key == "period_end") ok = as_i64(spec.period_end);
    else if (key == "comment_law") {
      if (val == "pareto") spec.comment_law = CorpusSpec::Law::pareto;
      else if (val == "fixed") spec.comment_law = CorpusSpec::Law::fixed;
      else ok = false;
    }
    else if (key == "pareto_alpha") ok = as_f64(spec.pareto_alpha);
    else if (key == "pareto_xmin") ok = as_f64(spec.pareto_xmin);
    else if (key == "fixed_k") ok = as_u32(spec.fixed_k);
    else if (key == "fraction_zero_comment") ok = as_f64(spec.fraction_zero_comment);
    else if (key == "fraction_mayfly") ok = as_f64(spec.fraction_mayfly);
    else if (key == "fraction_cyborg") ok = as_f64(spec.fraction_cyborg);
    else if (key == "fraction_fast_short") ok = as_f64(spec.fraction_fast_short);
    else if (key == "fraction_self_only") ok = as_f64(spec.fraction_self_only);
    else if (key == "fraction_deleted_author") ok = as_f64(spec.fraction_deleted_author);
    else if (key == "fraction_deleted_comment") ok = as_f64(spec.fraction_deleted_comment);
    else if (key == "fraction_removed_comment") ok = as_f64(spec.fraction_removed_comment);
    else if (key == "n_popular") ok = as_u64(spec.n_popular);
    else if (key == "popular_comments_min") ok = as_u32(spec.popular_comments_min);
    else if (key == "popular_comments_max") ok = as_u32(spec.popular_comments_max);
    else if (key == "fraction_early") ok = as_f64(spec.fraction_early);
    else if (key == "fraction_steady") ok = as_f64(spec.fraction_steady);
    else if (key == "fraction_late") ok = as_f64(spec.fraction_late);
    else if (key == "hog_distinct_fraction") ok = as_f64(spec.hog_distinct_fraction);
    else if (key == "limelight_low") ok = as_f64(spec.limelight_low);
    else if (key == "limelight_high") ok = as_f64(spec.limelight_high);
    else if (key == "author_pool") ok = as_u64(spec.author_pool);
    else if (key == "n_out_of_period_posts") ok = as_u64(spec.n_out_of_period_posts);
    else if (key == "n_ghost_comments") ok = as_u64(spec.n_ghost_comments);
    else if (key == "emit_truth") {
      std::uint64_t v = 0;
      ok = as_u64(v) && v <= 1;
      spec.emit_truth = v == 1;
    }
    else if (key == "mayfly_threshold_s") ok = as_i64(spec.thresholds.mayfly_threshold_s);
    else if (key == "cyborg_latency_s") ok = as_i64(spec.thresholds.cyborg_latency_s);
    else if (key == "cyborg_min_chars") ok = as_u32(spec.thresholds.cyborg_min_chars);
    else if (key == "popular_min_comments") ok = as_u32(spec.thresholds.popular_min_comments);
    else if (key == "limelight_min_comments") ok = as_u32(spec.thresholds.limelight_min_comments);
    else return fail("unknown key '" + key + "'");
    if (!ok) return fail("bad value for '" + key + "'");
  }
  return spec;
}

struct TruthSummary {
  std::uint64_t posts_kept = 0, comments = 0;
  std::uint64_t zero_comment = 0, one_comment = 0;
  std::uint64_t mayfly = 0, not_mayfly = 0, age_excluded = 0;
  std::uint64_t cyborg_like = 0, fast_same_author_short = 0, not_fast_same_author = 0;
  std::uint64_t successful = 0;
  std::uint64_t popular = 0, early = 0, steady = 0, late = 0;
  std::uint64_t limelight_posts = 0, hog_distinct = 0;
  std::uint64_t ratio_below = 0, ratio_at = 0, ratio_above = 0;
  std::uint64_t authors_active = 0;
  std::uint64_t deleted_author_posts = 0, deleted_author_comments = 0;
  std::uint64_t removed_comments = 0;
  std::uint64_t out_of_period_posts = 0, ghost_comments = 0;
};

struct GeneratedCorpus {
  std::filesystem::path posts_path, comments_path;
  std::filesystem::path truth_posts_path, truth_authors_path, truth_summary_path;
  TruthSummary summary;
};

namespace synth_detail {

inline std::string base36(std::uint64_t v, int width) {
  static constexpr char digits[] = "0123456789abcdefghijklmnopqrstuvwxyz";
  std::string out(static_cast<std::size_t>(width), '0');
  for (int i = width - 1; i >= 0 && v > 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v % 36];
    v /= 36;
  }
  return out;
}

class LineSink {
 public:
  Result<bool> open(const std::filesystem::path& p) {
    f_ = std::fopen(p.string().c_str(), "wb");
    if (!f_) return make_error(Errc::io_error, "cannot open for writing: " + p.string());
    std::setvbuf(f_, nullptr, _IOFBF, 1 << 20);
    return true;
  }
  void line(std::string_view s) {
    if (!f_) return;
    failed_ = failed_ || std::fwrite(s.data(), 1, s.size(), f_) != s.size();
    failed_ = failed_ || std::fputc('\n', f_) == EOF;
  }
  bool close() {
    if (!f_) return !failed_;
    const bool ok = std::fclose(f_) == 0 && !failed_;
    f_ = nullptr;
    return ok;
  }
  ~LineSink() {
    if (f_) std::fclose(f_);
  }

 private:
  std::FILE* f_ = nullptr;
  bool failed_ = false;
};

inline void json_kv_str(std::string& out, const char* key, std::string_view val, bool first) {
  if (!first) out.push_back(',');
  detail::append_json_string(out, key);
  out.push_back(':');
  detail::append_json_string(out, val);
}

inline void json_kv_int(std::string& out, const char* key, std::int64_t val, bool first) {
  if (!first) out.push_back(',');
  detail::append_json_string(out, key);
  out.push_back(':');
  out.append(format_int(val));
}

enum class Role { zero, ordinary, popular };

struct PostPlan {
  Role role = Role::ordinary;
  bool mayfly = false;
  bool cyborg = false;
  bool fast_short = false;
  bool self_only = false;
  bool deleted_author = false;
  bool hog_distinct = true;
  EvolutionKind evo = EvolutionKind::steady;
};

}  // namespace synth_detail

// Writes posts.ndjson / comments.ndjson plus machine-readable ground truth
// (per post, per author, and aggregate counts). The same seed reproduces the
// files byte for byte.
inline Result<GeneratedCorpus> generate_corpus(const CorpusSpec& spec,
                                               const std::filesystem::path& out_dir) {
  using namespace synth_detail;
  auto targets = derive_targets(spec);
  if (!targets.ok()) return targets.error();
  const Targets& t = *targets;

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) return make_error(Errc::io_error, "cannot create output dir: " + out_dir.string());

  Rng rng(spec.seed);

  // Post plans: roles laid out in segments, labels attached, then the order
  // shuffled so the emitted file interleaves everything.
  std::vector<PostPlan> plan(spec.n_posts);
  {
    std::size_t at = 0;
    std::vector<std::uint8_t> hog_flags(t.n_popular, 0);
    for (std::uint64_t i = 0; i < t.n_hog_distinct; ++i) hog_flags[i] = 1;
    rng.shuffle(hog_flags);
    for (std::uint64_t i = 0; i < t.n_popular; ++i, ++at) {
      plan[at].role = Role::popular;
      plan[at].evo = i < t.n_early                ? EvolutionKind::early_bloomer
                     : i < t.n_early + t.n_steady ? EvolutionKind::steady
                                                  : EvolutionKind::late_bloomer;
      plan[at].hog_distinct = hog_flags[i] != 0;
    }
    for (std::uint64_t i = 0; i < t.n_zero; ++i, ++at) plan[at].role = Role::zero;
    for (std::uint64_t i = 0; i < t.n_ordinary; ++i, ++at) {
      plan[at].role = Role::ordinary;
      if (i < t.n_cyborg) plan[at].cyborg = true;
      else if (i < t.n_cyborg + t.n_fast_short) plan[at].fast_short = true;
      else if (i < t.n_cyborg + t.n_fast_short + t.n_self_only) plan[at].self_only = true;
      else if (i < t.n_cyborg + t.n_fast_short + t.n_self_only + t.n_deleted)
        plan[at].deleted_author = true;
    }
    // Mayfly capacity: any ordinary post, plus early-bloomer popular posts
    // (only their activity can finish inside one day).
    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < plan.size(); ++i)
      if (plan[i].role == Role::ordinary ||
          (plan[i].role == Role::popular && plan[i].evo == EvolutionKind::early_bloomer))
        eligible.push_back(i);
    rng.shuffle(eligible);
    for (std::uint64_t i = 0; i < t.n_mayfly; ++i) plan[eligible[i]].mayfly = true;
    rng.shuffle(plan);
  }

  GeneratedCorpus out;
  out.posts_path = out_dir / "posts.ndjson";
  out.comments_path = out_dir / "comments.ndjson";
  out.truth_posts_path = out_dir / "truth_posts.ndjson";
  out.truth_authors_path = out_dir / "truth_authors.ndjson";
  out.truth_summary_path = out_dir / "truth_summary.json";

  LineSink posts_f, comments_f, truth_f;
  if (auto r = posts_f.open(out.posts_path); !r.ok()) return r.error();
  if (auto r = comments_f.open(out.comments_path); !r.ok()) return r.error();
  if (spec.emit_truth)
    if (auto r = truth_f.open(out.truth_posts_path); !r.ok()) return r.error();

  const std::int64_t span = spec.period_end - spec.period_start;
  const std::int64_t horizon = std::min<std::int64_t>(span - 2, 60LL * 86'400);
  const auto& th = spec.thresholds;
  const std::int64_t day = th.mayfly_threshold_s;
  const std::int64_t fast = th.cyborg_latency_s;
  const std::uint32_t ordinary_cap =
      std::min(th.popular_min_comments, th.limelight_min_comments) - 1;

  // Per-author ground-truth tallies, indexed by pool slot.
  const std::size_t pool = spec.author_pool;
  std::vector<std::uint64_t> gt_posts(pool, 0), gt_comments(pool, 0), gt_a(pool, 0), gt_b(pool, 0);
  std::vector<std::uint64_t> gt_edges;  // (commenter << 32) | poster, real pairs only

  static constexpr std::string_view words[] = {
      "the", "quick", "thread", "reply", "vote",  "meta", "story", "link",
      "time", "good",  "point", "agree", "never", "this", "again", "source"};
  auto free_body = [&] {
    std::string b;
    const int n = static_cast<int>(rng.uniform(2, 8));
    for (int i = 0; i < n; ++i) {
      if (i) b.push_back(' ');
      b.append(words[rng.uniform(0, std::size(words) - 1)]);
    }
    if (rng.coin(0.02)) b.append(" éü世界");
    return b;
  };
  auto padded_body = [&](std::uint32_t min_len, std::uint32_t max_len) {
    const auto target = static_cast<std::size_t>(rng.uniform(min_len, max_len));
    std::string b;
    while (b.size() < target) {
      if (!b.empty()) b.push_back(' ');
      b.append(words[rng.uniform(0, std::size(words) - 1)]);
    }
    b.resize(target);
    if (!b.empty() && b.back() == ' ') b.back() = 'x';
    return b;
  };
  auto pool_author_name = [](std::uint64_t idx) {
    std::string name = "u";
    const std::string d = format_uint(idx);
    name.append(6 - std::min<std::size_t>(6, d.size()), '0');
    name.append(d);
    return name;
  };

  TruthSummary& sum = out.summary;
  sum.posts_kept = spec.n_posts;
  sum.popular = t.n_popular;
  sum.early = t.n_early;
  sum.steady = t.n_steady;
  sum.late = t.n_late;
  sum.limelight_posts = t.n_popular;
  sum.hog_distinct = t.n_hog_distinct;
  sum.zero_comment = t.n_zero;
  sum.age_excluded = t.n_zero;
  sum.mayfly = t.n_mayfly;
  sum.not_mayfly = spec.n_posts - t.n_zero - t.n_mayfly;
  sum.cyborg_like = t.n_cyborg;
  sum.fast_same_author_short = t.n_fast_short;
  sum.not_fast_same_author = spec.n_posts - t.n_cyborg - t.n_fast_short;
  sum.out_of_period_posts = spec.n_out_of_period_posts;
  sum.ghost_comments = spec.n_ghost_comments;

  std::uint64_t comment_counter = 0;
  std::string line;
  line.reserve(512);

  auto emit_post_line = [&](std::string_view name, std::string_view short_id,
                            std::string_view author, std::int64_t created, std::uint64_t num,
                            std::int64_t score, std::string_view title) {
    line.clear();
    line.push_back('{');
    json_kv_str(line, "author", author, true);
    json_kv_int(line, "created_utc", created, false);
    json_kv_str(line, "id", short_id, false);
    json_kv_str(line, "name", name, false);
    json_kv_int(line, "num_comments", static_cast<std::int64_t>(num), false);
    json_kv_int(line, "score", score, false);
    json_kv_str(line, "title", title, false);
    line.push_back('}');
    posts_f.line(line);
  };
  auto emit_comment_line = [&](std::string_view name, std::string_view short_id,
                               std::string_view author, std::int64_t created,
                               std::string_view link_id, std::string_view parent_id,
                               std::string_view body) {
    line.clear();
    line.push_back('{');
    json_kv_str(line, "author", author, true);
    json_kv_str(line, "body", body, false);
    json_kv_int(line, "created_utc", created, false);
    json_kv_str(line, "id", short_id, false);
    json_kv_str(line, "link_id", link_id, false);
    json_kv_str(line, "name", name, false);
    json_kv_str(line, "parent_id", parent_id, false);
    json_kv_int(line, "score", 1, false);
    line.push_back('}');
    comments_f.line(line);
  };

  struct Cmt {
    std::int32_t parent = -1;  // -1 = the post
    std::int64_t author = -1;  // pool slot, -1 = deleted sentinel
    bool removed = false;
    std::string body;
  };
  std::vector<Cmt> cmts;
  std::vector<std::string> cmt_names;
  std::vector<std::int64_t> offsets;

  for (std::size_t pi = 0; pi < plan.size(); ++pi) {
    const PostPlan& pl = plan[pi];
    const std::string short_id = base36(pi + 1, 8);
    const std::string post_name = "t3_" + short_id;

    const std::int64_t post_author =
        pl.deleted_author ? -1 : static_cast<std::int64_t>(rng.uniform(0, pool - 1));

    std::uint64_t m = 0;
    if (pl.role == Role::popular) {
      m = rng.uniform(spec.popular_comments_min, spec.popular_comments_max);
    } else if (pl.role == Role::ordinary) {
      if (spec.comment_law == CorpusSpec::Law::pareto) {
        const double v = pareto_quantile(spec.pareto_alpha, spec.pareto_xmin, 1.0 - rng.u01());
        m = v >= static_cast<double>(ordinary_cap) ? ordinary_cap
                                                   : static_cast<std::uint64_t>(std::llround(v));
      } else {
        m = spec.fixed_k;
      }
      m = std::clamp<std::uint64_t>(m, 1, ordinary_cap);
      // A first comment inside the latency bound cannot also be the
      // day-or-older last comment, so these roles need a second one.
      if ((pl.cyborg || pl.fast_short) && !pl.mayfly && m < 2) m = 2;
    }

    // Offsets are sorted seconds since post creation. Comment positions and
    // emission order both follow this ordering, so generated ids ascend with
    // time and tie-breaks stay consistent with the canonical comment order.
    offsets.clear();
    std::int64_t t75 = -1;
    if (pl.role == Role::ordinary) {
      if (m == 1) {
        std::int64_t o;
        if (pl.mayfly)
          o = (pl.cyborg || pl.fast_short) ? rng.uniform_i64(1, fast)
                                           : rng.uniform_i64(fast + 1, day - 1);
        else
          o = rng.uniform_i64(day, horizon);
        offsets.push_back(o);
      } else {
        const std::int64_t f0 = (pl.cyborg || pl.fast_short)
                                    ? rng.uniform_i64(1, fast)
                                    : rng.uniform_i64(fast + 1, 3600);
        const std::int64_t last =
            pl.mayfly ? rng.uniform_i64(f0, day - 1) : rng.uniform_i64(day, horizon);
        offsets.push_back(f0);
        for (std::uint64_t j = 0; j + 2 < m; ++j) offsets.push_back(rng.uniform_i64(f0, last));
        offsets.push_back(last);
        std::sort(offsets.begin(), offsets.end());
      }
    } else if (pl.role == Role::popular) {
      const std::int64_t f0 = rng.uniform_i64(fast + 1, 3000);
      switch (pl.evo) {
        case EvolutionKind::early_bloomer:
          t75 = rng.uniform_i64(3600, th.early_cutoff_s - 400);
          break;
        case EvolutionKind::steady:
          t75 = rng.uniform_i64(2 * 86'400, th.late_cutoff_s);
          break;
        case EvolutionKind::late_bloomer:
          t75 = rng.uniform_i64(th.late_cutoff_s + 86'400, horizon - 2);
          break;
      }
      std::int64_t age;
      if (pl.evo == EvolutionKind::early_bloomer && pl.mayfly)
        age = rng.uniform_i64(t75 + 2, day - 1);
      else if (pl.evo == EvolutionKind::early_bloomer)
        age = rng.uniform_i64(day, horizon);
      else
        age = rng.uniform_i64(t75 + 2, horizon);

      // The ceil(bloomer_fraction * m)-th comment lands exactly at t75;
      // everything before stays below it, everything after stays above.
      const auto k75 = static_cast<std::uint64_t>(
          std::ceil(th.bloomer_fraction * static_cast<double>(m) - 1e-9));
      offsets.reserve(m);
      offsets.push_back(f0);
      for (std::uint64_t j = 0; j + 2 < k75; ++j) offsets.push_back(rng.uniform_i64(f0, t75 - 1));
      offsets.push_back(t75);
      for (std::uint64_t j = k75; j + 1 < m; ++j)
        offsets.push_back(rng.uniform_i64(t75 + 1, age - 1));
      offsets.push_back(age);
      std::sort(offsets.begin(), offsets.end());
    }

    const std::int64_t age = offsets.empty() ? 0 : offsets.back();
    const std::int64_t created = spec.period_start + rng.uniform_i64(0, span - age - 2);

    // Tree shape, authors, bodies.
    cmts.assign(m, {});
    double planted_limelight = -1.0;
    std::int64_t hog_author = -2;
    if (pl.role == Role::popular) {
      const double q = rng.uniform_real(spec.limelight_low, spec.limelight_high);
      auto h = static_cast<std::uint64_t>(std::llround(q * static_cast<double>(m)));
      h = std::clamp<std::uint64_t>(h, 2, m - 1);
      // First-level branch sizes: the hog branch h, the rest at most h-1, so
      // the maximum is unique. Branch roots occupy the first k positions.
      std::vector<std::uint64_t> sizes{h};
      for (std::uint64_t rem = m - h; rem > 0;) {
        const std::uint64_t s = std::min(h - 1, rem);
        sizes.push_back(s);
        rem -= s;
      }
      const std::size_t k = sizes.size();
      std::size_t p = k;
      for (std::size_t b = 0; b < k; ++b)
        for (std::uint64_t c = 1; c < sizes[b]; ++c)
          cmts[p++].parent = static_cast<std::int32_t>(b);
      if (pl.hog_distinct) {
        std::uint64_t a = rng.uniform(0, pool - 1);
        while (static_cast<std::int64_t>(a) == post_author) a = rng.uniform(0, pool - 1);
        cmts[0].author = static_cast<std::int64_t>(a);
      } else {
        cmts[0].author = post_author;  // popular post authors are always real
      }
      hog_author = cmts[0].author;
      for (std::size_t j = 1; j < m; ++j)
        cmts[j].author = static_cast<std::int64_t>(rng.uniform(0, pool - 1));
      for (std::size_t j = 0; j < m; ++j) cmts[j].body = free_body();
      planted_limelight = static_cast<double>(h) / static_cast<double>(m);
    } else if (pl.role == Role::ordinary) {
      for (std::size_t j = 0; j < m; ++j) {
        if (j > 0 && rng.coin(0.5))
          cmts[j].parent = static_cast<std::int32_t>(rng.uniform(0, j - 1));
        const bool forced_first = j == 0 && (pl.cyborg || pl.fast_short);
        if (pl.self_only || forced_first) {
          cmts[j].author = post_author;
        } else {
          cmts[j].author =
              spec.fraction_deleted_comment > 0.0 && rng.coin(spec.fraction_deleted_comment)
                  ? -1
                  : static_cast<std::int64_t>(rng.uniform(0, pool - 1));
        }
        if (j == 0 && pl.cyborg)
          cmts[j].body = padded_body(th.cyborg_min_chars + 1, th.cyborg_min_chars + 80);
        else if (j == 0 && pl.fast_short)
          cmts[j].body = padded_body(5, th.cyborg_min_chars);
        else
          cmts[j].body = free_body();
        if (!forced_first && spec.fraction_removed_comment > 0.0 &&
            rng.coin(spec.fraction_removed_comment)) {
          cmts[j].removed = true;
          cmts[j].body = std::string(kRemovedBody);
          sum.removed_comments += 1;
        }
      }
    }

    std::uint64_t effective = 0;
    for (std::size_t j = 0; j < m; ++j)
      if (cmts[j].author < 0 || post_author < 0 || cmts[j].author != post_author) ++effective;
    const bool successful = effective >= 1;
    const std::int64_t score = successful ? static_cast<std::int64_t>(rng.uniform(2, 300)) : 1;
    if (successful) sum.successful += 1;
    if (m == 1) sum.one_comment += 1;
    sum.comments += m;

    const std::string post_author_name =
        post_author < 0 ? std::string(kDeletedAuthor)
                        : pool_author_name(static_cast<std::uint64_t>(post_author));
    emit_post_line(post_name, short_id, post_author_name, created, m, score, "post " + short_id);

    if (post_author >= 0) gt_posts[static_cast<std::size_t>(post_author)] += 1;
    else sum.deleted_author_posts += 1;

    cmt_names.assign(m, {});
    for (std::size_t j = 0; j < m; ++j) {
      ++comment_counter;
      const std::string cshort = base36(comment_counter, 8);
      cmt_names[j] = "t1_" + cshort;
      const std::string_view parent_ref =
          cmts[j].parent < 0
              ? std::string_view(post_name)
              : std::string_view(cmt_names[static_cast<std::size_t>(cmts[j].parent)]);
      const std::string author_name =
          cmts[j].author < 0 ? std::string(kDeletedAuthor)
                             : pool_author_name(static_cast<std::uint64_t>(cmts[j].author));
      emit_comment_line(cmt_names[j], cshort, author_name, created + offsets[j], post_name,
                        parent_ref, cmts[j].body);

      if (cmts[j].author < 0) {
        sum.deleted_author_comments += 1;
      } else {
        const auto u = static_cast<std::size_t>(cmts[j].author);
        gt_comments[u] += 1;
        if (post_author >= 0 && cmts[j].author != post_author) {
          gt_b[u] += 1;
          gt_a[static_cast<std::size_t>(post_author)] += 1;
          if (spec.emit_truth)
            gt_edges.push_back((static_cast<std::uint64_t>(u) << 32) |
                               static_cast<std::uint64_t>(post_author));
        }
      }
    }

    if (spec.emit_truth) {
      nlohmann::json row;
      row["post"] = post_name;
      row["role"] =
          pl.role == Role::zero ? "zero" : pl.role == Role::popular ? "popular" : "ordinary";
      row["comments"] = m;
      row["effective"] = effective;
      row["successful"] = successful;
      if (m == 0) {
        row["age"] = nullptr;
        row["mayfly"] = nullptr;
      } else {
        row["age"] = age;
        row["mayfly"] = pl.mayfly;
      }
      row["cyborg"] = cyborg_class_name(pl.cyborg       ? CyborgClass::cyborg_like
                                        : pl.fast_short ? CyborgClass::fast_same_author_short
                                                        : CyborgClass::not_fast_same_author);
      if (pl.role == Role::popular) {
        row["evolution"] = evolution_kind_name(pl.evo);
        row["t75"] = t75;
        row["limelight"] = planted_limelight;
        row["hog_distinct"] = pl.hog_distinct;
        row["hog_author"] = pool_author_name(static_cast<std::uint64_t>(hog_author));
      } else {
        row["evolution"] = nullptr;
        row["t75"] = nullptr;
        row["limelight"] = nullptr;
        row["hog_distinct"] = nullptr;
        row["hog_author"] = nullptr;
      }
      truth_f.line(row.dump());
    }
  }

  // Posts outside the window, each with one in-window comment that a
  // period-filtered ingest must drop.
  for (std::uint64_t j = 0; j < spec.n_out_of_period_posts; ++j) {
    const std::string short_id = base36(spec.n_posts + 1 + j, 8);
    const std::string post_name = "t3_" + short_id;
    const std::int64_t created = j % 2 == 0
                                     ? spec.period_start - rng.uniform_i64(3600, 30 * 86'400)
                                     : spec.period_end + rng.uniform_i64(0, 30 * 86'400);
    const auto a = rng.uniform(0, pool - 1);
    emit_post_line(post_name, short_id, pool_author_name(a), created, 1, 1, "post " + short_id);
    ++comment_counter;
    const std::string cshort = base36(comment_counter, 8);
    emit_comment_line("t1_" + cshort, cshort, pool_author_name(rng.uniform(0, pool - 1)),
                      spec.period_start + rng.uniform_i64(0, span - 2), post_name, post_name,
                      free_body());
  }

  // Comments whose post never appears in the dump at all.
  for (std::uint64_t j = 0; j < spec.n_ghost_comments; ++j) {
    const std::string ghost_post = "t3_" + base36(1'000'000'000ULL + j, 8);
    ++comment_counter;
    const std::string cshort = base36(comment_counter, 8);
    emit_comment_line("t1_" + cshort, cshort, pool_author_name(rng.uniform(0, pool - 1)),
                      spec.period_start + rng.uniform_i64(0, span - 2), ghost_post, ghost_post,
                      free_body());
  }

  if (!posts_f.close())
    return make_error(Errc::io_error, "short write: " + out.posts_path.string());
  if (!comments_f.close())
    return make_error(Errc::io_error, "short write: " + out.comments_path.string());

  // Author-level ground truth: degrees from the deduplicated edge list,
  // activity and ratio tallies straight from the counters.
  std::vector<std::uint32_t> in_deg(pool, 0), out_deg(pool, 0);
  if (spec.emit_truth) {
    std::sort(gt_edges.begin(), gt_edges.end());
    gt_edges.erase(std::unique(gt_edges.begin(), gt_edges.end()), gt_edges.end());
    for (const std::uint64_t e : gt_edges) {
      out_deg[static_cast<std::size_t>(e >> 32)] += 1;
      in_deg[static_cast<std::size_t>(e & 0xffffffffULL)] += 1;
    }
  }
  for (std::size_t i = 0; i < pool; ++i) {
    if (gt_posts[i] == 0 && gt_comments[i] == 0) continue;
    sum.authors_active += 1;
    if (gt_posts[i] > 0) {
      if (gt_a[i] < gt_posts[i]) sum.ratio_below += 1;
      else if (gt_a[i] == gt_posts[i]) sum.ratio_at += 1;
      else sum.ratio_above += 1;
    }
  }

  if (spec.emit_truth) {
    if (!truth_f.close())
      return make_error(Errc::io_error, "short write: " + out.truth_posts_path.string());

    LineSink authors_f;
    if (auto r = authors_f.open(out.truth_authors_path); !r.ok()) return r.error();
    for (std::size_t i = 0; i < pool; ++i) {
      if (gt_posts[i] == 0 && gt_comments[i] == 0) continue;
      nlohmann::json row;
      row["author"] = pool_author_name(i);
      row["posts"] = gt_posts[i];
      row["comments"] = gt_comments[i];
      row["a_received"] = gt_a[i];
      row["b_made"] = gt_b[i];
      row["in_degree"] = in_deg[i];
      row["out_degree"] = out_deg[i];
      row["category"] = gt_posts[i] > 0 && gt_comments[i] > 0 ? "both"
                        : gt_posts[i] > 0                     ? "producer"
                                                              : "consumer";
      if (gt_a[i] + gt_b[i] > 0)
        row["interaction"] = static_cast<double>(gt_a[i]) / static_cast<double>(gt_a[i] + gt_b[i]);
      else
        row["interaction"] = nullptr;
      authors_f.line(row.dump());
    }
    if (!authors_f.close())
      return make_error(Errc::io_error, "short write: " + out.truth_authors_path.string());

    nlohmann::json s;
    s["posts_kept"] = sum.posts_kept;
    s["comments"] = sum.comments;
    s["zero_comment"] = sum.zero_comment;
    s["one_comment"] = sum.one_comment;
    s["mayfly"] = sum.mayfly;
    s["not_mayfly"] = sum.not_mayfly;
    s["age_excluded"] = sum.age_excluded;
    s["cyborg_like"] = sum.cyborg_like;
    s["fast_same_author_short"] = sum.fast_same_author_short;
    s["not_fast_same_author"] = sum.not_fast_same_author;
    s["successful"] = sum.successful;
    s["popular"] = sum.popular;
    s["early"] = sum.early;
    s["steady"] = sum.steady;
    s["late"] = sum.late;
    s["limelight_posts"] = sum.limelight_posts;
    s["hog_distinct"] = sum.hog_distinct;
    s["ratio_below"] = sum.ratio_below;
    s["ratio_at"] = sum.ratio_at;
    s["ratio_above"] = sum.ratio_above;
    s["authors_active"] = sum.authors_active;
    s["deleted_author_posts"] = sum.deleted_author_posts;
    s["deleted_author_comments"] = sum.deleted_author_comments;
    s["removed_comments"] = sum.removed_comments;
    s["out_of_period_posts"] = sum.out_of_period_posts;
    s["ghost_comments"] = sum.ghost_comments;
    if (auto r = write_text_file(out.truth_summary_path.string(), s.dump(2) + "\n"); !r.ok())
      return r.error();
  }

  return out;
}

}  // namespace threadlens
