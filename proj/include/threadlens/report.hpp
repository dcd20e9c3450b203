#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "threadlens/authors.hpp"
#include "threadlens/classifiers.hpp"
#include "threadlens/corpus.hpp"
#include "threadlens/json_line.hpp"
#include "threadlens/limelight.hpp"
#include "threadlens/parallel.hpp"
#include "threadlens/stats.hpp"
#include "threadlens/table_io.hpp"
#include "threadlens/thread_tree.hpp"

namespace threadlens {

inline const std::vector<std::string>& all_section_names() {
  static const std::vector<std::string> names = {
      "ingest", "distributions", "lifetimes", "cyborg", "evolution", "limelight", "authors"};
  return names;
}

struct AnalysisConfig {
  std::vector<std::string> post_paths;
  std::vector<std::string> comment_paths;
  Period period{std::numeric_limits<std::int64_t>::min(),
                std::numeric_limits<std::int64_t>::max()};
  ClassifierConfig classifier;
  IdPolicy ids;
  std::string out_dir;
  TableFormat format = TableFormat::csv;
  int threads = 1;
  std::vector<std::string> sections;  // empty = all
  std::string exclude_author;         // drop this author's row from author tables
  bool emit_post_metrics = false;
  bool emit_author_metrics = false;
  bool emit_limelight_posts = false;
  double log_bin_ratio = 1.3;
};

struct TableInfo {
  std::string file;
  std::uint64_t rows = 0;
};

struct SectionResult {
  std::string name;
  bool ok = true;
  std::string message;
  std::vector<TableInfo> tables;
};

struct AnalysisReport {
  IngestStats ingest;
  std::vector<SectionResult> sections;
  std::string manifest_path;
  bool all_ok = true;
};

namespace report_detail {

// Everything the section emitters need about one kept post, in a fixed-size
// slot written by exactly one worker.
struct PerPost {
  std::uint32_t total = 0;
  std::uint32_t effective = 0;
  std::int64_t age = -1;      // -1 = no comments
  std::int64_t latency = -1;  // -1 = no comments
  std::int64_t t75 = -1;      // -1 = not popular
  double limelight = -1.0;    // -1 = below threshold, -2 = no first level
  std::uint32_t n_first_level = 0;
  std::uint32_t orphans = 0;
  std::uint32_t clamped = 0;
  std::uint32_t hog_author = 0;
  std::uint8_t cyborg = 2;  // CyborgClass enumerator index
  std::uint8_t evo = 3;     // EvolutionKind enumerator index, 3 = not popular
  bool successful = false;
  bool hog_is_post_author = false;
  bool kept = false;
};

inline Cell null_cell() { return std::monostate{}; }

inline Cell opt_i64(std::int64_t v) {
  if (v < 0) return std::monostate{};
  return v;
}

// Histogram rendered as one row per bin: lo, hi, count, density.
inline Result<Table> histogram_table(const std::vector<double>& values, BinSpec spec) {
  Table t;
  t.columns = {"bin_lo", "bin_hi", "count", "density"};
  if (values.empty()) return t;
  auto h = make_histogram(values, spec);
  if (!h.ok()) return h.error();
  const double n = static_cast<double>(h->total_n);
  for (std::size_t i = 0; i < h->counts.size(); ++i) {
    const double lo = h->bin_edges[i], hi = h->bin_edges[i + 1];
    t.add_row({lo, hi, h->counts[i], static_cast<double>(h->counts[i]) / (n * (hi - lo))});
  }
  return t;
}

inline Table ccdf_table(const CcdfCurve& c) {
  Table t;
  t.columns = {"value", "ccdf"};
  for (const auto& p : c.points) t.add_row({p.value, p.fraction});
  return t;
}

inline void tail_fit_row(Table& t, std::string_view curve, const Result<TailFit>& fit) {
  if (fit.ok()) {
    const TailFit& f = *fit;
    if (f.family == TailFamily::powerlaw) {
      t.add_row({std::string(curve), std::string(tail_family_name(f.family)), std::string("ok"),
                 f.exponent_or_mu, std::monostate{}, f.xmin, f.std_error, f.ks_stat,
                 static_cast<std::uint64_t>(f.n_tail)});
    } else {
      t.add_row({std::string(curve), std::string(tail_family_name(f.family)), std::string("ok"),
                 f.exponent_or_mu, f.sigma, std::monostate{}, f.std_error, std::monostate{},
                 static_cast<std::uint64_t>(f.n_tail)});
    }
  } else {
    t.add_row({std::string(curve), std::monostate{}, std::string(errc_name(fit.error().code)),
               std::monostate{}, std::monostate{}, std::monostate{}, std::monostate{},
               std::monostate{}, std::uint64_t{0}});
  }
}

}  // namespace report_detail

// Two ingest passes, one parallel per-post analysis pass, then per-section
// table emission. All reductions that feed output run single-threaded over
// index-ordered data, so results are identical for any thread count.
inline Result<AnalysisReport> run_analysis(const AnalysisConfig& cfg) {
  using report_detail::PerPost;

  if (cfg.post_paths.empty() || cfg.comment_paths.empty())
    return make_error(Errc::bad_config, "need at least one post file and one comment file");
  if (cfg.out_dir.empty()) return make_error(Errc::bad_config, "output directory not set");
  if (cfg.threads < 1) return make_error(Errc::bad_config, "threads must be at least 1");
  if (!(cfg.log_bin_ratio > 1.0))
    return make_error(Errc::bad_config, "log bin ratio must exceed 1");
  if (!cfg.period.valid()) return make_error(Errc::bad_config, "period start must precede end");
  if (auto err = cfg.classifier.validate()) return *err;
  std::vector<std::string> sections = cfg.sections.empty() ? all_section_names() : cfg.sections;
  for (const auto& s : sections)
    if (std::find(all_section_names().begin(), all_section_names().end(), s) ==
        all_section_names().end())
      return make_error(Errc::bad_config, "unknown section: " + s);
  auto wants = [&](std::string_view name) {
    return std::find(sections.begin(), sections.end(), name) != sections.end();
  };

  const std::filesystem::path dir(cfg.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) return make_error(Errc::io_error, "cannot create output dir: " + cfg.out_dir);

  CorpusStore store(cfg.period, cfg.ids);

  struct ParsedChunk {
    std::vector<PostRecord> posts;
    std::vector<CommentRecord> comments;
    std::uint64_t lines = 0;
    std::uint64_t malformed = 0;
  };

  {
    auto map_posts = [&](const LineChunk& chunk) {
      ParsedChunk out;
      split_lines(chunk.data, [&](std::string_view line) {
        if (line.empty()) return;
        ++out.lines;
        auto rec = parse_post_line(line, cfg.ids);
        if (rec.ok()) out.posts.push_back(std::move(*rec));
        else ++out.malformed;
      });
      return out;
    };
    auto consume_posts = [&](ParsedChunk&& c) {
      store.stats().total_lines += c.lines;
      store.stats().post_lines += c.lines;
      store.stats().malformed_post_lines += c.malformed;
      for (const auto& rec : c.posts) store.add_post(rec);
    };
    auto r = process_line_chunks<ParsedChunk>(cfg.post_paths, cfg.threads, map_posts,
                                              consume_posts);
    if (!r.ok()) return r.error();
  }
  {
    auto map_comments = [&](const LineChunk& chunk) {
      ParsedChunk out;
      split_lines(chunk.data, [&](std::string_view line) {
        if (line.empty()) return;
        ++out.lines;
        auto rec = parse_comment_line(line, cfg.ids);
        if (rec.ok()) out.comments.push_back(std::move(*rec));
        else ++out.malformed;
      });
      return out;
    };
    auto consume_comments = [&](ParsedChunk&& c) {
      store.stats().total_lines += c.lines;
      store.stats().comment_lines += c.lines;
      store.stats().malformed_comment_lines += c.malformed;
      for (const auto& rec : c.comments) store.add_comment(rec);
    };
    auto r = process_line_chunks<ParsedChunk>(cfg.comment_paths, cfg.threads, map_comments,
                                              consume_comments);
    if (!r.ok()) return r.error();
  }

  // Interning happens only before the parallel phase; workers read the
  // author table concurrently but never mutate it.
  std::optional<std::uint32_t> exclude_id;
  if (!cfg.exclude_author.empty()) exclude_id = store.authors().intern(cfg.exclude_author);

  const auto& posts = store.posts();
  const AuthorTable& authors = store.authors();
  const std::size_t n = posts.size();
  const ClassifierConfig& cl = cfg.classifier;

  std::vector<std::uint64_t> cofs(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) cofs[i + 1] = cofs[i] + store.group(i).size();
  std::vector<std::uint32_t> comment_authors(cofs[n]);
  std::vector<PerPost> pp(n);

  parallel_for_blocks(n, cfg.threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const PostLite& post = posts[i];
      if (!post.kept) continue;
      PerPost& p = pp[i];
      p.kept = true;
      ThreadTree tree = build_thread(post, std::move(store.group(i)), store.ids());
      const PostMetrics m = post_metrics(tree, authors);
      p.total = m.total_comments;
      p.effective = m.effective_comments;
      if (m.age_seconds) p.age = *m.age_seconds;
      if (m.first_comment_latency) p.latency = *m.first_comment_latency;
      p.cyborg = static_cast<std::uint8_t>(classify_cyborg(m, cl));
      p.successful = is_successful(
          m, post.has_score ? std::optional<std::int32_t>(post.score_value) : std::nullopt, cl);
      if (auto evo = classify_evolution(comment_time_series(tree), cl)) {
        p.evo = static_cast<std::uint8_t>(evo->kind);
        p.t75 = evo->t75_seconds;
      }
      if (m.total_comments >= cl.limelight_min_comments) {
        auto lime = limelight_score(tree, authors);
        if (lime.ok()) {
          p.limelight = lime->score;
          p.n_first_level = lime->n_first_level;
          p.hog_is_post_author = lime->hog_author_is_post_author;
          for (auto root : tree.first_level) {
            const auto& c = tree.comments[static_cast<std::size_t>(root)];
            if (c.id == lime->hog_comment_id) {
              p.hog_author = c.author_id;
              break;
            }
          }
        } else {
          p.limelight = -2.0;
        }
      }
      p.clamped = tree.clamped_offsets;
      for (std::size_t j = 0; j < tree.comments.size(); ++j) {
        comment_authors[cofs[i] + j] = tree.comments[j].author_id;
        if (tree.orphan[j]) ++p.orphans;
      }
    }
  });

  // Author activity, accumulated in post-index order.
  AuthorAccumulator acc;
  for (std::size_t i = 0; i < n; ++i) {
    if (!pp[i].kept) continue;
    acc.add_post(posts[i].author_id, authors);
    for (std::uint64_t j = cofs[i]; j < cofs[i + 1]; ++j)
      acc.add_comment(comment_authors[j], posts[i].author_id, authors);
  }
  const auto aggregates = acc.aggregates();
  auto fin = std::move(acc).finalize();

  std::uint64_t excluded_author_rows = 0;
  if (exclude_id) {
    for (std::size_t i = 0; i < fin.active_ids.size(); ++i) {
      if (fin.active_ids[i] == *exclude_id) {
        fin.active_ids.erase(fin.active_ids.begin() + static_cast<std::ptrdiff_t>(i));
        fin.metrics.erase(fin.metrics.begin() + static_cast<std::ptrdiff_t>(i));
        excluded_author_rows = 1;
        break;
      }
    }
  }

  // Scalar aggregates over kept posts.
  std::uint64_t zero_comment_posts = 0, one_comment_posts = 0, orphan_comments = 0,
                clamped_comments = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!pp[i].kept) continue;
    if (pp[i].total == 0) ++zero_comment_posts;
    if (pp[i].total == 1) ++one_comment_posts;
    orphan_comments += pp[i].orphans;
    clamped_comments += pp[i].clamped;
  }

  AnalysisReport report;
  report.ingest = store.stats();
  const char* ext = table_format_extension(cfg.format);

  auto emit = [&](SectionResult& sec, std::string_view base, const Table& t) {
    const std::string fname = std::string(base) + ext;
    auto r = write_table((dir / fname).string(), t, cfg.format);
    if (!r.ok()) {
      sec.ok = false;
      if (!sec.message.empty()) sec.message += "; ";
      sec.message += r.error().detail;
      return;
    }
    sec.tables.push_back({fname, t.rows.size()});
  };
  auto emit_or_fail = [&](SectionResult& sec, std::string_view base, Result<Table> t) {
    if (!t.ok()) {
      sec.ok = false;
      if (!sec.message.empty()) sec.message += "; ";
      sec.message += std::string(base) + ": " + errc_name(t.error().code);
      return;
    }
    emit(sec, base, *t);
  };

  const IngestStats& st = report.ingest;

  if (wants("ingest")) {
    SectionResult sec{"ingest"};
    Table t;
    t.columns = {"metric", "value"};
    auto row = [&](const char* k, Cell v) { t.add_row({std::string(k), std::move(v)}); };
    row("total_lines", st.total_lines);
    row("post_lines", st.post_lines);
    row("comment_lines", st.comment_lines);
    row("malformed_post_lines", st.malformed_post_lines);
    row("malformed_comment_lines", st.malformed_comment_lines);
    row("posts_kept", st.posts_kept);
    row("posts_dropped_out_of_period", st.posts_dropped_out_of_period);
    row("duplicate_post_ids", st.duplicate_post_ids);
    row("posts_with_deleted_author", st.posts_with_deleted_author);
    row("comments_kept", st.comments_kept);
    row("comments_dropped_out_of_period", st.comments_dropped_out_of_period);
    row("comments_dropped_missing_post", st.comments_dropped_missing_post);
    row("comments_with_deleted_author", st.comments_with_deleted_author);
    row("removed_comments", st.removed_comments);
    row("disconnected_posts", static_cast<std::uint64_t>(st.disconnected_post_ids.size()));
    row("zero_comment_posts", zero_comment_posts);
    row("one_comment_posts", one_comment_posts);
    row("orphan_comments", orphan_comments);
    row("time_clamped_comments", clamped_comments);
    row("mean_comments_per_post",
        st.posts_kept > 0 ? Cell(static_cast<double>(st.comments_kept) /
                                 static_cast<double>(st.posts_kept))
                          : report_detail::null_cell());
    const std::uint64_t commented = st.posts_kept - zero_comment_posts;
    row("mean_comments_per_commented_post",
        commented > 0 ? Cell(static_cast<double>(st.comments_kept) / static_cast<double>(commented))
                      : report_detail::null_cell());
    emit(sec, "ingest_summary", t);

    if (cfg.emit_post_metrics) {
      Table pm;
      pm.columns = {"post",      "comments",  "effective",   "age_seconds",
                    "first_latency_seconds", "cyborg_class", "successful", "mayfly",
                    "evolution", "t75_seconds", "limelight_score", "orphan_comments"};
      for (std::size_t i = 0; i < n; ++i) {
        if (!pp[i].kept) continue;
        const PerPost& p = pp[i];
        Cell mayfly = p.age < 0 ? report_detail::null_cell()
                                : Cell(p.age < cl.mayfly_threshold_s);
        Cell evo = p.evo > 2 ? report_detail::null_cell()
                             : Cell(std::string(
                                   evolution_kind_name(static_cast<EvolutionKind>(p.evo))));
        Cell lime = p.limelight >= 0.0 ? Cell(p.limelight) : report_detail::null_cell();
        pm.add_row({posts[i].id, static_cast<std::uint64_t>(p.total),
                    static_cast<std::uint64_t>(p.effective), report_detail::opt_i64(p.age),
                    report_detail::opt_i64(p.latency),
                    std::string(cyborg_class_name(static_cast<CyborgClass>(p.cyborg))),
                    p.successful, std::move(mayfly), std::move(evo),
                    report_detail::opt_i64(p.t75), std::move(lime),
                    static_cast<std::uint64_t>(p.orphans)});
      }
      emit(sec, "post_metrics", pm);
    }
    report.sections.push_back(std::move(sec));
  }

  if (wants("distributions")) {
    SectionResult sec{"distributions"};
    std::vector<double> cpp;  // comments per post, commented posts only
    for (std::size_t i = 0; i < n; ++i)
      if (pp[i].kept && pp[i].total > 0) cpp.push_back(static_cast<double>(pp[i].total));
    std::vector<double> ppa, cpa;  // posts / comments per author
    for (const auto& m : fin.metrics) {
      if (m.posts_created > 0) ppa.push_back(static_cast<double>(m.posts_created));
      if (m.comments_made > 0) cpa.push_back(static_cast<double>(m.comments_made));
    }

    Table fits;
    fits.columns = {"curve", "family", "status", "alpha_or_mu", "sigma",
                    "xmin",  "std_error", "ks_stat", "n_tail"};
    auto curve = [&](const char* name, const std::vector<double>& values, bool lognormal) {
      if (values.empty()) {
        report_detail::tail_fit_row(fits, name,
                                    make_error(Errc::empty_input, "no samples"));
        Table empty;
        empty.columns = {"value", "ccdf"};
        emit(sec, std::string("ccdf_") + name, empty);
        return;
      }
      auto c = ccdf(values);
      if (c.ok()) emit(sec, std::string("ccdf_") + name, report_detail::ccdf_table(*c));
      else {
        sec.ok = false;
        sec.message += std::string(name) + ": " + errc_name(c.error().code);
      }
      report_detail::tail_fit_row(
          fits, name, lognormal ? fit_lognormal_mle(values) : scan_xmin_ks(values));
    };
    curve("comments_per_post", cpp, false);
    curve("posts_per_author", ppa, false);
    curve("comments_per_author", cpa, true);
    emit(sec, "tail_fits", fits);
    report.sections.push_back(std::move(sec));
  }

  const BinSpec logspec = BinSpec::logarithmic(cfg.log_bin_ratio);

  if (wants("lifetimes")) {
    SectionResult sec{"lifetimes"};
    std::vector<double> ages, ages_one;
    std::uint64_t mayfly = 0, long_lived = 0, undefined = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!pp[i].kept) continue;
      if (pp[i].age < 0) {
        ++undefined;
        continue;
      }
      (pp[i].age < cl.mayfly_threshold_s ? mayfly : long_lived) += 1;
      ages.push_back(static_cast<double>(pp[i].age));
      if (pp[i].total == 1) ages_one.push_back(static_cast<double>(pp[i].age));
    }
    Table split;
    split.columns = {"cohort", "count"};
    split.add_row({std::string("mayfly"), mayfly});
    split.add_row({std::string("long_lived"), long_lived});
    split.add_row({std::string("age_undefined"), undefined});
    emit(sec, "age_split", split);
    emit_or_fail(sec, "age_pdf", report_detail::histogram_table(ages, logspec));
    emit_or_fail(sec, "age_pdf_one_comment", report_detail::histogram_table(ages_one, logspec));
    report.sections.push_back(std::move(sec));
  }

  if (wants("cyborg")) {
    SectionResult sec{"cyborg"};
    std::uint64_t commented = 0, fast_any = 0, fast_same = 0, n_cyborg = 0, n_short = 0;
    std::uint64_t cyborg_ok = 0, cyborg_bad = 0, short_ok = 0, short_bad = 0;
    std::vector<double> latencies, fast_ages;
    for (std::size_t i = 0; i < n; ++i) {
      const PerPost& p = pp[i];
      if (!p.kept || p.latency < 0) continue;
      ++commented;
      latencies.push_back(static_cast<double>(p.latency));
      const bool is_fast = p.latency <= cl.cyborg_latency_s;
      if (is_fast) {
        ++fast_any;
        if (p.age >= 0) fast_ages.push_back(static_cast<double>(p.age));
      }
      const auto cc = static_cast<CyborgClass>(p.cyborg);
      if (cc != CyborgClass::not_fast_same_author) ++fast_same;
      if (cc == CyborgClass::cyborg_like) {
        ++n_cyborg;
        p.successful ? ++cyborg_ok : ++cyborg_bad;
      } else if (cc == CyborgClass::fast_same_author_short) {
        ++n_short;
        p.successful ? ++short_ok : ++short_bad;
      }
    }
    Table t;
    t.columns = {"cohort", "count"};
    auto row = [&](const char* k, std::uint64_t v) { t.add_row({std::string(k), v}); };
    row("kept_posts", st.posts_kept);
    row("commented_posts", commented);
    row("fast_first_comment", fast_any);
    row("fast_same_author", fast_same);
    row("cyborg_like", n_cyborg);
    row("fast_same_author_short", n_short);
    row("cyborg_like_successful", cyborg_ok);
    row("cyborg_like_unsuccessful", cyborg_bad);
    row("fast_short_successful", short_ok);
    row("fast_short_unsuccessful", short_bad);
    emit(sec, "cyborg_cohorts", t);
    emit_or_fail(sec, "first_comment_latency_pdf",
                 report_detail::histogram_table(latencies, logspec));
    emit_or_fail(sec, "fast_posts_age_pdf", report_detail::histogram_table(fast_ages, logspec));

    // Success fraction per age bin, over posts with a fast first comment.
    Table srt;
    srt.columns = {"bin_lo", "bin_hi", "successful", "total", "fraction"};
    if (!fast_ages.empty()) {
      auto edges = detail::build_edges(fast_ages, logspec);
      if (edges.ok()) {
        std::vector<std::uint64_t> tot(edges->size() - 1, 0), good(edges->size() - 1, 0);
        for (std::size_t i = 0; i < n; ++i) {
          const PerPost& p = pp[i];
          if (!p.kept || p.latency < 0 || p.latency > cl.cyborg_latency_s || p.age < 0) continue;
          const std::size_t b = detail::edge_bin(*edges, static_cast<double>(p.age));
          ++tot[b];
          if (p.successful) ++good[b];
        }
        for (std::size_t b = 0; b < tot.size(); ++b) {
          if (tot[b] == 0) continue;
          srt.add_row({(*edges)[b], (*edges)[b + 1], good[b], tot[b],
                       static_cast<double>(good[b]) / static_cast<double>(tot[b])});
        }
      } else {
        sec.ok = false;
        sec.message += std::string("success_rate_by_age: ") + errc_name(edges.error().code);
      }
    }
    emit(sec, "success_rate_by_age", srt);
    report.sections.push_back(std::move(sec));
  }

  if (wants("evolution")) {
    SectionResult sec{"evolution"};
    std::uint64_t kinds[3] = {0, 0, 0};
    std::uint64_t excluded = 0;
    Table per;
    per.columns = {"post", "total_comments", "t75_seconds", "kind"};
    std::vector<std::pair<double, double>> pairs;
    for (std::size_t i = 0; i < n; ++i) {
      const PerPost& p = pp[i];
      if (!p.kept) continue;
      if (p.evo <= 2) {
        ++kinds[p.evo];
        per.add_row({posts[i].id, static_cast<std::uint64_t>(p.total), p.t75,
                     std::string(evolution_kind_name(static_cast<EvolutionKind>(p.evo)))});
      } else {
        ++excluded;
      }
      if (p.total > 0 && p.age >= 0)
        pairs.emplace_back(static_cast<double>(p.age), static_cast<double>(p.total));
    }
    Table counts;
    counts.columns = {"kind", "count"};
    counts.add_row({std::string(evolution_kind_name(EvolutionKind::early_bloomer)), kinds[0]});
    counts.add_row({std::string(evolution_kind_name(EvolutionKind::steady)), kinds[1]});
    counts.add_row({std::string(evolution_kind_name(EvolutionKind::late_bloomer)), kinds[2]});
    counts.add_row({std::string("excluded_not_popular"), excluded});
    counts.add_row({std::string("popular_total"), kinds[0] + kinds[1] + kinds[2]});
    emit(sec, "evolution_counts", counts);
    emit(sec, "evolution_t75", per);

    Table grid;
    grid.columns = {"x_lo", "x_hi", "y_lo", "y_hi", "count"};
    Table colavg;
    colavg.columns = {"x_lo", "x_hi", "n", "mean_comments"};
    if (!pairs.empty()) {
      auto g = density_grid_2d(pairs, logspec, logspec);
      if (g.ok()) {
        for (std::size_t ix = 0; ix < g->nx(); ++ix) {
          for (std::size_t iy = 0; iy < g->ny(); ++iy) {
            const auto c = g->at(ix, iy);
            if (c == 0) continue;
            grid.add_row({g->x_edges[ix], g->x_edges[ix + 1], g->y_edges[iy],
                          g->y_edges[iy + 1], c});
          }
          if (g->col_count[ix] > 0)
            colavg.add_row({g->x_edges[ix], g->x_edges[ix + 1], g->col_count[ix],
                            g->col_mean_y[ix]});
        }
      } else {
        sec.ok = false;
        sec.message += std::string("age_comments_grid: ") + errc_name(g.error().code);
      }
    }
    emit(sec, "age_comments_grid", grid);
    emit(sec, "age_comments_column_avg", colavg);
    report.sections.push_back(std::move(sec));
  }

  if (wants("limelight")) {
    SectionResult sec{"limelight"};
    std::vector<double> scores;
    std::uint64_t undefined = 0, distinct_hog = 0, ge_quarter = 0;
    Table perpost;
    perpost.columns = {"post", "total_comments", "score", "n_first_level", "hog_author",
                       "hog_is_post_author"};
    for (std::size_t i = 0; i < n; ++i) {
      const PerPost& p = pp[i];
      if (!p.kept || p.limelight == -1.0) continue;
      if (p.limelight == -2.0) {
        ++undefined;
        continue;
      }
      scores.push_back(p.limelight);
      if (!p.hog_is_post_author) ++distinct_hog;
      if (p.limelight >= 0.25) ++ge_quarter;
      if (cfg.emit_limelight_posts)
        perpost.add_row({posts[i].id, static_cast<std::uint64_t>(p.total), p.limelight,
                         static_cast<std::uint64_t>(p.n_first_level), authors.name(p.hog_author),
                         p.hog_is_post_author});
    }
    Table summary;
    summary.columns = {"metric", "value"};
    summary.add_row({std::string("n_analyzed"), static_cast<std::uint64_t>(scores.size())});
    summary.add_row({std::string("n_undefined"), undefined});
    summary.add_row({std::string("hog_distinct_fraction"),
                     scores.empty() ? report_detail::null_cell()
                                    : Cell(static_cast<double>(distinct_hog) /
                                           static_cast<double>(scores.size()))});
    summary.add_row({std::string("share_score_ge_quarter"),
                     scores.empty() ? report_detail::null_cell()
                                    : Cell(static_cast<double>(ge_quarter) /
                                           static_cast<double>(scores.size()))});
    emit(sec, "limelight_summary", summary);

    Table cdf;
    cdf.columns = {"score", "fraction_le"};
    if (!scores.empty()) {
      std::sort(scores.begin(), scores.end());
      const double ns = static_cast<double>(scores.size());
      for (std::size_t i = 0; i < scores.size(); ++i)
        if (i + 1 == scores.size() || scores[i + 1] != scores[i])
          cdf.add_row({scores[i], static_cast<double>(i + 1) / ns});
    }
    emit(sec, "limelight_cdf", cdf);
    emit_or_fail(sec, "limelight_hist",
                 report_detail::histogram_table(scores, BinSpec::linear(0.05)));
    if (cfg.emit_limelight_posts) emit(sec, "limelight_posts", perpost);
    report.sections.push_back(std::move(sec));
  }

  if (wants("authors")) {
    SectionResult sec{"authors"};
    std::uint64_t producers = 0, consumers = 0, both = 0;
    std::uint64_t posting = 0, commenting = 0, sum_posts = 0, sum_comments = 0,
                  interaction_undefined = 0;
    std::vector<double> inter;
    for (const auto& m : fin.metrics) {
      auto cat = categorize_author(m);
      if (cat.ok()) {
        if (*cat == AuthorCategory::producer_only) ++producers;
        else if (*cat == AuthorCategory::consumer_only) ++consumers;
        else ++both;
      }
      if (m.posts_created > 0) {
        ++posting;
        sum_posts += m.posts_created;
      }
      if (m.comments_made > 0) {
        ++commenting;
        sum_comments += m.comments_made;
      }
      if (auto s = interaction_score(m.effective_comments_received, m.comments_on_others))
        inter.push_back(*s);
      else
        ++interaction_undefined;
    }

    Table summary;
    summary.columns = {"metric", "value"};
    auto row = [&](const char* k, Cell v) { summary.add_row({std::string(k), std::move(v)}); };
    row("active_authors", static_cast<std::uint64_t>(fin.metrics.size()));
    row("producers_only", producers);
    row("consumers_only", consumers);
    row("both", both);
    row("posting_authors", posting);
    row("commenting_authors", commenting);
    row("posts_per_posting_author",
        posting > 0 ? Cell(static_cast<double>(sum_posts) / static_cast<double>(posting))
                    : report_detail::null_cell());
    row("comments_per_commenting_author",
        commenting > 0 ? Cell(static_cast<double>(sum_comments) / static_cast<double>(commenting))
                       : report_detail::null_cell());
    row("interaction_undefined", interaction_undefined);
    row("excluded_author_rows", excluded_author_rows);
    row("own_post_comments", aggregates.own_post_comments);
    row("comments_on_sentinel_posts", aggregates.comments_on_sentinel_posts);
    row("deleted_author_posts", aggregates.deleted_author_posts);
    row("deleted_author_comments", aggregates.deleted_author_comments);
    emit(sec, "author_summary", summary);

    emit_or_fail(sec, "interaction_hist",
                 report_detail::histogram_table(inter, BinSpec::linear(0.02)));

    const RatioCurve rc = comments_per_post_curve(fin.metrics);
    Table curve;
    curve.columns = {"ratio", "fraction_le"};
    for (const auto& [r, f] : rc.points) curve.add_row({r, f});
    emit(sec, "ratio_curve", curve);

    Table split;
    split.columns = {"bucket", "count"};
    split.add_row({std::string("below_unity"), rc.below_unity});
    split.add_row({std::string("at_unity"), rc.at_unity});
    split.add_row({std::string("above_unity"), rc.above_unity});
    split.add_row({std::string("n_authors"), rc.n_authors});
    emit(sec, "ratio_split", split);

    if (cfg.emit_author_metrics) {
      Table am;
      am.columns = {"author",    "posts",      "comments", "a_received", "b_made",
                    "in_degree", "out_degree", "category", "interaction"};
      for (std::size_t i = 0; i < fin.metrics.size(); ++i) {
        const auto& m = fin.metrics[i];
        auto cat = categorize_author(m);
        auto s = interaction_score(m.effective_comments_received, m.comments_on_others);
        am.add_row({authors.name(fin.active_ids[i]), m.posts_created, m.comments_made,
                    m.effective_comments_received, m.comments_on_others,
                    static_cast<std::uint64_t>(m.in_degree),
                    static_cast<std::uint64_t>(m.out_degree),
                    cat.ok() ? Cell(std::string(author_category_name(*cat)))
                             : report_detail::null_cell(),
                    s ? Cell(*s) : report_detail::null_cell()});
      }
      emit(sec, "author_metrics", am);
    }
    report.sections.push_back(std::move(sec));
  }

  // Manifest: configuration echo, ingest counters, per-section inventory.
  nlohmann::json man;
  man["format"] = cfg.format == TableFormat::csv ? "csv" : "ndjson";
  man["period"]["start"] = cfg.period.start;
  man["period"]["end"] = cfg.period.end;
  man["thresholds"]["mayfly_threshold_s"] = cl.mayfly_threshold_s;
  man["thresholds"]["cyborg_latency_s"] = cl.cyborg_latency_s;
  man["thresholds"]["cyborg_min_chars"] = cl.cyborg_min_chars;
  man["thresholds"]["bloomer_fraction"] = cl.bloomer_fraction;
  man["thresholds"]["early_cutoff_s"] = cl.early_cutoff_s;
  man["thresholds"]["late_cutoff_s"] = cl.late_cutoff_s;
  man["thresholds"]["popular_min_comments"] = cl.popular_min_comments;
  man["thresholds"]["limelight_min_comments"] = cl.limelight_min_comments;
  man["thresholds"]["success_mode"] =
      cl.success_mode == ClassifierConfig::SuccessMode::comments_only ? "comments_only"
                                                                      : "comments_or_score";
  man["ingest"]["total_lines"] = st.total_lines;
  man["ingest"]["post_lines"] = st.post_lines;
  man["ingest"]["comment_lines"] = st.comment_lines;
  man["ingest"]["malformed_post_lines"] = st.malformed_post_lines;
  man["ingest"]["malformed_comment_lines"] = st.malformed_comment_lines;
  man["ingest"]["posts_kept"] = st.posts_kept;
  man["ingest"]["comments_kept"] = st.comments_kept;
  man["ingest"]["disconnected_posts"] = st.disconnected_post_ids.size();
  man["excluded_author_rows"] = excluded_author_rows;
  man["sections"] = nlohmann::json::array();
  for (const auto& sec : report.sections) {
    nlohmann::json js;
    js["name"] = sec.name;
    js["ok"] = sec.ok;
    if (!sec.message.empty()) js["message"] = sec.message;
    js["tables"] = nlohmann::json::object();
    for (const auto& ti : sec.tables) js["tables"][ti.file] = ti.rows;
    man["sections"].push_back(std::move(js));
    if (!sec.ok) report.all_ok = false;
  }
  const auto manifest_path = dir / "manifest.json";
  if (auto r = write_text_file(manifest_path.string(), man.dump(2) + "\n"); !r.ok())
    return r.error();
  report.manifest_path = manifest_path.string();
  return report;
}

}  // namespace threadlens
