// Command line front end. Each analysis subcommand runs the same pipeline
// restricted to one output section; `report` runs them all.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "threadlens/threadlens.hpp"

namespace tl = threadlens;

namespace {

struct AnalysisCli {
  tl::AnalysisConfig cfg;
  std::string format = "csv";
  std::string success_mode = "comments_or_score";
  bool keep_id_prefixes = false;
};

void add_analysis_options(CLI::App* sub, AnalysisCli& o) {
  sub->add_option("--posts", o.cfg.post_paths, "post dump, ndjson or ndjson.gz (repeatable)")
      ->required();
  sub->add_option("--comments", o.cfg.comment_paths, "comment dump (repeatable)")->required();
  sub->add_option("--out", o.cfg.out_dir, "output directory")->required();
  sub->add_option("--period-start", o.cfg.period.start,
                  "keep records created at or after this epoch second");
  sub->add_option("--period-end", o.cfg.period.end,
                  "keep records created strictly before this epoch second");
  sub->add_option("--format", o.format, "table format")
      ->check(CLI::IsMember({"csv", "ndjson"}));
  sub->add_option("--threads", o.cfg.threads, "worker threads");
  sub->add_option("--mayfly-threshold", o.cfg.classifier.mayfly_threshold_s,
                  "max age in seconds for a short lived post");
  sub->add_option("--cyborg-latency", o.cfg.classifier.cyborg_latency_s,
                  "max first comment latency in seconds");
  sub->add_option("--cyborg-min-chars", o.cfg.classifier.cyborg_min_chars,
                  "first comment must exceed this many characters");
  sub->add_option("--bloomer-fraction", o.cfg.classifier.bloomer_fraction,
                  "activity quantile used for the growth split");
  sub->add_option("--early-cutoff", o.cfg.classifier.early_cutoff_s,
                  "max quantile time in seconds for early growth");
  sub->add_option("--late-cutoff", o.cfg.classifier.late_cutoff_s,
                  "min quantile time in seconds for late growth");
  sub->add_option("--popular-min-comments", o.cfg.classifier.popular_min_comments,
                  "growth split needs strictly more comments than this");
  sub->add_option("--limelight-min-comments", o.cfg.classifier.limelight_min_comments,
                  "concentration analysis needs at least this many comments");
  sub->add_option("--success-mode", o.success_mode, "what counts as a successful post")
      ->check(CLI::IsMember({"comments_only", "comments_or_score"}));
  sub->add_flag("--keep-id-prefixes", o.keep_id_prefixes,
                "treat t1_/t3_ style prefixes as part of record ids");
  sub->add_option("--exclude-author", o.cfg.exclude_author,
                  "drop this author's row from author level tables");
  sub->add_flag("--emit-post-metrics", o.cfg.emit_post_metrics, "write the per post table");
  sub->add_flag("--emit-author-metrics", o.cfg.emit_author_metrics,
                "write the per author table");
  sub->add_flag("--emit-limelight-posts", o.cfg.emit_limelight_posts,
                "write one row per concentration-analyzed post");
  sub->add_option("--log-bin-ratio", o.cfg.log_bin_ratio, "geometric bin growth factor");
}

int run_sections(AnalysisCli& o, std::vector<std::string> sections) {
  o.cfg.sections = std::move(sections);
  o.cfg.format = o.format == "csv" ? tl::TableFormat::csv : tl::TableFormat::ndjson;
  o.cfg.classifier.success_mode =
      o.success_mode == "comments_only" ? tl::ClassifierConfig::SuccessMode::comments_only
                                        : tl::ClassifierConfig::SuccessMode::comments_or_score;
  o.cfg.ids.strip_type_prefixes = !o.keep_id_prefixes;

  auto rep = tl::run_analysis(o.cfg);
  if (!rep.ok()) {
    std::fprintf(stderr, "error: %s: %s\n", tl::errc_name(rep.error().code),
                 rep.error().detail.c_str());
    return 1;
  }
  for (const auto& sec : rep->sections) {
    if (sec.ok)
      std::printf("section %s: ok, %zu tables\n", sec.name.c_str(), sec.tables.size());
    else
      std::printf("section %s: FAILED (%s)\n", sec.name.c_str(), sec.message.c_str());
  }
  std::printf("posts kept: %llu\n", static_cast<unsigned long long>(rep->ingest.posts_kept));
  std::printf("comments kept: %llu\n",
              static_cast<unsigned long long>(rep->ingest.comments_kept));
  std::printf("manifest: %s\n", rep->manifest_path.c_str());
  return rep->all_ok ? 0 : 2;
}

int run_synth(const std::string& spec_path, const std::vector<std::string>& overrides,
              const std::string& out_dir) {
  std::string text;
  if (!spec_path.empty()) {
    std::ifstream in(spec_path);
    if (!in) {
      std::fprintf(stderr, "error: io-error: cannot read %s\n", spec_path.c_str());
      return 1;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  }
  for (const auto& kv : overrides) {
    text += '\n';
    text += kv;
  }
  auto spec = tl::parse_corpus_spec(text);
  if (!spec.ok()) {
    std::fprintf(stderr, "error: %s: %s\n", tl::errc_name(spec.error().code),
                 spec.error().detail.c_str());
    return 1;
  }
  auto gen = tl::generate_corpus(*spec, out_dir);
  if (!gen.ok()) {
    std::fprintf(stderr, "error: %s: %s\n", tl::errc_name(gen.error().code),
                 gen.error().detail.c_str());
    return 1;
  }
  std::printf("posts: %s\n", gen->posts_path.c_str());
  std::printf("comments: %s\n", gen->comments_path.c_str());
  if (spec->emit_truth) {
    std::printf("truth posts: %s\n", gen->truth_posts_path.c_str());
    std::printf("truth authors: %s\n", gen->truth_authors_path.c_str());
    std::printf("truth summary: %s\n", gen->truth_summary_path.c_str());
  }
  std::printf("posts written: %llu\n",
              static_cast<unsigned long long>(gen->summary.posts_kept));
  std::printf("comments written: %llu\n",
              static_cast<unsigned long long>(gen->summary.comments));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"threaded discussion dump analyzer"};
  app.require_subcommand(1);

  AnalysisCli o;
  const std::vector<std::pair<const char*, const char*>> section_cmds = {
      {"ingest-stats", "ingest counters and optional per post metrics"},
      {"distributions", "activity distributions and tail fits"},
      {"lifetimes", "post age distributions"},
      {"cyborg", "fast first comment cohorts"},
      {"evolution", "comment growth timing on popular posts"},
      {"limelight", "comment concentration on large discussions"},
      {"authors", "per author activity and interaction balance"}};
  std::vector<std::pair<CLI::App*, std::vector<std::string>>> runs;
  for (const auto& [cmd, help] : section_cmds) {
    CLI::App* sub = app.add_subcommand(cmd, help);
    add_analysis_options(sub, o);
    std::string section = cmd == std::string("ingest-stats") ? "ingest" : cmd;
    runs.emplace_back(sub, std::vector<std::string>{section});
  }
  CLI::App* report = app.add_subcommand("report", "run every analysis section");
  add_analysis_options(report, o);
  runs.emplace_back(report, std::vector<std::string>{});

  std::string spec_path, synth_out;
  std::vector<std::string> overrides;
  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic corpus with ground truth");
  synth->add_option("--spec", spec_path, "key = value spec file")->check(CLI::ExistingFile);
  synth->add_option("--set", overrides, "override one spec entry, key=value (repeatable)");
  synth->add_option("--out", synth_out, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  if (synth->parsed()) return run_synth(spec_path, overrides, synth_out);
  for (auto& [sub, sections] : runs)
    if (sub->parsed()) return run_sections(o, std::move(sections));
  return 1;
}
