#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "threadlens/report.hpp"
#include "threadlens/synth.hpp"

using namespace threadlens;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path scratch(const std::string& leaf) {
  auto dir = fs::temp_directory_path() / "threadlens_report_test" / leaf;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

struct SmallCorpus {
  GeneratedCorpus gen;
  AnalysisConfig base;
};

SmallCorpus make_corpus(const std::string& leaf) {
  CorpusSpec spec;
  spec.seed = 404;
  spec.n_posts = 150;
  spec.n_popular = 1;
  spec.fraction_zero_comment = 0.1;
  spec.fraction_cyborg = 0.04;
  spec.fraction_deleted_author = 0.04;
  spec.author_pool = 50;
  spec.n_out_of_period_posts = 3;
  spec.n_ghost_comments = 2;
  spec.emit_truth = false;

  auto gen = generate_corpus(spec, scratch(leaf + "_corpus").string());
  REQUIRE(gen.ok());

  SmallCorpus out{std::move(*gen), {}};
  out.base.post_paths = {out.gen.posts_path.string()};
  out.base.comment_paths = {out.gen.comments_path.string()};
  out.base.period = {spec.period_start, spec.period_end};
  return out;
}

}  // namespace

TEST_CASE("analysis validates its configuration up front") {
  AnalysisConfig cfg;
  cfg.out_dir = scratch("cfg").string();
  CHECK(run_analysis(cfg).error().code == Errc::bad_config);  // no inputs

  cfg.post_paths = {"p.ndjson"};
  cfg.comment_paths = {"c.ndjson"};
  cfg.out_dir.clear();
  CHECK(run_analysis(cfg).error().code == Errc::bad_config);  // no out dir

  cfg.out_dir = scratch("cfg").string();
  cfg.threads = 0;
  CHECK(run_analysis(cfg).error().code == Errc::bad_config);

  cfg.threads = 1;
  cfg.sections = {"ingest", "nonsense"};
  CHECK(run_analysis(cfg).error().code == Errc::bad_config);

  cfg.sections.clear();
  cfg.period = {50, 50};
  CHECK(run_analysis(cfg).error().code == Errc::bad_config);

  cfg.period = {0, 100};
  cfg.log_bin_ratio = 1.0;
  CHECK(run_analysis(cfg).error().code == Errc::bad_config);

  cfg.log_bin_ratio = 1.3;
  cfg.classifier.bloomer_fraction = 2.0;
  CHECK(run_analysis(cfg).error().code == Errc::bad_config);
}

TEST_CASE("missing input files fail with an io error") {
  AnalysisConfig cfg;
  cfg.post_paths = {(scratch("io") / "absent.ndjson").string()};
  cfg.comment_paths = {(scratch("io") / "absent2.ndjson").string()};
  cfg.out_dir = (scratch("io") / "out").string();
  CHECK(run_analysis(cfg).error().code == Errc::io_error);
}

TEST_CASE("a single section produces only its own tables") {
  auto c = make_corpus("single");
  c.base.out_dir = scratch("single_out").string();
  c.base.sections = {"ingest"};

  auto rep = run_analysis(c.base);
  REQUIRE(rep.ok());
  CHECK(rep->all_ok);
  REQUIRE(rep->sections.size() == 1);
  CHECK(rep->sections[0].name == "ingest");
  REQUIRE(rep->sections[0].tables.size() == 1);
  CHECK(rep->sections[0].tables[0].file == "ingest_summary.csv");
  CHECK(fs::exists(fs::path(c.base.out_dir) / "ingest_summary.csv"));
  CHECK_FALSE(fs::exists(fs::path(c.base.out_dir) / "author_summary.csv"));

  CHECK(rep->ingest.posts_kept == 150);
  CHECK(rep->ingest.posts_dropped_out_of_period == 3);
  // two ghosts plus the companion comment of each out-of-period post
  CHECK(rep->ingest.comments_dropped_missing_post == 5);
  CHECK(rep->ingest.malformed_lines() == 0);
}

TEST_CASE("the manifest inventories every emitted table") {
  auto c = make_corpus("manifest");
  c.base.out_dir = scratch("manifest_out").string();

  auto rep = run_analysis(c.base);
  REQUIRE(rep.ok());
  CHECK(rep->all_ok);
  CHECK(rep->sections.size() == all_section_names().size());

  auto man = nlohmann::json::parse(slurp(rep->manifest_path));
  CHECK(man["format"] == "csv");
  CHECK(man["period"]["start"] == c.base.period.start);
  CHECK(man["thresholds"]["popular_min_comments"] == 500);
  CHECK(man["ingest"]["posts_kept"] == 150);
  REQUIRE(man["sections"].is_array());
  REQUIRE(man["sections"].size() == rep->sections.size());

  for (std::size_t i = 0; i < rep->sections.size(); ++i) {
    const auto& sec = rep->sections[i];
    const auto& js = man["sections"][i];
    CHECK(js["name"] == sec.name);
    CHECK(js["ok"] == sec.ok);
    for (const auto& ti : sec.tables) {
      REQUIRE(js["tables"].contains(ti.file));
      CHECK(js["tables"][ti.file] == ti.rows);
      // every inventoried file exists and has header + rows lines (csv)
      const auto path = fs::path(c.base.out_dir) / ti.file;
      REQUIRE(fs::exists(path));
      const auto text = slurp(path);
      std::size_t lines = 0;
      for (char ch : text)
        if (ch == '\n') ++lines;
      CHECK(lines == ti.rows + 1);
    }
  }
}

TEST_CASE("ndjson output renders one json object per row") {
  auto c = make_corpus("ndjson");
  c.base.out_dir = scratch("ndjson_out").string();
  c.base.format = TableFormat::ndjson;
  c.base.sections = {"authors"};

  auto rep = run_analysis(c.base);
  REQUIRE(rep.ok());
  REQUIRE_FALSE(rep->sections[0].tables.empty());
  for (const auto& ti : rep->sections[0].tables) {
    CHECK(ti.file.ends_with(".ndjson"));
    std::ifstream in(fs::path(c.base.out_dir) / ti.file);
    std::string line;
    std::uint64_t rows = 0;
    while (std::getline(in, line)) {
      auto js = nlohmann::json::parse(line, nullptr, false);
      CHECK_FALSE(js.is_discarded());
      ++rows;
    }
    CHECK(rows == ti.rows);
  }
}

TEST_CASE("excluding an author removes exactly that row") {
  auto c = make_corpus("exclude");
  c.base.out_dir = scratch("exclude_base").string();
  c.base.sections = {"authors"};
  c.base.emit_author_metrics = true;

  auto rep = run_analysis(c.base);
  REQUIRE(rep.ok());

  // pick the first author from the emitted per-author table
  std::ifstream in(fs::path(c.base.out_dir) / "author_metrics.csv");
  std::string header, row;
  REQUIRE(std::getline(in, header));
  REQUIRE(std::getline(in, row));
  const std::string victim = row.substr(0, row.find(','));
  REQUIRE_FALSE(victim.empty());

  auto excluded_cfg = c.base;
  excluded_cfg.out_dir = scratch("exclude_out").string();
  excluded_cfg.exclude_author = victim;
  auto rep2 = run_analysis(excluded_cfg);
  REQUIRE(rep2.ok());

  auto man = nlohmann::json::parse(slurp(rep2->manifest_path));
  CHECK(man["excluded_author_rows"] == 1);
  const auto text = slurp(fs::path(excluded_cfg.out_dir) / "author_metrics.csv");
  CHECK(text.find(victim + ",") == std::string::npos);

  // author_summary row count drops by one
  auto base_man = nlohmann::json::parse(slurp(rep->manifest_path));
  const auto active = [](const nlohmann::json& m) {
    for (const auto& sec : m["sections"])
      if (sec["name"] == "authors") return sec["tables"]["author_metrics.csv"].get<std::int64_t>();
    return std::int64_t{-1};
  };
  CHECK(active(man) == active(base_man) - 1);
}

TEST_CASE("an empty period slice still yields a complete, honest report") {
  auto c = make_corpus("empty");
  c.base.out_dir = scratch("empty_out").string();
  c.base.period = {100, 200};  // far before the corpus

  auto rep = run_analysis(c.base);
  REQUIRE(rep.ok());
  CHECK(rep->all_ok);
  CHECK(rep->ingest.posts_kept == 0);
  CHECK(rep->ingest.comments_kept == 0);

  // tables exist with headers only where no rows can be computed
  for (const auto& sec : rep->sections) {
    CHECK(sec.ok);
    for (const auto& ti : sec.tables) {
      CHECK(fs::exists(fs::path(c.base.out_dir) / ti.file));
    }
  }
}

TEST_CASE("thread counts do not change any output byte") {
  auto c = make_corpus("threads");
  c.base.emit_post_metrics = true;
  c.base.emit_author_metrics = true;
  c.base.emit_limelight_posts = true;

  auto run_with = [&](int threads, const std::string& leaf) {
    auto cfg = c.base;
    cfg.threads = threads;
    cfg.out_dir = scratch(leaf).string();
    auto rep = run_analysis(cfg);
    REQUIRE(rep.ok());
    std::vector<std::pair<std::string, std::string>> files;
    for (const auto& entry : fs::directory_iterator(cfg.out_dir))
      files.emplace_back(entry.path().filename().string(), slurp(entry.path()));
    std::sort(files.begin(), files.end());
    return files;
  };

  const auto t1 = run_with(1, "threads_1");
  const auto t3 = run_with(3, "threads_3");
  REQUIRE(t1.size() == t3.size());
  for (std::size_t i = 0; i < t1.size(); ++i) {
    CHECK(t1[i].first == t3[i].first);
    CHECK(t1[i].second == t3[i].second);
  }
}
