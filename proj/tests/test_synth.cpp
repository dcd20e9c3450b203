#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

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

std::size_t count_lines(const fs::path& path) {
  const auto text = slurp(path);
  std::size_t n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

fs::path scratch(const std::string& leaf) {
  auto dir = fs::temp_directory_path() / "threadlens_synth_test" / leaf;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("spec files parse keys, comments, and whitespace") {
  const std::string text =
      "# corpus shape\n"
      "seed = 9\n"
      "n_posts=50\r\n"
      "fraction_mayfly = 0.25  # trailing note\n"
      "comment_law = fixed\n"
      "fixed_k = 4\n"
      "\n"
      "emit_truth = 0\n";
  auto spec = parse_corpus_spec(text);
  REQUIRE(spec.ok());
  CHECK(spec->seed == 9);
  CHECK(spec->n_posts == 50);
  CHECK(spec->fraction_mayfly == 0.25);
  CHECK(spec->comment_law == CorpusSpec::Law::fixed);
  CHECK(spec->fixed_k == 4);
  CHECK_FALSE(spec->emit_truth);
}

TEST_CASE("spec parser reports the offending line") {
  auto unknown = parse_corpus_spec("seed = 1\nwat = 3\n");
  REQUIRE_FALSE(unknown.ok());
  CHECK(unknown.error().code == Errc::bad_config);
  CHECK(unknown.error().detail.find("line 2") != std::string::npos);
  CHECK(unknown.error().detail.find("wat") != std::string::npos);

  CHECK(parse_corpus_spec("n_posts = many\n").error().code == Errc::bad_config);
  CHECK(parse_corpus_spec("just words\n").error().code == Errc::bad_config);
  CHECK(parse_corpus_spec("seed =\n").error().code == Errc::bad_config);
  CHECK(parse_corpus_spec("comment_law = zipf\n").error().code == Errc::bad_config);
}

TEST_CASE("inconsistent shapes are rejected before generation") {
  CorpusSpec too_many;
  too_many.n_posts = 10;
  too_many.fraction_zero_comment = 0.5;
  too_many.n_popular = 6;
  REQUIRE(validate_spec(too_many).has_value());
  CHECK(validate_spec(too_many)->code == Errc::inconsistent_spec);

  CorpusSpec bad_frac;
  bad_frac.fraction_mayfly = 1.5;
  CHECK(validate_spec(bad_frac).has_value());

  CorpusSpec bad_split;
  bad_split.n_popular = 10;
  bad_split.fraction_early = 0.9;
  bad_split.fraction_steady = 0.9;
  bad_split.fraction_late = 0.1;
  CHECK(validate_spec(bad_split).has_value());

  CorpusSpec tiny_pool;
  tiny_pool.author_pool = 1;
  CHECK(validate_spec(tiny_pool).has_value());

  CorpusSpec short_period;
  short_period.period_end = short_period.period_start + 86'400;
  CHECK(validate_spec(short_period).has_value());
}

TEST_CASE("pareto sampler guards its parameters") {
  CHECK(sample_pareto(1.0, 1.0, 5, 1).error().code == Errc::invalid_param);
  CHECK(sample_pareto(2.5, 0.0, 5, 1).error().code == Errc::invalid_param);
  CHECK(sample_pareto(2.5, 1.0, 0, 1).error().code == Errc::invalid_param);

  auto sample = sample_pareto(2.5, 2.0, 1000, 3);
  REQUIRE(sample.ok());
  for (double v : *sample) CHECK(v >= 2.0);
}

TEST_CASE("generation is deterministic for a fixed seed") {
  CorpusSpec spec;
  spec.seed = 77;
  spec.n_posts = 120;
  spec.n_popular = 1;
  spec.fraction_cyborg = 0.05;
  spec.fraction_deleted_author = 0.05;
  spec.author_pool = 40;
  spec.n_ghost_comments = 3;
  spec.n_out_of_period_posts = 2;

  auto first = generate_corpus(spec, scratch("a").string());
  auto second = generate_corpus(spec, scratch("b").string());
  REQUIRE(first.ok());
  REQUIRE(second.ok());
  CHECK(slurp(first->posts_path) == slurp(second->posts_path));
  CHECK(slurp(first->comments_path) == slurp(second->comments_path));

  spec.seed = 78;
  auto third = generate_corpus(spec, scratch("c").string());
  REQUIRE(third.ok());
  CHECK(slurp(first->posts_path) != slurp(third->posts_path));
}

TEST_CASE("generated files hold the promised row counts") {
  CorpusSpec spec;
  spec.seed = 5;
  spec.n_posts = 200;
  spec.n_popular = 2;
  spec.fraction_zero_comment = 0.1;
  spec.author_pool = 60;
  spec.n_out_of_period_posts = 7;
  spec.n_ghost_comments = 4;

  auto gen = generate_corpus(spec, scratch("counts").string());
  REQUIRE(gen.ok());
  CHECK(gen->summary.posts_kept == 200);
  CHECK(gen->summary.out_of_period_posts == 7);
  CHECK(gen->summary.ghost_comments == 4);
  CHECK(count_lines(gen->posts_path) == 207);
  // every out-of-period post carries one in-window companion comment, and
  // the ghost comments ride along after the planted ones
  CHECK(count_lines(gen->comments_path) == gen->summary.comments + 7 + 4);
  CHECK(gen->summary.zero_comment == 20);
  CHECK(gen->summary.popular == 2);

  // truth sidecars accompany the dump unless disabled
  CHECK(fs::exists(gen->truth_posts_path));
  CHECK(fs::exists(gen->truth_authors_path));
  CHECK(fs::exists(gen->truth_summary_path));
}

TEST_CASE("planted class counts follow the fractions exactly") {
  CorpusSpec spec;
  spec.seed = 21;
  spec.n_posts = 400;
  spec.fraction_zero_comment = 0.05;
  spec.fraction_mayfly = 0.5;
  spec.fraction_cyborg = 0.1;
  spec.fraction_fast_short = 0.05;
  spec.n_popular = 4;
  spec.fraction_early = 0.5;
  spec.fraction_steady = 0.25;
  spec.fraction_late = 0.25;
  spec.author_pool = 100;

  auto gen = generate_corpus(spec, scratch("planted").string());
  REQUIRE(gen.ok());
  const auto& s = gen->summary;
  CHECK(s.zero_comment == 20);
  CHECK(s.mayfly == 200);
  CHECK(s.cyborg_like == 40);
  CHECK(s.fast_same_author_short == 20);
  CHECK(s.popular == 4);
  CHECK(s.early == 2);
  CHECK(s.steady == 1);
  CHECK(s.late == 1);
}
