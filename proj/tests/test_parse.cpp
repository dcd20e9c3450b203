#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "threadlens/json_line.hpp"

using namespace threadlens;

TEST_CASE("post line yields every mapped field") {
  const std::string line = R"({"author":"alice","created_utc":1200000000,"id":"6abcd",)"
                           R"("name":"t3_6abcd","num_comments":12,"score":57,)"
                           R"("selftext":"body text","title":"hello world","ups":60})";
  auto rec = parse_post_line(line);
  REQUIRE(rec.ok());
  CHECK(rec->id == "t3_6abcd");
  CHECK(rec->author == "alice");
  CHECK(rec->created_utc == 1200000000);
  CHECK(rec->declared_num_comments == 12);
  REQUIRE(rec->score.has_value());
  CHECK(*rec->score == 57);
  CHECK(rec->body_or_title == "hello world");  // title wins over selftext
  CHECK_FALSE(rec->deleted_author);
}

TEST_CASE("post id falls back from name to id") {
  auto rec = parse_post_line(R"({"id":"6abcd","created_utc":1200000000})");
  REQUIRE(rec.ok());
  CHECK(rec->id == "6abcd");

  auto missing = parse_post_line(R"({"created_utc":1200000000})");
  REQUIRE_FALSE(missing.ok());
  CHECK(missing.error().code == Errc::missing_field);
}

TEST_CASE("timestamps parse from integer, float, and string forms") {
  const auto ts = [](const std::string& v) {
    return parse_post_line(R"({"name":"t3_x","created_utc":)" + v + "}");
  };
  auto a = ts("1199145600");
  auto b = ts("1199145600.0");
  auto c = ts(R"("1199145600")");
  auto d = ts(R"("1199145600.0")");
  for (auto* r : {&a, &b, &c, &d}) {
    REQUIRE(r->ok());
    CHECK((**r).created_utc == 1199145600);
  }
  CHECK(ts(R"("yesterday")").error().code == Errc::invalid_timestamp);
  CHECK(ts("1199145600.5").error().code == Errc::invalid_timestamp);
  CHECK(ts("0").error().code == Errc::invalid_timestamp);
  CHECK(ts("-12").error().code == Errc::invalid_timestamp);
  CHECK(parse_post_line(R"({"name":"t3_x"})").error().code == Errc::missing_field);
}

TEST_CASE("absent or sentinel authors carry the deleted flag") {
  auto absent = parse_post_line(R"({"name":"t3_x","created_utc":5})");
  REQUIRE(absent.ok());
  CHECK(absent->author.empty());
  CHECK(absent->deleted_author);

  auto del = parse_post_line(R"({"name":"t3_x","created_utc":5,"author":"[deleted]"})");
  REQUIRE(del.ok());
  CHECK(del->deleted_author);
}

TEST_CASE("scores outside int32 or null become absent") {
  auto null_score = parse_post_line(R"({"name":"t3_x","created_utc":5,"score":null})");
  REQUIRE(null_score.ok());
  CHECK_FALSE(null_score->score.has_value());

  auto huge = parse_post_line(R"({"name":"t3_x","created_utc":5,"score":3000000000})");
  REQUIRE(huge.ok());
  CHECK_FALSE(huge->score.has_value());

  auto neg = parse_post_line(R"({"name":"t3_x","created_utc":5,"score":-4})");
  REQUIRE(neg.ok());
  CHECK(*neg->score == -4);
}

TEST_CASE("negative declared comment counts clamp to zero") {
  auto rec = parse_post_line(R"({"name":"t3_x","created_utc":5,"num_comments":-3})");
  REQUIRE(rec.ok());
  CHECK(rec->declared_num_comments == 0);
}

TEST_CASE("comment line requires link_id and defaults the parent to it") {
  auto no_link = parse_comment_line(R"({"name":"t1_c1","created_utc":5})");
  REQUIRE_FALSE(no_link.ok());
  CHECK(no_link.error().code == Errc::missing_field);

  auto no_parent =
      parse_comment_line(R"({"name":"t1_c1","created_utc":5,"link_id":"t3_p1"})");
  REQUIRE(no_parent.ok());
  CHECK(no_parent->parent_id == "t3_p1");

  auto empty_parent = parse_comment_line(
      R"({"name":"t1_c1","created_utc":5,"link_id":"t3_p1","parent_id":""})");
  REQUIRE(empty_parent.ok());
  CHECK(empty_parent->parent_id == "t3_p1");
}

TEST_CASE("self parents are rejected only within the comment namespace") {
  auto self = parse_comment_line(
      R"({"name":"t1_00001","created_utc":5,"link_id":"t3_p","parent_id":"t1_00001"})");
  REQUIRE_FALSE(self.ok());
  CHECK(self.error().code == Errc::self_parent);

  // A post-level parent with the same digits is a different namespace.
  auto collide = parse_comment_line(
      R"({"name":"t1_00001","created_utc":5,"link_id":"t3_00001","parent_id":"t3_00001"})");
  REQUIRE(collide.ok());
  CHECK(collide->parent_id == "t3_00001");
}

TEST_CASE("removed body sets the flag and unicode length counts code points") {
  auto rec = parse_comment_line(
      R"({"name":"t1_c1","created_utc":5,"link_id":"t3_p","body":"[removed]"})");
  REQUIRE(rec.ok());
  CHECK(rec->removed);

  auto uni = parse_comment_line(
      R"({"name":"t1_c1","created_utc":5,"link_id":"t3_p","body":"café 中文"})");
  REQUIRE(uni.ok());
  CHECK_FALSE(uni->removed);
  CHECK(utf8_length(uni->body) == 7);  // "café 中文"
}

TEST_CASE("utf8_length counts scalar values across width classes") {
  CHECK(utf8_length("") == 0);
  CHECK(utf8_length("abc") == 3);
  CHECK(utf8_length("caf\xC3\xA9") == 4);          // 2-byte sequence
  CHECK(utf8_length("\xE2\x82\xAC") == 1);         // euro sign, 3 bytes
  CHECK(utf8_length("\xF0\x9F\x99\x82") == 1);     // emoji, 4 bytes
  CHECK(utf8_length("a\xE2\x82\xACz") == 3);
}

TEST_CASE("malformed rows are rejected with a parse error") {
  CHECK(parse_post_line("").error().code == Errc::malformed_json);
  CHECK(parse_post_line("{\"a\": }").error().code == Errc::malformed_json);
  CHECK(parse_post_line("[1,2,3]").error().code == Errc::malformed_json);
  CHECK(parse_post_line("42").error().code == Errc::malformed_json);
  CHECK(parse_post_line("\"just a string\"").error().code == Errc::malformed_json);
  CHECK(parse_post_line(R"({"name":"t3_x","created_utc":5} trailing)").error().code ==
        Errc::malformed_json);
}

TEST_CASE("nested objects are skipped without capturing inner keys") {
  const std::string line =
      R"({"media":{"author":"inner","created_utc":999},)"
      R"("name":"t3_x","created_utc":5,"author":"outer",)"
      R"("tags":["author","created_utc"]})";
  auto rec = parse_post_line(line);
  REQUIRE(rec.ok());
  CHECK(rec->author == "outer");
  CHECK(rec->created_utc == 5);
}
