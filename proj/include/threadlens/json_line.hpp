#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "threadlens/records.hpp"

namespace threadlens {

namespace detail {

// SAX handler that captures top-level scalar fields by name and skips
// everything nested. Dump rows are flat; nested values (media objects etc.)
// are validated as JSON but otherwise ignored.
class LineSax : public nlohmann::json_sax<nlohmann::json> {
 public:
  struct Fields {
    std::optional<std::string> author;
    std::optional<std::string> name;
    std::optional<std::string> id;
    std::optional<std::string> link_id;
    std::optional<std::string> parent_id;
    std::optional<std::string> body;
    std::optional<std::string> title;
    std::optional<std::string> selftext;
    std::optional<std::int64_t> created_utc;
    bool created_utc_invalid = false;  // present but not a usable timestamp
    std::optional<std::int64_t> num_comments;
    std::optional<std::int64_t> score;
  };

  Fields fields;
  bool not_object = false;
  std::string parse_error_msg;

  bool null() override {
    slot_ = Slot::none;
    return depth_ > 0 || top_level_scalar();
  }
  bool boolean(bool) override {
    slot_ = Slot::none;
    return depth_ > 0 || top_level_scalar();
  }
  bool number_integer(number_integer_t v) override { return set_number(static_cast<double>(v), v); }
  bool number_unsigned(number_unsigned_t v) override {
    const auto i = v <= static_cast<number_unsigned_t>(std::numeric_limits<std::int64_t>::max())
                       ? static_cast<std::int64_t>(v)
                       : std::numeric_limits<std::int64_t>::max();
    return set_number(static_cast<double>(v), i);
  }
  bool number_float(number_float_t v, const string_t&) override {
    std::optional<std::int64_t> as_int;
    if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 9.2e18) {
      as_int = static_cast<std::int64_t>(v);
    }
    return set_number(v, as_int);
  }

  bool string(string_t& val) override {
    if (depth_ == 0) return top_level_scalar();
    if (depth_ == 1) assign_string(std::move(val));
    slot_ = Slot::none;
    return true;
  }

  bool binary(binary_t&) override {
    slot_ = Slot::none;
    return depth_ > 0 || top_level_scalar();
  }

  bool start_object(std::size_t) override {
    ++depth_;
    slot_ = Slot::none;
    return true;
  }
  bool end_object() override {
    --depth_;
    return true;
  }
  bool start_array(std::size_t) override {
    if (depth_ == 0) return top_level_scalar();
    ++depth_;
    slot_ = Slot::none;
    return true;
  }
  bool end_array() override {
    --depth_;
    return true;
  }

  bool key(string_t& val) override {
    if (depth_ != 1) {
      slot_ = Slot::none;
      return true;
    }
    slot_ = lookup(val);
    return true;
  }

  bool parse_error(std::size_t, const std::string&,
                   const nlohmann::detail::exception& ex) override {
    parse_error_msg = ex.what();
    return false;
  }

 private:
  enum class Slot {
    none,
    author,
    name,
    id,
    link_id,
    parent_id,
    body,
    title,
    selftext,
    created_utc,
    num_comments,
    score,
  };

  static Slot lookup(std::string_view k) {
    switch (k.size()) {
      case 2: return k == "id" ? Slot::id : Slot::none;
      case 4: return k == "name" ? Slot::name : (k == "body" ? Slot::body : Slot::none);
      case 5: return k == "title" ? Slot::title : (k == "score" ? Slot::score : Slot::none);
      case 6: return k == "author" ? Slot::author : Slot::none;
      case 7: return k == "link_id" ? Slot::link_id : Slot::none;
      case 8: return k == "selftext" ? Slot::selftext : Slot::none;
      case 9: return k == "parent_id" ? Slot::parent_id : Slot::none;
      case 11: return k == "created_utc" ? Slot::created_utc : Slot::none;
      case 12: return k == "num_comments" ? Slot::num_comments : Slot::none;
      default: return Slot::none;
    }
  }

  bool top_level_scalar() {
    not_object = true;
    return false;
  }

  void assign_string(std::string&& val) {
    switch (slot_) {
      case Slot::author: fields.author = std::move(val); break;
      case Slot::name: fields.name = std::move(val); break;
      case Slot::id: fields.id = std::move(val); break;
      case Slot::link_id: fields.link_id = std::move(val); break;
      case Slot::parent_id: fields.parent_id = std::move(val); break;
      case Slot::body: fields.body = std::move(val); break;
      case Slot::title: fields.title = std::move(val); break;
      case Slot::selftext: fields.selftext = std::move(val); break;
      case Slot::created_utc: {
        // Old dumps carry timestamps as strings, sometimes in float form.
        auto parsed = parse_epoch(val);
        if (parsed) {
          fields.created_utc = *parsed;
        } else {
          fields.created_utc_invalid = true;
        }
        break;
      }
      case Slot::num_comments: {
        if (auto parsed = parse_epoch(val)) fields.num_comments = *parsed;
        break;
      }
      case Slot::score: {
        if (auto parsed = parse_epoch(val)) fields.score = *parsed;
        break;
      }
      case Slot::none: break;
    }
  }

  bool set_number(double d, std::optional<std::int64_t> as_int) {
    if (depth_ == 0) return top_level_scalar();
    if (depth_ == 1) {
      switch (slot_) {
        case Slot::created_utc:
          if (as_int) {
            fields.created_utc = *as_int;
          } else {
            fields.created_utc_invalid = true;
          }
          break;
        case Slot::num_comments:
          if (as_int) fields.num_comments = *as_int;
          break;
        case Slot::score:
          if (as_int) fields.score = *as_int;
          break;
        default:
          (void)d;
          break;
      }
    }
    slot_ = Slot::none;
    return true;
  }

  static std::optional<std::int64_t> parse_epoch(std::string_view s) {
    if (s.empty()) return std::nullopt;
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && p == s.data() + s.size()) return v;
    // Accept "1199145600.0" style values.
    double d = 0;
    auto [pd, ecd] = std::from_chars(s.data(), s.data() + s.size(), d);
    if (ecd == std::errc() && pd == s.data() + s.size() && std::isfinite(d) &&
        d == std::floor(d) && std::abs(d) < 9.2e18) {
      return static_cast<std::int64_t>(d);
    }
    return std::nullopt;
  }

  int depth_ = 0;
  Slot slot_ = Slot::none;
};

inline Result<LineSax::Fields> scan_line(std::string_view line) {
  LineSax sax;
  const bool ok = nlohmann::json::sax_parse(line, &sax);
  if (!ok || sax.not_object) {
    return make_error(Errc::malformed_json,
                      sax.not_object ? "row is not an object" : sax.parse_error_msg);
  }
  return std::move(sax.fields);
}

inline std::optional<std::int32_t> to_score(const std::optional<std::int64_t>& v) {
  if (!v) return std::nullopt;
  if (*v > std::numeric_limits<std::int32_t>::max() ||
      *v < std::numeric_limits<std::int32_t>::min()) {
    return std::nullopt;
  }
  return static_cast<std::int32_t>(*v);
}

}  // namespace detail

// Counts Unicode scalar values, not bytes. Invalid sequences degrade to a
// byte count for the offending bytes, which is the closest sane reading.
inline std::uint32_t utf8_length(std::string_view s) {
  std::uint32_t n = 0;
  for (unsigned char c : s) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

inline Result<PostRecord> parse_post_line(std::string_view line,
                                          const IdPolicy& ids = {}) {
  auto fields = detail::scan_line(line);
  if (!fields) return fields.error();
  auto& f = *fields;

  PostRecord rec;
  if (f.name && !f.name->empty()) {
    rec.id = std::move(*f.name);
  } else if (f.id && !f.id->empty()) {
    rec.id = std::move(*f.id);
  } else {
    return make_error(Errc::missing_field, "name");
  }

  if (f.created_utc_invalid) return make_error(Errc::invalid_timestamp, rec.id);
  if (!f.created_utc) return make_error(Errc::missing_field, "created_utc");
  if (*f.created_utc <= 0) return make_error(Errc::invalid_timestamp, rec.id);
  rec.created_utc = *f.created_utc;

  rec.author = f.author ? std::move(*f.author) : std::string{};
  rec.deleted_author = is_deleted_author(rec.author);

  if (f.num_comments && *f.num_comments > 0) {
    rec.declared_num_comments = static_cast<std::uint32_t>(
        std::min<std::int64_t>(*f.num_comments,
                               std::numeric_limits<std::uint32_t>::max()));
  }
  rec.score = detail::to_score(f.score);

  if (f.title && !f.title->empty()) {
    rec.body_or_title = std::move(*f.title);
  } else if (f.selftext) {
    rec.body_or_title = std::move(*f.selftext);
  }

  (void)ids;
  return rec;
}

inline Result<CommentRecord> parse_comment_line(std::string_view line,
                                                const IdPolicy& ids = {}) {
  auto fields = detail::scan_line(line);
  if (!fields) return fields.error();
  auto& f = *fields;

  CommentRecord rec;
  if (f.name && !f.name->empty()) {
    rec.id = std::move(*f.name);
  } else if (f.id && !f.id->empty()) {
    rec.id = std::move(*f.id);
  } else {
    return make_error(Errc::missing_field, "name");
  }

  if (f.created_utc_invalid) return make_error(Errc::invalid_timestamp, rec.id);
  if (!f.created_utc) return make_error(Errc::missing_field, "created_utc");
  if (*f.created_utc <= 0) return make_error(Errc::invalid_timestamp, rec.id);
  rec.created_utc = *f.created_utc;

  if (!f.link_id || f.link_id->empty()) {
    return make_error(Errc::missing_field, "link_id");
  }
  rec.link_id = std::move(*f.link_id);

  // Very old rows omit parent_id on first-level comments.
  rec.parent_id = (f.parent_id && !f.parent_id->empty()) ? std::move(*f.parent_id)
                                                         : rec.link_id;
  if (!parent_is_post_level(rec.parent_id, rec.link_id, ids) &&
      ids.same_id(rec.parent_id, rec.id)) {
    return make_error(Errc::self_parent, rec.id);
  }

  rec.author = f.author ? std::move(*f.author) : std::string{};
  rec.deleted_author = is_deleted_author(rec.author);
  rec.body = f.body ? std::move(*f.body) : std::string{};
  rec.removed = rec.body == kRemovedBody;
  rec.score = detail::to_score(f.score);
  return rec;
}

}  // namespace threadlens
