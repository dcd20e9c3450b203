#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "threadlens/records.hpp"

namespace threadlens {

// Shortest round-trip representation; integral doubles print without a
// fractional part ("123", not "123.0"). All report numbers go through here so
// reruns produce identical bytes.
inline std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, p);
}

inline std::string format_int(std::int64_t v) {
  char buf[24];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, p);
}

inline std::string format_uint(std::uint64_t v) {
  char buf[24];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, p);
}

enum class TableFormat { csv, ndjson };

inline const char* table_format_extension(TableFormat f) {
  return f == TableFormat::csv ? ".csv" : ".ndjson";
}

// One table cell; monostate renders as an empty CSV field / JSON null.
using Cell = std::variant<std::monostate, std::string, std::int64_t, std::uint64_t, double, bool>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> cells) { rows.push_back(std::move(cells)); }
};

namespace detail {

inline void append_csv_field(std::string& out, std::string_view s) {
  const bool quote = s.find_first_of(",\"\n\r") != std::string_view::npos;
  if (!quote) {
    out.append(s);
    return;
  }
  out.push_back('"');
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
}

inline void append_json_string(std::string& out, std::string_view s) {
  out.push_back('"');
  for (unsigned char c : s) {
    switch (c) {
      case '"': out.append("\\\""); break;
      case '\\': out.append("\\\\"); break;
      case '\n': out.append("\\n"); break;
      case '\r': out.append("\\r"); break;
      case '\t': out.append("\\t"); break;
      case '\b': out.append("\\b"); break;
      case '\f': out.append("\\f"); break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out.append(buf);
        } else {
          out.push_back(static_cast<char>(c));
        }
    }
  }
  out.push_back('"');
}

inline void append_cell_csv(std::string& out, const Cell& c) {
  if (std::holds_alternative<std::monostate>(c)) {
  } else if (const auto* s = std::get_if<std::string>(&c)) {
    append_csv_field(out, *s);
  } else if (const auto* i = std::get_if<std::int64_t>(&c)) {
    out.append(format_int(*i));
  } else if (const auto* u = std::get_if<std::uint64_t>(&c)) {
    out.append(format_uint(*u));
  } else if (const auto* d = std::get_if<double>(&c)) {
    out.append(format_double(*d));
  } else {
    out.append(std::get<bool>(c) ? "true" : "false");
  }
}

inline void append_cell_json(std::string& out, const Cell& c) {
  if (std::holds_alternative<std::monostate>(c)) {
    out.append("null");
  } else if (const auto* s = std::get_if<std::string>(&c)) {
    append_json_string(out, *s);
  } else if (const auto* i = std::get_if<std::int64_t>(&c)) {
    out.append(format_int(*i));
  } else if (const auto* u = std::get_if<std::uint64_t>(&c)) {
    out.append(format_uint(*u));
  } else if (const auto* d = std::get_if<double>(&c)) {
    out.append(format_double(*d));
  } else {
    out.append(std::get<bool>(c) ? "true" : "false");
  }
}

}  // namespace detail

inline std::string render_table(const Table& t, TableFormat format) {
  std::string out;
  if (format == TableFormat::csv) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
      if (i) out.push_back(',');
      detail::append_csv_field(out, t.columns[i]);
    }
    out.push_back('\n');
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out.push_back(',');
        detail::append_cell_csv(out, row[i]);
      }
      out.push_back('\n');
    }
  } else {
    for (const auto& row : t.rows) {
      out.push_back('{');
      for (std::size_t i = 0; i < row.size() && i < t.columns.size(); ++i) {
        if (i) out.push_back(',');
        detail::append_json_string(out, t.columns[i]);
        out.push_back(':');
        detail::append_cell_json(out, row[i]);
      }
      out.append("}\n");
    }
  }
  return out;
}

inline Result<bool> write_text_file(const std::string& path, std::string_view content) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) return make_error(Errc::io_error, "cannot open for writing: " + path);
  const std::size_t written = content.empty() ? 0 : std::fwrite(content.data(), 1, content.size(), f);
  const bool wrote = written == content.size();
  const bool closed = std::fclose(f) == 0;
  if (!wrote || !closed) return make_error(Errc::io_error, "short write: " + path);
  return true;
}

inline Result<bool> write_table(const std::string& path, const Table& t, TableFormat format) {
  return write_text_file(path, render_table(t, format));
}

}  // namespace threadlens
