#pragma once

#include <cstddef>
#include <istream>
#include <iterator>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "famine/error.hpp"

namespace famine::csv {

using Record = std::vector<std::string>;

/// Streaming RFC 4180 reader: comma separated, double-quote quoting with ""
/// escapes, quoted fields may span lines, CRLF or LF line endings.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  /// Reads the next record. Returns false at end of input. Blank lines are skipped.
  bool next(Record& out) {
    out.clear();
    std::string field;
    bool in_quotes = false;
    bool field_was_quoted = false;
    bool any = false;
    int ch = 0;
    while ((ch = in_.get()) != std::char_traits<char>::eof()) {
      any = true;
      const char c = static_cast<char>(ch);
      if (in_quotes) {
        if (c == '"') {
          if (in_.peek() == '"') {
            in_.get();
            field.push_back('"');
          } else {
            in_quotes = false;
          }
        } else {
          if (c == '\n') ++line_;
          field.push_back(c);
        }
        continue;
      }
      if (c == '"') {
        if (!field.empty() || field_was_quoted)
          throw DataError("csv: stray quote in unquoted field at line " + std::to_string(line_));
        in_quotes = true;
        field_was_quoted = true;
      } else if (c == ',') {
        out.push_back(std::move(field));
        field.clear();
        field_was_quoted = false;
      } else if (c == '\r' || c == '\n') {
        if (c == '\r' && in_.peek() == '\n') in_.get();
        ++line_;
        if (out.empty() && field.empty() && !field_was_quoted) {
          any = false;  // blank line
          continue;
        }
        out.push_back(std::move(field));
        ++records_;
        return true;
      } else {
        if (field_was_quoted)
          throw DataError("csv: text after closing quote at line " + std::to_string(line_));
        field.push_back(c);
      }
    }
    if (in_quotes) throw DataError("csv: unterminated quoted field at line " + std::to_string(line_));
    if (!any) return false;
    out.push_back(std::move(field));
    ++records_;
    return true;
  }

  /// 1-based physical line number of the next unread line.
  std::size_t line() const noexcept { return line_; }
  std::size_t records() const noexcept { return records_; }

 private:
  std::istream& in_;
  std::size_t line_ = 1;
  std::size_t records_ = 0;
};

inline std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline void write_record(std::ostream& out, const Record& record) {
  for (std::size_t i = 0; i < record.size(); ++i) {
    if (i) out << ',';
    out << escape(record[i]);
  }
  out << '\n';
}

}  // namespace famine::csv
