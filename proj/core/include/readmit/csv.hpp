#pragma once

#include <cstddef>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace readmit::csv {

// Streaming RFC 4180 reader: double-quoted fields, doubled quotes as escapes,
// embedded separators and newlines inside quotes, LF or CRLF record endings.
class Reader {
 public:
  explicit Reader(std::istream& in, char separator = ',') : in_(in), sep_(separator) {}

  // Reads the next record into `fields`. Returns false at end of input.
  bool next(std::vector<std::string>& fields);

  // Physical line number (1-based) where the last returned record started.
  std::size_t line() const noexcept { return record_line_; }

 private:
  std::istream& in_;
  char sep_;
  std::size_t line_ = 1;
  std::size_t record_line_ = 0;
};

// Quotes a field only when it contains the separator, a quote, or a newline.
std::string escape(std::string_view field, char separator = ',');

void write_row(std::ostream& out, std::span<const std::string> fields, char separator = ',');

std::string trim(std::string_view s);

}  // namespace readmit::csv
