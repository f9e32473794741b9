#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wikiprof {

// File could not be opened, read or written.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A stage input failed validation; `line` is 1-based, 0 when not applicable.
struct SchemaError : std::runtime_error {
  SchemaError(const std::string& field_name, std::size_t line_no, const std::string& detail)
      : std::runtime_error(describe(field_name, line_no, detail)),
        field(field_name),
        line(line_no) {}

  std::string field;
  std::size_t line;

 private:
  static std::string describe(const std::string& f, std::size_t l, const std::string& d) {
    std::string out = "schema error";
    if (l > 0) out += " at line " + std::to_string(l);
    out += ", field '" + f + "': " + d;
    return out;
  }
};

}  // namespace wikiprof
