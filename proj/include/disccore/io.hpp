#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "disccore/family.hpp"
#include "disccore/point.hpp"
#include "disccore/queries.hpp"

namespace disccore {

class parse_error : public std::runtime_error {
 public:
  parse_error(size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  size_t line() const { return line_; }

 private:
  size_t line_;
};

struct input_options {
  std::optional<size_t> label_col;  // CSV only
  norm_policy policy = norm_policy::reject;
};

// CSV (one point per row) or NDJSON ({"x":[...],"y":+/-1}); the format is
// detected from the first non-blank line. Labels fold and norms are
// enforced per the family (prepare_point). Errors carry 1-based line numbers.
std::vector<data_point> read_points(std::istream& in, const function_family& family,
                                    const input_options& options = {});

// CSV rows interpreted as raw query vectors.
query_set read_queries(std::istream& in, size_t expected_dim);

std::string read_file(const std::string& path);  // "-" reads stdin
void write_file(const std::string& path, const std::string& content);

}  // namespace disccore
