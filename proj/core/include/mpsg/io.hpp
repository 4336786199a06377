#pragma once

#include <istream>
#include <string>

#include "mpsg/grid.hpp"

namespace mpsg {

/// Line-oriented reader shared by the grid-function and trajectory parsers.
/// Skips blank lines and `#` comments and keeps the current line number for
/// error messages.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::string& line);
  std::size_t line() const noexcept { return line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
};

/// Reads one GridFunction record and stops after its last value.
GridFunction read_grid_function(LineReader& reader);

}  // namespace mpsg
