#include <fstream>
#include <istream>
#include <ostream>
#include <iterator>
#include <optional>
#include <sstream>

#include "mpsg/errors.hpp"
#include "mpsg/grid.hpp"
#include "mpsg/io.hpp"

namespace mpsg {

namespace {

std::string axis_fields(const Axis& a) {
  return format_double(a.lo) + " " + format_double(a.hi) + " " + std::to_string(a.n) + " " + (a.periodic ? "1" : "0");
}

double parse_real(const std::string& tok, std::size_t line, const char* what) {
  try {
    return parse_max_scalar(tok).finite_value();
  } catch (const std::exception&) {
    throw ParseError(std::string("bad ") + what + " '" + tok + "'", line);
  }
}

Axis parse_axis(std::istringstream& in, std::size_t line) {
  std::string lo, hi, n, per;
  if (!(in >> lo >> hi >> n >> per)) throw ParseError("grid header needs xmin xmax n periodic", line);
  Axis a;
  a.lo = parse_real(lo, line, "xmin");
  a.hi = parse_real(hi, line, "xmax");
  try {
    std::size_t pos = 0;
    const long long cells = std::stoll(n, &pos);
    if (pos != n.size() || cells < 2) throw std::invalid_argument("n");
    a.n = static_cast<std::size_t>(cells);
  } catch (const std::exception&) {
    throw ParseError("bad cell count '" + n + "'", line);
  }
  if (per == "1" || per == "true") {
    a.periodic = true;
  } else if (per == "0" || per == "false") {
    a.periodic = false;
  } else {
    throw ParseError("bad periodic flag '" + per + "'", line);
  }
  return a;
}

}  // namespace

std::string grid_header(const Grid& grid) {
  std::string h = "grid " + axis_fields(grid.axis(0));
  if (grid.dim() == 2) h += " " + axis_fields(grid.axis(1));
  return h;
}

void write_grid_function(std::ostream& out, const GridFunction& f) {
  out << grid_header(f.grid()) << '\n';
  for (double v : f.values()) out << format_double(v) << '\n';
}

bool LineReader::next(std::string& line) {
  while (std::getline(in_, line)) {
    ++line_;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    return true;
  }
  return false;
}

GridFunction read_grid_function(LineReader& reader) {
  std::string line;
  if (!reader.next(line)) throw ParseError("missing grid header", reader.line());
  const std::size_t header_line = reader.line();
  std::istringstream head(line);
  std::string tag;
  head >> tag;
  if (tag != "grid") throw ParseError("expected 'grid' header, found '" + tag + "'", header_line);
  const Axis x = parse_axis(head, header_line);
  std::string extra;
  std::optional<Axis> y;
  if (head >> extra) {
    std::istringstream rest(extra + " " + std::string(std::istreambuf_iterator<char>(head), {}));
    y = parse_axis(rest, header_line);
    if (rest >> extra) throw ParseError("trailing tokens in grid header", header_line);
  }
  Grid grid = [&] {
    try {
      return y ? Grid(x, *y) : Grid(x.lo, x.hi, x.n, x.periodic);
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), header_line);
    }
  }();

  std::vector<double> values;
  values.reserve(grid.size());
  while (values.size() < grid.size()) {
    if (!reader.next(line))
      throw ParseError("expected " + std::to_string(grid.size()) + " values, found " + std::to_string(values.size()),
                       reader.line());
    std::istringstream row(line);
    std::string tok;
    while (row >> tok) {
      if (values.size() == grid.size())
        throw ParseError("more than " + std::to_string(grid.size()) + " values", reader.line());
      try {
        values.push_back(parse_max_scalar(tok).raw());
      } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), reader.line());
      }
    }
  }
  return GridFunction(std::move(grid), std::move(values));
}

GridFunction read_grid_function(std::istream& in) {
  LineReader reader(in);
  return read_grid_function(reader);
}

void write_grid_function(const std::filesystem::path& path, const GridFunction& f) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_grid_function(out, f);
}

GridFunction read_grid_function(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return read_grid_function(in);
  } catch (const ParseError& e) {
    throw ParseError(e.detail(), e.line(), path.string());
  }
}

}  // namespace mpsg
