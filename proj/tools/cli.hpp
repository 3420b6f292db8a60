#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "friable/magnitude.hpp"

namespace friable::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kVerifyFailed = 1;
inline constexpr int kUsage = 2;
inline constexpr int kResource = 3;

/// A cell of an output row. monostate prints as an empty CSV field / JSON null.
using Value = std::variant<std::monostate, bool, std::int64_t, std::uint64_t, double, std::string>;

struct Row {
  std::vector<std::pair<std::string, Value>> cells;

  Row& set(std::string key, Value v);
  template <class T>
  Row& set(std::string key, const std::optional<T>& v) {
    return v ? set(std::move(key), Value(*v)) : set(std::move(key), Value());
  }
};

enum class Format { csv, json };

/// Header from the first row; every row must have the same keys in the same order.
void write_csv(std::ostream& out, const std::vector<Row>& rows);
/// One object per line. Non-finite reals become null and are listed under "nonfinite".
void write_json(std::ostream& out, const std::vector<Row>& rows);

std::string format_real(double v);

/// Decimal integer ("1000000"), real ("1e6", "2.5e9") or anything std::stod takes.
/// Integral values below 2^63 keep their exact integer.
Magnitude parse_magnitude(const std::string& text);

/// Comma list of numbers and a:b:mult geometric ranges, e.g. "1e4:1e8:10,3e8".
std::vector<double> parse_values(const std::string& text);

struct GridPoint {
  Magnitude x = Magnitude::from_integer(1);
  std::uint64_t y = 0;
  double h = 0.0;
};

/// Semicolon separated axes "x=...;y=...[;h=...]" (or logx= instead of x=).
/// Points are the cartesian product in x-major order.
std::vector<GridPoint> parse_grid(const std::string& spec);

/// Runs the command line; results go to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace friable::cli
