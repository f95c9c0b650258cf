#include "cococat_cli/grid.hpp"

#include <charconv>
#include <cmath>

#include "cococat/errors.hpp"

namespace cococat::cli {
namespace {

double to_number(std::string s, const std::string& spec) {
  while (!s.empty() && s.front() == ' ') s.erase(s.begin());
  while (!s.empty() && s.back() == ' ') s.pop_back();
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || end != s.data() + s.size() || !std::isfinite(v)) {
    throw ConfigurationError("bad grid value '" + s + "' in '" + spec + "'");
  }
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::vector<double> parse_grid(const std::string& spec) {
  if (spec.find_first_not_of(' ') == std::string::npos) throw ConfigurationError("empty grid");
  if (spec.find(':') != std::string::npos) {
    const auto parts = split(spec, ':');
    if (parts.size() != 3) throw ConfigurationError("range grid must be start:stop:count, got '" + spec + "'");
    const double a = to_number(parts[0], spec);
    const double b = to_number(parts[1], spec);
    const double n = to_number(parts[2], spec);
    if (n < 1 || n != std::floor(n)) throw ConfigurationError("grid count must be a positive integer in '" + spec + "'");
    const int count = static_cast<int>(n);
    if (count == 1) return {a};
    std::vector<double> out(count);
    for (int i = 0; i < count; ++i) out[i] = a + (b - a) * i / (count - 1);
    out.back() = b;
    return out;
  }
  std::vector<double> out;
  for (const auto& p : split(spec, ',')) out.push_back(to_number(p, spec));
  return out;
}

}  // namespace cococat::cli
