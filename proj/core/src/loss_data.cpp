#include "cococat/loss_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "cococat/errors.hpp"

namespace cococat {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  for (;;) {
    const auto comma = line.find(',', pos);
    out.push_back(trim(line.substr(pos, comma - pos)));
    if (comma == std::string_view::npos) return out;
    pos = comma + 1;
  }
}

double parse_number(std::string_view s, std::size_t line, const char* what) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, v);
  if (s.empty() || r.ec != std::errc() || r.ptr != end || !std::isfinite(v)) {
    throw ParseError(std::string("malformed ") + what + " '" + std::string(s) + "'", line);
  }
  return v;
}

Date parse_date_at(std::string_view s, std::size_t line) {
  try {
    return parse_date(s);
  } catch (const ParameterError& e) {
    throw ParseError(e.what(), line);
  }
}

}  // namespace

Date parse_date(std::string_view text) {
  int y = 0;
  unsigned m = 0, d = 0;
  auto num = [&](std::string_view part, auto& out) {
    const auto r = std::from_chars(part.data(), part.data() + part.size(), out);
    return r.ec == std::errc() && r.ptr == part.data() + part.size();
  };
  if (text.size() != 10 || text[4] != '-' || text[7] != '-' || !num(text.substr(0, 4), y) ||
      !num(text.substr(5, 2), m) || !num(text.substr(8, 2), d)) {
    throw ParameterError("date must be YYYY-MM-DD, got '" + std::string(text) + "'");
  }
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                        std::chrono::day{d}};
  if (!ymd.ok()) throw ParameterError("invalid calendar date '" + std::string(text) + "'");
  return Date{ymd};
}

std::string format_date(Date d) {
  const std::chrono::year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

double year_fraction(Date from, Date to) { return (to - from).count() / 365.25; }

std::vector<double> LossDataset::region1() const {
  std::vector<double> v;
  for (const auto& r : records) v.push_back(r.loss1);
  return v;
}

std::vector<double> LossDataset::region2() const {
  std::vector<double> v;
  for (const auto& r : records) v.push_back(r.loss2);
  return v;
}

std::vector<double> LossDataset::totals() const {
  std::vector<double> v;
  for (const auto& r : records) v.push_back(r.loss1 + r.loss2);
  return v;
}

std::vector<double> LossDataset::event_times() const {
  std::vector<double> v;
  for (const auto& r : records) v.push_back(year_fraction(start, r.date));
  return v;
}

LossDataset parse_losses(std::istream& in, std::optional<Window> window) {
  std::string line;
  std::size_t n = 0;
  if (!std::getline(in, line)) throw ParseError("empty loss file", 1);
  ++n;
  const auto header = split(line);
  if (header.size() != 3 || header[0] != "date" || header[1] != "loss_region1" ||
      header[2] != "loss_region2") {
    throw ParseError("header must be 'date,loss_region1,loss_region2'", n);
  }
  LossDataset data;
  while (std::getline(in, line)) {
    ++n;
    if (trim(line).empty()) continue;
    const auto f = split(line);
    if (f.size() != 3) throw ParseError("expected 3 fields", n);
    LossRecord r{parse_date_at(f[0], n), parse_number(f[1], n, "loss_region1"),
                 parse_number(f[2], n, "loss_region2")};
    if (r.loss1 < 0.0 || r.loss2 < 0.0) throw ParseError("losses must be >= 0", n);
    if (!data.records.empty() && r.date < data.records.back().date) {
      throw ParseError("dates must be nondecreasing", n);
    }
    data.records.push_back(r);
  }
  if (data.records.empty()) throw ParseError("no loss records", n);
  using namespace std::chrono;
  if (window) {
    if (!(window->start < window->end)) throw ConfigurationError("window start must precede end");
    if (data.records.front().date < window->start || data.records.back().date > window->end) {
      throw ConfigurationError("observation window does not cover every event");
    }
    data.start = window->start;
    data.end = window->end;
  } else {
    const year_month_day first{data.records.front().date};
    const year_month_day last{data.records.back().date};
    data.start = sys_days{first.year() / January / 1};
    data.end = sys_days{last.year() / December / 31};
  }
  return data;
}

LossDataset load_losses(const std::filesystem::path& path, std::optional<Window> window) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open loss file " + path.string());
  return parse_losses(in, window);
}

void write_losses(std::ostream& out, const LossDataset& data) {
  out << "date,loss_region1,loss_region2\n";
  char buf[128];
  for (const auto& r : data.records) {
    std::snprintf(buf, sizeof buf, ",%.17g,%.17g\n", r.loss1, r.loss2);
    out << format_date(r.date) << buf;
  }
}

std::vector<IndexPoint> parse_index(std::istream& in) {
  std::string line;
  std::size_t n = 0;
  if (!std::getline(in, line)) throw ParseError("empty index file", 1);
  ++n;
  const auto header = split(line);
  if (header.size() != 2 || header[0] != "date" || header[1] != "index") {
    throw ParseError("header must be 'date,index'", n);
  }
  std::vector<IndexPoint> out;
  while (std::getline(in, line)) {
    ++n;
    if (trim(line).empty()) continue;
    const auto f = split(line);
    if (f.size() != 2) throw ParseError("expected 2 fields", n);
    IndexPoint p{parse_date_at(f[0], n), parse_number(f[1], n, "index")};
    if (!(p.index > 0.0)) throw ParseError("index values must be positive", n);
    if (!out.empty() && !(out.back().date < p.date)) throw ParseError("index dates must increase", n);
    out.push_back(p);
  }
  if (out.empty()) throw ParseError("no index records", n);
  return out;
}

std::vector<IndexPoint> load_index(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open index file " + path.string());
  return parse_index(in);
}

LossDataset adjust_cpi(const LossDataset& data, const std::vector<IndexPoint>& index,
                       Date reference) {
  if (index.empty()) throw CoverageError("empty index series");
  auto lookup = [&](Date d) {
    if (d < index.front().date) {
      throw CoverageError("index series starts after " + format_date(d));
    }
    auto it = std::upper_bound(index.begin(), index.end(), d,
                               [](Date x, const IndexPoint& p) { return x < p.date; });
    return std::prev(it)->index;
  };
  const double ref = lookup(reference);
  LossDataset out = data;
  for (auto& r : out.records) {
    const double f = ref / lookup(r.date);
    r.loss1 *= f;
    r.loss2 *= f;
  }
  return out;
}

}  // namespace cococat
