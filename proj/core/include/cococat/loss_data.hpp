#pragma once

#include <chrono>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cococat {

using Date = std::chrono::sys_days;

// Strict YYYY-MM-DD.
Date parse_date(std::string_view text);
std::string format_date(Date d);
// Actual days / 365.25.
double year_fraction(Date from, Date to);

struct LossRecord {
  Date date;
  double loss1;  // region 1, inflation adjusted
  double loss2;  // region 2
  bool operator==(const LossRecord&) const = default;
};

struct LossDataset {
  std::vector<LossRecord> records;  // nondecreasing dates
  Date start;
  Date end;

  double years() const { return year_fraction(start, end); }
  std::vector<double> region1() const;
  std::vector<double> region2() const;
  std::vector<double> totals() const;
  // Event times in years since `start`.
  std::vector<double> event_times() const;
  bool operator==(const LossDataset&) const = default;
};

struct Window {
  Date start;
  Date end;
};

// CSV with header `date,loss_region1,loss_region2`. Without an explicit
// window the dataset spans Jan 1 of the first event year to Dec 31 of the
// last event year.
LossDataset parse_losses(std::istream& in, std::optional<Window> window = std::nullopt);
LossDataset load_losses(const std::filesystem::path& path,
                        std::optional<Window> window = std::nullopt);
void write_losses(std::ostream& out, const LossDataset& data);

struct IndexPoint {
  Date date;
  double index;
};

// CSV with header `date,index`; dates strictly increasing, values positive.
std::vector<IndexPoint> parse_index(std::istream& in);
std::vector<IndexPoint> load_index(const std::filesystem::path& path);

// Restates every loss in money of `reference`: loss * I(reference) / I(date),
// where I is the step function of the index series (last value on or before
// the date).
LossDataset adjust_cpi(const LossDataset& data, const std::vector<IndexPoint>& index,
                       Date reference);

}  // namespace cococat
