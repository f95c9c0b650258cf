#include "cococat/convolution.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <mutex>

#include <boost/math/distributions/poisson.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <fftw3.h>

#include "cococat/errors.hpp"
#include "cococat/quadrature.hpp"

namespace cococat {
namespace {

// FFTW planning is not thread safe; execution with the new-array interface is.
struct PlanPair {
  fftw_plan forward;
  fftw_plan backward;
};

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

struct AlignedReal {
  explicit AlignedReal(std::size_t n) : data(fftw_alloc_real(n)), size(n) {}
  ~AlignedReal() { fftw_free(data); }
  AlignedReal(const AlignedReal&) = delete;
  AlignedReal& operator=(const AlignedReal&) = delete;
  double* data;
  std::size_t size;
};

struct AlignedComplex {
  explicit AlignedComplex(std::size_t n) : data(fftw_alloc_complex(n)), size(n) {}
  ~AlignedComplex() { fftw_free(data); }
  AlignedComplex(const AlignedComplex&) = delete;
  AlignedComplex& operator=(const AlignedComplex&) = delete;
  fftw_complex* data;
  std::size_t size;
};

const PlanPair& plans_for(int length) {
  static std::map<int, PlanPair> cache;
  std::lock_guard lock(plan_mutex());
  auto it = cache.find(length);
  if (it != cache.end()) return it->second;
  AlignedReal r(length);
  AlignedComplex c(length / 2 + 1);
  PlanPair p{fftw_plan_dft_r2c_1d(length, r.data, c.data, FFTW_ESTIMATE),
             fftw_plan_dft_c2r_1d(length, c.data, r.data, FFTW_ESTIMATE)};
  return cache.emplace(length, p).first->second;
}

int next_pow2(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Masses of the n-fold convolutions for n = 0..n_max on `points` cells.
// Returns one cumulative row per n (cdf estimate at each grid point).
std::vector<std::vector<double>> convolve_rows(const std::vector<double>& masses, int n_max,
                                               int& live_rows,
                                               std::vector<std::vector<double>>* keep = nullptr) {
  const int points = static_cast<int>(masses.size());
  const int length = next_pow2(2 * points);
  const auto& plans = plans_for(length);
  const int spectrum = length / 2 + 1;

  AlignedReal work(length);
  AlignedComplex base(spectrum);
  AlignedComplex current(spectrum);

  std::fill(work.data, work.data + length, 0.0);
  std::copy(masses.begin(), masses.end(), work.data);
  fftw_execute_dft_r2c(plans.forward, work.data, base.data);

  auto cumulative = [points](const double* p) {
    // F(kh) ~ sum_{j<k} p_j + p_k / 2: the half-cell rule centres the atom.
    std::vector<double> row(points);
    double acc = 0.0;
    for (int k = 0; k < points; ++k) {
      row[k] = acc + 0.5 * p[k];
      acc += p[k];
    }
    row[0] = 0.0;
    return row;
  };

  std::vector<std::vector<double>> rows;
  rows.reserve(n_max + 1);
  rows.push_back(std::vector<double>(points, 1.0));
  live_rows = n_max;
  if (n_max == 0) return rows;

  std::vector<double> p(masses);
  rows.push_back(cumulative(p.data()));
  if (keep) {
    keep->assign(1, std::vector<double>{});
    keep->push_back(p);
  }
  const double inv = 1.0 / length;
  for (int n = 2; n <= n_max; ++n) {
    std::fill(work.data, work.data + length, 0.0);
    std::copy(p.begin(), p.end(), work.data);
    fftw_execute_dft_r2c(plans.forward, work.data, current.data);
    for (int k = 0; k < spectrum; ++k) {
      const std::complex<double> a(current.data[k][0], current.data[k][1]);
      const std::complex<double> b(base.data[k][0], base.data[k][1]);
      const auto c = a * b;
      current.data[k][0] = c.real();
      current.data[k][1] = c.imag();
    }
    fftw_execute_dft_c2r(plans.backward, current.data, work.data);
    double total = 0.0;
    for (int k = 0; k < points; ++k) {
      p[k] = std::max(0.0, work.data[k] * inv);
      total += p[k];
    }
    rows.push_back(cumulative(p.data()));
    if (keep) keep->push_back(p);
    if (total < 1e-300) {
      live_rows = n;
      break;
    }
  }
  return rows;
}

}  // namespace

int poisson_truncation(double mean, double tail) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) throw ParameterError("Poisson mean must be >= 0");
  if (mean == 0.0) return 0;
  int n = 0;
  // P(N > n) = P(Gamma(n+1) <= mean), the regularized lower incomplete gamma.
  while (boost::math::gamma_p(n + 1.0, mean) >= tail) {
    ++n;
    if (n > 100000) throw NumericalError("Poisson truncation did not terminate", tail);
  }
  return n;
}

std::vector<double> discretize(const SeverityDistribution& dist, double h, int points) {
  std::vector<double> m(points);
  double previous = cdf(dist, 0.5 * h);
  m[0] = previous;
  for (int j = 1; j < points; ++j) {
    const double next = cdf(dist, (j + 0.5) * h);
    m[j] = std::max(0.0, next - previous);
    previous = next;
  }
  return m;
}

namespace {

// Cell masses for tilted laws straight from the base cdf, which avoids one
// adaptive integral per grid point:
// int_a^b e^{-ty} dF = e^{-tb} F(b) - e^{-ta} F(a) + t int_a^b e^{-ty} F(y) dy.
std::vector<double> discretize_fast(const SeverityDistribution& dist, double h, int points) {
  const auto* t = std::get_if<Tilted>(&dist.family());
  if (!t) return discretize(dist, h, points);
  const auto& base = *t->base;
  const double theta = t->theta;
  const auto& rule = gauss_legendre(3);
  const auto& check = gauss_legendre(4);
  auto edge = [&](double y) { return std::exp(-theta * y) * cdf(base, y); };
  // Cells much wider than the law's own scale (near zero, or on a huge grid)
  // are not resolved by three nodes; bisect those.
  std::function<double(double, double, int)> inner = [&](double a, double b, int depth) {
    const double coarse = integrate(rule, edge, a, b);
    if (depth == 0 || std::abs(integrate(check, edge, a, b) - coarse) * theta <= 1e-14) return coarse;
    const double mid = 0.5 * (a + b);
    return inner(a, mid, depth - 1) + inner(mid, b, depth - 1);
  };
  auto cell = [&](double a, double b) {
    return (edge(b) - edge(a) + theta * inner(a, b, 60)) / t->normalization;
  };
  std::vector<double> m(points);
  m[0] = cell(0.0, 0.5 * h);
  for (int j = 1; j < points; ++j) m[j] = std::max(0.0, cell((j - 0.5) * h, (j + 0.5) * h));
  return m;
}

}  // namespace

NfoldTable::NfoldTable(const SeverityDistribution& dist, double x_max, int n_max,
                       const ConvolutionOptions& options)
    : dist_(dist), x_max_(x_max), n_max_(n_max), points_(options.grid_points) {
  if (!(x_max > 0.0) || !std::isfinite(x_max)) throw ParameterError("x_max must be positive");
  if (n_max < 0) throw ParameterError("n_max must be >= 0");
  if (points_ < 16) throw ParameterError("grid needs at least 16 points");
  h_ = x_max / (points_ - 1);
  rows_ = convolve_rows(discretize_fast(dist, h_, points_), n_max, live_rows_,
                        options.keep_masses ? &masses_ : nullptr);

  if (options.check_grid && n_max >= 2) {
    const int coarse_points = points_ / 2 + 1;
    const double coarse_h = x_max / (coarse_points - 1);
    int coarse_live = 0;
    const auto coarse =
        convolve_rows(discretize_fast(dist, coarse_h, coarse_points), n_max, coarse_live);
    for (int n = 2; n < static_cast<int>(std::min(rows_.size(), coarse.size())); ++n) {
      grid_error_ = std::max(grid_error_, std::abs(rows_[n].back() - coarse[n].back()));
    }
    if (grid_error_ > options.grid_tolerance) {
      throw NumericalError("convolution grid too coarse for the requested tolerance",
                           grid_error_);
    }
  }
}

double NfoldTable::cdf(int n, double x) const {
  if (n < 0 || n > n_max_) throw ParameterError("convolution order outside the table");
  if (x < 0.0) return 0.0;
  if (n == 0) return 1.0;
  if (n == 1) return cococat::cdf(dist_, x);
  if (x > x_max_ * (1.0 + 1e-12)) throw ParameterError("argument beyond the convolution grid");
  if (n >= static_cast<int>(rows_.size())) return 0.0;
  const auto& row = rows_[n];
  const double u = std::min(x / h_, static_cast<double>(points_ - 1));
  const int k = std::min(static_cast<int>(u), points_ - 2);
  const double w = u - k;
  return (1.0 - w) * row[k] + w * row[k + 1];
}

std::vector<double> NfoldTable::tilted_cdfs(double theta, double x, int count) const {
  if (masses_.empty()) throw ParameterError("table was built without keeping its masses");
  if (!(theta >= 0.0) || !std::isfinite(theta)) throw ParameterError("tilt must be >= 0");
  if (count < 1 || count > n_max_ + 1) throw ParameterError("convolution order outside the table");
  if (x > x_max_ * (1.0 + 1e-12)) throw ParameterError("argument beyond the convolution grid");
  std::vector<double> out(count, 0.0);
  out[0] = 1.0;
  if (x <= 0.0 || count == 1) return out;
  const auto tilted = exp_tilt(dist_, theta);
  out[1] = cococat::cdf(tilted, x);
  const double log_norm = std::log(laplace(dist_, theta));

  const double u = std::min(x / h_, static_cast<double>(points_ - 1));
  const int k = std::min(static_cast<int>(u), points_ - 2);
  const double w = u - k;
  std::vector<double> weight(k + 2);
  for (int j = 0; j <= k + 1; ++j) weight[j] = std::exp(-theta * j * h_);
  const int rows = static_cast<int>(masses_.size());
  for (int n = 2; n < count && n < rows; ++n) {
    const auto& m = masses_[n];
    double acc = 0.0;
    for (int j = 0; j < k; ++j) acc += weight[j] * m[j];
    // Same half-cell rule as the untilted rows.
    const double at_k = k == 0 ? 0.0 : acc + 0.5 * weight[k] * m[k];
    const double at_k1 = acc + weight[k] * m[k] + 0.5 * weight[k + 1] * m[k + 1];
    out[n] = ((1.0 - w) * at_k + w * at_k1) * std::exp(-n * log_norm);
  }
  return out;
}

double nfold_cdf(const SeverityDistribution& dist, int n, double x,
                 const ConvolutionOptions& options) {
  if (n < 0) throw ParameterError("convolution order must be >= 0");
  if (x <= 0.0) return n == 0 ? 1.0 : 0.0;
  if (n <= 1) return n == 0 ? 1.0 : cdf(dist, x);
  return NfoldTable(dist, x, n, options).cdf(n, x);
}

double compound_poisson_cdf(double mean, const SeverityDistribution& dist, double x,
                            const ConvolutionOptions& options) {
  const int n_max = poisson_truncation(mean, options.poisson_tail);
  if (x < 0.0) return 0.0;
  if (n_max == 0 || x == 0.0) return std::exp(-mean);
  const NfoldTable table(dist, x, n_max, options);
  const boost::math::poisson_distribution<> law(mean);
  double total = 0.0;
  for (int n = 0; n <= n_max; ++n) total += boost::math::pdf(law, n) * table.cdf(n, x);
  return total;
}

}  // namespace cococat
