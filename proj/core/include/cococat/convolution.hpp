#pragma once

#include <vector>

#include "cococat/distributions.hpp"

namespace cococat {

struct ConvolutionOptions {
  int grid_points = 1 << 14;    // array length on [0, x_max]
  double poisson_tail = 1e-12;  // truncation of Poisson sums
  double grid_tolerance = 1e-5; // max |fine - coarse| accepted at x_max
  bool check_grid = true;       // repeat on a half-resolution grid
  bool keep_masses = false;     // needed for tilted_cdfs
};

// Smallest n with P(N > n) < tail for N ~ Poisson(mean).
int poisson_truncation(double mean, double tail = 1e-12);

// Cell masses of `dist` on the grid {0, h, ..., (points-1) h}: the first cell
// is [0, h/2), the others [(j-1/2) h, (j+1/2) h).
std::vector<double> discretize(const SeverityDistribution& dist, double h, int points);

// Values F^{n*}(x) of the n-fold convolutions for n = 0..n_max and x in
// [0, x_max], built once by repeated FFT of the discretized law.
class NfoldTable {
 public:
  NfoldTable(const SeverityDistribution& dist, double x_max, int n_max,
             const ConvolutionOptions& options = {});

  // Linear interpolation between grid points; exact for n = 0 and n = 1.
  double cdf(int n, double x) const;

  // F_theta^{n*}(x) for n = 0..count-1, where F_theta is the exponential tilt
  // of the tabulated law: the n-fold tilt is the tilt of the n-fold law, so
  // one table serves every theta. Requires keep_masses.
  std::vector<double> tilted_cdfs(double theta, double x, int count) const;

  int n_max() const { return n_max_; }
  double x_max() const { return x_max_; }
  // Largest |F_h - F_{2h}| seen at x_max (0 when the check is disabled).
  double grid_error() const { return grid_error_; }

 private:
  SeverityDistribution dist_;
  double x_max_;
  double h_;
  int n_max_;
  int points_;
  int live_rows_;  // rows beyond this are identically zero on the grid
  std::vector<std::vector<double>> rows_;
  std::vector<std::vector<double>> masses_;
  double grid_error_ = 0.0;
};

// F^{n*}(x) for a single n.
double nfold_cdf(const SeverityDistribution& dist, int n, double x,
                 const ConvolutionOptions& options = {});

// P(sum_{k<=N} X_k <= x) with N ~ Poisson(mean).
double compound_poisson_cdf(double mean, const SeverityDistribution& dist, double x,
                            const ConvolutionOptions& options = {});

}  // namespace cococat
