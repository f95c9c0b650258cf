#pragma once

#include <optional>

namespace cococat {

// Financial market: short rate r = y^2 with dy = -theta/2 dt + sigma/2 dW1
// (the Longstaff double square-root model with m = sigma^2 / (4 theta)), and
// a stock with volatility sigma_s driven by rho W1 + sqrt(1 - rho^2) W_perp.
struct MarketParams {
  double r0 = 0.02;
  double theta_r = 0.2;
  // Level of the square-root form. Stored and carried through the tilt, but
  // the closed-form bond price does not depend on it.
  double m_r = 0.0;
  double sigma_r = 0.03;
  double s0 = 10.0;
  double sigma_s = 0.2;
  double rho = -0.5;
  double mu_s = 0.0;  // real-world equity drift; unused under the pricing measure
  // First LIBOR fixing; derived from the bond curve when absent.
  std::optional<double> libor0;

  // m of the square-root form dr = theta (m - r) dt + sigma sqrt(r) dW that
  // the Longstaff bond price solves.
  double implied_m() const { return sigma_r * sigma_r / (4.0 * theta_r); }
  void validate() const;
};

// Longstaff zero-coupon bond price P(r0, T) = A(T) exp(B(T) r0 + C(T) sqrt(r0)).
double zcb_price(double r0, double maturity, double theta, double sigma);

// Same price written in terms of the signed root y (r = y^2); the sign of y
// matters for the C(T) term. Used for LIBOR fixings on simulated paths.
double zcb_price_from_root(double root, double maturity, double theta, double sigma);

// log A, B and C of the closed form, exposed for tests.
struct LongstaffCoefficients {
  double log_a;
  double b;
  double c;
};
LongstaffCoefficients longstaff_coefficients(double maturity, double theta, double sigma);

// Simple-compounded forward rate over one accrual period from the bond price.
double libor_from_root(double root, double period, double theta, double sigma);
double initial_libor(const MarketParams& market, double period);

// Rate parameters after absorbing S^{1-nu} into the measure.
struct RateParams {
  double theta;
  double m;
  double sigma;
};
RateParams tilted_rate_params(const MarketParams& market, double nu);

}  // namespace cococat
