#include "cococat/term_structure.hpp"

#include <cmath>

#include "cococat/errors.hpp"

namespace cococat {
namespace {

constexpr double kLn2 = 0.6931471805599453;

double log_cosh(double u) {
  const double a = std::abs(u);
  return a + std::log1p(std::exp(-2.0 * a)) - kLn2;
}

}  // namespace

void MarketParams::validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(r0) || r0 < 0.0) throw ParameterError("r0 must be >= 0");
  if (!finite(theta_r) || theta_r <= 0.0) throw ParameterError("theta_r must be > 0");
  if (!finite(m_r) || m_r < 0.0) throw ParameterError("m_r must be >= 0");
  if (!finite(mu_s)) throw ParameterError("mu_s must be finite");
  if (!finite(sigma_r) || sigma_r < 0.0) throw ParameterError("sigma_r must be >= 0");
  if (!finite(s0) || s0 <= 0.0) throw ParameterError("s0 must be > 0");
  if (!finite(sigma_s) || sigma_s < 0.0) throw ParameterError("sigma_s must be >= 0");
  if (!finite(rho) || rho < -1.0 || rho > 1.0) throw ParameterError("rho must lie in [-1, 1]");
  if (libor0 && !finite(*libor0)) throw ParameterError("libor0 must be finite");
}

LongstaffCoefficients longstaff_coefficients(double maturity, double theta, double sigma) {
  if (!std::isfinite(maturity) || maturity < 0.0) throw ParameterError("maturity must be >= 0");
  if (!std::isfinite(theta)) throw ParameterError("theta must be finite");
  if (!std::isfinite(sigma) || sigma < 0.0) throw ParameterError("sigma must be >= 0");
  const double T = maturity;
  const double psi = std::sqrt(2.0) * sigma;
  const double u = 0.5 * psi * T;
  LongstaffCoefficients k{};
  if (u < 1e-2) {
    const double u2 = u * u;
    // (u - tanh u) / psi^3 = (T^3 / 8)(1/3 - 2u^2/15 + 17u^4/315 - ...)
    const double series = 1.0 / 3.0 - 2.0 * u2 / 15.0 + 17.0 * u2 * u2 / 315.0;
    k.log_a = -0.5 * log_cosh(u) - 2.0 * theta * theta * (T * T * T / 8.0) * series;
    k.b = -T * (1.0 - u2 / 3.0 + 2.0 * u2 * u2 / 15.0);
    k.c = theta * T * T * (0.5 - 5.0 * u2 / 24.0 + 61.0 * u2 * u2 / 720.0);
    return k;
  }
  const double th = std::tanh(u);
  k.log_a = -0.5 * log_cosh(u) - 2.0 * theta * theta * (u - th) / (psi * psi * psi);
  k.b = -2.0 / psi * th;
  // 1 - sech u = 2 sinh^2(u/2) / cosh u, written to avoid cancellation.
  const double one_minus_sech =
      u > 350.0 ? 1.0 : 2.0 * std::sinh(0.5 * u) * std::sinh(0.5 * u) / std::cosh(u);
  k.c = 2.0 * theta * one_minus_sech / (sigma * sigma);
  return k;
}

double zcb_price_from_root(double root, double maturity, double theta, double sigma) {
  if (!std::isfinite(root)) throw ParameterError("rate root must be finite");
  const auto k = longstaff_coefficients(maturity, theta, sigma);
  return std::exp(k.log_a + k.b * root * root + k.c * root);
}

double zcb_price(double r0, double maturity, double theta, double sigma) {
  if (!std::isfinite(r0) || r0 < 0.0) throw ParameterError("r0 must be >= 0");
  return zcb_price_from_root(std::sqrt(r0), maturity, theta, sigma);
}

double libor_from_root(double root, double period, double theta, double sigma) {
  if (!(period > 0.0)) throw ParameterError("accrual period must be > 0");
  return (1.0 / zcb_price_from_root(root, period, theta, sigma) - 1.0) / period;
}

double initial_libor(const MarketParams& market, double period) {
  if (market.libor0) return *market.libor0;
  return libor_from_root(std::sqrt(market.r0), period, market.theta_r, market.sigma_r);
}

RateParams tilted_rate_params(const MarketParams& market, double nu) {
  if (!(nu >= 0.0 && nu <= 1.0)) throw ParameterError("conversion exponent must lie in [0, 1]");
  const double theta = std::sqrt(nu) * (market.theta_r - market.sigma_r * market.sigma_s *
                                                             market.rho * (1.0 - nu));
  const double sigma = std::sqrt(nu) * market.sigma_r;
  const double m = market.m_r;
  if (theta == 0.0) {
    if (nu * m != 0.0) {
      throw ConfigurationError("tilted mean-reversion speed vanishes with a nonzero level");
    }
    return {0.0, 0.0, sigma};
  }
  return {theta, nu * m * market.theta_r / theta, sigma};
}

}  // namespace cococat
