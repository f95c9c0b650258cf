#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace cococat {

// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  int size() const { return static_cast<int>(nodes.size()); }
};

// Returns the cached n-point rule. Thread safe; the reference stays valid for
// the lifetime of the program.
const GaussLegendreRule& gauss_legendre(int n);

// Absolute nodes/weights of the n-point rule mapped onto [a, b].
struct QuadraturePoint {
  double x;
  double w;
};
std::vector<QuadraturePoint> gauss_legendre_points(int n, double a, double b);

template <class F>
double integrate(const GaussLegendreRule& rule, F&& f, double a, double b) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (int i = 0; i < rule.size(); ++i) {
    sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  }
  return sum * half;
}

struct PanelIntegral {
  double value = 0.0;
  double error = 0.0;  // |I_k - I_{k-1}| of the last doubling
  int panels = 0;
  bool converged = false;
};

// Composite Gauss-Legendre on [a, b] with the number of equal panels doubled
// until two successive estimates agree to rel_tol (relative to |value|,
// floored by abs_floor).
template <class F>
PanelIntegral integrate_panels(F&& f, double a, double b, double rel_tol,
                               int order = 20, int max_panels = 4096,
                               double abs_floor = 1e-300) {
  const auto& rule = gauss_legendre(order);
  auto composite = [&](int panels) {
    const double width = (b - a) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
      total += integrate(rule, f, a + p * width, a + (p + 1) * width);
    }
    return total;
  };
  PanelIntegral out;
  int panels = 4;
  double previous = composite(panels);
  while (panels < max_panels) {
    panels *= 2;
    const double current = composite(panels);
    out.value = current;
    out.error = std::abs(current - previous);
    out.panels = panels;
    if (out.error <= rel_tol * std::max(std::abs(current), abs_floor)) {
      out.converged = true;
      return out;
    }
    previous = current;
  }
  return out;
}

}  // namespace cococat
