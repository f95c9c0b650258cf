#pragma once

#include <vector>

#include "cococat/convolution.hpp"
#include "cococat/loss_models.hpp"

namespace cococat {

// P(no threshold crossed by t) for one event clock:
// S(t) = sum_n e^{-Lambda(t)} Lambda(t)^n / n! G_n, where G_n is the
// probability that n events keep every region below its threshold.
class CrossingSeries {
 public:
  // g[0] = 1 must hold; g is truncated where the Poisson tail at the horizon
  // drops below the requested tolerance.
  CrossingSeries(Intensity intensity, std::vector<double> g);

  double survival(double t) const;
  // -dS/dt = lambda(t) e^{-Lambda} sum_n Lambda^n / n! (G_n - G_{n+1})
  double density(double t) const;
  int terms() const { return static_cast<int>(g_.size()); }

 private:
  Intensity intensity_;
  std::vector<double> g_;
};

// Law of the trigger time tau as a mixture of products of independent
// crossing series. ILP is one product of two factors, ILA and fixed-split PLA
// one factor, random-split PLA a quadrature mixture over the split.
class TriggerLaw {
 public:
  struct Component {
    double weight;
    std::vector<CrossingSeries> factors;
  };

  explicit TriggerLaw(std::vector<Component> components, double grid_error = 0.0);

  double survival(double t) const;
  double density(double t) const;

  int max_terms() const;
  double grid_error() const { return grid_error_; }

 private:
  std::vector<Component> components_;
  double grid_error_;
};

struct TriggerOptions {
  ConvolutionOptions convolution;
  int proportion_nodes = 64;  // per side of the kink in the split
};

// Builds the law of tau for `model` on [0, horizon].
TriggerLaw trigger_law(const DependenceModel& model, double horizon,
                       const TriggerOptions& options = {});

// Random-split PLA with exponentially tilted claims, one proportion at a time.
// The base table covers [0, D1 + D2] and is shared by every p; build it with
// split_base_table.
NfoldTable split_base_table(const DependenceModel& model, double horizon,
                            const TriggerOptions& options = {});
TriggerLaw tilted_split_law(const NfoldTable& base, const DependenceModel& model, double p,
                            double theta, double horizon, const TriggerOptions& options = {});


// Convenience one-shot evaluations; each call rebuilds the tables.
double survival_ilp(double t, const DependenceModel& model, const TriggerOptions& options = {});
double trigger_density_ilp(double t, const DependenceModel& model,
                           const TriggerOptions& options = {});
double survival_ila(double t, const DependenceModel& model, const TriggerOptions& options = {});
double density_ila(double t, const DependenceModel& model, const TriggerOptions& options = {});
double survival_pla(double t, const DependenceModel& model, const TriggerOptions& options = {});
double survival_pla_given_p(double t, const DependenceModel& model, double p,
                            const TriggerOptions& options = {});
double density_pla_given_p(double t, const DependenceModel& model, double p,
                           const TriggerOptions& options = {});

}  // namespace cococat
