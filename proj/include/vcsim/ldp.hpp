// Large-deviation analysis of the ranking queue Q_t = C_{t-1} - M_{t-1},
// where C and M are Poisson counting processes with per-round means Lambda
// and lambda.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace vcsim {

struct LdpParams {
    double lambda = 2.0;  // merit process rate
    double Lambda = 1.0;  // selection process rate
    double b = 1.0;       // valve slope, L = l * b
    double l = 1.0;
    double epsilon = 0.1; // voting failure tolerance
    double L = 0.0;       // selection valve
};

/// Stationary point of G(theta) = theta*x - Lambda(e^theta - 1) - lambda(e^-theta - 1).
double theta_star(double x, double lambda, double Lambda);

/// G(theta) itself.
double cumulant_objective(double theta, double x, double lambda, double Lambda);

/// Closed-form convex conjugate psi*(x).
double legendre(double x, double lambda, double Lambda);

/// psi*(x) by golden-section maximisation of G over theta in [-20, 20].
double legendre_numeric(double x, double lambda, double Lambda);

/// I(b) = b log(lambda / Lambda).
double rate_function(double b, double lambda, double Lambda);

struct RateMinimum {
    double value = 0.0;   // min over t of t * psi*(b / t)
    double argmin = 0.0;  // minimising t
    bool below_two = false; // argmin < 2, outside the t >= 2 range
};

/// Variational form of the rate: grid over t followed by golden-section
/// refinement, using legendre_numeric throughout.
RateMinimum rate_function_numeric(double b, double lambda, double Lambda);

/// L*(eps) = -log eps / log(lambda / Lambda).
double effective_valve(double epsilon, double lambda, double Lambda);

/// lambda*(eps) = Lambda exp(-log eps / L).
double effective_merit(double epsilon, double Lambda, double L);

struct McEstimate {
    double probability = 0.0;
    double stderr_ = 0.0;
    std::uint64_t replicas = 0;
    std::uint64_t horizon = 0;
    std::uint64_t hits = 0;
};

struct McOptions {
    std::uint64_t horizon = 2000;
    std::uint64_t replicas = 100000;
    std::uint64_t seed = 1;
    unsigned jobs = 1;
};

/// P(sup_{t <= horizon} Q_t > level) for every level, from one set of
/// replicas. The walk starts at Q_1 = 0. Estimates do not depend on jobs.
std::vector<McEstimate> mc_failure_rates(double lambda, double Lambda,
                                         std::span<const double> levels, const McOptions& opt);

McEstimate mc_failure_rate(double lambda, double Lambda, double L, const McOptions& opt);

struct DecayFit {
    std::vector<double> l_values;
    std::vector<McEstimate> estimates;
    double slope = 0.0;      // least-squares slope of log p against l
    double intercept = 0.0;
    double expected = 0.0;   // -I(b)
};

/// Fits the decay of P(sup Q > l b) in l. Throws insufficient_replicas if any
/// level has no hits.
DecayFit verify_decay(double lambda, double Lambda, double b, std::span<const double> l_values,
                      const McOptions& opt);

} // namespace vcsim
