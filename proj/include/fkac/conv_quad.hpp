#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fkac/types.hpp"

namespace fkac {

/// Temporal accuracy order of the convolution quadrature, q in {1,2,3,4}.
struct SchemeOrder {
    int q;

    explicit SchemeOrder(int order) : q(order) {
        if (order < 1 || order > 4) {
            throw std::invalid_argument("SchemeOrder: q must be 1, 2, 3 or 4");
        }
    }
};

/// Coefficients w_0..w_q of the order-q backward difference generating
/// polynomial sum_{j=1..q} (1-z)^j / j, expanded exactly over a common
/// integer denominator.
std::vector<double> bdf_generating_poly(SchemeOrder q);

/// Temporal convolution weights l_0..l_K for one (q, alpha) pair: the power
/// series coefficients of the generating polynomial raised to alpha.
struct WeightTable {
    SchemeOrder q;
    double alpha;
    std::vector<double> weights;

    int count() const { return static_cast<int>(weights.size()) - 1; }
    double operator[](int k) const { return weights[static_cast<std::size_t>(k)]; }
};

/// Generates l_0..l_count by the power-series recurrence
///   l_0 = w_0^alpha,
///   l_k = (1/(k w_0)) * sum_{j=1..min(k,q)} ((alpha+1) j - k) w_j l_{k-j}.
/// alpha = 1 is accepted as a sanity boundary.
WeightTable fractional_power_weights(SchemeOrder q, double alpha, int count);

/// Per-node damping data entering the substantial weights d_k = e^{-rho U k tau} l_k.
struct SubstantialFactor {
    Complex rho;
    double potential;  // U evaluated at the node
    double tau;

    SubstantialFactor(Complex rho_, double potential_, double tau_)
        : rho(rho_), potential(potential_), tau(tau_) {
        if (!(tau_ > 0.0)) {
            throw std::invalid_argument("SubstantialFactor: tau must be positive");
        }
    }

    /// Non-empty when Re(rho * U) < 0, i.e. the exponential factor grows and
    /// the damped-regime analysis does not apply.
    std::optional<std::string> damping_warning() const;
};

/// d_k = e^{-rho U k tau} l_k via a direct exponential evaluation.
Complex substantial_weight(const SubstantialFactor& factor, const WeightTable& table, int k);

/// Exponential running products are refreshed from a direct evaluation every
/// this many steps to cap rounding drift.
inline constexpr int kExpRefreshInterval = 1024;

/// Streams d_0, d_1, ... maintaining the exponential as a running product
/// with periodic refresh; cheaper than one exp call per weight.
class SubstantialWeightStream {
  public:
    SubstantialWeightStream(const SubstantialFactor& factor, const WeightTable& table);

    /// Returns d_k for the current index and advances.
    Complex next();

    int index() const { return k_; }

  private:
    const WeightTable* table_;
    Complex base_exponent_;  // -rho U tau
    Complex step_;           // e^{-rho U tau}
    Complex product_;        // e^{-rho U k tau}
    int k_ = 0;
};

/// Outcome of checking the q=1 weight sign and partial-sum bounds.
struct WeightPropertyReport {
    bool l0_unit = false;            // l_0 == 1
    bool negative_tail = false;      // l_k < 0 for k in [1, n_max]
    int first_nonnegative_k = -1;
    bool partial_sum_bounds = false; // 1/(n^a Gamma(1-a)) < sum_{k<n} l_k <= n^{-a}
    int first_bound_violation_n = -1;
    bool alpha_at_unit_boundary = false;  // alpha == 1 sanity configuration

    bool pass() const { return l0_unit && negative_tail && partial_sum_bounds; }
};

/// Checks the q=1 weight properties up to n_max. Requires q == 1 and at least
/// n_max + 1 stored weights.
WeightPropertyReport verify_weight_properties(const WeightTable& table, int n_max);

/// Closed form of the substantial derivative of e^{-rho U t} t^sigma:
///   e^{-rho U t} * Gamma(sigma+1) / Gamma(sigma+1-alpha) * t^{sigma-alpha}.
/// Requires 0 < alpha < 1, sigma > alpha - 1 and t > 0.
Complex substantial_derivative_oracle(double alpha, Complex rho, double U, double sigma, double t);

}  // namespace fkac
