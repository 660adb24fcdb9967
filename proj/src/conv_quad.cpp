#include "fkac/conv_quad.hpp"

#include <cmath>
#include <numeric>

namespace fkac {

namespace {

long long binomial(int n, int k) {
    long long r = 1;
    for (int j = 1; j <= k; ++j) {
        r = r * (n - k + j) / j;
    }
    return r;
}

}  // namespace

std::vector<double> bdf_generating_poly(SchemeOrder q) {
    // Common denominator lcm(1..q); every coefficient is an exact integer over it.
    long long den = 1;
    for (int j = 2; j <= q.q; ++j) {
        den = std::lcm(den, static_cast<long long>(j));
    }
    std::vector<long long> num(static_cast<std::size_t>(q.q) + 1, 0);
    for (int j = 1; j <= q.q; ++j) {
        const long long scale = den / j;
        for (int m = 0; m <= j; ++m) {
            const long long sign = (m % 2 == 0) ? 1 : -1;
            num[static_cast<std::size_t>(m)] += sign * scale * binomial(j, m);
        }
    }
    std::vector<double> w(num.size());
    for (std::size_t m = 0; m < num.size(); ++m) {
        w[m] = static_cast<double>(num[m]) / static_cast<double>(den);
    }
    return w;
}

WeightTable fractional_power_weights(SchemeOrder q, double alpha, int count) {
    if (!(alpha > 0.0) || alpha > 1.0) {
        throw std::invalid_argument("fractional_power_weights: alpha must lie in (0,1]");
    }
    if (count < 0) {
        throw std::invalid_argument("fractional_power_weights: count must be non-negative");
    }
    const std::vector<double> w = bdf_generating_poly(q);
    std::vector<double> l(static_cast<std::size_t>(count) + 1);
    l[0] = std::pow(w[0], alpha);
    for (int k = 1; k <= count; ++k) {
        const int jmax = std::min(k, q.q);
        double acc = 0.0;
        for (int j = 1; j <= jmax; ++j) {
            acc += ((alpha + 1.0) * j - k) * w[static_cast<std::size_t>(j)] * l[static_cast<std::size_t>(k - j)];
        }
        l[static_cast<std::size_t>(k)] = acc / (static_cast<double>(k) * w[0]);
    }
    return WeightTable{q, alpha, std::move(l)};
}

std::optional<std::string> SubstantialFactor::damping_warning() const {
    const double re = (rho * potential).real();
    if (re < 0.0) {
        return "substantial factor outside the damped regime: Re(rho * U) = " + std::to_string(re) +
               " < 0, exponential weights grow";
    }
    return std::nullopt;
}

Complex substantial_weight(const SubstantialFactor& factor, const WeightTable& table, int k) {
    if (k < 0 || k >= static_cast<int>(table.weights.size())) {
        throw std::out_of_range("substantial_weight: k outside the stored weight range");
    }
    const Complex exponent = -factor.rho * factor.potential * (static_cast<double>(k) * factor.tau);
    return std::exp(exponent) * table[k];
}

SubstantialWeightStream::SubstantialWeightStream(const SubstantialFactor& factor, const WeightTable& table)
    : table_(&table),
      base_exponent_(-factor.rho * factor.potential * factor.tau),
      step_(std::exp(base_exponent_)),
      product_(1.0) {}

Complex SubstantialWeightStream::next() {
    if (k_ >= static_cast<int>(table_->weights.size())) {
        throw std::out_of_range("SubstantialWeightStream: exhausted the weight table");
    }
    const Complex d = product_ * (*table_)[k_];
    ++k_;
    if (k_ % kExpRefreshInterval == 0) {
        product_ = std::exp(base_exponent_ * static_cast<double>(k_));
    } else {
        product_ *= step_;
    }
    return d;
}

WeightPropertyReport verify_weight_properties(const WeightTable& table, int n_max) {
    if (table.q.q != 1) {
        throw std::invalid_argument("verify_weight_properties: properties are stated for q = 1 only");
    }
    if (n_max < 1 || table.count() < n_max) {
        throw std::invalid_argument("verify_weight_properties: table too short for requested n_max");
    }
    WeightPropertyReport report;
    report.alpha_at_unit_boundary = (table.alpha == 1.0);
    report.l0_unit = (table[0] == 1.0);

    report.negative_tail = true;
    for (int k = 1; k <= n_max; ++k) {
        if (!(table[k] < 0.0)) {
            report.negative_tail = false;
            report.first_nonnegative_k = k;
            break;
        }
    }

    const double gamma_compl = std::tgamma(1.0 - table.alpha);
    report.partial_sum_bounds = true;
    long double partial = 0.0L;
    for (int n = 1; n <= n_max; ++n) {
        partial += table[n - 1];
        const double s = static_cast<double>(partial);
        const double upper = std::pow(static_cast<double>(n), -table.alpha);
        const double lower = upper / gamma_compl;
        if (!(lower < s) || !(s <= upper)) {
            report.partial_sum_bounds = false;
            report.first_bound_violation_n = n;
            break;
        }
    }
    return report;
}

Complex substantial_derivative_oracle(double alpha, Complex rho, double U, double sigma, double t) {
    if (!(alpha > 0.0) || !(alpha < 1.0)) {
        throw std::invalid_argument("substantial_derivative_oracle: alpha must lie in (0,1)");
    }
    if (!(sigma > alpha - 1.0)) {
        throw std::invalid_argument("substantial_derivative_oracle: sigma must exceed alpha - 1");
    }
    if (!(t > 0.0)) {
        throw std::invalid_argument("substantial_derivative_oracle: t must be positive");
    }
    const double ratio = std::tgamma(sigma + 1.0) / std::tgamma(sigma + 1.0 - alpha);
    return std::exp(-rho * U * t) * ratio * std::pow(t, sigma - alpha);
}

}  // namespace fkac
