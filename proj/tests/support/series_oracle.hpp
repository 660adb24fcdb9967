#pragma once

// Brute-force oracle for the fractional-power weights, in double-double
// precision and independent of the production recurrence.
//
// Expanding W_q(z)^alpha directly as a binomial series in W_q/w0 - 1 is
// hopeless for large k (terms grow like 1.9^k before cancelling), so the
// oracle factors W_q(z) = (1 - z) R_q(z) first:
//   * (1 - z)^alpha has the stable two-term ratio recurrence,
//   * R_q has all roots strictly outside the unit disk, so the binomial
//     series in R_q/r0 - 1 keeps its terms bounded (q <= 3) or mildly
//     growing (q = 4: ~1.56^k, fine for k <= 80 at ~32 digits),
// and convolves the two factor series. A double-double transcription of the
// production recurrence is also provided as a long-run precision check.

#include <algorithm>
#include <utility>
#include <vector>

#include "support/dd_real.hpp"

namespace ddtest {

struct Ratio {
    long long num;
    long long den;
};

// Backward-difference polynomial coefficients, textbook values.
inline const std::vector<Ratio>& bdf_poly_ratios(int q) {
    static const std::vector<Ratio> polys[4] = {
        {{1, 1}, {-1, 1}},
        {{3, 2}, {-2, 1}, {1, 2}},
        {{11, 6}, {-3, 1}, {3, 2}, {-1, 3}},
        {{25, 12}, {-4, 1}, {3, 1}, {-4, 3}, {1, 4}},
    };
    return polys[q - 1];
}

inline dd ratio_dd(Ratio r) { return dd(static_cast<double>(r.num)) / dd(static_cast<double>(r.den)); }

inline std::vector<dd> fractional_power_series_dd(int q, double alpha, int count) {
    const std::vector<Ratio>& poly = bdf_poly_ratios(q);

    // R = W / (1 - z): coefficients are prefix sums of the w_j, exact over a
    // common denominator.
    long long den = 1;
    for (const Ratio& r : poly) {
        den = std::max(den, r.den);  // denominators divide 12 and are sorted oddly; use lcm
    }
    den = 12;  // lcm(1..4); exact for every q here
    std::vector<long long> prefix(poly.size() - 1);
    long long acc = 0;
    for (std::size_t j = 0; j + 1 < poly.size(); ++j) {
        acc += poly[j].num * (den / poly[j].den);
        prefix[j] = acc;
    }
    const dd r0 = dd(static_cast<double>(prefix[0])) / dd(static_cast<double>(den));

    // Grunwald series g_k of (1 - z)^alpha.
    std::vector<dd> g(static_cast<std::size_t>(count) + 1);
    g[0] = dd(1.0);
    for (int k = 1; k <= count; ++k) {
        g[static_cast<std::size_t>(k)] = g[static_cast<std::size_t>(k) - 1] *
                                         (dd(static_cast<double>(k - 1)) - dd(alpha)) /
                                         dd(static_cast<double>(k));
    }

    // s = (1 + V)^alpha with V = R/r0 - 1, by binomial series and repeated
    // convolution; V has degree q - 1 and no constant term.
    const int deg = q - 1;
    std::vector<dd> v(static_cast<std::size_t>(count) + 1);
    for (int j = 1; j <= deg && j <= count; ++j) {
        v[static_cast<std::size_t>(j)] =
            dd(static_cast<double>(prefix[static_cast<std::size_t>(j)])) /
            dd(static_cast<double>(den)) / r0;
    }
    std::vector<dd> s(static_cast<std::size_t>(count) + 1);
    std::vector<dd> cur(static_cast<std::size_t>(count) + 1);
    cur[0] = dd(1.0);
    s[0] = dd(1.0);
    dd binom{1.0};
    for (int m = 1; m <= count && deg > 0; ++m) {
        binom = binom * (dd(alpha) - dd(static_cast<double>(m - 1))) / dd(static_cast<double>(m));
        std::vector<dd> next(static_cast<std::size_t>(count) + 1);
        for (int t = m; t <= count; ++t) {
            dd sum{};
            const int jmax = std::min(deg, t);
            for (int j = 1; j <= jmax; ++j) {
                sum = sum + cur[static_cast<std::size_t>(t - j)] * v[static_cast<std::size_t>(j)];
            }
            next[static_cast<std::size_t>(t)] = sum;
        }
        cur = std::move(next);
        for (int t = m; t <= count; ++t) {
            s[static_cast<std::size_t>(t)] = s[static_cast<std::size_t>(t)] + binom * cur[static_cast<std::size_t>(t)];
        }
    }

    // l = r0^alpha * (g conv s)
    const dd scale = dd_pow(r0, dd(alpha));
    std::vector<dd> out(static_cast<std::size_t>(count) + 1);
    for (int k = 0; k <= count; ++k) {
        dd sum{};
        for (int j = 0; j <= k; ++j) {
            sum = sum + g[static_cast<std::size_t>(j)] * s[static_cast<std::size_t>(k - j)];
        }
        out[static_cast<std::size_t>(k)] = scale * sum;
    }
    return out;
}

/// The production recurrence transcribed into double-double arithmetic. Same
/// formula, higher precision: detects double-rounding drift over long runs,
/// not formula errors.
inline std::vector<dd> miller_recurrence_dd(int q, double alpha, int count) {
    const std::vector<Ratio>& poly = bdf_poly_ratios(q);
    std::vector<dd> w(poly.size());
    for (std::size_t j = 0; j < poly.size(); ++j) {
        w[j] = ratio_dd(poly[j]);
    }
    std::vector<dd> l(static_cast<std::size_t>(count) + 1);
    l[0] = dd_pow(w[0], dd(alpha));
    for (int k = 1; k <= count; ++k) {
        dd acc{};
        const int jmax = std::min<int>(k, q);
        for (int j = 1; j <= jmax; ++j) {
            acc = acc + (dd(alpha + 1.0) * dd(static_cast<double>(j)) - dd(static_cast<double>(k))) *
                            w[static_cast<std::size_t>(j)] * l[static_cast<std::size_t>(k - j)];
        }
        l[static_cast<std::size_t>(k)] = acc / (dd(static_cast<double>(k)) * w[0]);
    }
    return l;
}

}  // namespace ddtest
