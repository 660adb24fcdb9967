#pragma once

#include <string>
#include <vector>

#include "fkac/types.hpp"

namespace fkac {

/// Step size parsed from text. Fraction literals like "1/80" are kept as an
/// exact integer ratio and converted to double once.
struct Fraction {
    long long num = 0;
    long long den = 1;
    double val = 0.0;
    bool exact = false;  // true when parsed as an integer ratio

    double value() const { return val; }
};

/// Accepts "a/b" with positive integer b, or a plain decimal literal.
Fraction parse_fraction(const std::string& text);

/// Accepts "a", "bi", "a+bi", "a-bi" and the shorthands "i", "+i", "-i",
/// "a+i", "a-i".
Complex parse_complex(const std::string& text);

/// Comma-separated doubles (fraction literals allowed per element).
std::vector<double> parse_number_list(const std::string& text);

}  // namespace fkac
