#include "fkac/parse.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <stdexcept>

namespace fkac {

namespace {

bool parse_integer(const std::string& text, long long& out) {
    if (text.empty()) {
        return false;
    }
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto res = std::from_chars(first, last, out);
    return res.ec == std::errc{} && res.ptr == last;
}

bool parse_double_exact(const std::string& text, double& out) {
    if (text.empty()) {
        return false;
    }
    char* end = nullptr;
    out = std::strtod(text.c_str(), &end);
    return end == text.c_str() + text.size();
}

}  // namespace

Fraction parse_fraction(const std::string& text) {
    const std::size_t slash = text.find('/');
    if (slash != std::string::npos) {
        long long num = 0;
        long long den = 0;
        if (!parse_integer(text.substr(0, slash), num) || !parse_integer(text.substr(slash + 1), den) ||
            den <= 0) {
            throw std::invalid_argument("malformed fraction literal: '" + text + "'");
        }
        Fraction f;
        f.num = num;
        f.den = den;
        f.val = static_cast<double>(num) / static_cast<double>(den);
        f.exact = true;
        return f;
    }
    double value = 0.0;
    if (!parse_double_exact(text, value)) {
        throw std::invalid_argument("malformed number literal: '" + text + "'");
    }
    Fraction f;
    f.val = value;
    return f;
}

Complex parse_complex(const std::string& text) {
    if (text.empty()) {
        throw std::invalid_argument("empty complex literal");
    }
    auto fail = [&text]() -> Complex {
        throw std::invalid_argument("malformed complex literal: '" + text + "' (expected a+bi)");
    };
    std::string body = text;
    bool has_imag_unit = false;
    if (body.back() == 'i' || body.back() == 'I') {
        has_imag_unit = true;
        body.pop_back();
    }
    if (!has_imag_unit) {
        double re = 0.0;
        if (!parse_double_exact(body, re)) {
            return fail();
        }
        return Complex{re, 0.0};
    }
    // body now holds "a+b", "a-b", "b", "", "+", "-" with the unit stripped.
    std::size_t split = std::string::npos;
    for (std::size_t pos = body.size(); pos-- > 1;) {
        const char c = body[pos];
        if ((c == '+' || c == '-') && body[pos - 1] != 'e' && body[pos - 1] != 'E') {
            split = pos;
            break;
        }
    }
    if (split == std::string::npos) {
        double im = 1.0;
        if (body.empty() || body == "+") {
            im = 1.0;
        } else if (body == "-") {
            im = -1.0;
        } else if (!parse_double_exact(body, im)) {
            return fail();
        }
        return Complex{0.0, im};
    }
    double re = 0.0;
    if (!parse_double_exact(body.substr(0, split), re)) {
        return fail();
    }
    const std::string imag_text = body.substr(split);
    double im = 0.0;
    if (imag_text == "+") {
        im = 1.0;
    } else if (imag_text == "-") {
        im = -1.0;
    } else if (!parse_double_exact(imag_text, im)) {
        return fail();
    }
    return Complex{re, im};
}

std::vector<double> parse_number_list(const std::string& text) {
    std::vector<double> values;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = text.find(',', start);
        const std::string item =
            text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        if (item.empty()) {
            throw std::invalid_argument("empty entry in number list: '" + text + "'");
        }
        values.push_back(parse_fraction(item).value());
        if (comma == std::string::npos) {
            break;
        }
        start = comma + 1;
    }
    return values;
}

}  // namespace fkac
