#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace regen {

// Exact arithmetic used throughout the tradeoff and cut computations.
// Breakpoint comparisons must be exact; floating point would mislabel
// boundary cases.
using BigInt = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline BigInt rat_num(const Rat& r) { return boost::multiprecision::numerator(r); }
inline BigInt rat_den(const Rat& r) { return boost::multiprecision::denominator(r); }

inline bool is_integer(const Rat& r) { return rat_den(r) == 1; }

inline double rat_to_double(const Rat& r) { return r.convert_to<double>(); }

// "p/q" with q omitted when 1. Matches cpp_rational's own streaming but kept
// explicit so dump formats do not depend on the backend.
inline std::string rat_to_fraction(const Rat& r) {
    std::ostringstream os;
    os << rat_num(r);
    if (rat_den(r) != 1) os << '/' << rat_den(r);
    return os.str();
}

// Decimal rendering to 12 significant digits, '.' decimal point, no locale.
inline std::string rat_to_decimal(const Rat& r, int sig_digits = 12) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os.precision(sig_digits);
    os << r.convert_to<double>();
    return os.str();
}

// Accepts "p/q", plain integers, and decimal notation ("1.5", "3e-2").
inline std::optional<Rat> try_parse_rational(std::string_view text) {
    if (text.empty()) return std::nullopt;
    std::string s(text);

    auto slash = s.find('/');
    if (slash != std::string::npos) {
        try {
            BigInt num(s.substr(0, slash));
            BigInt den(s.substr(slash + 1));
            if (den == 0) return std::nullopt;
            return Rat(num, den);
        } catch (const std::exception&) {
            return std::nullopt;
        }
    }

    bool neg = false;
    std::size_t pos = 0;
    if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
        neg = s[pos] == '-';
        ++pos;
    }

    BigInt mantissa = 0;
    long frac_digits = 0;
    bool any_digit = false, seen_point = false;
    for (; pos < s.size(); ++pos) {
        char c = s[pos];
        if (c >= '0' && c <= '9') {
            mantissa = mantissa * 10 + (c - '0');
            if (seen_point) ++frac_digits;
            any_digit = true;
        } else if (c == '.' && !seen_point) {
            seen_point = true;
        } else {
            break;
        }
    }
    if (!any_digit) return std::nullopt;

    long exponent = 0;
    if (pos < s.size() && (s[pos] == 'e' || s[pos] == 'E')) {
        ++pos;
        bool eneg = false;
        if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
            eneg = s[pos] == '-';
            ++pos;
        }
        if (pos == s.size()) return std::nullopt;
        for (; pos < s.size(); ++pos) {
            if (s[pos] < '0' || s[pos] > '9') return std::nullopt;
            exponent = exponent * 10 + (s[pos] - '0');
            if (exponent > 100000) return std::nullopt;
        }
        if (eneg) exponent = -exponent;
    }
    if (pos != s.size()) return std::nullopt;

    long net = exponent - frac_digits;
    Rat value(mantissa);
    if (net > 0) {
        value *= Rat(boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(net)));
    } else if (net < 0) {
        value /= Rat(boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(-net)));
    }
    if (neg) value = -value;
    return value;
}

inline Rat parse_rational(std::string_view text) {
    auto r = try_parse_rational(text);
    if (!r) throw std::invalid_argument("not a rational: '" + std::string(text) + "'");
    return *r;
}

// LCM of the denominators of a list of rationals; 1 for an empty list.
inline BigInt denominator_lcm(std::initializer_list<Rat> values) {
    BigInt l = 1;
    for (const auto& v : values) l = boost::multiprecision::lcm(l, rat_den(v));
    return l;
}

}  // namespace regen
