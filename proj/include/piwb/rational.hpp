#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace piwb {

using Rational = mpq_class;
using BigInt = mpz_class;

/// Parses a rational literal: optional '-', digits, optional '/' digits.
/// The denominator must be positive. The result is stored in lowest terms.
inline Rational parse_rational(std::string_view text) {
    const auto fail = [&](const char* why) {
        throw std::invalid_argument("bad rational \"" + std::string(text) + "\": " + why);
    };
    std::size_t pos = 0;
    if (pos < text.size() && text[pos] == '-') ++pos;
    const std::size_t num_begin = pos;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
    if (pos == num_begin) fail("missing numerator digits");
    const std::size_t num_end = pos;
    std::size_t den_begin = 0, den_end = 0;
    if (pos < text.size() && text[pos] == '/') {
        den_begin = ++pos;
        while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
        if (pos == den_begin) fail("missing denominator digits");
        den_end = pos;
    }
    if (pos != text.size()) fail("trailing characters");

    BigInt num(std::string(text.substr(num_begin, num_end - num_begin)), 10);
    if (text[0] == '-') num = -num;
    BigInt den(1);
    if (den_begin != 0) {
        den = BigInt(std::string(text.substr(den_begin, den_end - den_begin)), 10);
        if (den == 0) fail("zero denominator");
    }
    Rational q(num, den);
    q.canonicalize();
    return q;
}

/// Canonical text form: "p/q" in lowest terms, or "p" when the value is an integer.
inline std::string format_rational(const Rational& q) { return q.get_str(); }

inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace piwb
