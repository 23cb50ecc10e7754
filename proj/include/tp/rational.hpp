#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <compare>
#include <stdexcept>
#include <string>

namespace tp {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline std::string format_int(const Int &z) { return z.str(); }

// "p/q" when the denominator is not 1, otherwise just "p".
inline std::string format_rat(const Rat &r) {
    if (denominator(r) == 1)
        return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

// Accepts "k" or "p/q" with optional sign; normalizes non-reduced input.
// Throws std::invalid_argument on malformed text or a zero denominator.
inline Rat parse_rat(const std::string &s) {
    auto is_int = [](const std::string &t) {
        if (t.empty())
            return false;
        std::size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
        if (i == t.size())
            return false;
        for (; i < t.size(); ++i)
            if (t[i] < '0' || t[i] > '9')
                return false;
        return true;
    };
    auto slash = s.find('/');
    if (slash == std::string::npos) {
        if (!is_int(s))
            throw std::invalid_argument("malformed rational '" + s + "'");
        return Rat(Int(s));
    }
    std::string num = s.substr(0, slash), den = s.substr(slash + 1);
    if (!is_int(num) || !is_int(den))
        throw std::invalid_argument("malformed rational '" + s + "'");
    Int d(den);
    if (d == 0)
        throw std::invalid_argument("zero denominator in rational '" + s + "'");
    return Rat(Int(num), d);
}

// A rational extended with +infinity; the value taken by d_T and by deaths
// of essential classes.
struct ExtendedRat {
    bool infinite = false;
    Rat value = 0;

    static ExtendedRat infinity() { return ExtendedRat{true, 0}; }
    static ExtendedRat finite(const Rat &r) { return ExtendedRat{false, r}; }

    bool operator==(const ExtendedRat &o) const {
        return infinite == o.infinite && (infinite || value == o.value);
    }
    bool operator<(const ExtendedRat &o) const {
        if (infinite)
            return false;
        if (o.infinite)
            return true;
        return value < o.value;
    }
    bool operator<=(const ExtendedRat &o) const { return *this < o || *this == o; }

    ExtendedRat operator+(const ExtendedRat &o) const {
        if (infinite || o.infinite)
            return infinity();
        return finite(value + o.value);
    }

    std::string str() const { return infinite ? "inf" : format_rat(value); }
};

} // namespace tp
