#ifndef SCDSTAB_RATIONAL_HPP
#define SCDSTAB_RATIONAL_HPP

#include <boost/multiprecision/cpp_int.hpp>
#include <cctype>
#include <stdexcept>
#include <string>

namespace scdstab {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline double to_double(const Rational& r) {
    return static_cast<double>(r);
}

inline std::string to_string(const Rational& r) {
    return r.str();
}

/// Parses "p/q", integer, or decimal literals ("-3.25" -> -13/4) exactly.
inline Rational parse_rational(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("empty rational literal");
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        BigInt num(s.substr(0, slash));
        BigInt den(s.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator in '" + s + "'");
        return Rational(num, den);
    }
    auto dot = s.find('.');
    auto epos = s.find_first_of("eE");
    if (dot == std::string::npos && epos == std::string::npos) return Rational(BigInt(s));
    // decimal: expand digits literally
    std::string mantissa = epos == std::string::npos ? s : s.substr(0, epos);
    long exp10 = epos == std::string::npos ? 0 : std::stol(s.substr(epos + 1));
    dot = mantissa.find('.');
    std::string digits = dot == std::string::npos
                             ? mantissa
                             : mantissa.substr(0, dot) + mantissa.substr(dot + 1);
    if (dot != std::string::npos) exp10 -= static_cast<long>(mantissa.size() - dot - 1);
    if (digits.empty() || digits == "-" || digits == "+")
        throw std::invalid_argument("bad rational literal '" + s + "'");
    // strip leading zeros so cpp_int does not read "025" as octal
    std::string sign = (digits[0] == '-' || digits[0] == '+') ? digits.substr(0, 1) : "";
    std::string body = digits.substr(sign.size());
    auto nz = body.find_first_not_of('0');
    body = nz == std::string::npos ? "0" : body.substr(nz);
    BigInt num(sign + body);
    BigInt den = 1;
    for (long i = 0; i < (exp10 < 0 ? -exp10 : exp10); ++i) den *= 10;
    return exp10 < 0 ? Rational(num, den) : Rational(num * den);
}

}  // namespace scdstab

#endif
