#pragma once
// rational.hpp - arbitrary-precision integers/rationals, exact interval
// arithmetic over rationals, parsing/formatting, and a small deterministic
// PRNG used wherever reproducibility under a seed is required.

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "betadim/errors.hpp"

namespace betadim {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Int rat_num(const Rat& r) { return boost::multiprecision::numerator(r); }
inline Int rat_den(const Rat& r) { return boost::multiprecision::denominator(r); }

inline int sign_of(const Rat& r) { return r.sign(); }
inline int sign_of(const Int& n) { return n.sign(); }

// Floor of a rational (exact; handles negatives).
inline Int rat_floor(const Rat& x) {
    Int n = rat_num(x), d = rat_den(x);
    Int q = n / d;
    if (n < 0 && q * d != n) --q;
    return q;
}

inline Int int_pow(Int base, unsigned e) {
    Int r = 1;
    while (e) {
        if (e & 1) r *= base;
        base *= base;
        e >>= 1;
    }
    return r;
}

inline Rat rat_pow(const Rat& base, long e) {
    if (e == 0) return Rat(1);
    Rat b = e > 0 ? base : Rat(1) / base;
    unsigned long n = static_cast<unsigned long>(e > 0 ? e : -e);
    Rat r = 1;
    while (n) {
        if (n & 1) r *= b;
        b *= b;
        n >>= 1;
    }
    return r;
}

// ---- Exact interval arithmetic over Q ----

struct RatInterval {
    Rat lo, hi;

    RatInterval() : lo(0), hi(0) {}
    RatInterval(Rat a, Rat b) : lo(std::move(a)), hi(std::move(b)) {}
    static RatInterval point(const Rat& v) { return {v, v}; }

    Rat width() const { return hi - lo; }
    bool contains_zero() const { return lo <= 0 && 0 <= hi; }
    bool is_point() const { return lo == hi; }
    Rat mid() const { return (lo + hi) / 2; }
};

inline RatInterval iv_add(const RatInterval& a, const RatInterval& b) {
    return {a.lo + b.lo, a.hi + b.hi};
}

inline RatInterval iv_sub(const RatInterval& a, const RatInterval& b) {
    return {a.lo - b.hi, a.hi - b.lo};
}

inline RatInterval iv_neg(const RatInterval& a) { return {-a.hi, -a.lo}; }

inline RatInterval iv_mul(const RatInterval& a, const RatInterval& b) {
    Rat p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
    Rat lo = std::min(std::min(p1, p2), std::min(p3, p4));
    Rat hi = std::max(std::max(p1, p2), std::max(p3, p4));
    return {lo, hi};
}

inline RatInterval iv_scale(const RatInterval& a, const Rat& c) {
    if (c >= 0) return {a.lo * c, a.hi * c};
    return {a.hi * c, a.lo * c};
}

// ---- Outward-rounded double enclosures ----
//
// One ulp outward after every primitive operation over-covers the 0.5 ulp
// rounding of that operation, so these stay rigorous without fesetround.

struct DblInterval {
    double lo, hi;

    static DblInterval whole() {
        return {-std::numeric_limits<double>::infinity(),
                std::numeric_limits<double>::infinity()};
    }
    bool finite() const { return std::isfinite(lo) && std::isfinite(hi); }
    double width() const { return hi - lo; }
};

inline double step_down(double v) {
    return std::nextafter(v, -std::numeric_limits<double>::infinity());
}
inline double step_up(double v) {
    return std::nextafter(v, std::numeric_limits<double>::infinity());
}

inline DblInterval dbl_add(const DblInterval& a, const DblInterval& b) {
    return {step_down(a.lo + b.lo), step_up(a.hi + b.hi)};
}

inline DblInterval dbl_mul(const DblInterval& a, const DblInterval& b) {
    double p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
    double lo = std::min(std::min(p1, p2), std::min(p3, p4));
    double hi = std::max(std::max(p1, p2), std::max(p3, p4));
    return {step_down(lo), step_up(hi)};
}

// Rational -> double enclosure (round-to-nearest widened by one ulp).
inline DblInterval dbl_of_rat(const Rat& r) {
    double v = r.template convert_to<double>();
    if (!std::isfinite(v)) return DblInterval::whole();
    return {step_down(v), step_up(v)};
}

inline DblInterval dbl_of_interval(const RatInterval& iv) {
    double lo = iv.lo.template convert_to<double>();
    double hi = iv.hi.template convert_to<double>();
    if (!std::isfinite(lo) || !std::isfinite(hi)) return DblInterval::whole();
    return {step_down(lo), step_up(hi)};
}

// ---- Parsing ----

// Accepts "p/q", integers, and plain decimals ("0.25", "-3.5").
inline Rat parse_rational(const std::string& s) {
    if (s.empty()) raise(errc::rejected_digits, "empty rational literal");
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        Int n(s.substr(0, slash));
        Int d(s.substr(slash + 1));
        if (d == 0) raise(errc::rejected_digits, "zero denominator in '" + s + "'");
        return Rat(n, d);
    }
    auto dot = s.find('.');
    if (dot == std::string::npos) return Rat(Int(s));
    std::string head = s.substr(0, dot), tail = s.substr(dot + 1);
    bool neg = !head.empty() && head[0] == '-';
    if (head.empty() || head == "-" || head == "+") head += "0";
    Int ipart(head);
    Int fpart = tail.empty() ? Int(0) : Int(tail);
    Int scale = int_pow(10, static_cast<unsigned>(tail.size()));
    Rat frac(fpart, scale);
    return neg ? Rat(ipart) - frac : Rat(ipart) + frac;
}

// ---- Formatting ----

inline std::string rat_string(const Rat& r) {
    if (rat_den(r) == 1) return rat_num(r).str();
    return rat_num(r).str() + "/" + rat_den(r).str();
}

// Correctly rounded decimal with `sig` significant digits. Positional
// notation when the exponent is moderate, scientific otherwise.
inline std::string decimal_string(const Rat& x, unsigned sig = 12) {
    if (sig == 0) sig = 1;
    if (x == 0) return "0";
    bool neg = x < 0;
    Rat a = neg ? -x : x;

    // exponent e with 10^e <= a < 10^(e+1)
    long e = 0;
    {
        Int n = rat_num(a), d = rat_den(a);
        long dn = static_cast<long>(n.str().size());
        long dd = static_cast<long>(d.str().size());
        e = dn - dd;  // within 1 of the truth; fix up below
        Rat p = rat_pow(Rat(10), e);
        while (a < p) { --e; p /= 10; }
        while (a >= p * 10) { ++e; p *= 10; }
    }

    // t = round(a * 10^(sig-1-e)), half away from zero
    Rat scaled = a * rat_pow(Rat(10), static_cast<long>(sig) - 1 - e);
    Int t = rat_floor(scaled + Rat(1, 2));
    Int cap = int_pow(10, sig);
    if (t >= cap) { t /= 10; ++e; }

    std::string digits = t.str();
    while (digits.size() < sig) digits = "0" + digits;  // leading zeros lost by str()

    std::string out;
    if (e >= static_cast<long>(sig) || e < -6) {
        out = digits.substr(0, 1);
        std::string rest = digits.substr(1);
        while (!rest.empty() && rest.back() == '0') rest.pop_back();
        if (!rest.empty()) out += "." + rest;
        out += "e" + std::to_string(e);
    } else if (e >= 0) {
        out = digits.substr(0, static_cast<size_t>(e) + 1);
        std::string rest = digits.substr(static_cast<size_t>(e) + 1);
        while (!rest.empty() && rest.back() == '0') rest.pop_back();
        if (!rest.empty()) out += "." + rest;
    } else {
        out = "0.";
        out.append(static_cast<size_t>(-e - 1), '0');
        std::string rest = digits;
        while (rest.size() > 1 && rest.back() == '0') rest.pop_back();
        out += rest;
    }
    return neg ? "-" + out : out;
}

// ---- Deterministic PRNG ----

// splitmix64: tiny, portable, and splittable; used for all seeded sampling.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // independent child stream
    SplitMix64 split(std::uint64_t salt) {
        return SplitMix64(next() ^ (salt * 0x9e3779b97f4a7c15ULL + 0x7f4a7c159e3779b9ULL));
    }

    int next_bit() { return static_cast<int>(next() >> 63); }

    // uniform integer in [0, 2^bits)
    Int next_bits(unsigned bits) {
        Int acc = 0;
        unsigned got = 0;
        while (got < bits) {
            unsigned take = std::min(64u, bits - got);
            std::uint64_t w = next();
            if (take < 64) w >>= (64 - take);
            acc <<= take;
            acc += w;
            got += take;
        }
        return acc;
    }
};

}  // namespace betadim
