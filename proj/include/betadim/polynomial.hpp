#pragma once
// polynomial.hpp - exact polynomial arithmetic over Q (division, gcd, Sturm
// chains) plus certified complex root enclosures used for minimal-polynomial
// extraction and Pisot classification.
//
// Coefficient vectors are little-endian: c[k] multiplies x^k.

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <complex>
#include <vector>

#include "betadim/rational.hpp"

namespace betadim {

using RatPoly = std::vector<Rat>;
using IntPoly = std::vector<Int>;

inline void poly_trim(RatPoly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

inline int poly_degree(const RatPoly& p) {
    for (size_t i = p.size(); i-- > 0;)
        if (p[i] != 0) return static_cast<int>(i);
    return -1;
}

inline RatPoly to_rat_poly(const IntPoly& p) {
    RatPoly r(p.size());
    for (size_t i = 0; i < p.size(); ++i) r[i] = Rat(p[i]);
    return r;
}

inline Rat poly_eval(const RatPoly& p, const Rat& x) {
    Rat acc = 0;
    for (size_t i = p.size(); i-- > 0;) acc = acc * x + p[i];
    return acc;
}

inline Rat poly_eval(const IntPoly& p, const Rat& x) { return poly_eval(to_rat_poly(p), x); }

inline RatInterval poly_eval_interval(const RatPoly& p, const RatInterval& x) {
    RatInterval acc = RatInterval::point(0);
    for (size_t i = p.size(); i-- > 0;) {
        acc = iv_mul(acc, x);
        acc = iv_add(acc, RatInterval::point(p[i]));
    }
    return acc;
}

inline RatPoly poly_derivative(const RatPoly& p) {
    if (p.size() <= 1) return {};
    RatPoly d(p.size() - 1);
    for (size_t i = 1; i < p.size(); ++i) d[i - 1] = p[i] * Rat(static_cast<long>(i));
    return d;
}

inline RatPoly poly_neg(RatPoly p) {
    for (auto& c : p) c = -c;
    return p;
}

inline RatPoly poly_mul(const RatPoly& a, const RatPoly& b) {
    if (a.empty() || b.empty()) return {};
    RatPoly r(a.size() + b.size() - 1, Rat(0));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    poly_trim(r);
    return r;
}

// Euclidean division; q*d + r == n with deg r < deg d.
inline std::pair<RatPoly, RatPoly> poly_divmod(RatPoly n, const RatPoly& d) {
    int dd = poly_degree(d);
    if (dd < 0) raise(errc::internal, "polynomial division by zero");
    poly_trim(n);
    int dn = poly_degree(n);
    if (dn < dd) return {{}, n};
    RatPoly q(static_cast<size_t>(dn - dd) + 1, Rat(0));
    const Rat lead = d[static_cast<size_t>(dd)];
    for (int k = dn; k >= dd; --k) {
        Rat c = n[static_cast<size_t>(k)] / lead;
        if (c == 0) continue;
        q[static_cast<size_t>(k - dd)] = c;
        for (int j = 0; j <= dd; ++j)
            n[static_cast<size_t>(k - dd + j)] -= c * d[static_cast<size_t>(j)];
    }
    poly_trim(n);
    return {q, n};
}

inline RatPoly poly_monic(RatPoly p) {
    poly_trim(p);
    if (p.empty()) return p;
    Rat lead = p.back();
    for (auto& c : p) c /= lead;
    return p;
}

inline RatPoly poly_gcd(RatPoly a, RatPoly b) {
    poly_trim(a);
    poly_trim(b);
    while (poly_degree(b) >= 0) {
        auto [q, r] = poly_divmod(a, b);
        (void)q;
        a = std::move(b);
        b = std::move(r);
    }
    return poly_monic(a);
}

// Monic squarefree part p / gcd(p, p'). For monic integer input the result
// is again a monic integer polynomial.
inline RatPoly poly_squarefree(const RatPoly& p) {
    RatPoly g = poly_gcd(p, poly_derivative(p));
    if (poly_degree(g) <= 0) return poly_monic(p);
    auto [q, r] = poly_divmod(p, g);
    if (poly_degree(r) >= 0) raise(errc::internal, "squarefree division not exact");
    return poly_monic(q);
}

inline bool poly_is_integral(const RatPoly& p) {
    for (const auto& c : p)
        if (rat_den(c) != 1) return false;
    return true;
}

inline IntPoly to_int_poly(const RatPoly& p) {
    IntPoly r(p.size());
    for (size_t i = 0; i < p.size(); ++i) {
        if (rat_den(p[i]) != 1) raise(errc::internal, "expected integer coefficients");
        r[i] = rat_num(p[i]);
    }
    return r;
}

// Exact divisibility over Q.
inline bool poly_divides(const RatPoly& divisor, const RatPoly& dividend) {
    auto [q, r] = poly_divmod(dividend, divisor);
    (void)q;
    return poly_degree(r) < 0;
}

// ---- Sturm chains ----

inline std::vector<RatPoly> sturm_chain(const RatPoly& squarefree) {
    std::vector<RatPoly> chain;
    chain.push_back(squarefree);
    chain.push_back(poly_derivative(squarefree));
    while (poly_degree(chain.back()) > 0) {
        auto [q, r] = poly_divmod(chain[chain.size() - 2], chain.back());
        (void)q;
        if (poly_degree(r) < 0) break;  // happens only for non-squarefree input
        chain.push_back(poly_neg(std::move(r)));
    }
    return chain;
}

inline int sturm_variations(const std::vector<RatPoly>& chain, const Rat& x) {
    int var = 0, last = 0;
    for (const auto& p : chain) {
        int s = sign_of(poly_eval(p, x));
        if (s == 0) continue;
        if (last != 0 && s != last) ++var;
        last = s;
    }
    return var;
}

// Number of distinct real roots in the open interval (a, b); requires the
// (squarefree) polynomial to be nonzero at both endpoints.
inline int sturm_count_open(const RatPoly& squarefree, const Rat& a, const Rat& b) {
    if (poly_eval(squarefree, a) == 0 || poly_eval(squarefree, b) == 0)
        raise(errc::internal, "sturm_count_open: root at interval endpoint");
    auto chain = sturm_chain(squarefree);
    return sturm_variations(chain, a) - sturm_variations(chain, b);
}

// ---- Certified complex roots ----

using F50 = boost::multiprecision::cpp_bin_float_50;

struct Cx50 {
    F50 re, im;

    Cx50() : re(0), im(0) {}
    Cx50(F50 r, F50 i) : re(std::move(r)), im(std::move(i)) {}

    Cx50 operator+(const Cx50& o) const { return {re + o.re, im + o.im}; }
    Cx50 operator-(const Cx50& o) const { return {re - o.re, im - o.im}; }
    Cx50 operator*(const Cx50& o) const {
        return {re * o.re - im * o.im, re * o.im + im * o.re};
    }
    Cx50 operator/(const Cx50& o) const {
        F50 d = o.re * o.re + o.im * o.im;
        return {(re * o.re + im * o.im) / d, (im * o.re - re * o.im) / d};
    }
    F50 abs() const { return sqrt(re * re + im * im); }
};

struct CertifiedRoot {
    Cx50 z;       // polished approximation
    F50 radius;   // Weierstrass disk radius (all roots lie in the disk union;
                  // pairwise disjoint disks isolate one root each)
    bool disjoint = false;
};

namespace detail {

inline Cx50 cx_eval(const IntPoly& p, const Cx50& z) {
    Cx50 acc;
    for (size_t i = p.size(); i-- > 0;) acc = acc * z + Cx50(F50(p[i]), F50(0));
    return acc;
}

// Durand-Kerner in double precision; p must be monic and squarefree.
inline std::vector<std::complex<double>> durand_kerner(const IntPoly& p) {
    const int deg = static_cast<int>(p.size()) - 1;
    std::vector<std::complex<double>> c(p.size());
    for (size_t i = 0; i < p.size(); ++i) c[i] = p[i].template convert_to<double>();

    double bound = 0;
    for (int i = 0; i < deg; ++i) bound = std::max(bound, std::abs(c[static_cast<size_t>(i)]));
    bound += 1.0;

    std::vector<std::complex<double>> z(static_cast<size_t>(deg));
    const std::complex<double> seed(0.4, 0.9);
    std::complex<double> w(1.0, 0.0);
    for (int i = 0; i < deg; ++i) {
        w *= seed;
        z[static_cast<size_t>(i)] = bound * w;
    }

    auto eval = [&](std::complex<double> x) {
        std::complex<double> acc = 0;
        for (size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
        return acc;
    };

    for (int iter = 0; iter < 600; ++iter) {
        double worst = 0;
        for (int i = 0; i < deg; ++i) {
            std::complex<double> denom = 1;
            for (int j = 0; j < deg; ++j)
                if (j != i) denom *= z[static_cast<size_t>(i)] - z[static_cast<size_t>(j)];
            std::complex<double> corr = eval(z[static_cast<size_t>(i)]) / denom;
            z[static_cast<size_t>(i)] -= corr;
            worst = std::max(worst, std::abs(corr));
        }
        if (worst < 1e-14 * bound) break;
    }
    return z;
}

}  // namespace detail

// Roots of a monic squarefree integer polynomial with rigorous Weierstrass
// enclosure radii, computed at ~50 decimal digits.
inline std::vector<CertifiedRoot> certified_roots(const IntPoly& monic_squarefree) {
    const int deg = static_cast<int>(monic_squarefree.size()) - 1;
    std::vector<CertifiedRoot> roots;
    if (deg <= 0) return roots;

    IntPoly dpoly(static_cast<size_t>(deg));
    for (int i = 1; i <= deg; ++i)
        dpoly[static_cast<size_t>(i - 1)] = monic_squarefree[static_cast<size_t>(i)] * i;

    auto approx = detail::durand_kerner(monic_squarefree);
    std::vector<Cx50> z(approx.size());
    for (size_t i = 0; i < approx.size(); ++i)
        z[i] = Cx50(F50(approx[i].real()), F50(approx[i].imag()));

    // Newton polish at 50 digits
    for (auto& zi : z) {
        for (int iter = 0; iter < 80; ++iter) {
            Cx50 f = detail::cx_eval(monic_squarefree, zi);
            Cx50 df = detail::cx_eval(dpoly, zi);
            if (df.abs() == 0) break;
            Cx50 step = f / df;
            zi = zi - step;
            if (step.abs() < F50("1e-45") * (F50(1) + zi.abs())) break;
        }
    }

    roots.resize(z.size());
    const F50 inflate("1.000001");
    for (size_t i = 0; i < z.size(); ++i) {
        F50 prod = 1;
        for (size_t j = 0; j < z.size(); ++j)
            if (j != i) prod *= (z[i] - z[j]).abs();
        F50 w = detail::cx_eval(monic_squarefree, z[i]).abs();
        roots[i].z = z[i];
        roots[i].radius = prod == 0 ? F50("1e10")
                                    : (F50(deg) * w / prod) * inflate + F50("1e-45");
    }
    for (size_t i = 0; i < roots.size(); ++i) {
        bool ok = true;
        for (size_t j = 0; j < roots.size(); ++j) {
            if (j == i) continue;
            if ((roots[i].z - roots[j].z).abs() <= roots[i].radius + roots[j].radius) {
                ok = false;
                break;
            }
        }
        roots[i].disjoint = ok;
    }
    return roots;
}

// The monic irreducible integer factor of `poly` vanishing at the unique real
// root inside `beta_iv`. Empty result means extraction failed and callers
// must fall back to approximate equality mode.
inline IntPoly minimal_factor_at_root(const IntPoly& poly, const RatInterval& beta_iv) {
    RatPoly rp = to_rat_poly(poly);
    RatPoly sf_rat = poly_squarefree(rp);
    if (!poly_is_integral(sf_rat)) return {};
    IntPoly sf = to_int_poly(sf_rat);
    const int deg = static_cast<int>(sf.size()) - 1;
    if (deg <= 0) return {};
    if (deg == 1) return sf;

    auto roots = certified_roots(sf);

    // locate beta's root: the disk meeting the isolating interval
    const F50 lo = F50(rat_num(beta_iv.lo)) / F50(rat_den(beta_iv.lo));
    const F50 hi = F50(rat_num(beta_iv.hi)) / F50(rat_den(beta_iv.hi));
    int beta_idx = -1;
    for (size_t i = 0; i < roots.size(); ++i) {
        const auto& r = roots[i];
        if (abs(r.z.im) > r.radius) continue;
        if (r.z.re + r.radius < lo || r.z.re - r.radius > hi) continue;
        if (beta_idx >= 0) return {};  // ambiguous; interval not tight enough
        beta_idx = static_cast<int>(i);
    }
    if (beta_idx < 0) return {};

    std::vector<int> others;
    for (int i = 0; i < static_cast<int>(roots.size()); ++i)
        if (i != beta_idx) others.push_back(i);
    const int m = static_cast<int>(others.size());

    for (int size = 0; size <= m; ++size) {
        for (unsigned mask = 0; mask < (1u << m); ++mask) {
            if (__builtin_popcount(mask) != size) continue;
            std::vector<Cx50> factors{roots[static_cast<size_t>(beta_idx)].z};
            for (int b = 0; b < m; ++b)
                if (mask & (1u << b)) factors.push_back(roots[static_cast<size_t>(others[static_cast<size_t>(b)])].z);

            // expand prod (x - z_i)
            std::vector<Cx50> coef{Cx50(F50(1), F50(0))};
            for (const auto& z : factors) {
                std::vector<Cx50> next(coef.size() + 1);
                for (size_t i = 0; i < coef.size(); ++i) {
                    next[i + 1] = next[i + 1] + coef[i];
                    next[i] = next[i] - coef[i] * z;
                }
                coef = std::move(next);
            }

            IntPoly cand(coef.size());
            bool near_int = true;
            for (size_t i = 0; i < coef.size(); ++i) {
                if (abs(coef[i].im) > F50("1e-20")) { near_int = false; break; }
                F50 rounded = floor(coef[i].re + F50(0.5));
                if (abs(coef[i].re - rounded) > F50("1e-20")) { near_int = false; break; }
                cand[i] = rounded.convert_to<Int>();
            }
            if (!near_int) continue;
            if (cand.back() != 1) continue;

            RatPoly cand_rat = to_rat_poly(cand);
            if (!poly_divides(cand_rat, sf_rat)) continue;
            // candidate must change sign across the isolating interval
            if (sign_of(poly_eval(cand_rat, beta_iv.lo)) *
                    sign_of(poly_eval(cand_rat, beta_iv.hi)) >= 0 &&
                !beta_iv.is_point())
                continue;
            if (beta_iv.is_point() && poly_eval(cand_rat, beta_iv.lo) != 0) continue;
            return cand;
        }
    }
    return {};
}

}  // namespace betadim
