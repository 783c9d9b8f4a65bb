#pragma once
// number_field.hpp - exact arithmetic in Q(beta) for beta defined by the
// greedy expansion of 1. Elements are rational-coefficient representatives
// of degree < n, reduced modulo the defining polynomial; equality and signs
// are decided exactly through the minimal polynomial plus certified interval
// refinement. A fallback "approximate" mode (minimal polynomial unavailable)
// degrades equality to interval tests at width 2^-256.

#include <atomic>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "betadim/polynomial.hpp"
#include "betadim/rational.hpp"

namespace betadim {

class BetaField;
using FieldPtr = std::shared_ptr<const BetaField>;

struct ConjugateReport {
    double re = 0, im = 0;
    double modulus_lo = 0, modulus_hi = 0;
};

struct PisotReport {
    bool pisot = false;
    std::vector<ConjugateReport> conjugates;
};

namespace detail {

// extended Euclid over Q[x]: g = u*a + v*b, g monic (or constant 1)
inline std::tuple<RatPoly, RatPoly, RatPoly> poly_ext_gcd(RatPoly a, RatPoly b) {
    RatPoly u0{Rat(1)}, v0{}, u1{}, v1{Rat(1)};
    poly_trim(a);
    poly_trim(b);
    while (poly_degree(b) >= 0) {
        auto [q, r] = poly_divmod(a, b);
        RatPoly u2 = [&] {
            RatPoly t = poly_mul(q, u1);
            RatPoly res = u0;
            res.resize(std::max(res.size(), t.size()), Rat(0));
            for (size_t i = 0; i < t.size(); ++i) res[i] -= t[i];
            poly_trim(res);
            return res;
        }();
        RatPoly v2 = [&] {
            RatPoly t = poly_mul(q, v1);
            RatPoly res = v0;
            res.resize(std::max(res.size(), t.size()), Rat(0));
            for (size_t i = 0; i < t.size(); ++i) res[i] -= t[i];
            poly_trim(res);
            return res;
        }();
        a = std::move(b);
        b = std::move(r);
        u0 = std::move(u1);
        u1 = std::move(u2);
        v0 = std::move(v1);
        v1 = std::move(v2);
    }
    if (poly_degree(a) >= 0) {
        Rat lead = a.back();
        for (auto& c : a) c /= lead;
        for (auto& c : u0) c /= lead;
        for (auto& c : v0) c /= lead;
    }
    return {a, u0, v0};
}

}  // namespace detail

class BetaField {
public:
    static constexpr int kSignRefineCap = 320;

    // Builds the field whose beta is the unique root > 1 of
    // x^n = a_1 x^{n-1} + ... + a_n.
    static FieldPtr from_digits(const std::vector<int>& digits, bool force_fallback = false) {
        if (digits.size() < 2)
            raise(errc::rejected_digits, "need at least two digits");
        for (int d : digits)
            if (d < 1) raise(errc::rejected_digits, "digits must be >= 1");

        auto f = std::shared_ptr<BetaField>(new BetaField());
        f->digits_ = digits;
        const size_t n = digits.size();
        f->poly_.assign(n + 1, Int(0));
        f->poly_[n] = 1;
        for (size_t i = 1; i <= n; ++i) f->poly_[n - i] = -Int(digits[i - 1]);
        f->poly_rat_ = to_rat_poly(f->poly_);

        f->isolate_root();
        if (force_fallback) {
            f->min_poly_.clear();
        } else if (f->beta_interval_.is_point()) {
            // rational (integer) beta
            f->min_poly_ = {-rat_num(f->beta_interval_.lo), Int(1)};
        } else {
            f->min_poly_ = minimal_factor_at_root(f->poly_, f->beta_interval_);
        }
        f->approximate_ = f->min_poly_.empty();
        if (!f->approximate_) f->min_poly_rat_ = to_rat_poly(f->min_poly_);

        f->compute_floor();
        f->build_power_table();
        f->build_domain_sup();
        f->build_double_powers();
        return f;
    }

    const std::vector<int>& digits() const { return digits_; }
    size_t degree() const { return digits_.size(); }
    const IntPoly& poly() const { return poly_; }
    const IntPoly& min_poly() const { return min_poly_; }
    const RatInterval& beta_interval() const { return beta_interval_; }
    bool approximate() const { return approximate_; }
    int floor_beta() const { return floor_beta_; }
    int ceil_beta() const { return beta_interval_.is_point() ? floor_beta_ : floor_beta_ + 1; }
    bool monotone_on_bracket() const { return monotone_on_bracket_; }
    const std::vector<Rat>& domain_sup_coeffs() const { return domain_sup_coeffs_; }
    const std::vector<DblInterval>& beta_power_enclosures() const { return beta_pow_enc_; }
    const std::vector<IntPoly>& reduction_rows() const { return reduction_rows_; }

    // greedy-validation cache: -1 unknown, 0 failed, 1 confirmed
    int greedy_state() const { return greedy_state_.load(std::memory_order_relaxed); }
    void set_greedy_state(bool ok) const {
        greedy_state_.store(ok ? 1 : 0, std::memory_order_relaxed);
    }

    // Interval refined until width <= target (bisection on the sign change
    // of the defining polynomial); stateless, callers keep the result.
    RatInterval refined_interval(const Rat& target_width) const {
        RatInterval iv = beta_interval_;
        if (iv.is_point()) return iv;
        int lo_sign = sign_of(poly_eval(poly_rat_, iv.lo));
        while (iv.width() > target_width) {
            Rat mid = iv.mid();
            int s = sign_of(poly_eval(poly_rat_, mid));
            if (s == 0) return RatInterval::point(mid);
            if (s == lo_sign)
                iv.lo = mid;
            else
                iv.hi = mid;
        }
        return iv;
    }

    // Pisot test with certified conjugate moduli. eps_root guards the strict
    // inequality |conjugate| < 1 - eps_root.
    PisotReport is_pisot(double eps_root = 1e-9) const {
        if (approximate_)
            raise(errc::inconclusive, "minimal polynomial unavailable (approximate mode)");
        PisotReport rep;
        if (min_poly_.size() == 2) {  // beta is an integer; no conjugates
            rep.pisot = true;
            return rep;
        }
        auto roots = certified_roots(min_poly_);
        const F50 lo = F50(rat_num(beta_interval_.lo)) / F50(rat_den(beta_interval_.lo));
        const F50 hi = F50(rat_num(beta_interval_.hi)) / F50(rat_den(beta_interval_.hi));
        int beta_idx = -1;
        for (size_t i = 0; i < roots.size(); ++i) {
            const auto& r = roots[i];
            if (abs(r.z.im) > r.radius) continue;
            if (r.z.re + r.radius < lo || r.z.re - r.radius > hi) continue;
            beta_idx = static_cast<int>(i);
            break;
        }
        if (beta_idx < 0) raise(errc::inconclusive, "could not match beta among roots");

        rep.pisot = true;
        for (size_t i = 0; i < roots.size(); ++i) {
            if (static_cast<int>(i) == beta_idx) continue;
            const auto& r = roots[i];
            F50 mod = r.z.abs();
            F50 mlo = mod - r.radius, mhi = mod + r.radius;
            if (mlo < 0) mlo = 0;
            ConjugateReport cr;
            cr.re = r.z.re.convert_to<double>();
            cr.im = r.z.im.convert_to<double>();
            cr.modulus_lo = step_down(mlo.convert_to<double>());
            cr.modulus_hi = step_up(mhi.convert_to<double>());
            rep.conjugates.push_back(cr);
            const F50 threshold = F50(1) - F50(eps_root);
            if (mhi < threshold) continue;      // certified inside
            if (mlo > threshold) {              // certified outside the guard
                rep.pisot = false;
                continue;
            }
            raise(errc::inconclusive, "conjugate modulus enclosure straddles the unit guard");
        }
        return rep;
    }

private:
    BetaField() = default;

    void isolate_root() {
        const int a1 = digits_[0];
        // integer roots first: the only candidates in (1, a1+1] are 2..a1+1
        for (int k = 2; k <= a1 + 1; ++k) {
            if (poly_eval(poly_rat_, Rat(k)) == 0) {
                beta_interval_ = RatInterval::point(Rat(k));
                monotone_on_bracket_ = false;
                return;
            }
        }
        RatInterval iv(Rat(1), Rat(a1 + 1));
        if (sign_of(poly_eval(poly_rat_, iv.lo)) >= 0 ||
            sign_of(poly_eval(poly_rat_, iv.hi)) <= 0)
            raise(errc::internal, "defining polynomial lacks the expected sign change");

        // uniqueness certificate
        RatPoly sf = poly_squarefree(poly_rat_);
        if (sturm_count_open(sf, iv.lo, iv.hi) != 1)
            raise(errc::internal, "expected exactly one root in (1, a_1+1)");

        // monotonicity of the defining polynomial on the bracket (checked,
        // not assumed; informational)
        monotone_on_bracket_ = false;
        RatPoly dp = poly_derivative(poly_rat_);
        if (poly_eval(dp, iv.lo) > 0 && poly_eval(dp, iv.hi) > 0) {
            RatPoly dsf = poly_squarefree(dp);
            if (poly_eval(dsf, iv.lo) != 0 && poly_eval(dsf, iv.hi) != 0 &&
                sturm_count_open(dsf, iv.lo, iv.hi) == 0)
                monotone_on_bracket_ = true;
        }

        // refine to relative width 1e-12
        Rat target = Rat(1, Int("1000000000000"));
        int lo_sign = sign_of(poly_eval(poly_rat_, iv.lo));
        while (iv.width() > target * iv.lo) {
            Rat mid = iv.mid();
            int s = sign_of(poly_eval(poly_rat_, mid));
            if (s == 0) {
                iv = RatInterval::point(mid);
                break;
            }
            if (s == lo_sign)
                iv.lo = mid;
            else
                iv.hi = mid;
        }
        beta_interval_ = iv;
    }

    void compute_floor() {
        if (beta_interval_.is_point()) {
            floor_beta_ = static_cast<int>(rat_floor(beta_interval_.lo).convert_to<long>());
            return;
        }
        RatInterval iv = beta_interval_;
        while (rat_floor(iv.lo) != rat_floor(iv.hi))
            iv = refined_interval(iv.width() / 4);
        floor_beta_ = static_cast<int>(rat_floor(iv.lo).convert_to<long>());
    }

    void build_power_table() {
        const size_t n = degree();
        // x^n mod poly, ascending
        IntPoly base(n);
        for (size_t k = 0; k < n; ++k) base[k] = Int(digits_[n - 1 - k]);
        reduction_rows_.clear();
        reduction_rows_.push_back(base);
        for (size_t k = n + 1; k <= 2 * n - 2; ++k) {
            const IntPoly& prev = reduction_rows_.back();
            IntPoly next(n, Int(0));
            // multiply by x, then fold the overflow coefficient
            Int overflow = prev[n - 1];
            for (size_t i = n - 1; i >= 1; --i) next[i] = prev[i - 1];
            next[0] = 0;
            for (size_t i = 0; i < n; ++i) next[i] += overflow * base[i];
            reduction_rows_.push_back(std::move(next));
        }
    }

    void build_domain_sup() {
        // R = floor(beta) / (beta - 1); (x-1) is invertible mod poly since
        // poly(1) != 0.
        const size_t n = degree();
        RatPoly xm1{Rat(-1), Rat(1)};
        auto [g, u, v] = detail::poly_ext_gcd(xm1, poly_rat_);
        (void)v;
        if (poly_degree(g) != 0)
            raise(errc::internal, "x-1 not invertible modulo the defining polynomial");
        RatPoly inv = u;  // g is 1 after normalization
        // reduce and scale by floor(beta)
        auto [q, r] = poly_divmod(inv, poly_rat_);
        (void)q;
        domain_sup_coeffs_.assign(n, Rat(0));
        for (size_t i = 0; i < r.size(); ++i) domain_sup_coeffs_[i] = r[i] * floor_beta_;
    }

    void build_double_powers() {
        const size_t n = degree();
        RatInterval tight = refined_interval(beta_interval_.width());  // already tight
        DblInterval b = dbl_of_interval(tight);
        beta_pow_enc_.resize(n);
        beta_pow_enc_[0] = {1.0, 1.0};
        for (size_t i = 1; i < n; ++i) beta_pow_enc_[i] = dbl_mul(beta_pow_enc_[i - 1], b);
    }

    std::vector<int> digits_;
    IntPoly poly_;
    RatPoly poly_rat_;
    IntPoly min_poly_;
    RatPoly min_poly_rat_;
    RatInterval beta_interval_;
    bool approximate_ = false;
    bool monotone_on_bracket_ = false;
    int floor_beta_ = 1;
    std::vector<IntPoly> reduction_rows_;   // x^n .. x^(2n-2) mod poly
    std::vector<Rat> domain_sup_coeffs_;    // floor(beta)/(beta-1)
    std::vector<DblInterval> beta_pow_enc_;
    mutable std::atomic<int> greedy_state_{-1};

    friend class FieldElt;
};

inline bool same_field(const FieldPtr& a, const FieldPtr& b) {
    return a == b || (a && b && a->digits() == b->digits());
}

class FieldElt {
public:
    FieldElt() = default;

    FieldElt(FieldPtr field, std::vector<Rat> coeffs)
        : field_(std::move(field)), c_(std::move(coeffs)) {
        c_.resize(field_->degree(), Rat(0));
        refresh_enclosure();
    }

    static FieldElt zero(const FieldPtr& f) {
        return FieldElt(f, std::vector<Rat>(f->degree(), Rat(0)));
    }

    static FieldElt from_rational(const FieldPtr& f, const Rat& r) {
        std::vector<Rat> c(f->degree(), Rat(0));
        c[0] = r;
        return FieldElt(f, std::move(c));
    }

    static FieldElt beta(const FieldPtr& f) {
        std::vector<Rat> c(f->degree(), Rat(0));
        c[1] = 1;
        return FieldElt(f, std::move(c));
    }

    // floor(beta)/(beta-1), the right end of the domain
    static FieldElt domain_sup(const FieldPtr& f) {
        return FieldElt(f, f->domain_sup_coeffs());
    }

    const FieldPtr& field() const { return field_; }
    const std::vector<Rat>& coeffs() const { return c_; }
    const DblInterval& enclosure_fast() const { return enc_; }

    FieldElt operator+(const FieldElt& o) const {
        check_fields(o);
        std::vector<Rat> r(c_.size());
        for (size_t i = 0; i < c_.size(); ++i) r[i] = c_[i] + o.c_[i];
        return FieldElt(field_, std::move(r));
    }

    FieldElt operator-(const FieldElt& o) const {
        check_fields(o);
        std::vector<Rat> r(c_.size());
        for (size_t i = 0; i < c_.size(); ++i) r[i] = c_[i] - o.c_[i];
        return FieldElt(field_, std::move(r));
    }

    FieldElt operator-() const {
        std::vector<Rat> r(c_.size());
        for (size_t i = 0; i < c_.size(); ++i) r[i] = -c_[i];
        return FieldElt(field_, std::move(r));
    }

    FieldElt operator*(const FieldElt& o) const {
        check_fields(o);
        const size_t n = c_.size();
        std::vector<Rat> conv(2 * n - 1, Rat(0));
        for (size_t i = 0; i < n; ++i) {
            if (c_[i] == 0) continue;
            for (size_t j = 0; j < n; ++j) {
                if (o.c_[j] == 0) continue;
                conv[i + j] += c_[i] * o.c_[j];
            }
        }
        std::vector<Rat> r(conv.begin(), conv.begin() + static_cast<long>(n));
        const auto& rows = field_->reduction_rows();
        for (size_t k = n; k < conv.size(); ++k) {
            if (conv[k] == 0) continue;
            const IntPoly& row = rows[k - n];
            for (size_t i = 0; i < n; ++i)
                if (row[i] != 0) r[i] += conv[k] * row[i];
        }
        return FieldElt(field_, std::move(r));
    }

    FieldElt scaled(const Rat& s) const {
        std::vector<Rat> r(c_.size());
        for (size_t i = 0; i < c_.size(); ++i) r[i] = c_[i] * s;
        return FieldElt(field_, std::move(r));
    }

    // beta * this - k: the workhorse of every map in this library
    FieldElt beta_mul_minus(int k) const {
        const size_t n = c_.size();
        std::vector<Rat> r(n, Rat(0));
        for (size_t i = 0; i + 1 < n; ++i) r[i + 1] = c_[i];
        if (c_[n - 1] != 0) {
            const IntPoly& row = field_->reduction_rows()[0];
            for (size_t i = 0; i < n; ++i)
                if (row[i] != 0) r[i] += c_[n - 1] * row[i];
        }
        r[0] -= k;
        return FieldElt(field_, std::move(r));
    }

    bool is_rational_representative() const {
        for (size_t i = 1; i < c_.size(); ++i)
            if (c_[i] != 0) return false;
        return true;
    }

    // Exact value as a rational if the element lies in Q.
    std::optional<Rat> as_rational() const {
        if (is_rational_representative()) return c_[0];
        if (field_->approximate()) return std::nullopt;
        RatPoly rep(c_.begin(), c_.end());
        poly_trim(rep);
        auto [q, r] = poly_divmod(rep, field_->min_poly_rat_);
        (void)q;
        if (poly_degree(r) <= 0) return r.empty() ? Rat(0) : r[0];
        return std::nullopt;
    }

    bool is_zero() const {
        bool trivially_zero = true;
        for (const auto& c : c_)
            if (c != 0) { trivially_zero = false; break; }
        if (trivially_zero) return true;
        if (!field_->approximate()) {
            const size_t n = c_.size();
            if (field_->min_poly().size() == n + 1) return false;  // deg rep < deg min
            RatPoly rep(c_.begin(), c_.end());
            poly_trim(rep);
            if (poly_degree(rep) < poly_degree(field_->min_poly_rat_)) return false;
            auto [q, r] = poly_divmod(rep, field_->min_poly_rat_);
            (void)q;
            return poly_degree(r) < 0;
        }
        // approximate mode: interval width 2^-256 decides
        RatInterval v = enclosure_width_limited();
        return v.contains_zero();
    }

    // Exact sign at beta. {-1, 0, +1}; PrecisionExhausted only if interval
    // refinement fails to separate a provably nonzero value from 0.
    int sign() const {
        if (enc_.lo > 0) return 1;
        if (enc_.hi < 0) return -1;
        if (is_zero()) return 0;
        RatInterval iv = field_->beta_interval();
        RatPoly rep(c_.begin(), c_.end());
        poly_trim(rep);
        int lo_sign = iv.is_point() ? 0 : sign_of(poly_eval(field_->poly_rat_, iv.lo));
        for (int round = 0; round < BetaField::kSignRefineCap; ++round) {
            RatInterval v = poly_eval_interval(rep, iv);
            if (v.lo > 0) return 1;
            if (v.hi < 0) return -1;
            if (iv.is_point())
                raise(errc::internal, "exact evaluation contained zero for nonzero element");
            Rat mid = iv.mid();
            int s = sign_of(poly_eval(field_->poly_rat_, mid));
            if (s == 0) {
                iv = RatInterval::point(mid);
                continue;
            }
            if (s == lo_sign)
                iv.lo = mid;
            else
                iv.hi = mid;
        }
        raise(errc::precision_exhausted, "sign refinement exceeded the iteration cap");
    }

    // Interval-only sign: never consults the minimal polynomial, so exact
    // zeroes stay undecided. Returns nullopt when `rounds` refinements of the
    // beta interval cannot separate the value from 0.
    std::optional<int> sign_interval(int rounds) const {
        if (enc_.lo > 0) return 1;
        if (enc_.hi < 0) return -1;
        RatPoly rep(c_.begin(), c_.end());
        poly_trim(rep);
        if (poly_degree(rep) <= 0) {
            Rat v = rep.empty() ? Rat(0) : rep[0];
            return sign_of(v);
        }
        RatInterval iv = field_->beta_interval();
        int lo_sign = iv.is_point() ? 0 : sign_of(poly_eval(field_->poly_rat_, iv.lo));
        for (int round = 0; round < rounds; ++round) {
            RatInterval v = poly_eval_interval(rep, iv);
            if (v.lo > 0) return 1;
            if (v.hi < 0) return -1;
            if (iv.is_point()) return sign_of(v.lo);
            Rat mid = iv.mid();
            int s = sign_of(poly_eval(field_->poly_rat_, mid));
            if (s == 0) {
                iv = RatInterval::point(mid);
                continue;
            }
            if (s == lo_sign)
                iv.lo = mid;
            else
                iv.hi = mid;
        }
        return std::nullopt;
    }

    bool operator==(const FieldElt& o) const { return (*this - o).is_zero(); }
    bool operator!=(const FieldElt& o) const { return !(*this == o); }

    // Multiplicative inverse (value-level; representative modulo poly or the
    // minimal polynomial, whichever admits it).
    FieldElt inverse() const {
        if (is_zero()) raise(errc::internal, "inverse of zero");
        RatPoly rep(c_.begin(), c_.end());
        poly_trim(rep);
        {
            auto [g, u, v] = detail::poly_ext_gcd(rep, field_->poly_rat_);
            (void)v;
            if (poly_degree(g) == 0) return reduced_elt(u);
        }
        if (!field_->approximate()) {
            auto [g, u, v] = detail::poly_ext_gcd(rep, field_->min_poly_rat_);
            (void)v;
            if (poly_degree(g) == 0) return reduced_elt(u);
        }
        raise(errc::precision_exhausted, "element not invertible with available data");
    }

    // Rational enclosure of width <= 10^-decimal_digits; widths shrink
    // monotonically as the requested precision grows.
    RatInterval to_float(unsigned decimal_digits) const {
        Rat target = Rat(1, int_pow(10, decimal_digits));
        RatPoly rep(c_.begin(), c_.end());
        poly_trim(rep);
        if (poly_degree(rep) <= 0)
            return RatInterval::point(rep.empty() ? Rat(0) : rep[0]);
        RatInterval iv = field_->beta_interval();
        RatInterval v = poly_eval_interval(rep, iv);
        while (v.width() > target) {
            iv = field_->refined_interval(iv.width() / 16);
            v = poly_eval_interval(rep, iv);
            if (iv.is_point()) break;
        }
        return v;
    }

    std::string decimal(unsigned sig_digits = 12) const {
        RatInterval v = to_float(sig_digits + 6);
        return decimal_string(v.mid(), sig_digits);
    }

private:
    void check_fields(const FieldElt& o) const {
        if (!same_field(field_, o.field_))
            raise(errc::mixed_fields, "operands belong to different fields");
    }

    FieldElt reduced_elt(const RatPoly& p) const {
        auto [q, r] = poly_divmod(p, field_->poly_rat_);
        (void)q;
        std::vector<Rat> c(field_->degree(), Rat(0));
        for (size_t i = 0; i < r.size(); ++i) c[i] = r[i];
        return FieldElt(field_, std::move(c));
    }

    RatInterval enclosure_width_limited() const {
        RatPoly rep(c_.begin(), c_.end());
        poly_trim(rep);
        if (poly_degree(rep) <= 0)
            return RatInterval::point(rep.empty() ? Rat(0) : rep[0]);
        Rat target = field_->beta_interval().width();
        for (int i = 0; i < 256; ++i) target /= 2;
        RatInterval iv = field_->refined_interval(target);
        return poly_eval_interval(rep, iv);
    }

    void refresh_enclosure() {
        const auto& pows = field_->beta_power_enclosures();
        DblInterval acc{0.0, 0.0};
        for (size_t i = 0; i < c_.size(); ++i) {
            if (c_[i] == 0) continue;
            acc = dbl_add(acc, dbl_mul(dbl_of_rat(c_[i]), pows[i]));
        }
        enc_ = acc;
    }

    FieldPtr field_;
    std::vector<Rat> c_;
    DblInterval enc_{0.0, 0.0};
};

// Exact three-way comparison.
inline int cmp(const FieldElt& a, const FieldElt& b) {
    const auto& ea = a.enclosure_fast();
    const auto& eb = b.enclosure_fast();
    if (ea.hi < eb.lo) return -1;
    if (ea.lo > eb.hi) return 1;
    return (a - b).sign();
}

inline bool operator<(const FieldElt& a, const FieldElt& b) { return cmp(a, b) < 0; }
inline bool operator<=(const FieldElt& a, const FieldElt& b) { return cmp(a, b) <= 0; }
inline bool operator>(const FieldElt& a, const FieldElt& b) { return cmp(a, b) > 0; }
inline bool operator>=(const FieldElt& a, const FieldElt& b) { return cmp(a, b) >= 0; }

}  // namespace betadim
