#pragma once
// beta_maps.hpp - the interval maps T_k, greedy/lazy transformations, the
// E/S region classification, omega streams, and the random transformation K.
//
// Boundary convention: S-intervals are closed, E-intervals take the rest;
// 0 belongs to E_0 and floor(beta)/(beta-1) to E_floor(beta).

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "betadim/number_field.hpp"

namespace betadim {

enum class RegionKind { E, S };

struct Region {
    RegionKind kind = RegionKind::E;
    int index = 0;

    bool is_s() const { return kind == RegionKind::S; }
    bool operator==(const Region& o) const { return kind == o.kind && index == o.index; }
};

inline std::string region_name(const Region& r) {
    return (r.is_s() ? "S" : "E") + std::to_string(r.index);
}

// Point arithmetic mode: exact signs, or interval-only refinement that
// aborts (PrecisionUndecidable) instead of deciding borderline cases.
enum class PointMode { exact, interval };

inline FieldElt t_map(int k, const FieldElt& x) { return x.beta_mul_minus(k); }

class RegionMap {
public:
    explicit RegionMap(FieldPtr f) : field_(std::move(f)) {
        const int fb = field_->floor_beta();
        zero_ = FieldElt::zero(field_);
        sup_ = FieldElt::domain_sup(field_);
        FieldElt inv_beta = FieldElt::beta(field_).inverse();
        FieldElt c = sup_ * inv_beta;  // floor(beta)/(beta(beta-1))
        s_lo_.reserve(static_cast<size_t>(fb));
        s_hi_.reserve(static_cast<size_t>(fb));
        for (int k = 1; k <= fb; ++k) {
            s_lo_.push_back(inv_beta.scaled(Rat(k)));
            s_hi_.push_back(c + inv_beta.scaled(Rat(k - 1)));
        }
    }

    const FieldPtr& field() const { return field_; }
    const FieldElt& zero() const { return zero_; }
    const FieldElt& domain_sup() const { return sup_; }
    int floor_beta() const { return field_->floor_beta(); }

    const FieldElt& s_lower(int k) const { return s_lo_[static_cast<size_t>(k - 1)]; }
    const FieldElt& s_upper(int k) const { return s_hi_[static_cast<size_t>(k - 1)]; }

    Region classify(const FieldElt& x, PointMode mode = PointMode::exact) const {
        auto cmp3 = [&](const FieldElt& a, const FieldElt& b) { return compare(a, b, mode); };
        if (cmp3(x, zero_) < 0 || cmp3(x, sup_) > 0)
            raise(errc::out_of_domain, "point outside [0, floor(beta)/(beta-1)]");
        const int fb = floor_beta();
        for (int k = 1; k <= fb; ++k) {
            if (cmp3(x, s_lo_[static_cast<size_t>(k - 1)]) >= 0 &&
                cmp3(x, s_hi_[static_cast<size_t>(k - 1)]) <= 0)
                return {RegionKind::S, k};
        }
        if (cmp3(x, s_lo_[0]) < 0) return {RegionKind::E, 0};
        if (cmp3(x, s_hi_[static_cast<size_t>(fb - 1)]) > 0) return {RegionKind::E, fb};
        for (int k = 1; k < fb; ++k) {
            if (cmp3(x, s_hi_[static_cast<size_t>(k - 1)]) > 0 &&
                cmp3(x, s_lo_[static_cast<size_t>(k)]) < 0)
                return {RegionKind::E, k};
        }
        raise(errc::internal, "region scan failed to place the point");
    }

    // E_k |-> E_{fb-k}, S_k |-> S_{fb+1-k}
    Region mirror(const Region& r) const {
        const int fb = floor_beta();
        if (r.is_s()) return {RegionKind::S, fb + 1 - r.index};
        return {RegionKind::E, fb - r.index};
    }

    static int greedy_digit(const Region& r) { return r.index; }
    static int lazy_digit(const Region& r) { return r.is_s() ? r.index - 1 : r.index; }

private:
    static int compare(const FieldElt& a, const FieldElt& b, PointMode mode) {
        if (mode == PointMode::exact) return cmp(a, b);
        auto s = (a - b).sign_interval(64);
        if (!s)
            raise(errc::precision_undecidable,
                  "interval comparison undecided at the refinement cap");
        return *s;
    }

    FieldPtr field_;
    FieldElt zero_, sup_;
    std::vector<FieldElt> s_lo_, s_hi_;
};

// ---- omega streams ----

class OmegaStream {
public:
    enum class Kind { constant, periodic, recorded, prng };

    static OmegaStream zeros() { return OmegaStream(Kind::constant, {0}); }
    static OmegaStream ones() { return OmegaStream(Kind::constant, {1}); }

    static OmegaStream periodic(std::vector<int> word) {
        if (word.empty()) raise(errc::malformed_word, "empty periodic word");
        return OmegaStream(Kind::periodic, std::move(word));
    }

    // finite prefix; consuming past the end raises OmegaExhausted
    static OmegaStream recorded(std::vector<int> prefix) {
        return OmegaStream(Kind::recorded, std::move(prefix));
    }

    static OmegaStream seeded(std::uint64_t seed) {
        OmegaStream s(Kind::prng, {});
        s.rng_ = SplitMix64(seed);
        s.seed_ = seed;
        return s;
    }

    // P(symbol 0) = p_zero, matching the (p, 1-p)-Bernoulli measure m_p
    static OmegaStream seeded_biased(std::uint64_t seed, const Rat& p_zero) {
        if (p_zero <= 0 || p_zero >= 1) raise(errc::degenerate_p, "need 0 < p < 1");
        OmegaStream s(Kind::prng, {});
        s.rng_ = SplitMix64(seed);
        s.seed_ = seed;
        s.biased_ = true;
        s.bias_threshold_ = rat_floor(p_zero * rat_pow(Rat(2), 128));
        return s;
    }

    int next() {
        int sym = 0;
        switch (kind_) {
            case Kind::constant:
                sym = word_[0];
                break;
            case Kind::periodic:
                sym = word_[pos_ % word_.size()];
                ++pos_;
                break;
            case Kind::recorded:
                if (pos_ >= word_.size())
                    raise(errc::omega_exhausted, "recorded omega prefix exhausted");
                sym = word_[pos_++];
                break;
            case Kind::prng:
                if (biased_)
                    sym = rng_.next_bits(128) < bias_threshold_ ? 0 : 1;
                else
                    sym = rng_.next_bit();
                break;
        }
        history_.push_back(sym);
        return sym;
    }

    const std::vector<int>& history() const { return history_; }
    std::size_t consumed() const { return history_.size(); }
    std::uint64_t seed() const { return seed_; }

    // Fresh child stream for parallel sampling; PRNG kinds only.
    OmegaStream split(std::uint64_t salt) const {
        if (kind_ != Kind::prng) raise(errc::internal, "split on a non-PRNG omega stream");
        OmegaStream s(Kind::prng, {});
        SplitMix64 base = rng_;
        s.rng_ = base.split(salt);
        s.biased_ = biased_;
        s.bias_threshold_ = bias_threshold_;
        return s;
    }

private:
    OmegaStream(Kind k, std::vector<int> w) : kind_(k), word_(std::move(w)) {}

    Kind kind_;
    std::vector<int> word_;
    std::size_t pos_ = 0;
    SplitMix64 rng_{0};
    std::uint64_t seed_ = 0;
    bool biased_ = false;
    Int bias_threshold_;
    std::vector<int> history_;
};

struct RandomState {
    OmegaStream omega;
    FieldElt x;
};

struct DigitRecord {
    int b = 0;
    Region region;
    std::optional<int> alpha;  // 1-based partition cell, filled by markov_model
    bool omega_consumed = false;
};

// One step of the random transformation K; advances the state in place.
inline DigitRecord k_step(RandomState& st, const RegionMap& rm,
                          PointMode mode = PointMode::exact) {
    Region r = rm.classify(st.x, mode);
    DigitRecord rec;
    rec.region = r;
    if (r.is_s()) {
        int w = st.omega.next();
        rec.omega_consumed = true;
        rec.b = r.index - 1 + w;
    } else {
        rec.b = r.index;
    }
    st.x = st.x.beta_mul_minus(rec.b);
    return rec;
}

inline std::pair<int, FieldElt> greedy_step(const FieldElt& x, const RegionMap& rm) {
    Region r = rm.classify(x);
    int d = RegionMap::greedy_digit(r);
    return {d, x.beta_mul_minus(d)};
}

inline std::pair<int, FieldElt> lazy_step(const FieldElt& x, const RegionMap& rm) {
    Region r = rm.classify(x);
    int d = RegionMap::lazy_digit(r);
    return {d, x.beta_mul_minus(d)};
}

// First k digits b_1..b_k produced by K.
inline std::vector<int> phi_prefix(RandomState st, std::size_t k, const RegionMap& rm) {
    std::vector<int> digits;
    digits.reserve(k);
    for (std::size_t i = 0; i < k; ++i) digits.push_back(k_step(st, rm).b);
    return digits;
}

// Runs the greedy orbit of 1 for n steps and checks it reproduces the
// supplied digits with remainder exactly 0 (and a_1 = floor(beta)). Caches
// the verdict on the field.
inline bool validate_greedy_expansion_of_one(const FieldPtr& f) {
    if (int st = f->greedy_state(); st >= 0) return st == 1;
    RegionMap rm(f);
    FieldElt x = FieldElt::from_rational(f, 1);
    bool ok = true;
    for (size_t i = 0; i < f->degree() && ok; ++i) {
        auto [d, nx] = greedy_step(x, rm);
        if (d != f->digits()[i]) ok = false;
        x = std::move(nx);
    }
    if (ok) ok = x.is_zero();
    if (ok) ok = (f->floor_beta() == f->digits()[0]);
    f->set_greedy_state(ok);
    return ok;
}

}  // namespace betadim
