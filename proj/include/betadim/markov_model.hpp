#pragma once
// markov_model.hpp - the finite endpoint/orbit set F, the interval partition
// C, the adjacency matrix A, and the Parry measure of maximal entropy
// (exact rational eigenvector v, transition matrix P, cylinder measure Q).
//
// Cell indices are 1-based everywhere in the public surface, matching the
// usual C_1..C_L notation; rows i with C_i inside S are the set s.

#include <algorithm>
#include <deque>
#include <string>
#include <vector>

#include "betadim/beta_maps.hpp"

namespace betadim {

// Closure of the endpoint seeds under every map T_k whose image stays in the
// closed domain. Finite for generalised multinacci beta; `cap` guards the
// enumeration.
inline std::vector<FieldElt> orbit_closure_F(const FieldPtr& f, std::size_t cap = 10000) {
    if (!validate_greedy_expansion_of_one(f))
        raise(errc::not_greedy, "digits are not the greedy expansion of 1");
    RegionMap rm(f);
    const int fb = f->floor_beta();

    std::vector<FieldElt> pts;  // kept sorted, exact dedup
    auto insert_sorted = [&](const FieldElt& x) -> bool {
        std::size_t lo = 0, hi = pts.size();
        while (lo < hi) {
            std::size_t mid = (lo + hi) / 2;
            int c = cmp(pts[mid], x);
            if (c == 0) return false;
            if (c < 0)
                lo = mid + 1;
            else
                hi = mid;
        }
        pts.insert(pts.begin() + static_cast<long>(lo), x);
        return true;
    };

    std::deque<FieldElt> queue;
    auto add = [&](const FieldElt& x) {
        if (insert_sorted(x)) queue.push_back(x);
    };

    const FieldElt one = FieldElt::from_rational(f, 1);
    FieldElt inv_beta = FieldElt::beta(f).inverse();
    FieldElt c = rm.domain_sup() * inv_beta;
    add(rm.zero());
    add(rm.domain_sup());
    add(one);
    add(rm.domain_sup() - one);
    for (int k = 0; k <= fb; ++k) {
        add(inv_beta.scaled(Rat(k)));
        add(c + inv_beta.scaled(Rat(k)));
    }

    while (!queue.empty()) {
        FieldElt y = std::move(queue.front());
        queue.pop_front();
        for (int k = 0; k <= fb; ++k) {
            FieldElt z = y.beta_mul_minus(k);
            if (cmp(z, rm.zero()) < 0 || cmp(z, rm.domain_sup()) > 0) continue;
            add(z);
            if (pts.size() > cap)
                raise(errc::closure_exceeded_cap,
                      "orbit closure exceeded " + std::to_string(cap) + " points");
        }
    }
    return pts;
}

struct MarkovModel {
    FieldPtr field;
    RegionMap regions;
    std::vector<FieldElt> F;           // sorted; cells C_j = (F[j-1], F[j])
    std::size_t L = 0;
    std::vector<Region> cell_region;   // [L], region containing each cell
    std::vector<std::size_t> s_cells;  // 1-based indices, ascending
    std::vector<std::vector<int>> A;   // [L][L]
    std::vector<Rat> v;                // right probability eigenvector
    std::vector<std::vector<Rat>> P;   // transition matrix
    Rat mu_S, mu_C1;

    explicit MarkovModel(FieldPtr f) : field(std::move(f)), regions(field) {}

    bool is_s_cell(std::size_t j) const {  // 1-based
        return cell_region[j - 1].is_s();
    }

    const FieldElt& cell_lo(std::size_t j) const { return F[j - 1]; }
    const FieldElt& cell_hi(std::size_t j) const { return F[j]; }

    // 1-based cell of x, nullopt when x coincides with a point of F.
    std::optional<std::size_t> cell_of(const FieldElt& x) const {
        std::size_t lo = 0, hi = F.size();
        while (lo < hi) {
            std::size_t mid = (lo + hi) / 2;
            int c = cmp(F[mid], x);
            if (c == 0) return std::nullopt;
            if (c < 0)
                lo = mid + 1;
            else
                hi = mid;
        }
        if (lo == 0 || lo == F.size())
            raise(errc::out_of_domain, "point outside the partitioned domain");
        return lo;  // F[lo-1] < x < F[lo]
    }

    bool on_F(const FieldElt& x) const { return !cell_of_nothrow(x).has_value(); }

private:
    std::optional<std::size_t> cell_of_nothrow(const FieldElt& x) const {
        std::size_t lo = 0, hi = F.size();
        while (lo < hi) {
            std::size_t mid = (lo + hi) / 2;
            int c = cmp(F[mid], x);
            if (c == 0) return std::nullopt;
            if (c < 0)
                lo = mid + 1;
            else
                hi = mid;
        }
        return lo;
    }
};

namespace detail {

// Exact kernel of an integer matrix over Q via Gauss-Jordan elimination.
inline std::vector<std::vector<Rat>> rational_kernel(std::vector<std::vector<Rat>> m) {
    const std::size_t n = m.size();
    std::vector<long> pivot_col_of_row(n, -1);
    std::size_t row = 0;
    for (std::size_t col = 0; col < n && row < n; ++col) {
        std::size_t piv = row;
        while (piv < n && m[piv][col] == 0) ++piv;
        if (piv == n) continue;
        std::swap(m[piv], m[row]);
        Rat lead = m[row][col];
        for (std::size_t j = 0; j < n; ++j) m[row][j] /= lead;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == row || m[i][col] == 0) continue;
            Rat factor = m[i][col];
            for (std::size_t j = 0; j < n; ++j) m[i][j] -= factor * m[row][j];
        }
        pivot_col_of_row[row] = static_cast<long>(col);
        ++row;
    }
    std::vector<bool> is_pivot(n, false);
    for (std::size_t r = 0; r < row; ++r) is_pivot[static_cast<std::size_t>(pivot_col_of_row[r])] = true;

    std::vector<std::vector<Rat>> basis;
    for (std::size_t free = 0; free < n; ++free) {
        if (is_pivot[free]) continue;
        std::vector<Rat> vec(n, Rat(0));
        vec[free] = 1;
        for (std::size_t r = 0; r < row; ++r) {
            auto pc = static_cast<std::size_t>(pivot_col_of_row[r]);
            vec[pc] = -m[r][free];
        }
        basis.push_back(std::move(vec));
    }
    return basis;
}

}  // namespace detail

// Cells and s-set from a sorted F; validates property p3.
inline void build_partition(MarkovModel& model) {
    const auto& F = model.F;
    const auto& rm = model.regions;
    if (F.size() < 2 || cmp(F.front(), rm.zero()) != 0 ||
        cmp(F.back(), rm.domain_sup()) != 0)
        raise(errc::internal, "F must span [0, floor(beta)/(beta-1)]");
    model.L = F.size() - 1;
    model.cell_region.clear();
    model.s_cells.clear();
    for (std::size_t j = 1; j <= model.L; ++j) {
        FieldElt mid = (model.cell_lo(j) + model.cell_hi(j)).scaled(Rat(1, 2));
        Region r = rm.classify(mid);
        model.cell_region.push_back(r);
        if (r.is_s()) model.s_cells.push_back(j);
    }
    // p3: each S_k coincides with exactly one cell (no F point interior to S)
    const int fb = rm.floor_beta();
    if (static_cast<int>(model.s_cells.size()) != fb)
        raise(errc::p3_violation, "number of s-cells differs from floor(beta)");
    for (int k = 1; k <= fb; ++k) {
        bool matched = false;
        for (std::size_t j : model.s_cells) {
            if (cmp(model.cell_lo(j), rm.s_lower(k)) == 0 &&
                cmp(model.cell_hi(j), rm.s_upper(k)) == 0) {
                matched = true;
                break;
            }
        }
        if (!matched)
            raise(errc::p3_violation,
                  "S_" + std::to_string(k) + " is not a single partition cell");
    }
}

// Adjacency matrix per the Markov property: images of cells under the
// applicable branches must be exact unions of cells.
inline void build_adjacency(MarkovModel& model) {
    const auto& F = model.F;
    const std::size_t L = model.L;
    model.A.assign(L, std::vector<int>(L, 0));

    auto index_of = [&](const FieldElt& x) -> std::size_t {
        std::size_t lo = 0, hi = F.size();
        while (lo < hi) {
            std::size_t mid = (lo + hi) / 2;
            int c = cmp(F[mid], x);
            if (c == 0) return mid;
            if (c < 0)
                lo = mid + 1;
            else
                hi = mid;
        }
        raise(errc::partial_overlap, "cell image endpoint is not a point of F");
    };

    for (std::size_t i = 1; i <= L; ++i) {
        Region r = model.cell_region[i - 1];
        std::vector<int> branch_digits;
        if (r.is_s())
            branch_digits = {r.index, r.index - 1};  // greedy T_k, lazy T_{k-1}
        else
            branch_digits = {r.index};
        for (int d : branch_digits) {
            std::size_t a = index_of(model.cell_lo(i).beta_mul_minus(d));
            std::size_t b = index_of(model.cell_hi(i).beta_mul_minus(d));
            for (std::size_t j = a; j < b; ++j) model.A[i - 1][j] = 1;
        }
    }
}

// Exact Parry data: v solves (A - ceil(beta) I) v = 0, normalized to sum 1;
// P is formed entrywise from v.
inline void build_parry(MarkovModel& model) {
    const std::size_t L = model.L;
    const int c = model.field->ceil_beta();
    std::vector<std::vector<Rat>> m(L, std::vector<Rat>(L, Rat(0)));
    for (std::size_t i = 0; i < L; ++i)
        for (std::size_t j = 0; j < L; ++j)
            m[i][j] = Rat(model.A[i][j]) - (i == j ? Rat(c) : Rat(0));

    auto basis = detail::rational_kernel(std::move(m));
    if (basis.size() != 1)
        raise(errc::eigenvalue_mismatch,
              "kernel of (A - ceil(beta) I) has dimension " + std::to_string(basis.size()));
    std::vector<Rat> v = basis.front();
    Rat total = 0;
    for (const auto& x : v) total += x;
    if (total == 0) raise(errc::eigenvalue_mismatch, "kernel vector sums to zero");
    for (auto& x : v) x /= total;
    for (const auto& x : v)
        if (x <= 0)
            raise(errc::eigenvalue_mismatch, "eigenvector is not strictly positive");

    // verify A v = ceil(beta) v exactly
    for (std::size_t i = 0; i < L; ++i) {
        Rat acc = 0;
        for (std::size_t j = 0; j < L; ++j)
            if (model.A[i][j]) acc += v[j];
        if (acc != Rat(c) * v[i])
            raise(errc::eigenvalue_mismatch, "A v != ceil(beta) v");
    }

    model.v = v;
    model.P.assign(L, std::vector<Rat>(L, Rat(0)));
    for (std::size_t i = 0; i < L; ++i)
        for (std::size_t j = 0; j < L; ++j)
            if (model.A[i][j]) model.P[i][j] = v[j] / (Rat(c) * v[i]);

    model.mu_S = 0;
    for (std::size_t j : model.s_cells) model.mu_S += v[j - 1];
    model.mu_C1 = v[0];
}

inline MarkovModel build_markov_model(const FieldPtr& f, std::size_t cap = 10000) {
    MarkovModel model(f);
    model.F = orbit_closure_F(f, cap);
    build_partition(model);
    build_adjacency(model);
    build_parry(model);
    return model;
}

// Q([j_1 ... j_m]) = v_{j_m} / ceil(beta)^(m-1); 0 for inadmissible words.
inline Rat cylinder_Q(const MarkovModel& model, const std::vector<std::size_t>& path) {
    if (path.empty()) raise(errc::internal, "empty cylinder path");
    for (std::size_t j : path)
        if (j < 1 || j > model.L) raise(errc::internal, "cell index out of range");
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
        if (!model.A[path[i] - 1][path[i + 1] - 1]) return Rat(0);
    return model.v[path.back() - 1] /
           Rat(int_pow(Int(model.field->ceil_beta()), static_cast<unsigned>(path.size() - 1)));
}

inline std::pair<Rat, Rat> state_measures(const MarkovModel& model) {
    return {model.mu_S, model.mu_C1};
}

// Cell itinerary alpha_1..alpha_k (1-based). Orbit points falling on F make
// the code undefined; that raises HitF with the offending 1-based step.
inline std::vector<std::size_t> alpha_code(const MarkovModel& model, RandomState& st,
                                           std::size_t k) {
    std::vector<std::size_t> code;
    code.reserve(k);
    for (std::size_t step = 1; step <= k; ++step) {
        auto cell = model.cell_of(st.x);
        if (!cell)
            throw hit_f_error(step, "orbit landed on F at step " + std::to_string(step));
        code.push_back(*cell);
        DigitRecord rec = k_step(st, model.regions);
        if (rec.omega_consumed != model.is_s_cell(code.back()))
            raise(errc::internal, "omega consumption disagrees with the s-cells");
    }
    return code;
}

// ---- structural validation ----

struct ValidationCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;

    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

inline ValidationReport validate_model(const MarkovModel& model,
                                       std::uint64_t word_seed = 1234,
                                       std::size_t word_count = 1000) {
    ValidationReport rep;
    auto push = [&](std::string name, bool pass, std::string detail = "") {
        rep.checks.push_back({std::move(name), pass, std::move(detail)});
    };
    const std::size_t L = model.L;
    const int c = model.field->ceil_beta();

    {  // p3 re-check: no F point interior to any S_k
        bool ok = true;
        const auto& rm = model.regions;
        for (int k = 1; k <= rm.floor_beta() && ok; ++k)
            for (const auto& pt : model.F)
                if (cmp(pt, rm.s_lower(k)) > 0 && cmp(pt, rm.s_upper(k)) < 0) {
                    ok = false;
                    break;
                }
        push("p3_no_F_inside_S", ok);
    }
    {  // p5 rows
        bool ok = true;
        for (std::size_t j : model.s_cells) {
            const auto& row = model.A[j - 1];
            for (std::size_t col = 0; col < L; ++col) {
                int expect = (col == 0 || col == L - 1) ? 1 : 0;
                if (row[col] != expect) ok = false;
            }
        }
        push("p5_s_rows_hit_first_and_last", ok);
    }
    {  // A v = ceil(beta) v, sum v = 1, v > 0
        bool ok = true;
        Rat total = 0;
        for (std::size_t i = 0; i < L; ++i) {
            Rat acc = 0;
            for (std::size_t j = 0; j < L; ++j)
                if (model.A[i][j]) acc += model.v[j];
            if (acc != Rat(c) * model.v[i]) ok = false;
            if (model.v[i] <= 0) ok = false;
            total += model.v[i];
        }
        if (total != 1) ok = false;
        push("parry_eigenvector", ok);
    }
    {  // row stochastic
        bool ok = true;
        for (std::size_t i = 0; i < L; ++i) {
            Rat acc = 0;
            for (std::size_t j = 0; j < L; ++j) acc += model.P[i][j];
            if (acc != 1) ok = false;
        }
        push("P_row_stochastic", ok);
    }
    {  // v P = v (stationarity, validated rather than assumed)
        bool ok = true;
        for (std::size_t j = 0; j < L; ++j) {
            Rat acc = 0;
            for (std::size_t i = 0; i < L; ++i) acc += model.v[i] * model.P[i][j];
            if (acc != model.v[j]) ok = false;
        }
        push("v_is_stationary", ok);
    }
    {  // index-reversal symmetry a_{i,j} = a_{L+1-i, L+1-j}
        bool ok = true;
        for (std::size_t i = 0; i < L; ++i)
            for (std::size_t j = 0; j < L; ++j)
                if (model.A[i][j] != model.A[L - 1 - i][L - 1 - j]) ok = false;
        push("A_index_reversal_symmetry", ok);
    }
    {  // Q additivity on random admissible words
        bool ok = true;
        SplitMix64 rng(word_seed);
        for (std::size_t t = 0; t < word_count && ok; ++t) {
            std::vector<std::size_t> w{static_cast<std::size_t>(rng.next() % L) + 1};
            std::size_t len = 1 + rng.next() % 6;
            while (w.size() < len) {
                std::vector<std::size_t> succ;
                for (std::size_t j = 0; j < L; ++j)
                    if (model.A[w.back() - 1][j]) succ.push_back(j + 1);
                w.push_back(succ[rng.next() % succ.size()]);
            }
            Rat total = 0;
            for (std::size_t j = 0; j < L; ++j) {
                if (!model.A[w.back() - 1][j]) continue;
                auto ext = w;
                ext.push_back(j + 1);
                total += cylinder_Q(model, ext);
            }
            if (total != cylinder_Q(model, w)) ok = false;
        }
        push("Q_additivity_random_words", ok,
             std::to_string(word_count) + " random words of length <= 6");
    }
    return rep;
}

}  // namespace betadim
