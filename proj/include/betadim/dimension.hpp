#pragma once
// dimension.hpp - local-dimension machinery: S-visit statistics M_k, exact
// ball measures, the everywhere bounds and a.e. constants for nu_beta, branch
// counting N_k with its omega-average cross-check, gamma estimation, and the
// Bernoulli-convolution bounds in the Hausdorff metric.

#include <cmath>
#include <thread>

#include "betadim/highprec.hpp"
#include "betadim/markov_model.hpp"

namespace betadim {

// beta as a high-precision value (enclosure midpoint at ~10^-digits width)
inline BigFloat beta_value(const FieldPtr& f, unsigned digits = 80) {
    RatInterval iv = f->refined_interval(Rat(1, int_pow(10, digits)));
    return to_bigfloat(iv.mid());
}

inline BigFloat log_beta(const FieldPtr& f) { return log(beta_value(f)); }

// ---- M_k statistics ----

struct OrbitSample {
    std::size_t k = 0;
    std::vector<std::size_t> M;          // M_1..M_k (S-visit counts)
    std::vector<std::size_t> alpha;      // 1-based cell itinerary
    Rat ratio;                           // M_k / k
};

// Counts S-region visits among the first k iterates of K. HitF propagates
// from the alpha-code whenever the orbit meets F.
inline OrbitSample m_count(const MarkovModel& model, RandomState st, std::size_t k) {
    OrbitSample out;
    out.k = k;
    out.alpha = alpha_code(model, st, k);
    out.M.reserve(k);
    std::size_t m = 0;
    for (std::size_t j = 0; j < k; ++j) {
        if (model.is_s_cell(out.alpha[j])) ++m;
        out.M.push_back(m);
    }
    out.ratio = Rat(Int(m), Int(k));
    return out;
}

// ---- nu_beta ball measures ----

// The closed form printed in the source theorem:
//   ceil(beta)^-(k-1) * v_{alpha_k} * 2^-(k - M_k) * mu_beta(C_1).
inline Rat nu_ball_closed_form(const MarkovModel& model, std::size_t alpha_k,
                               std::size_t M_k, std::size_t k) {
    if (k == 0 || alpha_k < 1 || alpha_k > model.L || M_k > k)
        raise(errc::internal, "bad ball parameters");
    Rat value = model.v[alpha_k - 1];
    value /= Rat(int_pow(Int(model.field->ceil_beta()), static_cast<unsigned>(k - 1)));
    value /= Rat(int_pow(Int(2), static_cast<unsigned>(k - M_k)));
    value *= model.mu_C1;
    return value;
}

// Additive variant: exactly consistent under one-step cylinder refinement
// (the printed closed form carries a constant factor mu_C1 * 2^{[alpha_k in s]}
// relative to this one; both have the same log-asymptotics).
inline Rat nu_ball_additive(const MarkovModel& model, std::size_t alpha_k,
                            std::size_t M_k, std::size_t k) {
    if (k == 0 || alpha_k < 1 || alpha_k > model.L || M_k > k)
        raise(errc::internal, "bad ball parameters");
    unsigned tail = static_cast<unsigned>(k - M_k) + (model.is_s_cell(alpha_k) ? 1u : 0u);
    Rat value = model.v[alpha_k - 1];
    value /= Rat(int_pow(Int(model.field->ceil_beta()), static_cast<unsigned>(k - 1)));
    value /= Rat(int_pow(Int(2), tail));
    return value;
}

// Ball measure around the orbit of (omega, x); HitF when the orbit meets F.
inline Rat nu_ball_measure(const MarkovModel& model, RandomState st, std::size_t k) {
    OrbitSample s = m_count(model, std::move(st), k);
    return nu_ball_closed_form(model, s.alpha.back(), s.M.back(), k);
}

// ---- dimension reports ----

struct DimensionReport {
    std::string metric;  // "rho" (skew-product) or "rho_bar" (Hausdorff)
    BigFloat lower, upper;
    std::optional<BigFloat> ae_value;
    std::optional<BigFloat> unique_value;
};

// Everywhere bounds from finite-k proxies of limsup/liminf M_k/k.
inline DimensionReport nu_dim_bounds(const FieldPtr& f, const Rat& limsup_proxy,
                                     const Rat& liminf_proxy) {
    if (liminf_proxy < 0 || limsup_proxy > 1 || liminf_proxy > limsup_proxy)
        raise(errc::ratio_out_of_range, "need 0 <= liminf <= limsup <= 1");
    BigFloat lb = log_beta(f);
    BigFloat logc = log_int(Int(f->ceil_beta()));
    BigFloat log2v = log_int(Int(2));
    DimensionReport rep;
    rep.metric = "rho";
    rep.lower = logc / lb + (log2v / lb) * (BigFloat(1) - to_bigfloat(limsup_proxy));
    rep.upper = logc / lb + (log2v / lb) * (BigFloat(1) - to_bigfloat(liminf_proxy));
    rep.unique_value = (logc + log2v) / lb;
    return rep;
}

// nu_beta-a.e. value: log ceil(beta)/log beta + (log 2/log beta)(1 - mu_S).
inline BigFloat nu_ae_dimension(const MarkovModel& model) {
    const auto& f = model.field;
    BigFloat lb = log_beta(f);
    return log_int(Int(f->ceil_beta())) / lb +
           (log_int(Int(2)) / lb) * (BigFloat(1) - to_bigfloat(model.mu_S));
}

// value on the unique-expansion set
inline BigFloat nu_unique_dimension(const FieldPtr& f) {
    BigFloat lb = log_beta(f);
    return (log_int(Int(f->ceil_beta())) + log_int(Int(2))) / lb;
}

// ---- unique expansions ----

struct UniqueExpansionResult {
    enum class Status { unique_up_to, not_unique_at };
    Status status = Status::unique_up_to;
    std::size_t step = 0;                    // horizon or first S-visit (0-based)
    bool on_F = false;                       // some iterate lies in F
    std::optional<std::size_t> first_f_step;
};

// Membership in the unique-expansion set is only semi-decidable: iterate the
// deterministic (outside S) map and stop at the first S-visit.
inline UniqueExpansionResult is_unique_expansion(const MarkovModel& model, FieldElt x,
                                                 std::size_t k_max) {
    UniqueExpansionResult res;
    const auto& rm = model.regions;
    for (std::size_t step = 0; step < k_max; ++step) {
        if (model.on_F(x) && !res.first_f_step) {
            res.on_F = true;
            res.first_f_step = step;
        }
        Region r = rm.classify(x);
        if (r.is_s()) {
            res.status = UniqueExpansionResult::Status::not_unique_at;
            res.step = step;
            return res;
        }
        x = x.beta_mul_minus(r.index);
    }
    res.status = UniqueExpansionResult::Status::unique_up_to;
    res.step = k_max;
    return res;
}

// ---- branch counting ----

struct BranchNode {
    FieldElt r;                  // remainder along the digit prefix
    int digit = -1;              // digit taken to reach this node
    std::uint32_t s_visits = 0;  // S-visits along the path
};

struct BranchTree {
    FieldElt root;
    std::vector<std::vector<BranchNode>> levels;  // levels[0] = {root}; may be
                                                  // truncated when not kept
    std::vector<Int> N;                           // N[j-1] = N_j
};

// Depth-first is unnecessary: level order keeps the per-depth counts N_j
// directly. At S-points both digits branch, at E-points one digit.
inline BranchTree count_branches(const RegionMap& rm, const FieldElt& x, std::size_t k,
                                 PointMode mode = PointMode::exact,
                                 bool keep_levels = true) {
    BranchTree tree;
    tree.root = x;
    std::vector<BranchNode> level{BranchNode{x, -1, 0}};
    if (keep_levels) tree.levels.push_back(level);
    for (std::size_t depth = 1; depth <= k; ++depth) {
        std::vector<BranchNode> next;
        next.reserve(level.size() * 2);
        for (const auto& node : level) {
            Region r = rm.classify(node.r, mode);
            if (r.is_s()) {
                next.push_back({node.r.beta_mul_minus(r.index - 1), r.index - 1,
                                node.s_visits + 1});
                next.push_back({node.r.beta_mul_minus(r.index), r.index,
                                node.s_visits + 1});
            } else {
                next.push_back({node.r.beta_mul_minus(r.index), r.index, node.s_visits});
            }
        }
        tree.N.push_back(Int(next.size()));
        level = std::move(next);
        if (keep_levels) tree.levels.push_back(level);
    }
    if (!keep_levels) tree.levels.push_back(level);  // final level only
    return tree;
}

// Exhaustive omega-average: sum over all 2^k omega prefixes of 2^{M_k} 2^{-k}.
// Independent of count_branches by construction (it never shares orbits).
inline Rat nk_via_omega_average(const RegionMap& rm, const FieldElt& x, std::size_t k) {
    if (k > 16) raise(errc::horizon_too_large, "exhaustive mode supports k <= 16");
    Int total = 0;
    const std::uint64_t words = 1ULL << k;
    for (std::uint64_t w = 0; w < words; ++w) {
        std::vector<int> bits(k);
        for (std::size_t i = 0; i < k; ++i) bits[i] = static_cast<int>((w >> i) & 1ULL);
        RandomState st{OmegaStream::recorded(std::move(bits)), x};
        std::size_t m = 0;
        for (std::size_t step = 0; step < k; ++step)
            if (k_step(st, rm).omega_consumed) ++m;
        total += int_pow(Int(2), static_cast<unsigned>(m));
    }
    return Rat(total, int_pow(Int(2), static_cast<unsigned>(k)));
}

struct MonteCarloEstimate {
    double mean = 0;
    double std_error = 0;
    std::size_t samples = 0;
};

inline MonteCarloEstimate nk_via_omega_average_mc(const RegionMap& rm, const FieldElt& x,
                                                  std::size_t k, std::size_t samples,
                                                  std::uint64_t seed) {
    SplitMix64 rng(seed);
    double sum = 0, sumsq = 0;
    for (std::size_t i = 0; i < samples; ++i) {
        RandomState st{OmegaStream::seeded(rng.next()), x};
        std::size_t m = 0;
        for (std::size_t step = 0; step < k; ++step)
            if (k_step(st, rm).omega_consumed) ++m;
        double val = std::ldexp(1.0, static_cast<int>(m));
        sum += val;
        sumsq += val * val;
    }
    MonteCarloEstimate est;
    est.samples = samples;
    est.mean = sum / static_cast<double>(samples);
    double var = (sumsq - sum * sum / static_cast<double>(samples)) /
                 std::max<double>(1.0, static_cast<double>(samples - 1));
    est.std_error = std::sqrt(std::max(0.0, var) / static_cast<double>(samples));
    return est;
}

// ---- gamma estimation (Lebesgue-generic growth of N_k) ----

struct GammaEstimate {
    std::size_t k = 0;
    double mean = 0;       // mean of log N_k / k over the samples
    double std_error = 0;
    double min_value = 0, max_value = 0;
};

struct GammaReport {
    std::vector<GammaEstimate> per_k;
    bool pisot_guaranteed = false;  // a.e. limit only guaranteed for Pisot beta
    int trend = 0;                  // -1 nonincreasing, +1 nondecreasing, 0 mixed
    std::size_t samples = 0;
    std::uint64_t seed = 0;
};

// Uniform dyadic sample (128-bit resolution) in [0, sup]; rejection keeps the
// draw exact and reproducible.
inline FieldElt sample_dyadic_point(const RegionMap& rm, SplitMix64& rng) {
    const Int denom = int_pow(Int(2), 128);
    // sup < floor(beta)+1 for every validated field
    const int bound = rm.field()->floor_beta() + 1;
    unsigned extra = 0;
    while ((1 << extra) < bound) ++extra;
    const Int limit = denom * bound;
    for (;;) {
        Int num = rng.next_bits(128 + extra);
        if (num >= limit) continue;
        FieldElt x = FieldElt::from_rational(rm.field(), Rat(num, denom));
        if (cmp(x, rm.domain_sup()) <= 0) return x;
    }
}

inline GammaReport estimate_gamma(const MarkovModel& model, std::size_t samples,
                                  std::vector<std::size_t> k_list, std::uint64_t seed) {
    if (k_list.empty()) raise(errc::internal, "empty horizon list");
    std::sort(k_list.begin(), k_list.end());
    const std::size_t k_max = k_list.back();
    GammaReport rep;
    rep.samples = samples;
    rep.seed = seed;
    try {
        rep.pisot_guaranteed = model.field->is_pisot().pisot;
    } catch (const error&) {
        rep.pisot_guaranteed = false;
    }

    // per-sample seeds fixed up front so threading cannot change results
    SplitMix64 master(seed);
    std::vector<std::uint64_t> sample_seeds(samples);
    for (auto& s : sample_seeds) s = master.next();

    std::vector<std::vector<double>> per_sample(samples);
    auto worker = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            SplitMix64 rng(sample_seeds[i]);
            FieldElt x = sample_dyadic_point(model.regions, rng);
            BranchTree t = count_branches(model.regions, x, k_max, PointMode::interval,
                                          /*keep_levels=*/false);
            std::vector<double> vals;
            vals.reserve(k_list.size());
            for (std::size_t k : k_list) {
                BigFloat g = log_int(t.N[k - 1]) / BigFloat(static_cast<unsigned>(k));
                vals.push_back(g.convert_to<double>());
            }
            per_sample[i] = std::move(vals);
        }
    };
    std::size_t threads = std::min<std::size_t>(
        {samples, std::max<std::size_t>(1, std::thread::hardware_concurrency()), 8});
    if (threads <= 1) {
        worker(0, samples);
    } else {
        std::vector<std::thread> pool;
        std::size_t chunk = (samples + threads - 1) / threads;
        for (std::size_t t = 0; t < threads; ++t) {
            std::size_t b = t * chunk, e = std::min(samples, b + chunk);
            if (b >= e) break;
            pool.emplace_back(worker, b, e);
        }
        for (auto& th : pool) th.join();
    }

    for (std::size_t ki = 0; ki < k_list.size(); ++ki) {
        GammaEstimate est;
        est.k = k_list[ki];
        double sum = 0, sumsq = 0;
        est.min_value = std::numeric_limits<double>::infinity();
        est.max_value = -est.min_value;
        for (std::size_t i = 0; i < samples; ++i) {
            double v = per_sample[i][ki];
            sum += v;
            sumsq += v * v;
            est.min_value = std::min(est.min_value, v);
            est.max_value = std::max(est.max_value, v);
        }
        est.mean = sum / static_cast<double>(samples);
        double var = (sumsq - sum * sum / static_cast<double>(samples)) /
                     std::max<double>(1.0, static_cast<double>(samples - 1));
        est.std_error = std::sqrt(std::max(0.0, var) / static_cast<double>(samples));
        rep.per_k.push_back(est);
    }

    if (rep.per_k.size() >= 2) {
        bool noninc = true, nondec = true;
        for (std::size_t i = 0; i + 1 < rep.per_k.size(); ++i) {
            if (rep.per_k[i].mean < rep.per_k[i + 1].mean - 1e-12) noninc = false;
            if (rep.per_k[i].mean > rep.per_k[i + 1].mean + 1e-12) nondec = false;
        }
        rep.trend = noninc ? -1 : (nondec ? 1 : 0);
    }
    return rep;
}

// ---- Bernoulli-convolution (mu_beta) side ----

// Everywhere bounds in the Hausdorff metric rho_bar from log N_k / k proxies.
inline DimensionReport mu_dim_bounds(const FieldPtr& f, const BigFloat& limsup_proxy,
                                     const BigFloat& liminf_proxy,
                                     std::optional<BigFloat> gamma_est = std::nullopt) {
    BigFloat log2v = log_int(Int(2));
    if (liminf_proxy < 0 || limsup_proxy > log2v || liminf_proxy > limsup_proxy)
        raise(errc::ratio_out_of_range, "log N_k / k proxies must lie in [0, log 2]");
    BigFloat lb = log_beta(f);
    BigFloat logc = log_int(Int(f->ceil_beta()));
    DimensionReport rep;
    rep.metric = "rho_bar";
    rep.lower = (logc - limsup_proxy) / lb;
    rep.upper = (logc - liminf_proxy) / lb;
    rep.unique_value = logc / lb;
    if (gamma_est) {
        if (*gamma_est < 0 || *gamma_est > log2v)
            raise(errc::ratio_out_of_range, "gamma estimate outside [0, log 2]");
        rep.ae_value = (logc - *gamma_est) / lb;  // Lebesgue-a.e. value, Pisot case
    }
    return rep;
}

// Exact mu_beta-ball measure in the rho_bar metric:
//   ceil(beta)^-(k-1) * mu_C1 * sum over length-k branch paths of v_{alpha_k}.
// Remainders on F \ {0, sup} break the cell assignment -> HitF; the two
// endpoint fixed points use their E-region cells.
inline Rat mu_ball_measure(const MarkovModel& model, const FieldElt& x, std::size_t k) {
    if (k == 0) raise(errc::internal, "k must be positive");
    const auto& rm = model.regions;
    auto cell_with_endpoints = [&](const FieldElt& r, std::size_t depth) -> std::size_t {
        if (cmp(r, rm.zero()) == 0) return 1;
        if (cmp(r, rm.domain_sup()) == 0) return model.L;
        auto c = model.cell_of(r);
        if (!c)
            throw hit_f_error(depth + 1, "branch remainder on F at depth " +
                                             std::to_string(depth));
        return *c;
    };

    std::vector<FieldElt> level{x};
    for (std::size_t depth = 0; depth + 1 < k; ++depth) {
        std::vector<FieldElt> next;
        next.reserve(level.size() * 2);
        for (const auto& r : level) {
            cell_with_endpoints(r, depth);  // F-check at every interior depth
            Region reg = rm.classify(r);
            if (reg.is_s()) {
                next.push_back(r.beta_mul_minus(reg.index - 1));
                next.push_back(r.beta_mul_minus(reg.index));
            } else {
                next.push_back(r.beta_mul_minus(reg.index));
            }
        }
        level = std::move(next);
    }

    Rat acc = 0;
    for (const auto& r : level) {
        std::size_t cell = cell_with_endpoints(r, k - 1);
        Region reg = rm.classify(r);
        int branch_factor = reg.is_s() ? 2 : 1;
        acc += Rat(branch_factor) * model.v[cell - 1];
    }
    acc *= model.mu_C1;
    acc /= Rat(int_pow(Int(model.field->ceil_beta()), static_cast<unsigned>(k - 1)));
    return acc;
}

// ---- degenerate-point handling ----

struct LocalDimensionOutcome {
    bool degenerate = false;   // orbit met F: countable ball, nu-mass 0,
                               // local dimension +infinity
    std::size_t hit_step = 0;  // 1-based, when degenerate
    Rat ratio;                 // M_k/k proxy otherwise
    std::size_t k = 0;
    DimensionReport bounds;    // from the single-horizon proxy
};

inline LocalDimensionOutcome local_dimension_nu(const MarkovModel& model, RandomState st,
                                                std::size_t k) {
    LocalDimensionOutcome out;
    out.k = k;
    try {
        OrbitSample s = m_count(model, std::move(st), k);
        out.ratio = s.ratio;
        out.bounds = nu_dim_bounds(model.field, s.ratio, s.ratio);
        out.bounds.ae_value = nu_ae_dimension(model);
    } catch (const hit_f_error& e) {
        out.degenerate = true;
        out.hit_step = e.step();
    }
    return out;
}

}  // namespace betadim
