#pragma once
// errors.hpp - shared error taxonomy.
//
// Every failure mode of the library carries a stable machine-readable code.
// The CLI maps codes onto exit statuses (see tools/).

#include <cstddef>
#include <stdexcept>
#include <string>

namespace betadim {

enum class errc {
    rejected_digits,
    mixed_fields,
    precision_exhausted,
    inconclusive,
    not_greedy,
    out_of_domain,
    omega_exhausted,
    closure_exceeded_cap,
    p3_violation,
    partial_overlap,
    eigenvalue_mismatch,
    hit_f,
    ratio_out_of_range,
    horizon_too_large,
    precision_undecidable,
    degenerate_p,
    malformed_word,
    unsupported_field,
    internal,
};

inline const char* errc_name(errc c) {
    switch (c) {
        case errc::rejected_digits:       return "RejectedDigits";
        case errc::mixed_fields:          return "MixedFields";
        case errc::precision_exhausted:   return "PrecisionExhausted";
        case errc::inconclusive:          return "Inconclusive";
        case errc::not_greedy:            return "NotGreedy";
        case errc::out_of_domain:         return "OutOfDomain";
        case errc::omega_exhausted:       return "OmegaExhausted";
        case errc::closure_exceeded_cap:  return "ClosureExceededCap";
        case errc::p3_violation:          return "P3Violation";
        case errc::partial_overlap:       return "PartialOverlap";
        case errc::eigenvalue_mismatch:   return "EigenvalueMismatch";
        case errc::hit_f:                 return "HitF";
        case errc::ratio_out_of_range:    return "RatioOutOfRange";
        case errc::horizon_too_large:     return "HorizonTooLarge";
        case errc::precision_undecidable: return "PrecisionUndecidable";
        case errc::degenerate_p:          return "DegenerateP";
        case errc::malformed_word:        return "MalformedWord";
        case errc::unsupported_field:     return "UnsupportedField";
        case errc::internal:              return "InternalError";
    }
    return "UnknownError";
}

class error : public std::runtime_error {
public:
    error(errc c, const std::string& what)
        : std::runtime_error(std::string(errc_name(c)) + ": " + what), code_(c) {}
    errc code() const noexcept { return code_; }

private:
    errc code_;
};

// Carries the 1-based orbit step at which the iterate landed on F.
class hit_f_error : public error {
public:
    hit_f_error(std::size_t step, const std::string& what)
        : error(errc::hit_f, what), step_(step) {}
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

[[noreturn]] inline void raise(errc c, const std::string& what) { throw error(c, what); }

}  // namespace betadim
