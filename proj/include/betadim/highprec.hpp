#pragma once
// highprec.hpp - high-precision decimal floats for logarithms and reported
// dimension values. Internal evaluation runs at 100 decimal digits; reports
// are rounded to a requested number of significant digits (default 12).

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_dec_float.hpp>

#include <sstream>
#include <string>

#include "betadim/rational.hpp"

namespace betadim {

using BigFloat = boost::multiprecision::cpp_dec_float_100;

inline BigFloat to_bigfloat(const Rat& r) {
    return BigFloat(rat_num(r)) / BigFloat(rat_den(r));
}

inline BigFloat log_rat(const Rat& r) {
    if (r <= 0) raise(errc::internal, "log of non-positive rational");
    return log(to_bigfloat(r));
}

inline BigFloat log_int(const Int& n) {
    if (n <= 0) raise(errc::internal, "log of non-positive integer");
    return log(BigFloat(n));
}

// Shannon entropy of a (p, 1-p) coin in nats.
inline BigFloat entropy_H(const Rat& p) {
    if (p <= 0 || p >= 1) raise(errc::degenerate_p, "H(p) needs 0 < p < 1");
    BigFloat bp = to_bigfloat(p), bq = BigFloat(1) - bp;
    return -bp * log(bp) - bq * log(bq);
}

// `sig` significant digits, correctly rounded, positional when reasonable.
inline std::string format_sig(const BigFloat& v, unsigned sig = 12) {
    if (sig == 0) sig = 1;
    std::ostringstream os;
    os.precision(sig);
    os << v;
    return os.str();
}

}  // namespace betadim
