#pragma once

#include <cmath>

namespace pitnet {

// Scalar kept as mantissa * exp(log_scale) so contraction values spanning
// hundreds of orders of magnitude stay representable.
struct LogScalar {
  double mantissa = 0.0;
  double log_scale = 0.0;

  double value() const { return mantissa * std::exp(log_scale); }

  // pull the mantissa magnitude into the exponent; zero stays zero
  LogScalar normalized() const {
    if (mantissa == 0.0) return {0.0, 0.0};
    return {mantissa > 0 ? 1.0 : -1.0, log_scale + std::log(std::fabs(mantissa))};
  }

  LogScalar operator*(const LogScalar& o) const {
    return {mantissa * o.mantissa, log_scale + o.log_scale};
  }

  static LogScalar sum(const LogScalar& a, const LogScalar& b) {
    if (a.mantissa == 0.0) return b;
    if (b.mantissa == 0.0) return a;
    const double l = a.log_scale > b.log_scale ? a.log_scale : b.log_scale;
    return {a.mantissa * std::exp(a.log_scale - l) +
                b.mantissa * std::exp(b.log_scale - l),
            l};
  }

  // |a/b - 1|, computed in log space to survive huge exponents
  static double rel_diff(const LogScalar& a, const LogScalar& b) {
    const LogScalar an = a.normalized(), bn = b.normalized();
    if (bn.mantissa == 0.0) return an.mantissa == 0.0 ? 0.0 : INFINITY;
    if (an.mantissa == 0.0) return 1.0;
    if (an.mantissa != bn.mantissa) return INFINITY;  // opposite signs
    return std::fabs(std::expm1(an.log_scale - bn.log_scale));
  }
};

}  // namespace pitnet
