#include "atmbench/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace atmbench {

// Acklam's rational approximation, then one Newton step through erfc. The
// refinement brings the result to within a few ulp across (0,1).
double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("inverse_normal_cdf: p must lie in (0,1)");

  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};

  const double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  const double sqrt_two_pi = 2.506628274631000502;
  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  const double u = e * sqrt_two_pi * std::exp(x * x / 2.0);
  x = x - u / (1.0 + x * u / 2.0);
  return x;
}

LatencyStats latency_stats(const std::vector<std::optional<Tick>>& latencies, double alpha) {
  if (latencies.size() < 2)
    throw std::invalid_argument("latency_stats: need at least two samples");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("latency_stats: alpha must lie in (0,1)");

  LatencyStats st;
  st.p = static_cast<std::int64_t>(latencies.size());
  st.alpha = alpha;
  st.z = inverse_normal_cdf(1.0 - alpha / 2.0);
  for (const auto& l : latencies)
    if (!l) st.lost_in_window += 1;
  if (st.lost_in_window > 0) {
    st.unbounded = true;
    const double inf = std::numeric_limits<double>::infinity();
    st.mean = st.stddev = st.std_error = st.ci_low = st.ci_high = inf;
    return st;
  }

  double sum = 0;
  for (const auto& l : latencies) sum += static_cast<double>(*l);
  st.mean = sum / static_cast<double>(st.p);
  double ss = 0;
  for (const auto& l : latencies) {
    const double d = static_cast<double>(*l) - st.mean;
    ss += d * d;
  }
  st.stddev = std::sqrt(ss / static_cast<double>(st.p - 1));
  st.std_error = st.stddev / std::sqrt(static_cast<double>(st.p));
  st.ci_low = st.mean - st.z * st.std_error;
  st.ci_high = st.mean + st.z * st.std_error;
  return st;
}

}  // namespace atmbench
