#include "alox/special.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "alox/errors.hpp"

namespace alox {

double log_gamma(double x) {
    if (!(x > 0.0) || !std::isfinite(x))
        throw domain_error("log_gamma: argument must be positive and finite");
    return std::lgamma(x);
}

namespace {

// ln Gamma(z) - [(z - 1/2) ln z - z + ln sqrt(2 pi)], asymptotic series; z >= 10.
double stirling_correction(double z) {
    const double r = 1.0 / z, r2 = r * r;
    return r * (1.0 / 12 - r2 * (1.0 / 360 - r2 * (1.0 / 1260 - r2 * (1.0 / 1680 - r2 * (1.0 / 1188 - r2 * 691.0 / 360360)))));
}

constexpr double ln_sqrt_2pi = 0.918938533204672741780329736406;

} // namespace

double log_beta(double x, double y) {
    if (!(x > 0.0) || !(y > 0.0))
        throw domain_error("log_beta: arguments must be positive");
    const double p = std::min(x, y), q = std::max(x, y);
    // summing three log-gammas cancels badly once q is large; keep the
    // large-argument parts in closed form instead
    if (p >= 10.0) {
        const double corr = stirling_correction(p) + stirling_correction(q) - stirling_correction(p + q);
        return -0.5 * std::log(q) + ln_sqrt_2pi + corr + (p - 0.5) * std::log(p / (p + q)) +
               q * std::log1p(-p / (p + q));
    }
    if (q >= 10.0) {
        const double corr = stirling_correction(q) - stirling_correction(p + q);
        return log_gamma(p) + corr + p - p * std::log(p + q) + (q - 0.5) * std::log1p(-p / (p + q));
    }
    return std::log(std::tgamma(p) * (std::tgamma(q) / std::tgamma(p + q)));
}

double log_choose(int n, int k) {
    if (n < 0 || k < 0 || k > n)
        throw domain_error("log_choose: require 0 <= k <= n");
    if (k == 0 || k == n) return 0.0;
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double digamma(double x) {
    if (!(x > 0.0)) throw domain_error("digamma: argument must be positive");
    return boost::math::digamma(x);
}

double trigamma(double x) {
    if (!(x > 0.0)) throw domain_error("trigamma: argument must be positive");
    return boost::math::trigamma(x);
}

} // namespace alox
