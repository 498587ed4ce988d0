#pragma once

namespace alox {

// ln Gamma(x) for x > 0.
double log_gamma(double x);

// ln B(x, y). Throws domain_error unless x > 0 and y > 0.
double log_beta(double x, double y);

// ln C(n, k) for 0 <= k <= n.
double log_choose(int n, int k);

double digamma(double x);
double trigamma(double x);

} // namespace alox
