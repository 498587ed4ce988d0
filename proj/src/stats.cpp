#include "alox/stats.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <random>
#include <sstream>

#include "alox/errors.hpp"
#include "alox/special.hpp"

namespace alox {

beta_binomial::beta_binomial(double alpha, double beta, int trials)
    : alpha_(alpha), beta_(beta), trials_(trials) {
    if (!(alpha > 0.0) || !std::isfinite(alpha) || !(beta > 0.0) || !std::isfinite(beta))
        throw domain_error("beta_binomial: alpha and beta must be positive and finite");
    if (trials < 0) throw domain_error("beta_binomial: M must be non-negative");
}

double log_pmf(const beta_binomial& dist, int n) {
    const int m = dist.trials();
    if (n < 0 || n > m) throw domain_error("pmf: n outside 0..M");
    return log_choose(m, n) + log_beta(n + dist.alpha(), m - n + dist.beta()) -
           log_beta(dist.alpha(), dist.beta());
}

double pmf(const beta_binomial& dist, int n) { return std::exp(log_pmf(dist, n)); }

std::vector<double> pmf_table(const beta_binomial& dist) {
    std::vector<double> p(static_cast<std::size_t>(dist.trials()) + 1);
    for (int n = 0; n <= dist.trials(); ++n) p[static_cast<std::size_t>(n)] = pmf(dist, n);
    return p;
}

double cdf(const beta_binomial& dist, int n) {
    if (n < 0) return 0.0;
    if (n >= dist.trials()) return 1.0;
    double s = 0.0;
    for (int k = 0; k <= n; ++k) s += pmf(dist, k);
    return std::min(s, 1.0);
}

double mean(const beta_binomial& dist) {
    return dist.trials() * dist.alpha() / (dist.alpha() + dist.beta());
}

double variance(const beta_binomial& dist) {
    const double a = dist.alpha();
    const double b = dist.beta();
    const double m = dist.trials();
    const double s = a + b;
    return m * (m + s) * a * b / (s * s * (s + 1.0));
}

double stddev(const beta_binomial& dist) { return std::sqrt(variance(dist)); }

std::vector<int> sample(const beta_binomial& dist, std::uint64_t seed, std::size_t k) {
    std::mt19937_64 rng(seed);
    std::gamma_distribution<double> ga(dist.alpha(), 1.0);
    std::gamma_distribution<double> gb(dist.beta(), 1.0);
    std::vector<int> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        const double x = ga(rng);
        const double y = gb(rng);
        const double p = (x + y > 0.0) ? x / (x + y) : 0.5;
        std::binomial_distribution<int> bin(dist.trials(), p);
        out.push_back(bin(rng));
    }
    return out;
}

namespace {

// counts collapsed to a histogram; the likelihood only depends on it
struct histogram {
    std::vector<double> freq;
    double total = 0.0;
    int max_count = 0;
};

histogram make_histogram(const std::vector<int>& counts) {
    histogram h;
    h.max_count = *std::max_element(counts.begin(), counts.end());
    h.freq.assign(static_cast<std::size_t>(h.max_count) + 1, 0.0);
    for (int c : counts) h.freq[static_cast<std::size_t>(c)] += 1.0;
    h.total = static_cast<double>(counts.size());
    return h;
}

double hist_log_likelihood(const histogram& h, int m, double a, double b) {
    const double norm = log_beta(a, b);
    double ll = 0.0;
    for (std::size_t n = 0; n < h.freq.size(); ++n) {
        if (h.freq[n] == 0.0) continue;
        const int ni = static_cast<int>(n);
        ll += h.freq[n] * (log_choose(m, ni) + log_beta(ni + a, m - ni + b) - norm);
    }
    return ll;
}

// gradient and Hessian with respect to (ln a, ln b)
struct derivatives {
    double gu, gv;
    double huu, huv, hvv;
};

derivatives hist_derivatives(const histogram& h, int m, double a, double b) {
    const double s = a + b;
    const double k = h.total;
    double la = k * (digamma(s) - digamma(m + s) - digamma(a));
    double lb = k * (digamma(s) - digamma(m + s) - digamma(b));
    double laa = k * (trigamma(s) - trigamma(m + s) - trigamma(a));
    double lbb = k * (trigamma(s) - trigamma(m + s) - trigamma(b));
    const double lab = k * (trigamma(s) - trigamma(m + s));
    for (std::size_t n = 0; n < h.freq.size(); ++n) {
        const double f = h.freq[n];
        if (f == 0.0) continue;
        const double dn = static_cast<double>(n);
        la += f * digamma(dn + a);
        lb += f * digamma(m - dn + b);
        laa += f * trigamma(dn + a);
        lbb += f * trigamma(m - dn + b);
    }
    return {a * la, b * lb, a * a * laa + a * la, a * b * lab, b * b * lbb + b * lb};
}

struct mom_start {
    double alpha;
    double beta;
};

mom_start method_of_moments(const std::vector<int>& counts, int m) {
    double mu = 0.0;
    for (int c : counts) mu += c;
    mu /= static_cast<double>(counts.size());
    double var = 0.0;
    for (int c : counts) var += (c - mu) * (c - mu);
    var /= static_cast<double>(counts.size());

    const double p = std::clamp(mu / m, 1e-6, 1.0 - 1e-6);
    // intra-class correlation rho = 1 / (alpha + beta + 1)
    double rho = 0.5;
    if (m > 1) rho = (var / (m * p * (1.0 - p)) - 1.0) / (m - 1.0);
    rho = std::clamp(rho, 1e-4, 0.99);
    const double s = 1.0 / rho - 1.0;
    return {p * s, (1.0 - p) * s};
}

constexpr int max_iterations = 200;
// per observation: the score is a sum over the sample, so its rounding
// floor grows with the sample size
constexpr double gradient_tolerance = 1e-9;

struct newton_outcome {
    double alpha, beta, log_likelihood, initial_log_likelihood, gradient_norm;
    int iterations;
    bool converged;
};

// Bisection on one log-parameter's partial derivative, used when a Newton
// step is not finite.
double bisect_coordinate(const histogram& h, int m, double u, double v, bool first) {
    auto grad = [&](double x) {
        const auto d = first ? hist_derivatives(h, m, std::exp(x), std::exp(v))
                             : hist_derivatives(h, m, std::exp(u), std::exp(x));
        return first ? d.gu : d.gv;
    };
    const double x0 = first ? u : v;
    double lo = x0 - 4.0;
    double hi = x0 + 4.0;
    double glo = grad(lo);
    double ghi = grad(hi);
    if (!std::isfinite(glo) || !std::isfinite(ghi) || glo * ghi > 0.0)
        return (std::isfinite(ghi) && ghi > 0.0) ? hi : x0;
    for (int i = 0; i < 100; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double gm = grad(mid);
        if ((gm > 0.0) == (glo > 0.0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

newton_outcome newton_fit(const histogram& h, const std::vector<int>& counts, int m) {
    const auto start = method_of_moments(counts, m);
    double u = std::log(start.alpha);
    double v = std::log(start.beta);
    double ll = hist_log_likelihood(h, m, start.alpha, start.beta);
    newton_outcome out{start.alpha, start.beta, ll, ll, 0.0, 0, false};
    const double tolerance = gradient_tolerance * static_cast<double>(std::max<std::size_t>(counts.size(), 1));

    for (int it = 0; it < max_iterations; ++it) {
        out.iterations = it + 1;
        const auto d = hist_derivatives(h, m, std::exp(u), std::exp(v));
        const double gnorm = std::hypot(d.gu, d.gv);
        out.gradient_norm = gnorm;
        if (gnorm < tolerance) {
            out.converged = true;
            out.iterations = it;
            break;
        }

        // Levenberg shift keeps the step an ascent direction when the Hessian
        // is not negative definite.
        double huu = d.huu, hvv = d.hvv;
        const double det = huu * hvv - d.huv * d.huv;
        if (!(huu < 0.0 && det > 0.0)) {
            const double shift = std::abs(huu) + std::abs(hvv) + std::abs(d.huv) + 1.0;
            huu -= shift;
            hvv -= shift;
        }
        const double det2 = huu * hvv - d.huv * d.huv;
        double du = -(hvv * d.gu - d.huv * d.gv) / det2;
        double dv = -(huu * d.gv - d.huv * d.gu) / det2;

        if (!std::isfinite(du) || !std::isfinite(dv)) {
            const double nu = bisect_coordinate(h, m, u, v, true);
            const double nv = bisect_coordinate(h, m, nu, v, false);
            const double nll = hist_log_likelihood(h, m, std::exp(nu), std::exp(nv));
            if (std::isfinite(nll) && nll >= ll) {
                u = nu;
                v = nv;
                ll = nll;
            }
            continue;
        }

        const double len = std::hypot(du, dv);
        if (len > 2.0) {
            du *= 2.0 / len;
            dv *= 2.0 / len;
        }

        bool improved = false;
        double step = 1.0;
        for (int ls = 0; ls < 60; ++ls, step *= 0.5) {
            const double nu = u + step * du;
            const double nv = v + step * dv;
            const double nll = hist_log_likelihood(h, m, std::exp(nu), std::exp(nv));
            if (std::isfinite(nll) && nll >= ll) {
                u = nu;
                v = nv;
                ll = nll;
                improved = true;
                break;
            }
        }
        if (!improved) break;
    }

    if (!out.converged) {
        const auto d = hist_derivatives(h, m, std::exp(u), std::exp(v));
        out.gradient_norm = std::hypot(d.gu, d.gv);
        out.converged = out.gradient_norm < tolerance;
    }
    out.alpha = std::exp(u);
    out.beta = std::exp(v);
    out.log_likelihood = ll;
    return out;
}

} // namespace

double log_likelihood(const beta_binomial& dist, const std::vector<int>& counts) {
    double ll = 0.0;
    for (int c : counts) ll += log_pmf(dist, c);
    return ll;
}

fit_result fit(const count_sample& sample, const trials_strategy& strategy) {
    const auto& counts = sample.counts;
    if (counts.size() < 2) throw fit_error("fit: need at least two samples");
    if (*std::min_element(counts.begin(), counts.end()) < 0)
        throw domain_error("fit: counts must be non-negative");
    if (std::adjacent_find(counts.begin(), counts.end(), std::not_equal_to<>()) == counts.end())
        throw fit_error("fit: all counts are equal, variance is degenerate");

    const auto h = make_histogram(counts);

    int lo = 0;
    int hi = 0;
    if (const auto* f = std::get_if<fixed_trials>(&strategy)) {
        if (h.max_count > f->trials)
            throw domain_error("fit: count " + std::to_string(h.max_count) + " exceeds fixed M=" +
                               std::to_string(f->trials));
        lo = hi = f->trials;
    } else {
        const auto& s = std::get<scan_trials>(strategy);
        lo = std::max(s.min_trials.value_or(h.max_count), h.max_count);
        hi = s.max_trials.value_or(h.max_count + 60);
        if (hi < lo) throw domain_error("fit: empty M scan range");
    }
    if (hi < 1) throw fit_error("fit: M must be at least 1");

    std::optional<fit_result> best;
    std::vector<scan_point> scan;
    for (int m = std::max(lo, 1); m <= hi; ++m) {
        const auto r = newton_fit(h, counts, m);
        scan.push_back({m, r.alpha, r.beta, r.log_likelihood, r.converged});
        if (!best || r.log_likelihood > best->log_likelihood) {
            best = fit_result{beta_binomial(r.alpha, r.beta, m), r.log_likelihood,
                              r.initial_log_likelihood, r.converged, r.iterations,
                              r.gradient_norm, {}};
        }
    }
    best->scan = std::move(scan);
    return *best;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

int parse_count(const std::string& field, std::size_t line) {
    const auto t = trim(field);
    std::size_t pos = 0;
    long v = 0;
    try {
        v = std::stol(t, &pos);
    } catch (const std::exception&) {
        throw parse_error(line, "expected an integer count, got '" + t + "'");
    }
    if (pos != t.size()) throw parse_error(line, "expected an integer count, got '" + t + "'");
    if (v < 0) throw parse_error(line, "negative count");
    return static_cast<int>(v);
}

} // namespace

std::vector<int> read_counts(std::istream& in) {
    std::vector<int> counts;
    std::string line;
    std::size_t lineno = 0;
    std::optional<std::size_t> column;
    bool first = true;
    while (std::getline(in, line)) {
        ++lineno;
        const auto t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (first) {
            first = false;
            if (t.find(',') != std::string::npos || t == "n_h") {
                std::stringstream ss(t);
                std::string cell;
                std::size_t idx = 0;
                while (std::getline(ss, cell, ',')) {
                    if (trim(cell) == "n_h") column = idx;
                    ++idx;
                }
                if (!column) throw parse_error(lineno, "CSV header lacks an n_h column");
                continue;
            }
        }
        if (column) {
            std::stringstream ss(t);
            std::string cell;
            std::size_t idx = 0;
            bool found = false;
            while (std::getline(ss, cell, ',')) {
                if (idx++ == *column) {
                    counts.push_back(parse_count(cell, lineno));
                    found = true;
                    break;
                }
            }
            if (!found) throw parse_error(lineno, "row has no n_h field");
        } else {
            counts.push_back(parse_count(t, lineno));
        }
    }
    return counts;
}

} // namespace alox
