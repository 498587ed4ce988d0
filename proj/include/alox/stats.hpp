#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace alox {

/// Beta-binomial distribution over n in {0..M}: a binomial count whose success
/// probability is itself Beta(alpha, beta) distributed.
class beta_binomial {
public:
    beta_binomial(double alpha, double beta, int trials);

    double alpha() const noexcept { return alpha_; }
    double beta() const noexcept { return beta_; }
    int trials() const noexcept { return trials_; }

private:
    double alpha_;
    double beta_;
    int trials_;
};

/// Hydrogen counts per sample, each counted in a cell of the given
/// cross-sectional reference area (A^2).
struct count_sample {
    std::vector<int> counts;
    double reference_area = 0.0;
};

double log_pmf(const beta_binomial& dist, int n);
double pmf(const beta_binomial& dist, int n);
double cdf(const beta_binomial& dist, int n);
std::vector<double> pmf_table(const beta_binomial& dist);

double mean(const beta_binomial& dist);
double variance(const beta_binomial& dist);
double stddev(const beta_binomial& dist);

/// Draws k counts by sampling p ~ Beta(alpha, beta) and then n ~ Binomial(M, p).
/// The sequence is a pure function of (dist, seed, k).
std::vector<int> sample(const beta_binomial& dist, std::uint64_t seed, std::size_t k);

struct fixed_trials {
    int trials;
};

/// Likelihood scan over M in [min_trials, max_trials]. Unset bounds default to
/// [max(counts), max(counts) + 60].
struct scan_trials {
    std::optional<int> min_trials;
    std::optional<int> max_trials;
};

using trials_strategy = std::variant<fixed_trials, scan_trials>;

struct scan_point {
    int trials;
    double alpha;
    double beta;
    double log_likelihood;
    bool converged;
};

struct fit_result {
    beta_binomial dist;
    double log_likelihood;
    // log-likelihood at the method-of-moments starting point for dist.trials()
    double initial_log_likelihood;
    bool converged;
    int iterations;
    double gradient_norm;
    std::vector<scan_point> scan;
};

/// Maximum-likelihood beta-binomial fit. Newton iterations run on
/// (ln alpha, ln beta) from a method-of-moments start, with a backtracking
/// line search so the returned likelihood never drops below the start.
/// Throws fit_error for degenerate samples and domain_error when a count
/// exceeds a fixed M.
fit_result fit(const count_sample& sample, const trials_strategy& strategy = scan_trials{});

/// Log-likelihood of the counts under dist (binomial coefficient included).
double log_likelihood(const beta_binomial& dist, const std::vector<int>& counts);

/// Reads one integer per line, or a CSV whose header has an `n_h` column.
/// Blank lines and lines starting with '#' are skipped.
std::vector<int> read_counts(std::istream& in);

} // namespace alox
