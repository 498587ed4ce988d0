#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "alox/errors.hpp"
#include "alox/special.hpp"
#include "alox/stats.hpp"
#include "oracles.hpp"

using namespace alox;

namespace {

bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(std::abs(b), 1e-300); }

const beta_binomial reference_dist{17.69, 15.36, 40};

} // namespace

TEST_CASE("log_beta simple values") {
    CHECK(log_beta(1.0, 1.0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(rel_close(log_beta(2.0, 3.0), std::log(1.0 / 12.0), 1e-14));
    CHECK(rel_close(log_beta(17.69, 15.36), static_cast<double>(oracle::log_beta_product(17.69L, 15.36L)), 1e-12));
}

TEST_CASE("log_beta matches the recurrence evaluator over [1e-3, 1e4]") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(std::log(1e-3), std::log(1e4));
    for (int i = 0; i < 500; ++i) {
        const double x = std::exp(u(rng)), y = std::exp(u(rng));
        const double want = static_cast<double>(oracle::log_beta_product(x, y));
        // relative where the value is away from zero, absolute near the zero crossing
        CHECK(std::abs(log_beta(x, y) - want) <= 1e-12 * std::max(1.0, std::abs(want)));
    }
}

TEST_CASE("log_beta rejects non-positive arguments") {
    CHECK_THROWS_AS(log_beta(0.0, 1.0), domain_error);
    CHECK_THROWS_AS(log_beta(1.0, -2.0), domain_error);
    CHECK_THROWS_AS(log_gamma(0.0), domain_error);
}

TEST_CASE("beta_binomial rejects invalid parameters") {
    CHECK_THROWS_AS(beta_binomial(0.0, 1.0, 3), domain_error);
    CHECK_THROWS_AS(beta_binomial(1.0, std::nan(""), 3), domain_error);
    CHECK_THROWS_AS(beta_binomial(1.0, 1.0, -1), domain_error);
}

TEST_CASE("pmf symmetry when alpha equals beta") {
    const beta_binomial d(2.0, 2.0, 4);
    for (int k = 0; k <= 4; ++k) CHECK(std::abs(log_pmf(d, k) - log_pmf(d, 4 - k)) <= 1e-12);
    const beta_binomial wide(3.3, 3.3, 117);
    for (int k = 0; k <= 117; ++k) CHECK(std::abs(log_pmf(wide, k) - log_pmf(wide, 117 - k)) <= 1e-12);
}

TEST_CASE("pmf agrees with the direct formula and the exhaustive argmax") {
    const auto table = pmf_table(reference_dist);
    REQUIRE(table.size() == 41);
    std::vector<double> direct;
    for (int n = 0; n <= 40; ++n) {
        direct.push_back(oracle::beta_binomial_pmf(17.69, 15.36, 40, n));
        CHECK(rel_close(table[n], direct.back(), 1e-11));
    }
    const auto argmax = [](const std::vector<double>& v) { return std::max_element(v.begin(), v.end()) - v.begin(); };
    CHECK(argmax(table) == argmax(direct));
    CHECK(std::abs(std::accumulate(table.begin(), table.end(), 0.0) - 1.0) <= 1e-12);
}

TEST_CASE("pmf domain") {
    CHECK_THROWS_AS(pmf(reference_dist, -1), domain_error);
    CHECK_THROWS_AS(pmf(reference_dist, 41), domain_error);
    CHECK(cdf(reference_dist, 40) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("normalization for random parameters") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(std::log(0.05), std::log(200.0));
    std::uniform_int_distribution<int> m(0, 200);
    for (int i = 0; i < 200; ++i) {
        const beta_binomial d(std::exp(u(rng)), std::exp(u(rng)), m(rng));
        const auto t = pmf_table(d);
        CHECK(std::abs(std::accumulate(t.begin(), t.end(), 0.0) - 1.0) <= 1e-12);
    }
}

TEST_CASE("closed-form moments") {
    CHECK(std::abs(mean(reference_dist) - 21.41) < 0.01);
    CHECK(std::abs(stddev(reference_dist) - 4.62) < 0.01);
    for (int m : {0, 1, 7, 40, 199}) CHECK(mean(beta_binomial(4.5, 4.5, m)) == doctest::Approx(m / 2.0));

    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.1, 50.0);
    for (int i = 0; i < 50; ++i) {
        const beta_binomial d(u(rng), u(rng), 1 + static_cast<int>(u(rng) * 3));
        const auto t = pmf_table(d);
        double m1 = 0, m2 = 0;
        for (std::size_t n = 0; n < t.size(); ++n) {
            m1 += n * t[n];
            m2 += double(n) * n * t[n];
        }
        CHECK(rel_close(mean(d), m1, 1e-10));
        CHECK(rel_close(variance(d), m2 - m1 * m1, 1e-9));
    }
}

TEST_CASE("sampling reproduces the moments") {
    const std::size_t k = 1000000;
    const auto draws = sample(reference_dist, 2024, k);
    REQUIRE(draws.size() == k);
    double s = 0, s2 = 0;
    for (int v : draws) {
        s += v;
        s2 += double(v) * v;
    }
    const double m = s / k, var = s2 / k - m * m;
    const double se_mean = stddev(reference_dist) / std::sqrt(double(k));
    CHECK(std::abs(m - mean(reference_dist)) < 3 * se_mean);
    // var of the sample variance ~ (mu4 - sigma^4)/k; use the exact fourth moment
    const auto t = pmf_table(reference_dist);
    double mu4 = 0;
    for (std::size_t n = 0; n < t.size(); ++n) mu4 += std::pow(n - mean(reference_dist), 4) * t[n];
    const double se_var = std::sqrt((mu4 - variance(reference_dist) * variance(reference_dist)) / k);
    CHECK(std::abs(var - variance(reference_dist)) < 3 * se_var);
}

TEST_CASE("sampling is deterministic and handles M = 0") {
    CHECK(sample(reference_dist, 77, 500) == sample(reference_dist, 77, 500));
    CHECK(sample(reference_dist, 77, 500) != sample(reference_dist, 78, 500));
    const auto zeros = sample(beta_binomial(2.0, 3.0, 0), 1, 100);
    CHECK(std::all_of(zeros.begin(), zeros.end(), [](int v) { return v == 0; }));
}

TEST_CASE("Kolmogorov-Smirnov distance of draws against the exact CDF") {
    const std::size_t k = 100000;
    for (const auto& d : {reference_dist, beta_binomial(0.7, 2.5, 60), beta_binomial(40.0, 5.0, 12)}) {
        auto draws = sample(d, 31, k);
        std::vector<std::size_t> hist(d.trials() + 1, 0);
        for (int v : draws) ++hist[v];
        double emp = 0, dmax = 0;
        for (int n = 0; n <= d.trials(); ++n) {
            emp += double(hist[n]) / k;
            dmax = std::max(dmax, std::abs(emp - cdf(d, n)));
        }
        CHECK(dmax < 1.63 / std::sqrt(double(k)));
    }
}

TEST_CASE("fit recovers the generator with fixed M") {
    const auto draws = sample(reference_dist, 3, 400);
    const auto f = fit({draws, 34.17 * 34.17}, fixed_trials{40});
    CHECK(f.converged);
    CHECK(f.dist.trials() == 40);
    CHECK(std::abs(mean(f.dist) - mean(reference_dist)) < 0.5);
    CHECK(std::abs(variance(f.dist) / variance(reference_dist) - 1.0) < 0.15);
    CHECK(f.log_likelihood >= f.initial_log_likelihood);
    CHECK(f.gradient_norm < 1e-9 * draws.size());
    CHECK(f.log_likelihood == doctest::Approx(log_likelihood(f.dist, draws)).epsilon(1e-12));
}

TEST_CASE("fit is a local maximum of the likelihood") {
    const auto draws = sample(beta_binomial(3.0, 7.0, 25), 8, 300);
    const auto f = fit({draws, 1.0}, fixed_trials{25});
    for (double da : {-1e-3, 1e-3})
        for (double db : {-1e-3, 1e-3}) {
            const beta_binomial p(f.dist.alpha() * (1 + da), f.dist.beta() * (1 + db), 25);
            CHECK(log_likelihood(p, draws) <= f.log_likelihood + 1e-12);
        }
}

TEST_CASE("fit with an M scan keeps the best likelihood") {
    const auto draws = sample(beta_binomial(5.0, 5.0, 20), 17, 300);
    const int top = *std::max_element(draws.begin(), draws.end());
    const auto f = fit({draws, 1.0}, scan_trials{});
    REQUIRE(f.scan.size() == 61);
    CHECK(f.scan.front().trials == top);
    CHECK(f.scan.back().trials == top + 60);
    for (const auto& p : f.scan) CHECK(p.log_likelihood <= f.log_likelihood + 1e-12);
    const auto g = fit({draws, 1.0}, scan_trials{top, top + 5});
    CHECK(g.scan.size() == 6);
}

TEST_CASE("fit errors") {
    CHECK_THROWS_AS(fit({{5, 5, 5, 5}, 1.0}, fixed_trials{40}), fit_error);
    CHECK_THROWS_AS(fit({{5}, 1.0}), fit_error);
    CHECK_THROWS_AS(fit({{1, 2, 50}, 1.0}, fixed_trials{40}), domain_error);
    CHECK_THROWS_AS(fit({{1, -2, 3}, 1.0}), domain_error);
}

TEST_CASE("read_counts formats") {
    std::istringstream plain("# counts\n3\n\n7\n 12 \n");
    CHECK(read_counts(plain) == std::vector<int>{3, 7, 12});
    std::istringstream csv("sample,n_al,n_o,n_h\na,1,2,4\nb,1,2,9\n");
    CHECK(read_counts(csv) == std::vector<int>{4, 9});
    std::istringstream bad("3\nfour\n");
    try {
        read_counts(bad);
        FAIL("expected parse_error");
    } catch (const parse_error& e) {
        CHECK(e.line() == 2);
    }
    std::istringstream no_col("a,b\n1,2\n");
    CHECK_THROWS_AS(read_counts(no_col), parse_error);
    std::istringstream neg("-1\n");
    CHECK_THROWS_AS(read_counts(neg), parse_error);
}
