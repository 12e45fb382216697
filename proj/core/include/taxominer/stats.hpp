#pragma once

#include <optional>
#include <string>
#include <vector>

namespace taxominer {

struct TestResult {
    std::string method;  // e.g. "mann_whitney_u/two_sided/exact"
    double statistic = 0.0;
    std::optional<double> p_value;
    std::optional<int> df;
    std::vector<std::string> warnings;

    // Anderson-Darling critical-value comparisons, empty for other tests.
    struct CriticalDecision {
        double significance_percent;
        double critical_value;
        bool rejected;
    };
    std::vector<CriticalDecision> decisions;
};

struct RankVector {
    std::vector<double> ranks;      // midranks, same order as input
    std::vector<int> tie_groups;    // sizes of tied groups (size >= 2 only)
};

// Ascending midranks; ties get the mean of their covered ranks.
RankVector rank_with_ties(const std::vector<double>& values);

enum class Alternative { two_sided, less, greater };
enum class MwuMethod { automatic, exact, normal };

struct MwuOptions {
    Alternative alternative = Alternative::two_sided;
    bool continuity_correction = true;
    MwuMethod method = MwuMethod::automatic;
};

// Statistic is U of the first sample. Exact p by enumeration (tie-free
// only); otherwise tie-corrected normal approximation.
TestResult mann_whitney_u(const std::vector<double>& x, const std::vector<double>& y,
                          const MwuOptions& options = {});

TestResult kruskal_wallis(const std::vector<std::vector<double>>& groups);

// Normality test with estimated mean and variance; reports the modified
// statistic against the usual critical-value table instead of a p-value.
TestResult anderson_darling_normal(const std::vector<double>& sample);

// Phi(x), absolute error below 1e-7.
double normal_cdf(double x);

// Chi-square survival function Q(df/2, x/2) via the regularized upper
// incomplete gamma function; absolute error below 1e-8.
double chi2_sf(double x, int df);

// Regularized upper incomplete gamma Q(a, x): series for x < a+1,
// continued fraction otherwise.
double upper_incomplete_gamma_regularized(double a, double x);

}  // namespace taxominer
