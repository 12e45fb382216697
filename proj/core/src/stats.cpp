#include "taxominer/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "taxominer/errors.hpp"

namespace taxominer {

RankVector rank_with_ties(const std::vector<double>& values) {
    if (values.empty()) throw InputError("rank_with_ties: empty input");
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    RankVector out;
    out.ranks.assign(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        // positions i..j (0-based) share the midrank
        double midrank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) out.ranks[order[k]] = midrank;
        if (j > i) out.tie_groups.push_back(static_cast<int>(j - i + 1));
        i = j + 1;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Special functions
// ---------------------------------------------------------------------------

namespace {

constexpr double kEps = 1e-15;
constexpr int kMaxIter = 500;

// Regularized lower incomplete gamma P(a,x) by series expansion; valid for
// x < a + 1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double term = 1.0 / a;
    double sum = term;
    for (int i = 0; i < kMaxIter; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * kEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma Q(a,x) by continued fraction (modified
// Lentz); valid for x >= a + 1.
double gamma_q_contfrac(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kEps) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double upper_incomplete_gamma_regularized(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw InputError("incomplete gamma: bad arguments");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_contfrac(a, x);
}

double normal_cdf(double x) {
    if (!std::isfinite(x)) throw InputError("normal_cdf: non-finite argument");
    // erfc(|x|/sqrt(2)) = Q(1/2, x^2/2)
    double half_erfc = 0.5 * upper_incomplete_gamma_regularized(0.5, x * x / 2.0);
    return x >= 0.0 ? 1.0 - half_erfc : half_erfc;
}

double chi2_sf(double x, int df) {
    if (x < 0.0) throw InputError("chi2_sf: x must be >= 0");
    if (df < 1) throw InputError("chi2_sf: df must be >= 1");
    return upper_incomplete_gamma_regularized(df / 2.0, x / 2.0);
}

// ---------------------------------------------------------------------------
// Mann-Whitney U
// ---------------------------------------------------------------------------

namespace {

double clamp_p(double p) { return std::min(1.0, std::max(0.0, p)); }

double tie_term(const std::vector<int>& tie_groups) {
    double t = 0.0;
    for (int g : tie_groups) {
        double gd = g;
        t += gd * gd * gd - gd;
    }
    return t;
}

// Distribution of the rank sum of a sample of size n1 drawn from ranks
// 1..N, by dynamic programming. counts[s] = number of subsets with sum s.
std::vector<double> rank_sum_distribution(int n1, int total) {
    int max_sum = total * (total + 1) / 2;
    std::vector<std::vector<double>> ways(
        n1 + 1, std::vector<double>(max_sum + 1, 0.0));
    ways[0][0] = 1.0;
    for (int m = 1; m <= total; ++m)
        for (int k = std::min(m, n1); k >= 1; --k)
            for (int s = max_sum; s >= m; --s)
                if (ways[k - 1][s - m] > 0.0) ways[k][s] += ways[k - 1][s - m];
    return ways[n1];
}

const char* alt_name(Alternative a) {
    switch (a) {
        case Alternative::two_sided: return "two_sided";
        case Alternative::less: return "less";
        default: return "greater";
    }
}

}  // namespace

TestResult mann_whitney_u(const std::vector<double>& x, const std::vector<double>& y,
                          const MwuOptions& options) {
    if (x.empty() || y.empty())
        throw InputError("mann_whitney_u: both samples must be nonempty");
    const int n1 = static_cast<int>(x.size());
    const int n2 = static_cast<int>(y.size());
    const int total = n1 + n2;

    std::vector<double> pooled = x;
    pooled.insert(pooled.end(), y.begin(), y.end());
    for (double v : pooled)
        if (!std::isfinite(v)) throw InputError("mann_whitney_u: non-finite value");
    RankVector rv = rank_with_ties(pooled);

    double r1 = 0.0;
    for (int i = 0; i < n1; ++i) r1 += rv.ranks[i];
    double u1 = r1 - n1 * (n1 + 1) / 2.0;

    bool has_ties = !rv.tie_groups.empty();
    MwuMethod method = options.method;
    if (method == MwuMethod::exact && has_ties)
        throw InputError("mann_whitney_u: exact method is invalid with ties");
    if (method == MwuMethod::automatic)
        method = (!has_ties && total <= 20) ? MwuMethod::exact : MwuMethod::normal;

    TestResult result;
    result.statistic = u1;

    if (method == MwuMethod::exact) {
        std::vector<double> counts = rank_sum_distribution(n1, total);
        double all = 0.0;
        for (double c : counts) all += c;
        int s_obs = static_cast<int>(std::llround(r1));
        double le = 0.0, ge = 0.0;
        for (int s = 0; s < static_cast<int>(counts.size()); ++s) {
            if (s <= s_obs) le += counts[s];
            if (s >= s_obs) ge += counts[s];
        }
        double p;
        switch (options.alternative) {
            case Alternative::less: p = le / all; break;  // small U1 <=> small R1
            case Alternative::greater: p = ge / all; break;
            default: p = 2.0 * std::min(le, ge) / all; break;
        }
        result.p_value = clamp_p(p);
        result.method = std::string("mann_whitney_u/") + alt_name(options.alternative) +
                        "/exact";
    } else {
        double mean_u = static_cast<double>(n1) * n2 / 2.0;
        double nd = total;
        double var_u = static_cast<double>(n1) * n2 / 12.0 *
                       ((nd + 1.0) - tie_term(rv.tie_groups) / (nd * (nd - 1.0)));
        result.method = std::string("mann_whitney_u/") + alt_name(options.alternative) +
                        (options.continuity_correction ? "/normal_cc" : "/normal");
        if (var_u <= 0.0) {
            result.p_value = 1.0;
            result.warnings.push_back("degenerate: all values tied");
            return result;
        }
        double sd = std::sqrt(var_u);
        double cc = options.continuity_correction ? 0.5 : 0.0;
        double p;
        if (options.alternative == Alternative::two_sided) {
            double z = std::max(0.0, std::fabs(u1 - mean_u) - cc) / sd;
            p = 2.0 * (1.0 - normal_cdf(z));
        } else if (options.alternative == Alternative::less) {
            double z = (u1 - mean_u + cc) / sd;
            p = normal_cdf(z);
        } else {
            double z = (u1 - mean_u - cc) / sd;
            p = 1.0 - normal_cdf(z);
        }
        result.p_value = clamp_p(p);
        if (std::min(n1, n2) < 20) result.warnings.push_back("small sample");
    }
    return result;
}

// ---------------------------------------------------------------------------
// Kruskal-Wallis
// ---------------------------------------------------------------------------

TestResult kruskal_wallis(const std::vector<std::vector<double>>& groups) {
    if (groups.size() < 2)
        throw InputError("kruskal_wallis: need at least two groups");
    for (const auto& g : groups)
        if (g.empty()) throw InputError("kruskal_wallis: empty group");

    std::vector<double> pooled;
    for (const auto& g : groups) pooled.insert(pooled.end(), g.begin(), g.end());
    for (double v : pooled)
        if (!std::isfinite(v)) throw InputError("kruskal_wallis: non-finite value");

    const double n = static_cast<double>(pooled.size());
    const int k = static_cast<int>(groups.size());
    RankVector rv = rank_with_ties(pooled);

    TestResult result;
    result.df = k - 1;
    result.method = "kruskal_wallis";

    double correction = 1.0 - tie_term(rv.tie_groups) / (n * n * n - n);
    if (correction <= 0.0) {
        result.statistic = 0.0;
        result.p_value = 1.0;
        result.warnings.push_back("degenerate: all values tied");
        return result;
    }

    double h = 0.0;
    std::size_t offset = 0;
    for (const auto& g : groups) {
        double rank_sum = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) rank_sum += rv.ranks[offset + i];
        h += rank_sum * rank_sum / static_cast<double>(g.size());
        offset += g.size();
    }
    h = 12.0 / (n * (n + 1.0)) * h - 3.0 * (n + 1.0);
    h /= correction;
    if (h < 0.0 && h > -1e-12) h = 0.0;  // round-off near zero

    result.statistic = h;
    result.p_value = clamp_p(chi2_sf(h, k - 1));
    return result;
}

// ---------------------------------------------------------------------------
// Anderson-Darling normality test
// ---------------------------------------------------------------------------

TestResult anderson_darling_normal(const std::vector<double>& sample) {
    const std::size_t n = sample.size();
    if (n < 8)
        throw InputError("anderson_darling: need at least 8 observations");

    double mean = std::accumulate(sample.begin(), sample.end(), 0.0) /
                  static_cast<double>(n);
    double ss = 0.0;
    for (double v : sample) ss += (v - mean) * (v - mean);
    double var = ss / static_cast<double>(n - 1);
    if (var <= 0.0)
        throw InputError("anderson_darling: degenerate sample (zero variance)");
    double sd = std::sqrt(var);

    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = (sample[i] - mean) / sd;
    std::sort(z.begin(), z.end());

    double a2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double lo = std::clamp(normal_cdf(z[i]), 1e-15, 1.0 - 1e-15);
        double hi = std::clamp(normal_cdf(z[n - 1 - i]), 1e-15, 1.0 - 1e-15);
        a2 += (2.0 * static_cast<double>(i) + 1.0) * (std::log(lo) + std::log1p(-hi));
    }
    a2 = -static_cast<double>(n) - a2 / static_cast<double>(n);

    double nd = static_cast<double>(n);
    double a2_mod = a2 * (1.0 + 0.75 / nd + 2.25 / (nd * nd));

    TestResult result;
    result.method = "anderson_darling_normal";
    result.statistic = a2_mod;
    // Stephens' case 3 critical values (mean and variance estimated).
    const std::pair<double, double> table[] = {
        {15.0, 0.576}, {10.0, 0.656}, {5.0, 0.787}, {2.5, 0.918}, {1.0, 1.092}};
    for (auto [level, critical] : table)
        result.decisions.push_back({level, critical, a2_mod > critical});
    return result;
}

}  // namespace taxominer
