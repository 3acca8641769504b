#pragma once

#include "adaptscan/dataset.hpp"

#include <numeric>

namespace adaptscan {

namespace detail {

/// Mid-ranks (average ranks for ties), 1-based.
inline std::vector<double> midranks(const std::vector<double>& x) {
    size_t n = x.size();
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return x[a] < x[b]; });
    std::vector<double> ranks(n);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
        double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    size_t n = x.size();
    double mx = 0, my = 0;
    for (size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0, sxx = 0, syy = 0;
    for (size_t i = 0; i < n; ++i) {
        double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx <= 0 || syy <= 0) throw ConstantInputError();
    return sxy / std::sqrt(sxx * syy);
}

/// Regularized incomplete beta I_x(a, b) by continued fraction.
inline double betacf(double a, double b, double x) {
    const int max_iter = 300;
    const double eps = 3e-14, fpmin = 1e-300;
    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0, d = 1.0 - qab * x / qap;
    if (std::abs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) break;
    }
    return h;
}

inline double ibeta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double ln = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                b * std::log(1.0 - x);
    double front = std::exp(ln);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

/// Two-sided p-value of a t statistic with nu degrees of freedom.
inline double t_two_sided_p(double t, double nu) {
    if (!std::isfinite(t)) return 0.0;
    return ibeta(0.5 * nu, 0.5, nu / (nu + t * t));
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

} // namespace detail

struct CorrTest {
    double rho = 0.0;
    double p = 1.0;
};

/// Spearman rank correlation: Pearson correlation of mid-ranks, p-value from
/// the t approximation with n-2 degrees of freedom.
inline CorrTest spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw LengthMismatchError();
    if (x.size() < 4) throw TooFewSamplesError();
    std::vector<double> rx = detail::midranks(x), ry = detail::midranks(y);
    CorrTest r;
    r.rho = detail::pearson(rx, ry);
    double n = static_cast<double>(x.size());
    if (std::abs(r.rho) >= 1.0) {
        r.p = 0.0;
        return r;
    }
    double t = r.rho * std::sqrt((n - 2.0) / (1.0 - r.rho * r.rho));
    r.p = detail::t_two_sided_p(t, n - 2.0);
    return r;
}

/// Rank partial correlation via the recursive formula on the rank-correlation
/// matrix; p-value from the t approximation with n-2-|Z| degrees of freedom.
inline CorrTest partial_rank_corr(const std::vector<double>& x, const std::vector<double>& y,
                                  const std::vector<std::vector<double>>& z) {
    size_t n = x.size();
    if (y.size() != n) throw LengthMismatchError();
    for (const auto& col : z)
        if (col.size() != n) throw LengthMismatchError();
    if (static_cast<int>(n) < static_cast<int>(z.size()) + 4) throw TooFewSamplesError();

    size_t k = z.size();
    std::vector<std::vector<double>> ranks;
    ranks.push_back(detail::midranks(x));
    ranks.push_back(detail::midranks(y));
    for (const auto& col : z) ranks.push_back(detail::midranks(col));

    size_t dim = k + 2;
    std::vector<std::vector<double>> corr(dim, std::vector<double>(dim, 1.0));
    for (size_t i = 0; i < dim; ++i)
        for (size_t j = i + 1; j < dim; ++j)
            corr[i][j] = corr[j][i] = detail::pearson(ranks[i], ranks[j]);

    // pcor(i, j | S) by recursion on the last conditioning index.
    std::map<std::vector<int>, double> memo;
    std::function<double(int, int, std::vector<int>)> pcor = [&](int i, int j,
                                                                 std::vector<int> s) -> double {
        if (s.empty()) return corr[i][j];
        std::vector<int> key{i, j};
        key.insert(key.end(), s.begin(), s.end());
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        int c = s.back();
        s.pop_back();
        double rij = pcor(i, j, s);
        double ric = pcor(i, c, s);
        double rjc = pcor(j, c, s);
        double denom = (1.0 - ric * ric) * (1.0 - rjc * rjc);
        if (denom < 1e-12) throw SingularConditioningError();
        double val = (rij - ric * rjc) / std::sqrt(denom);
        memo.emplace(std::move(key), val);
        return val;
    };
    std::vector<int> cond;
    for (size_t c = 0; c < k; ++c) cond.push_back(static_cast<int>(c) + 2);

    CorrTest r;
    r.rho = pcor(0, 1, cond);
    double nu = static_cast<double>(n) - 2.0 - static_cast<double>(k);
    if (std::abs(r.rho) >= 1.0) {
        r.p = 0.0;
        return r;
    }
    double t = r.rho * std::sqrt(nu / (1.0 - r.rho * r.rho));
    r.p = detail::t_two_sided_p(t, nu);
    return r;
}

struct CITestResult {
    std::string i, j;
    std::vector<std::string> z;
    double rho = 0.0;
    double p = 1.0;
    bool independent = false; // p > alpha
};

inline CITestResult ci_test(const Dataset& ds, const std::string& i, const std::string& j,
                            const std::vector<std::string>& z, double alpha) {
    if (alpha <= 0.0 || alpha >= 1.0) throw StatError("alpha must lie in (0, 1)");
    std::vector<std::vector<double>> zcols;
    for (const auto& c : z) zcols.push_back(ds.column(c));
    CorrTest t = partial_rank_corr(ds.column(i), ds.column(j), zcols);
    return {i, j, z, t.rho, t.p, t.p > alpha};
}

struct LcdTriple {
    std::string context, x, y;
    CITestResult cx;  // C dependent on x
    CITestResult xy;  // x dependent on y
    CITestResult cy_x; // C independent of y given x
};

struct LcdSkipped {
    std::string x, y;
    std::string reason;
};

struct LcdResult {
    std::vector<LcdTriple> triples;
    std::vector<LcdSkipped> skipped;
};

/// Local causal discovery: all ordered pairs (x, y) of candidates with
/// C dep x, x dep y, and C indep y | x at level alpha. The context column is
/// assumed exogenous by the caller. Triples come out sorted by (x, y).
inline LcdResult lcd(const Dataset& ds, const std::string& context,
                     const std::vector<std::string>& candidates, double alpha) {
    LcdResult out;
    std::vector<std::string> sorted = candidates;
    std::sort(sorted.begin(), sorted.end());
    for (const auto& x : sorted)
        for (const auto& y : sorted) {
            if (x == y) continue;
            try {
                CITestResult cx = ci_test(ds, context, x, {}, alpha);
                if (cx.independent) continue;
                CITestResult xy = ci_test(ds, x, y, {}, alpha);
                if (xy.independent) continue;
                CITestResult cy_x = ci_test(ds, context, y, {x}, alpha);
                if (!cy_x.independent) continue;
                out.triples.push_back({context, x, y, cx, xy, cy_x});
            } catch (const StatError& e) {
                out.skipped.push_back({x, y, e.what()});
            }
        }
    return out;
}

/// Wilcoxon rank-sum (Mann-Whitney) two-sided p-value, normal approximation
/// with tie correction and continuity correction.
inline double rank_sum_test(const std::vector<double>& a, const std::vector<double>& b) {
    size_t n1 = a.size(), n2 = b.size();
    if (n1 < 2 || n2 < 2) throw TooFewSamplesError();
    std::vector<double> pooled = a;
    pooled.insert(pooled.end(), b.begin(), b.end());
    std::vector<double> ranks = detail::midranks(pooled);
    double w = 0.0;
    for (size_t i = 0; i < n1; ++i) w += ranks[i];
    double n = static_cast<double>(n1 + n2);
    double mean = static_cast<double>(n1) * (n + 1.0) / 2.0;

    // tie correction over pooled values
    std::vector<double> sorted = pooled;
    std::sort(sorted.begin(), sorted.end());
    double tie_sum = 0.0;
    size_t i = 0;
    while (i < sorted.size()) {
        size_t j = i;
        while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
        double t = static_cast<double>(j - i + 1);
        tie_sum += t * t * t - t;
        i = j + 1;
    }
    double var = static_cast<double>(n1) * static_cast<double>(n2) / 12.0 *
                 ((n + 1.0) - tie_sum / (n * (n - 1.0)));
    if (var <= 0.0) return 1.0; // all values tied
    double diff = w - mean;
    double z = (diff - (diff > 0 ? 0.5 : diff < 0 ? -0.5 : 0.0)) / std::sqrt(var);
    return 2.0 * detail::normal_cdf(-std::abs(z));
}

/// Data-side detection: condition 1 when the intervention
/// produced no detectable shift in the target variable, condition 2 when some
/// non-descendant of the target (per the Markov ordering graph) shifted.
inline DetectionVerdict detect_adaptation_from_data(const Dataset& baseline,
                                                    const Dataset& intervened,
                                                    const std::string& target_var,
                                                    const MarkovOrderingGraph& mog,
                                                    double alpha) {
    if (baseline.columns != intervened.columns)
        throw ColumnMismatchError("baseline and intervened datasets have different columns");
    int target = mog.index_of(target_var);
    if (target < 0) throw UnknownVertexError(target_var);
    if (mog.kinds[target] != MarkovOrderingGraph::Kind::Endogenous)
        throw UnknownVertexError(target_var);

    std::vector<bool> desc(mog.n(), false);
    std::deque<int> q{target};
    desc[target] = true;
    while (!q.empty()) {
        int v = q.front();
        q.pop_front();
        for (int w : mog.children[v])
            if (!desc[w]) {
                desc[w] = true;
                q.push_back(w);
            }
    }

    DetectionVerdict verdict;
    verdict.target_equation = "f_" + var_suffix(mog.raw_names[target]);
    double p_target =
        rank_sum_test(baseline.column(mog.names[target]), intervened.column(mog.names[target]));
    bool any_shift = p_target <= alpha;
    for (int v = 0; v < mog.n(); ++v) {
        if (v == target || mog.kinds[v] != MarkovOrderingGraph::Kind::Endogenous) continue;
        if (baseline.column_index(mog.names[v]) < 0) continue;
        double p = rank_sum_test(baseline.column(mog.names[v]), intervened.column(mog.names[v]));
        if (p > alpha) continue;
        any_shift = true;
        if (!desc[v]) verdict.witnesses.push_back(mog.names[v]);
    }
    // The detection argument presumes the intervention moved the system; with no
    // detectable shift anywhere the data are uninformative, not evidence of
    // adaptation.
    verdict.condition1 = any_shift && p_target > alpha;
    verdict.condition2 = !verdict.witnesses.empty();
    return verdict;
}

} // namespace adaptscan
