#include "themis/eval/stats.hpp"

#include "themis/errors.hpp"

#include <cmath>
#include <limits>

namespace themis::eval {

namespace {

// Lentz continued fraction for the incomplete beta.
double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 400;
    constexpr double kEps = 3e-16;
    constexpr double kFpMin = 1e-300;
    double qab = a + b;
    double qap = a + 1.0;
    double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

} // namespace

double reg_incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                   b * std::log1p(-x);
    double bt = std::exp(ln_bt);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return bt * betacf(a, b, x) / a;
    }
    return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

double student_t_two_tailed_p(double t, int df) {
    if (df <= 0) raise(Errc::invalid_request, "df must be positive");
    if (std::isinf(t)) return 0.0;
    double x = df / (df + t * t);
    return reg_incomplete_beta(df / 2.0, 0.5, x);
}

StatRow paired_stats(const std::vector<double>& a, const std::vector<double>& b,
                     const std::string& metric_name) {
    if (a.size() != b.size()) {
        raise(Errc::invalid_request, "paired_stats requires equal-length samples");
    }
    const std::size_t n = a.size();
    if (n < 2) raise(Errc::invalid_request, "paired_stats requires n >= 2");

    StatRow row;
    row.metric = metric_name;
    row.n = static_cast<int>(n);
    std::vector<double> diffs(n);
    double sum_a = 0.0;
    double sum_b = 0.0;
    double sum_d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        diffs[i] = b[i] - a[i];
        sum_a += a[i];
        sum_b += b[i];
        sum_d += diffs[i];
    }
    row.mean_a = sum_a / static_cast<double>(n);
    row.mean_b = sum_b / static_cast<double>(n);
    double mean_d = sum_d / static_cast<double>(n);
    row.delta = mean_d;

    bool all_zero = true;
    for (double d : diffs) {
        if (d != 0.0) {
            all_zero = false;
            break;
        }
    }
    if (all_zero) {
        // identical samples: delta 0, test skipped
        row.skipped = true;
        row.t = std::numeric_limits<double>::quiet_NaN();
        row.p = std::numeric_limits<double>::quiet_NaN();
        row.cohens_d = std::numeric_limits<double>::quiet_NaN();
        return row;
    }
    double ss = 0.0;
    for (double d : diffs) ss += (d - mean_d) * (d - mean_d);
    double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (sd == 0.0) {
        // all diffs equal and nonzero: d is infinite, flag t accordingly
        row.infinite_t = true;
        double inf = std::numeric_limits<double>::infinity();
        row.t = mean_d > 0 ? inf : -inf;
        row.cohens_d = row.t;
        row.p = 0.0;
        return row;
    }
    row.t = mean_d / (sd / std::sqrt(static_cast<double>(n)));
    row.cohens_d = mean_d / sd;
    row.p = student_t_two_tailed_p(row.t, static_cast<int>(n) - 1);
    return row;
}

std::string sig_label(double p) {
    if (std::isnan(p)) return "";
    if (p < 0.01) return "***";
    if (p < 0.05) return "**";
    return "";
}

std::string effect_size_label(double d) {
    if (std::isnan(d)) return "";
    double m = std::fabs(d);
    if (m < 0.5) return "S";
    if (m < 0.8) return "M";
    return "L";
}

} // namespace themis::eval
