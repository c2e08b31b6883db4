#pragma once

#include <string>
#include <vector>

namespace themis::eval {

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation,
// absolute error well under 1e-6 across the df used here.
double reg_incomplete_beta(double a, double b, double x);

// Two-tailed p for Student's t with df degrees of freedom.
double student_t_two_tailed_p(double t, int df);

// Paired comparison of one metric across replicates (b vs a, diffs = b - a).
struct StatRow {
    std::string metric;
    double mean_a = 0.0;   // e.g. Iter-1
    double mean_b = 0.0;   // e.g. Best
    double delta = 0.0;    // mean_b - mean_a
    double t = 0.0;
    double p = 1.0;
    double cohens_d = 0.0;
    int n = 0;
    bool skipped = false;    // all diffs zero: test not applicable
    bool infinite_t = false; // all diffs equal and nonzero
};

// t = mean(diff) / (sd(diff)/sqrt(n)) with the sample sd (n-1 denominator);
// Cohen's d (paired) = mean(diff)/sd(diff); p from Student's t, df = n-1.
StatRow paired_stats(const std::vector<double>& a, const std::vector<double>& b,
                     const std::string& metric_name);

// "***" p < 0.01, "**" p < 0.05, "" otherwise.
std::string sig_label(double p);

// S (|d| < 0.5), M (|d| < 0.8), L (|d| >= 0.8).
std::string effect_size_label(double d);

} // namespace themis::eval
