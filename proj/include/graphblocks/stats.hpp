#pragma once

#include <vector>

namespace graphblocks {

struct TTestResult {
    double t = 0.0;
    double df = 0.0;
    double p = 1.0;  // two-sided
};

// Welch's unequal-variance t-test with the Welch-Satterthwaite degrees of
// freedom.  Throws DegenerateSample when either sample has fewer than two
// observations or both variances are zero.
TTestResult welch_t_test(const std::vector<double>& a, const std::vector<double>& b);

// Sample mean / unbiased (n-1) standard deviation.
double mean(const std::vector<double>& xs);
double sample_stddev(const std::vector<double>& xs);

// Two-sided p-value of Student's t: I_{df/(df+t^2)}(df/2, 1/2).
double student_t_two_sided_p(double t, double df);

// Regularized incomplete beta I_x(a, b) via Lentz's continued fraction.
double regularized_incomplete_beta(double a, double b, double x);

}  // namespace graphblocks
