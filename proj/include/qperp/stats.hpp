#pragma once

#include <functional>
#include <vector>

#include "qperp/qcalc.hpp"

namespace qperp {

// Two-sided Kolmogorov-Smirnov outcome at the fixed 1% level.
// One-sample:  critical = 1.63 / sqrt(n),   n_effective = n.
// Two-sample:  critical = 1.63 * sqrt((n+m)/(n*m)), n_effective = n*m/(n+m).
struct KsResult {
    double statistic;
    double n_effective;
    double critical_1pct;
    bool pass;
};

// Asymptotic two-sided KS critical constants sqrt(-log(alpha/2)/2).
inline constexpr double kKsCritical1pct = 1.63;
inline constexpr double kKsCritical01pct = 1.95;

KsResult ks_one_sample(const std::vector<double>& values,
                       const std::function<double(double)>& cdf);

KsResult ks_two_sample(const std::vector<double>& a, const std::vector<double>& b);

// Mean of x_i^s with its standard error (sample std / sqrt(n)).
struct MomentEstimate {
    double estimate;
    double std_err;
};

MomentEstimate empirical_mellin(const std::vector<double>& values, double s);

// Adaptive quadrature of f over [a, b] (Gauss-Kronrod). err_estimate <= eps
// on success; throws cap_exceeded when the subdivision limit is hit first.
bounded<double> adaptive_quadrature(const std::function<double(double)>& f,
                                    double a, double b, double eps);

} // namespace qperp
