#include "qperp/stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace qperp {

KsResult ks_one_sample(const std::vector<double>& values,
                       const std::function<double(double)>& cdf) {
    if (values.size() < 10) {
        throw std::invalid_argument("ks_one_sample: need at least 10 values");
    }
    std::vector<double> sorted(values);
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = cdf(sorted[i]);
        const double hi = (static_cast<double>(i) + 1.0) / n - f;
        const double lo = f - static_cast<double>(i) / n;
        d = std::max(d, std::max(hi, lo));
    }
    const double critical = kKsCritical1pct / std::sqrt(n);
    return {d, n, critical, d < critical};
}

KsResult ks_two_sample(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) {
        throw std::invalid_argument("ks_two_sample: inputs must be non-empty");
    }
    std::vector<double> sa(a), sb(b);
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    const double na = static_cast<double>(sa.size());
    const double nb = static_cast<double>(sb.size());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < sa.size() && j < sb.size()) {
        const double x = std::min(sa[i], sb[j]);
        while (i < sa.size() && sa[i] <= x) ++i;
        while (j < sb.size() && sb[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    const double n_eff = na * nb / (na + nb);
    const double critical = kKsCritical1pct * std::sqrt((na + nb) / (na * nb));
    return {d, n_eff, critical, d < critical};
}

MomentEstimate empirical_mellin(const std::vector<double>& values, double s) {
    if (values.empty()) {
        throw std::invalid_argument("empirical_mellin: input must be non-empty");
    }
    const double n = static_cast<double>(values.size());
    double sum = 0.0;
    for (double x : values) sum += std::pow(x, s);
    const double mean = sum / n;
    if (values.size() == 1) return {mean, 0.0};
    double ss = 0.0;
    for (double x : values) {
        const double dev = std::pow(x, s) - mean;
        ss += dev * dev;
    }
    const double sd = std::sqrt(ss / (n - 1.0));
    return {mean, sd / std::sqrt(n)};
}

bounded<double> adaptive_quadrature(const std::function<double(double)>& f,
                                    double a, double b, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("adaptive_quadrature: eps must be > 0");
    double err = 0.0;
    double l1 = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, a, b, /*max_depth=*/15, /*tol=*/eps, &err, &l1);
    if (!(err <= eps * std::max(1.0, l1))) {
        throw cap_exceeded("adaptive_quadrature: subdivision cap reached before tolerance");
    }
    return {value, err};
}

} // namespace qperp
