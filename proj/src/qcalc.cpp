#include "qperp/qcalc.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace qperp {

namespace {

void check_q(double q) {
    if (!(q > 0.0 && q < 1.0)) throw std::domain_error("q must lie in (0,1)");
}

// Bound on |log of the truncated tail| of (a;q)_inf when the remaining
// factors start at magnitude t = |a| q^J < 1:
//   sum_{j>=J} |a| q^j / (1 - |a| q^J) = t / ((1-q)(1-t)).
double tail_log_bound(double t, double q) {
    if (!(t < 1.0)) return std::numeric_limits<double>::infinity();
    return t / ((1.0 - q) * (1.0 - t));
}

} // namespace

complex_t qpochhammer_finite(complex_t a, double q, unsigned n) {
    check_q(q);
    complex_t prod = 1.0;
    complex_t aq = a;
    for (unsigned j = 0; j < n; ++j) {
        prod *= (1.0 - aq);
        aq *= q;
    }
    return prod;
}

double qpochhammer_finite(double a, double q, unsigned n) {
    check_q(q);
    double prod = 1.0;
    double aq = a;
    for (unsigned j = 0; j < n; ++j) {
        prod *= (1.0 - aq);
        aq *= q;
    }
    return prod;
}

bounded<double> qpochhammer_inf(double a, double q, const SeriesTolerance& tol) {
    check_q(q);
    if (a < 1.0) {
        // All factors positive: accumulate in log space.
        double sum = 0.0;
        double aq = a;
        for (std::size_t j = 0; j < tol.max_terms; ++j) {
            sum += std::log1p(-aq);
            aq *= q;
            const double logb = tail_log_bound(std::abs(aq), q);
            if (std::isfinite(logb)) {
                const double value = std::exp(sum);
                const double err = value * std::expm1(logb);
                if (err <= tol.eps_abs) return {value, err};
            }
        }
        throw cap_exceeded("qpochhammer_inf: term cap reached before tolerance");
    }
    double prod = 1.0;
    double aq = a;
    for (std::size_t j = 0; j < tol.max_terms; ++j) {
        const double factor = 1.0 - aq;
        if (factor == 0.0) return {0.0, 0.0};
        prod *= factor;
        aq *= q;
        const double logb = tail_log_bound(std::abs(aq), q);
        if (std::isfinite(logb)) {
            const double err = std::abs(prod) * std::expm1(logb);
            if (err <= tol.eps_abs) return {prod, err};
        }
    }
    throw cap_exceeded("qpochhammer_inf: term cap reached before tolerance");
}

bounded<complex_t> qpochhammer_inf(complex_t a, double q, const SeriesTolerance& tol) {
    if (a.imag() == 0.0) {
        auto r = qpochhammer_inf(a.real(), q, tol);
        return {complex_t(r.value, 0.0), r.err_bound};
    }
    check_q(q);
    complex_t prod = 1.0;
    complex_t aq = a;
    for (std::size_t j = 0; j < tol.max_terms; ++j) {
        const complex_t factor = 1.0 - aq;
        if (factor == 0.0) return {complex_t(0.0, 0.0), 0.0};
        prod *= factor;
        aq *= q;
        const double logb = tail_log_bound(std::abs(aq), q);
        if (std::isfinite(logb)) {
            const double err = std::abs(prod) * std::expm1(logb);
            if (err <= tol.eps_abs) return {prod, err};
        }
    }
    throw cap_exceeded("qpochhammer_inf: term cap reached before tolerance");
}

bounded<complex_t> qpochhammer_inf_rel(complex_t a, double q, double eps_rel,
                                       std::size_t max_terms) {
    check_q(q);
    if (a.imag() == 0.0 && a.real() < 1.0) {
        auto lg = log_qpochhammer_inf(std::max(a.real(), 0.0), q, eps_rel, max_terms);
        if (a.real() >= 0.0) {
            const double value = std::exp(lg.value);
            return {complex_t(value, 0.0), value * std::expm1(lg.err_bound)};
        }
        // a < 0: factors exceed 1, still positive; same log-space route.
        double sum = 0.0;
        double aq = a.real();
        for (std::size_t j = 0; j < max_terms; ++j) {
            sum += std::log1p(-aq);
            aq *= q;
            if (tail_log_bound(std::abs(aq), q) <= eps_rel) {
                const double value = std::exp(sum);
                return {complex_t(value, 0.0), value * std::expm1(eps_rel)};
            }
        }
        throw cap_exceeded("qpochhammer_inf_rel: term cap reached before tolerance");
    }
    complex_t prod = 1.0;
    complex_t aq = a;
    for (std::size_t j = 0; j < max_terms; ++j) {
        const complex_t factor = 1.0 - aq;
        if (factor == 0.0) return {complex_t(0.0, 0.0), 0.0};
        prod *= factor;
        aq *= q;
        const double logb = tail_log_bound(std::abs(aq), q);
        if (logb <= eps_rel) {
            return {prod, std::abs(prod) * std::expm1(logb)};
        }
    }
    throw cap_exceeded("qpochhammer_inf_rel: term cap reached before tolerance");
}

bounded<double> log_qpochhammer_inf(double a, double q, double eps_log,
                                    std::size_t max_terms) {
    check_q(q);
    if (!(a >= 0.0 && a < 1.0)) {
        throw std::domain_error("log_qpochhammer_inf: a must lie in [0,1)");
    }
    double sum = 0.0;
    double aq = a;
    for (std::size_t j = 0; j < max_terms; ++j) {
        sum += std::log1p(-aq);
        aq *= q;
        const double logb = tail_log_bound(aq, q);
        if (logb <= eps_log) return {sum, logb};
    }
    throw cap_exceeded("log_qpochhammer_inf: term cap reached before tolerance");
}

double q_gamma(double x, double q, const SeriesTolerance& tol) {
    check_q(q);
    if (!(x > 0.0)) throw std::domain_error("q_gamma: x must be > 0");
    const double log_num = log_qpochhammer_inf(q, q, 0.5 * tol.eps_abs, tol.max_terms).value;
    const double log_den = log_qpochhammer_inf(std::pow(q, x), q, 0.5 * tol.eps_abs, tol.max_terms).value;
    return std::exp((1.0 - x) * std::log(1.0 - q) + log_num - log_den);
}

bounded<complex_t> q_exponential(complex_t t, double q, const SeriesTolerance& tol) {
    check_q(q);
    return qpochhammer_inf(-t * (1.0 - q), q, tol);
}

double q_integral(const std::function<double(double)>& f, double u, double q,
                  double f_bound, const SeriesTolerance& tol) {
    check_q(q);
    if (!(u > 0.0)) throw std::domain_error("q_integral: u must be > 0");
    if (!(f_bound >= 0.0)) throw std::invalid_argument("q_integral: f_bound must be >= 0");
    double sum = 0.0;
    double w = u; // q^n u
    for (std::size_t n = 0; n < tol.max_terms; ++n) {
        sum += w * f(w);
        const double tail = w * q * f_bound;
        if (tail <= tol.eps_abs) return (1.0 - q) * sum;
        w *= q;
    }
    throw cap_exceeded("q_integral: term cap reached before tolerance");
}

namespace {

// Lanczos approximation, g = 607/128, 15 coefficients (Godfrey's set).
constexpr double kLanczosG = 4.7421875;
constexpr double kLanczos[15] = {
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
};

} // namespace

complex_t gamma_classical(complex_t s) {
    using std::numbers::pi;
    if (s.imag() == 0.0) {
        const double re = s.real();
        if (re <= 0.0 && re == std::floor(re)) {
            throw std::domain_error("gamma_classical: pole at non-positive integer");
        }
    }
    if (s.real() < 0.5) {
        return pi / (std::sin(pi * s) * gamma_classical(1.0 - s));
    }
    const complex_t x = s - 1.0;
    complex_t acc = kLanczos[0];
    for (int k = 1; k < 15; ++k) {
        acc += kLanczos[k] / (x + static_cast<double>(k));
    }
    const complex_t t = x + kLanczosG + 0.5;
    return std::sqrt(2.0 * pi) * std::pow(t, x + 0.5) * std::exp(-t) * acc;
}

double gamma_classical(double s) {
    return gamma_classical(complex_t(s, 0.0)).real();
}

} // namespace qperp
