#include "qperp/qgamma.hpp"

#include <cmath>
#include <limits>

#include <boost/math/special_functions/gamma.hpp>

namespace qperp {

namespace {

constexpr unsigned kWalkCap = 100000;

// Geometric on {0,1,2,...} with P(G=k) = (1-p) p^k via inverse transform.
unsigned sample_geometric(double p, RngState& rng) {
    if (p <= 0.0) return 0;
    const double u = rng.next_unit();
    return static_cast<unsigned>(std::floor(std::log(u) / std::log(p)));
}

} // namespace

QGammaLaw::QGammaLaw(double a, double q, const SeriesTolerance& tol)
    : a_(a), q_(q), tol_(tol) {
    if (!(q > 0.0 && q < 1.0)) throw std::domain_error("QGammaLaw: q must lie in (0,1)");
    if (!(a >= 0.0 && a < 1.0)) throw std::domain_error("QGammaLaw: a must lie in [0,1)");
    kappa_ = (a > 0.0) ? std::log(a) / std::log(q) : std::numeric_limits<double>::infinity();
    // Stop probabilities in the samplers carry this value; keep it tight.
    apoch_inf_ = qpochhammer_inf(a, q, SeriesTolerance(1e-14, tol.max_terms)).value;
}

double QGammaLaw::support_point(unsigned n) const {
    return std::pow(q_, static_cast<double>(n)) / (1.0 - q_);
}

double QGammaLaw::pmf(unsigned n) const {
    return apoch_inf_ * std::pow(a_, static_cast<double>(n)) / qpochhammer_finite(q_, q_, n);
}

complex_t QGammaLaw::mellin(complex_t s) const {
    if (a_ == 0.0) return std::pow(complex_t(1.0 - q_, 0.0), -s);
    if (!(a_ * std::pow(q_, s.real()) < 1.0)) {
        throw std::domain_error("QGammaLaw::mellin: a q^Re(s) must be < 1");
    }
    const complex_t aqs = a_ * std::pow(complex_t(q_, 0.0), s);
    const complex_t value =
        std::pow(complex_t(1.0 - q_, 0.0), -s) * apoch_inf_ / qpochhammer_inf(aqs, q_, tol_).value;
    if (s.imag() == 0.0) {
        const double via_qgamma = q_gamma(s.real() + kappa_, q_, tol_) / q_gamma(kappa_, q_, tol_);
        if (std::abs(value.real() - via_qgamma) > 1e-10 * std::abs(via_qgamma)) {
            throw std::runtime_error("QGammaLaw::mellin: closed forms disagree beyond 1e-10");
        }
    }
    return value;
}

unsigned QGammaLaw::sample_exponent_invcdf(RngState& rng) const {
    const double u = rng.next_unit();
    double cum = 0.0;
    double p = apoch_inf_; // pmf(n), advanced by p *= a/(1-q^{n+1})
    double qn = q_;
    for (unsigned n = 0; n < kWalkCap; ++n) {
        cum += p;
        if (u <= cum) return n;
        p *= a_ / (1.0 - qn);
        qn *= q_;
    }
    return kWalkCap;
}

unsigned QGammaLaw::sample_exponent_geomsum(RngState& rng) const {
    // Exact sequential sampling of S = sum_n G_{a q^n}. At stage n, with the
    // remaining sum S_n either unconditioned or known positive:
    //   - unconditioned: stop with probability (a q^n;q)_inf = P(S_n = 0);
    //     otherwise continue knowing S_n > 0.
    //   - given S_n > 0: G_n >= 1 with probability a q^n / P(S_n > 0), in
    //     which case G_n - 1 is an unconditioned geometric and the remainder
    //     is unconditioned; else G_n = 0 and S_{n+1} > 0 is inherited.
    // c tracks P(S_n > 0) via c_{n+1} = (c_n - p_n) / (1 - p_n).
    unsigned total = 0;
    double p = a_;                 // a q^n
    double c = 1.0 - apoch_inf_;   // 1 - (a q^n;q)_inf
    bool conditioned = false;
    for (unsigned n = 0; n < kWalkCap; ++n) {
        if (!conditioned) {
            if (rng.next_unit() > c) return total;
            conditioned = true;
        }
        if (rng.next_unit() <= p / c) {
            total += 1 + sample_geometric(p, rng);
            conditioned = false;
        }
        c = (c - p) / (1.0 - p);
        p *= q_;
    }
    return total;
}

double QGammaLaw::sample_invcdf(RngState& rng) const {
    return support_point(sample_exponent_invcdf(rng));
}

double QGammaLaw::sample_geomsum(RngState& rng) const {
    return support_point(sample_exponent_geomsum(rng));
}

double sample_gamma(double shape, RngState& rng) {
    if (!(shape > 0.0)) throw std::domain_error("sample_gamma: shape must be > 0");
    if (shape < 1.0) {
        const double u = rng.next_unit();
        return sample_gamma(shape + 1.0, rng) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x;
        double v;
        do {
            x = rng.next_normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.next_unit();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

InverseGammaReference::InverseGammaReference(double mu) : mu_(mu) {
    if (!(mu > 0.0)) throw std::domain_error("InverseGammaReference: mu must be > 0");
    log_gamma_mu_ = std::lgamma(mu);
}

double InverseGammaReference::pdf(double x) const {
    if (x <= 0.0) return 0.0;
    return std::exp(-(mu_ + 1.0) * std::log(x) - 1.0 / x - log_gamma_mu_);
}

double InverseGammaReference::cdf(double x) const {
    if (x <= 0.0) return 0.0;
    // P(1/gamma_mu <= x) = P(gamma_mu >= 1/x)
    return boost::math::gamma_q(mu_, 1.0 / x);
}

double InverseGammaReference::sample(RngState& rng) const {
    return 1.0 / sample_gamma(mu_, rng);
}

double InverseGammaReference::mean() const {
    if (!(mu_ > 1.0)) throw std::domain_error("InverseGammaReference::mean: requires mu > 1");
    return 1.0 / (mu_ - 1.0);
}

} // namespace qperp
