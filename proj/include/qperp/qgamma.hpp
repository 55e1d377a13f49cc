#pragma once

#include "qperp/qcalc.hpp"
#include "qperp/rng.hpp"

namespace qperp {

// The q-gamma distribution R_a^(q): a discrete law supported on the points
// x_n = (1-q)^{-1} q^n with pmf (a;q)_inf a^n / (q;q)_n. For a = q^kappa it
// is the q-deformation of the gamma(kappa) law; a = 0 degenerates to the
// point mass at (1-q)^{-1}.
class QGammaLaw {
public:
    QGammaLaw(double a, double q, const SeriesTolerance& tol = SeriesTolerance());

    double a() const { return a_; }
    double q() const { return q_; }
    // kappa = log a / log q; +infinity when a = 0.
    double kappa() const { return kappa_; }

    double support_point(unsigned n) const;
    double pmf(unsigned n) const;

    // Mellin transform (1-q)^{-s} (a;q)_inf / (a q^s;q)_inf, valid where
    // a q^Re(s) < 1. For real s the equivalent Gamma_q(s+kappa)/Gamma_q(kappa)
    // form is evaluated as well and the two are required to agree to 1e-10
    // relative.
    complex_t mellin(complex_t s) const;

    // Exact draws. Both return a support point x_n; the *_exponent variants
    // return the integer n itself.
    double sample_invcdf(RngState& rng) const;
    double sample_geomsum(RngState& rng) const;
    unsigned sample_exponent_invcdf(RngState& rng) const;
    unsigned sample_exponent_geomsum(RngState& rng) const;

private:
    double a_;
    double q_;
    double kappa_;
    double apoch_inf_; // (a;q)_inf, also pmf(0)
    SeriesTolerance tol_;
};

// Exact gamma(shape, 1) draw (Marsaglia-Tsang squeeze for shape >= 1,
// boosted by U^(1/shape) below 1).
double sample_gamma(double shape, RngState& rng);

// The law of 1/gamma_mu: density x^{-mu-1} e^{-1/x} / Gamma(mu) on x > 0.
// Reference distribution for the q -> 1 limit of (1-q)^2 I^(q,q^mu).
class InverseGammaReference {
public:
    explicit InverseGammaReference(double mu);

    double mu() const { return mu_; }
    double pdf(double x) const;
    double cdf(double x) const;
    double sample(RngState& rng) const;
    double mean() const; // 1/(mu-1), requires mu > 1
    double mode() const { return 1.0 / (mu_ + 1.0); }

private:
    double mu_;
    double log_gamma_mu_;
};

} // namespace qperp
