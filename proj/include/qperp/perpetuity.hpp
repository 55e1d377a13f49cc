#pragma once

#include <exception>
#include <mutex>
#include <vector>

#include "qperp/qcalc.hpp"

namespace qperp {

// Levy-Khintchine exponent of -log(q) * zeta:
//   psi(s) = (q^{-s} - 1) + z (q^s - 1) = (q^{-s} - 1)(1 - z q^s).
complex_t levy_exponent(const QParams& params, complex_t s);

// Wiener-Hopf factors phi_+(s) = q^{-s} - 1 and phi_-(s) = z q^{-s} - 1,
// satisfying psi(s) = -phi_+(s) phi_-(-s).
struct WienerHopfFactors {
    complex_t plus;
    complex_t minus;
};
WienerHopfFactors wiener_hopf_factors(const QParams& params, complex_t s);

// The analytic law of the perpetuity I = int_0^inf q^zeta_s ds: Mellin
// transform (two closed forms), density and CDF via the collapsed double
// exponential series with rigorous truncation bounds.
class PerpetuityLaw {
public:
    explicit PerpetuityLaw(const QParams& params, const SeriesTolerance& tol = SeriesTolerance());

    const QParams& params() const { return params_; }
    const SeriesTolerance& tolerance() const { return tol_; }

    enum class MellinForm { pochhammer, qgamma };

    // E[I^s] for Re(s) < mu. The Pochhammer form
    //   Gamma(1+s) (q^{1+s};q)_inf/(q;q)_inf * (z;q)_inf/(z q^{-s};q)_inf
    // is the general evaluator; the qgamma form
    //   (1-q)^{-2s} Gamma(1+s)/Gamma_q(1+s) * Gamma_q(mu-s)/Gamma_q(mu)
    // is available for real s only. The transform has removable
    // singularities at negative integers; those are evaluated by their
    // analytic limit when s is exactly a negative integer, while
    // 0 < |s + k| < 1e-8 raises a domain error (ill-conditioned zone).
    complex_t mellin(complex_t s, MellinForm form = MellinForm::pochhammer) const;

    // Relative residual of E[I^{-r}] = r / ((q^{-r}-1)(1-q^{mu+r})) * E[I^{-(r+1)}],
    // for Re(r) > 0.
    double mellin_recurrence_residual(complex_t r) const;

    // Density i_{q,z}(x) for x > 0. Below x_floor the inner alternating
    // series cancels catastrophically (the true density vanishes at 0), so
    // 0 is returned with the sup-density bound as error.
    bounded<double> density(double x) const;
    static constexpr double x_floor = 1e-8;

    // CDF by termwise integration of the density series; clamped to [0,1].
    bounded<double> cdf(double y) const;

    double sup_density_bound() const { return mixture().sup_density; }

    // Upper bound on P(I > x0), from termwise integration with absolute
    // values; used to pick quadrature cutoffs.
    double tail_mass_bound(double x0) const;

    // Upper bound on int_{x0}^inf x^s |density series| dx for -1 < s < mu,
    // including the truncated block remainder; used to pick the cutoff for
    // numeric Mellin checks.
    double tail_weighted_moment_bound(double s, double x0) const;

private:
    QParams params_;
    SeriesTolerance tol_;
    double qq_inf_; // (q;q)_inf
    double zq_inf_; // (z;q)_inf

    // density(x) = sum_k weight[k] exp(-x rate[k]), rate[k] = q^d.
    // Built lazily: the absolute-value truncation bounds degenerate as
    // q -> 1, so Mellin-only use of the law must not pay for (or fail on)
    // the series build.
    struct Mixture {
        std::vector<double> weight;
        std::vector<double> rate;
        // retained coefficients, kept for the weighted tail bounds
        std::vector<double> outer_t; // (qz)^m/(q;q)_m
        std::vector<double> inner_u; // (-1)^n q^{n(n-1)/2}/(q;q)_n
        double prefactor = 0.0;      // (z;q)_inf/(q;q)_inf
        double density_trunc_err = 0.0;
        double cdf_trunc_err = 0.0;
        double sup_density = 0.0;
    };
    mutable std::once_flag mix_once_;
    mutable Mixture mix_;
    mutable std::exception_ptr mix_error_;

    const Mixture& mixture() const;
    void build_mixture() const;
    // Gamma(1+s) * (q^{1+s};q)_inf with the analytic limit at negative integers.
    complex_t gamma_qpoch(complex_t s) const;
};

} // namespace qperp
