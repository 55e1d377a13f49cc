#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>

namespace qperp {

using complex_t = std::complex<double>;

// Thrown when a truncated series or product cannot meet its tolerance
// within the term cap.
class cap_exceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Truncation control for the infinite products and series below.
// eps_abs is the absolute error target; max_terms the hard cap.
struct SeriesTolerance {
    double eps_abs;
    std::size_t max_terms;

    explicit SeriesTolerance(double eps = 1e-12, std::size_t cap = 10000)
        : eps_abs(eps), max_terms(cap) {
        if (!(eps > 0.0)) throw std::invalid_argument("SeriesTolerance: eps_abs must be > 0");
        if (cap < 1) throw std::invalid_argument("SeriesTolerance: max_terms must be >= 1");
    }
};

// Model parameters q in (0,1), mu > 0, with z = q^mu cached.
class QParams {
public:
    QParams(double q, double mu) : q_(q), mu_(mu) {
        if (!(q > 0.0 && q < 1.0)) throw std::domain_error("QParams: q must lie in (0,1)");
        if (!(mu > 0.0)) throw std::domain_error("QParams: mu must be > 0");
        z_ = std::pow(q, mu);
    }

    double q() const { return q_; }
    double mu() const { return mu_; }
    double z() const { return z_; }

private:
    double q_;
    double mu_;
    double z_;
};

// Value together with a rigorous absolute bound on its truncation error.
template <class T>
struct bounded {
    T value;
    double err_bound;
};

// Finite q-Pochhammer symbol (a;q)_n = prod_{j=0}^{n-1} (1 - a q^j).
// Exactly n factors; (a;q)_0 = 1.
complex_t qpochhammer_finite(complex_t a, double q, unsigned n);
double qpochhammer_finite(double a, double q, unsigned n);

// Infinite q-Pochhammer symbol (a;q)_inf with a rigorous truncation bound.
// Converges for any a since |a| q^j -> 0; throws cap_exceeded if the bound
// cannot be driven below tol.eps_abs within tol.max_terms factors.
bounded<complex_t> qpochhammer_inf(complex_t a, double q, const SeriesTolerance& tol = SeriesTolerance());
bounded<double> qpochhammer_inf(double a, double q, const SeriesTolerance& tol = SeriesTolerance());

// Relative-error variant of the above: truncation bound err <= eps_rel * |value|.
bounded<complex_t> qpochhammer_inf_rel(complex_t a, double q, double eps_rel,
                                       std::size_t max_terms = 10000);

// log (a;q)_inf for real a in [0,1); the returned err_bound caps the
// log-scale truncation error, i.e. the relative error of exp(value).
bounded<double> log_qpochhammer_inf(double a, double q, double eps_log,
                                    std::size_t max_terms = 10000);

// q-gamma function (1-q)^(1-x) (q;q)_inf / (q^x;q)_inf for x > 0.
// Evaluated in log space; tol.eps_abs bounds the log-scale truncation
// error, i.e. the relative error of the result.
double q_gamma(double x, double q, const SeriesTolerance& tol = SeriesTolerance());

// q-exponential E_q(t) = (-t(1-q); q)_inf, so that E_q(-t) = (t(1-q); q)_inf.
bounded<complex_t> q_exponential(complex_t t, double q, const SeriesTolerance& tol = SeriesTolerance());

// Jackson q-integral of f over [0,u]: (1-q) sum_{n>=0} q^n u f(q^n u).
// f_bound must dominate |f| on (0, q^N u] for the truncation tail bound
// u * f_bound * q^(N+1) to be valid.
double q_integral(const std::function<double(double)>& f, double u, double q,
                  double f_bound, const SeriesTolerance& tol = SeriesTolerance());

// Gamma function on the complex plane (Lanczos approximation, reflection
// for Re(s) < 1/2). Relative error below 1e-12 on |Re(s)| <= 30,
// |Im(s)| <= 30. Throws std::domain_error at non-positive integers.
complex_t gamma_classical(complex_t s);
double gamma_classical(double s);

} // namespace qperp
