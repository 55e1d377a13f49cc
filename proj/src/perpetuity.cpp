#include "qperp/perpetuity.hpp"

#include <cmath>
#include <limits>

#include <boost/math/special_functions/gamma.hpp>

namespace qperp {

namespace {

constexpr double kPoleGuard = 1e-8;
constexpr double kPoleSnap = 1e-12;
constexpr double kProductRelEps = 1e-13;

// k >= 1 when s sits exactly on the negative integer -k; 0 otherwise.
// Throws inside the ill-conditioned annulus around a pole of Gamma(1+s).
unsigned negative_integer_of(complex_t s) {
    if (s.real() > -0.5) return 0;
    const double k = std::round(-s.real());
    const double dist = std::abs(s - complex_t(-k, 0.0));
    if (dist <= kPoleSnap) return static_cast<unsigned>(k);
    if (dist < kPoleGuard) {
        throw std::domain_error("mellin: s within 1e-8 of a negative integer (pole of Gamma(1+s))");
    }
    return 0;
}

} // namespace

complex_t levy_exponent(const QParams& params, complex_t s) {
    const complex_t qs = std::pow(complex_t(params.q(), 0.0), s);
    return (1.0 / qs - 1.0) + params.z() * (qs - 1.0);
}

WienerHopfFactors wiener_hopf_factors(const QParams& params, complex_t s) {
    const complex_t qms = std::pow(complex_t(params.q(), 0.0), -s);
    return {qms - 1.0, params.z() * qms - 1.0};
}

PerpetuityLaw::PerpetuityLaw(const QParams& params, const SeriesTolerance& tol)
    : params_(params), tol_(tol) {
    const double q = params_.q();
    const double z = params_.z();
    qq_inf_ = std::exp(log_qpochhammer_inf(q, q, 1e-14, tol.max_terms).value);
    zq_inf_ = std::exp(log_qpochhammer_inf(z, q, 1e-14, tol.max_terms).value);
}

const PerpetuityLaw::Mixture& PerpetuityLaw::mixture() const {
    std::call_once(mix_once_, [this] {
        try {
            build_mixture();
        } catch (...) {
            mix_error_ = std::current_exception();
        }
    });
    if (mix_error_) std::rethrow_exception(mix_error_);
    return mix_;
}

complex_t PerpetuityLaw::gamma_qpoch(complex_t s) const {
    const double q = params_.q();
    const unsigned k = negative_integer_of(s);
    if (k == 0) {
        const complex_t a = std::pow(complex_t(q, 0.0), 1.0 + s);
        return gamma_classical(1.0 + s) * qpochhammer_inf_rel(a, q, kProductRelEps, tol_.max_terms).value;
    }
    // lim_{s -> -k} Gamma(1+s) (q^{1+s};q)_inf: the simple pole of Gamma at
    // 1+s = -(k-1) cancels against the vanishing factor 1 - q^{s+k}.
    double limit = -std::log(q) * qq_inf_;
    for (unsigned l = 1; l < k; ++l) {
        limit *= -(1.0 - std::pow(q, -static_cast<double>(l)));
        limit /= static_cast<double>(l);
    }
    return complex_t(limit, 0.0);
}

complex_t PerpetuityLaw::mellin(complex_t s, MellinForm form) const {
    const double q = params_.q();
    const double z = params_.z();
    const double mu = params_.mu();
    if (!(s.real() < mu)) {
        throw std::domain_error("mellin: requires Re(s) < mu (analyticity strip)");
    }
    const unsigned k = negative_integer_of(s);
    if (form == MellinForm::pochhammer) {
        const complex_t zqs = z * std::pow(complex_t(q, 0.0), -s);
        return gamma_qpoch(s) / qq_inf_ * zq_inf_ /
               qpochhammer_inf_rel(zqs, q, kProductRelEps, tol_.max_terms).value;
    }
    if (s.imag() != 0.0) {
        throw std::domain_error("mellin: qgamma form requires real s (mu - s must be real)");
    }
    const double sr = s.real();
    const double gq_ratio = q_gamma(mu - sr, q, tol_) / q_gamma(mu, q, tol_);
    double gamma_over_gq; // Gamma(1+s) / Gamma_q(1+s)
    if (k > 0) {
        gamma_over_gq = gamma_qpoch(s).real() * std::pow(1.0 - q, sr) / qq_inf_;
    } else if (sr > -1.0) {
        gamma_over_gq = gamma_classical(1.0 + sr) / q_gamma(1.0 + sr, q, tol_);
    } else {
        const double poch = qpochhammer_inf_rel(complex_t(std::pow(q, 1.0 + sr), 0.0), q,
                                                kProductRelEps, tol_.max_terms)
                                .value.real();
        gamma_over_gq = gamma_classical(1.0 + sr) * poch * std::pow(1.0 - q, sr) / qq_inf_;
    }
    return complex_t(std::pow(1.0 - q, -2.0 * sr) * gamma_over_gq * gq_ratio, 0.0);
}

double PerpetuityLaw::mellin_recurrence_residual(complex_t r) const {
    if (!(r.real() > 0.0)) {
        throw std::domain_error("mellin_recurrence_residual: requires Re(r) > 0");
    }
    const double q = params_.q();
    const double mu = params_.mu();
    const complex_t lhs = mellin(-r);
    const complex_t rhs = mellin(-(r + 1.0));
    const complex_t factor =
        r / ((std::pow(complex_t(q, 0.0), -r) - 1.0) * (1.0 - std::pow(complex_t(q, 0.0), mu + r)));
    return std::abs(lhs - factor * rhs) / std::abs(lhs);
}

void PerpetuityLaw::build_mixture() const {
    const double q = params_.q();
    const double z = params_.z();
    const double eps = tol_.eps_abs;
    const double prefactor = zq_inf_ / qq_inf_;

    // Inner coefficients u_n = (-1)^n q^{n(n-1)/2} / (q;q)_n, ratio
    // u_{n+1}/u_n = -q^n/(1-q^{n+1}); outer t_m = (qz)^m/(q;q)_m, ratio
    // qz/(1-q^{m+1}).
    std::vector<double> u{1.0};
    double abs_u_sum = 1.0;        // sum |u_n|
    double abs_uq_sum = 1.0;       // sum |u_n| q^n
    {
        double qn = 1.0;  // q^n
        double qn1 = q;   // q^{n+1}
        for (std::size_t n = 0;; ++n) {
            const double ratio = qn / (1.0 - qn1);
            const double next = u.back() * (-ratio);
            qn = qn1;
            qn1 *= q;
            // stop once the remaining tail is negligible at working precision
            const double rho = qn / (1.0 - qn1);
            if (rho < 1.0 && std::abs(next) / (1.0 - rho) < 1e-18 * abs_u_sum) break;
            u.push_back(next);
            abs_u_sum += std::abs(next);
            abs_uq_sum += std::abs(next) * qn;
            if (u.size() > 4000) throw cap_exceeded("density series: inner coefficients did not converge");
        }
    }

    std::vector<double> t{1.0};
    double t_sum = 1.0;   // sum t_m
    double tz_sum = 1.0;  // sum t_m q^{-m}
    if (z > 0.0) {
        double qm1 = q;    // q^{m+1}
        double qinv = 1.0; // q^{-m}
        for (std::size_t m = 0;; ++m) {
            const double next = t.back() * (q * z) / (1.0 - qm1);
            qm1 *= q;
            qinv /= q;
            const double tz_ratio = z / (1.0 - qm1);
            if (!(tz_ratio < 1.0)) {
                t.push_back(next);
                t_sum += next;
                tz_sum += next * qinv;
                if (t.size() > tol_.max_terms) {
                    throw cap_exceeded("density series: outer coefficients did not converge");
                }
                continue;
            }
            if (next * qinv / (1.0 - tz_ratio) < 1e-18 * tz_sum) break;
            t.push_back(next);
            t_sum += next;
            tz_sum += next * qinv;
            if (t.size() > tol_.max_terms) {
                throw cap_exceeded("density series: outer coefficients did not converge");
            }
        }
    }

    const std::size_t m_count = t.size();
    const std::size_t n_count = u.size();

    // Truncation error of the retained [0,M]x[0,N] block, uniform in x/y.
    auto geo_tail_u = [&](std::size_t last) {
        // sum_{n > last} |u_n|
        const double qn = std::pow(q, static_cast<double>(last));
        const double first = std::abs(u[last]) * qn / (1.0 - qn * q);
        const double ratio = qn * q / (1.0 - qn * q * q);
        return (ratio < 1.0) ? first / (1.0 - ratio) : std::numeric_limits<double>::infinity();
    };
    auto geo_tail_uq = [&](std::size_t last) {
        // sum_{n > last} |u_n| q^n
        const double qn = std::pow(q, static_cast<double>(last));
        const double first = std::abs(u[last]) * qn * (qn * q) / (1.0 - qn * q);
        const double ratio = qn * q * q / (1.0 - qn * q * q);
        return (ratio < 1.0) ? first / (1.0 - ratio) : std::numeric_limits<double>::infinity();
    };
    const double tail_u = geo_tail_u(n_count - 1);
    const double tail_uq = geo_tail_uq(n_count - 1);
    double tail_t = 0.0;
    double tail_tz = 0.0;
    if (z > 0.0) {
        const double qm = std::pow(q, static_cast<double>(m_count));
        const double t_ratio = q * z / (1.0 - qm * q);
        const double tz_ratio = z / (1.0 - qm * q);
        const double t_first = t.back() * q * z / (1.0 - qm);
        tail_t = (t_ratio < 1.0) ? t_first / (1.0 - t_ratio) : std::numeric_limits<double>::infinity();
        tail_tz = (tz_ratio < 1.0)
                      ? t_first * std::pow(q, -static_cast<double>(m_count)) / (1.0 - tz_ratio)
                      : std::numeric_limits<double>::infinity();
    }

    mix_.density_trunc_err = prefactor * (tail_t * abs_u_sum + t_sum * tail_u);
    mix_.cdf_trunc_err = prefactor * (tail_tz * abs_uq_sum + tz_sum * tail_uq);
    if (!(mix_.density_trunc_err <= eps && mix_.cdf_trunc_err <= eps)) {
        throw cap_exceeded("density series: truncation bounds exceed tolerance");
    }

    // Collapse over d = m - n: density(x) = sum_d D_d exp(-x q^d).
    const std::size_t n_rates = m_count + n_count - 1;
    mix_.weight.assign(n_rates, 0.0);
    mix_.rate.resize(n_rates);
    const std::ptrdiff_t offset = static_cast<std::ptrdiff_t>(n_count) - 1;
    for (std::size_t m = 0; m < m_count; ++m) {
        for (std::size_t n = 0; n < n_count; ++n) {
            const std::ptrdiff_t d = static_cast<std::ptrdiff_t>(m) - static_cast<std::ptrdiff_t>(n);
            mix_.weight[static_cast<std::size_t>(d + offset)] += prefactor * t[m] * u[n];
        }
    }
    double abs_weight = 0.0;
    for (std::size_t i = 0; i < n_rates; ++i) {
        const std::ptrdiff_t d = static_cast<std::ptrdiff_t>(i) - offset;
        mix_.rate[i] = std::pow(q, static_cast<double>(d));
        abs_weight += std::abs(mix_.weight[i]);
    }
    mix_.sup_density = abs_weight + mix_.density_trunc_err;
    mix_.outer_t = std::move(t);
    mix_.inner_u = std::move(u);
    mix_.prefactor = prefactor;
}

double PerpetuityLaw::tail_weighted_moment_bound(double s, double x0) const {
    if (!(s > -1.0 && s < params_.mu())) {
        throw std::domain_error("tail_weighted_moment_bound: requires -1 < s < mu");
    }
    if (!(x0 > 0.0)) throw std::domain_error("tail_weighted_moment_bound: requires x0 > 0");
    const Mixture& mix = mixture();
    const double q = params_.q();
    const double z = params_.z();
    // In-block part: sum_d |D_d| lam^{-1-s} Gamma(1+s, lam x0).
    double main = 0.0;
    for (std::size_t i = 0; i < mix.weight.size(); ++i) {
        const double lam = mix.rate[i];
        main += std::abs(mix.weight[i]) * std::pow(lam, -1.0 - s) *
                boost::math::tgamma(1.0 + s, lam * x0);
    }
    // Out-of-block remainder, integrated over all of (0, inf):
    //   C Gamma(1+s) [ (sum_{m>M} t_m q^{-m(1+s)}) (sum_n u^_n)
    //                + (sum_{m<=M} t_m q^{-m(1+s)}) (sum_{n>N} u^_n) ]
    // with u^_n = |u_n| q^{n(1+s)} <= |u_n|.
    const double gamma1s = gamma_classical(1.0 + s);
    const std::size_t m_count = mix.outer_t.size();
    const std::size_t n_count = mix.inner_u.size();
    double t_hat_part = 0.0;
    for (std::size_t m = 0; m < m_count; ++m) {
        t_hat_part += mix.outer_t[m] * std::pow(q, -static_cast<double>(m) * (1.0 + s));
    }
    double u_hat_full = 0.0;
    for (std::size_t n = 0; n < n_count; ++n) {
        u_hat_full += std::abs(mix.inner_u[n]) * std::pow(q, static_cast<double>(n) * (1.0 + s));
    }
    const double qm1 = std::pow(q, static_cast<double>(m_count));
    // first omitted t^_m and the geometric ratio q^{mu-s}/(1-q^{M+2})
    const double t_hat_first = mix.outer_t.back() * (q * z) / (1.0 - qm1) *
                               std::pow(q, -static_cast<double>(m_count) * (1.0 + s));
    const double t_hat_ratio = std::pow(q, params_.mu() - s) / (1.0 - qm1 * q);
    const double t_hat_tail = (z > 0.0 && t_hat_ratio < 1.0)
                                  ? t_hat_first / (1.0 - t_hat_ratio)
                                  : (z > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    // tail of u^ is dominated by the unweighted |u| tail
    const double qn = std::pow(q, static_cast<double>(n_count - 1));
    const double u_first = std::abs(mix.inner_u.back()) * qn / (1.0 - qn * q);
    const double u_ratio = qn * q / (1.0 - qn * q * q);
    const double u_tail =
        (u_ratio < 1.0) ? u_first / (1.0 - u_ratio) : std::numeric_limits<double>::infinity();
    const double remainder =
        mix.prefactor * gamma1s * (t_hat_tail * (u_hat_full + u_tail) + t_hat_part * u_tail);
    return main + remainder;
}

bounded<double> PerpetuityLaw::density(double x) const {
    if (!(x > 0.0)) throw std::domain_error("density: requires x > 0");
    const Mixture& mix = mixture();
    if (x < x_floor) return {0.0, mix.sup_density};
    double sum = 0.0;
    for (std::size_t i = 0; i < mix.weight.size(); ++i) {
        sum += mix.weight[i] * std::exp(-x * mix.rate[i]);
    }
    return {sum, mix.density_trunc_err};
}

bounded<double> PerpetuityLaw::cdf(double y) const {
    if (!(y >= 0.0)) throw std::domain_error("cdf: requires y >= 0");
    const Mixture& mix = mixture();
    if (y == 0.0) return {0.0, 0.0};
    double sum = 0.0;
    for (std::size_t i = 0; i < mix.weight.size(); ++i) {
        sum += mix.weight[i] / mix.rate[i] * (-std::expm1(-y * mix.rate[i]));
    }
    const double clamped = std::min(1.0, std::max(0.0, sum));
    return {clamped, mix.cdf_trunc_err};
}

double PerpetuityLaw::tail_mass_bound(double x0) const {
    if (!(x0 > 0.0)) throw std::domain_error("tail_mass_bound: requires x0 > 0");
    const Mixture& mix = mixture();
    double sum = mix.cdf_trunc_err;
    for (std::size_t i = 0; i < mix.weight.size(); ++i) {
        sum += std::abs(mix.weight[i]) / mix.rate[i] * std::exp(-x0 * mix.rate[i]);
    }
    return sum;
}

} // namespace qperp
