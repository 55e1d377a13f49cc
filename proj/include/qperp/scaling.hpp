#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "qperp/qcalc.hpp"
#include "qperp/rng.hpp"
#include "qperp/samplers.hpp"

namespace qperp {

// Levy exponent of the rescaled process W^(q,mu):
//   psi_q(s) = -2 (1 - q^{-s/2})(1 - q^{mu+s/2}) / (1-q)^2  ->  s^2/2 + s mu.
complex_t psi_q(const QParams& params, complex_t s);

// Wald moments of W_t^(q,mu):
//   mean = -(1-q^mu) log(q) t / (1-q)^2  -> mu t
//   var  = log^2(q) (1+z) t / (2 (1-q)^2) -> t
struct WaldMoments {
    double mean;
    double variance;
};
WaldMoments wald_moments(const QParams& params, double t);

// W_t = space_scale * zeta_{time_scale * t} with space_scale = -log(q)/2
// and time_scale = 2/(1-q)^2.
struct RescaledPath {
    SkeletonPath base;
    double q;
    double space_scale;
    double time_scale;
};
RescaledPath rescale(SkeletonPath base, double q);

// 2 int_0^{horizon/time_scale} exp(-2 W_s) ds over the rescaled skeleton.
double rescaled_exp_functional(const RescaledPath& path);

// Both sides of the pathwise identity (1-q)^2 I^(q,z) = I(W^(q,mu)),
// evaluated on one simulated trajectory (finite horizon, rescaled time).
struct TrajectoryPair {
    double lhs; // (1-q)^2 * int q^zeta
    double rhs; // 2 * int exp(-2 W)
};
TrajectoryPair trajectory_identity_pair(const QParams& params, double horizon_rescaled,
                                        RngState& rng);

// |lhs - rhs| of the identity above; exact up to rounding, so it must come
// out below 1e-12 relative.
double trajectory_identity_check(const QParams& params, double horizon_rescaled, RngState& rng);

// KS distance of n draws of (1-q)^2 I^(q,q^mu) (factorization sampler)
// against the inverse-gamma(mu) CDF, for each q in the grid.
struct LimitRow {
    double q;
    std::size_t n;
    double ks_distance;
    double ks_critical_1pct;
};
std::vector<LimitRow> dufresne_limit_study(double mu, const std::vector<double>& q_grid,
                                           std::size_t n, std::uint64_t seed);

// CSV columns: q,n,ks_distance,ks_critical_1pct.
void write_limit_csv(const std::vector<LimitRow>& rows, std::ostream& out);

} // namespace qperp
