#include "qperp/scaling.hpp"

#include <cmath>
#include <ostream>
#include <utility>

#include "qperp/qgamma.hpp"
#include "qperp/stats.hpp"

namespace qperp {

complex_t psi_q(const QParams& params, complex_t s) {
    const double q = params.q();
    const double one_minus_q = 1.0 - q;
    const complex_t up = 1.0 - std::pow(complex_t(q, 0.0), -0.5 * s);
    const complex_t down = 1.0 - std::pow(complex_t(q, 0.0), params.mu() + 0.5 * s);
    return -2.0 * up * down / (one_minus_q * one_minus_q);
}

WaldMoments wald_moments(const QParams& params, double t) {
    if (!(t > 0.0)) throw std::domain_error("wald_moments: t must be > 0");
    const double q = params.q();
    const double lq = std::log(q);
    const double denom = (1.0 - q) * (1.0 - q);
    const double mean = -(1.0 - params.z()) * lq * t / denom;
    const double variance = 0.5 * lq * lq * (1.0 + params.z()) * t / denom;
    return {mean, variance};
}

RescaledPath rescale(SkeletonPath base, double q) {
    if (!(q > 0.0 && q < 1.0)) throw std::domain_error("rescale: q must lie in (0,1)");
    const double space = -0.5 * std::log(q);
    const double time = 2.0 / ((1.0 - q) * (1.0 - q));
    return {std::move(base), q, space, time};
}

double rescaled_exp_functional(const RescaledPath& path) {
    // Kahan-compensated, mirroring exp_functional_of_path but in the
    // rescaled coordinates: tau = t / time_scale, W = space_scale * level.
    double sum = 0.0;
    double comp = 0.0;
    auto add = [&](double x) {
        const double y = x - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    };
    double t_prev = 0.0;
    int level = 0;
    const auto& base = path.base;
    for (std::size_t i = 0; i < base.jump_times.size(); ++i) {
        const double dtau = (base.jump_times[i] - t_prev) / path.time_scale;
        add(2.0 * std::exp(-2.0 * path.space_scale * static_cast<double>(level)) * dtau);
        t_prev = base.jump_times[i];
        level = base.levels[i];
    }
    const double dtau = (base.horizon - t_prev) / path.time_scale;
    add(2.0 * std::exp(-2.0 * path.space_scale * static_cast<double>(level)) * dtau);
    return sum;
}

TrajectoryPair trajectory_identity_pair(const QParams& params, double horizon_rescaled,
                                        RngState& rng) {
    if (!(horizon_rescaled > 0.0)) {
        throw std::domain_error("trajectory_identity_pair: horizon must be > 0");
    }
    const double q = params.q();
    const double time_scale = 2.0 / ((1.0 - q) * (1.0 - q));
    SkeletonPath base = simulate_zeta(params, horizon_rescaled * time_scale, rng);
    const double lhs = (1.0 - q) * (1.0 - q) * exp_functional_of_path(base, q);
    const double rhs = rescaled_exp_functional(rescale(std::move(base), q));
    return {lhs, rhs};
}

double trajectory_identity_check(const QParams& params, double horizon_rescaled, RngState& rng) {
    const TrajectoryPair pair = trajectory_identity_pair(params, horizon_rescaled, rng);
    return std::abs(pair.lhs - pair.rhs);
}

std::vector<LimitRow> dufresne_limit_study(double mu, const std::vector<double>& q_grid,
                                           std::size_t n, std::uint64_t seed) {
    if (q_grid.empty()) throw std::invalid_argument("dufresne_limit_study: q grid must be non-empty");
    for (std::size_t i = 0; i < q_grid.size(); ++i) {
        if (!(q_grid[i] > 0.0 && q_grid[i] < 1.0)) {
            throw std::domain_error("dufresne_limit_study: grid values must lie in (0,1)");
        }
        if (i > 0 && !(q_grid[i] > q_grid[i - 1])) {
            throw std::invalid_argument("dufresne_limit_study: grid must be strictly increasing");
        }
    }
    if (n < 10000) throw std::invalid_argument("dufresne_limit_study: n must be >= 10000");
    const InverseGammaReference reference(mu);
    std::vector<LimitRow> rows;
    rows.reserve(q_grid.size());
    for (std::size_t i = 0; i < q_grid.size(); ++i) {
        const double q = q_grid[i];
        const QParams params(q, mu);
        const std::uint64_t batch_seed = RngState(seed).derive(1000 + i).seed();
        SampleBatch batch = sample_batch(SamplerId::factorization, params, n, batch_seed);
        const double scale = (1.0 - q) * (1.0 - q);
        for (double& v : batch.values) v *= scale;
        const KsResult ks = ks_one_sample(batch.values, [&](double x) { return reference.cdf(x); });
        rows.push_back({q, n, ks.statistic, ks.critical_1pct});
    }
    return rows;
}

void write_limit_csv(const std::vector<LimitRow>& rows, std::ostream& out) {
    out << "q,n,ks_distance,ks_critical_1pct\n";
    for (const auto& row : rows) {
        out << to_decimal_string(row.q) << ',' << row.n << ',' << to_decimal_string(row.ks_distance)
            << ',' << to_decimal_string(row.ks_critical_1pct) << '\n';
    }
}

} // namespace qperp
