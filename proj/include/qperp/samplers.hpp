#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "qperp/qcalc.hpp"
#include "qperp/qgamma.hpp"
#include "qperp/rng.hpp"

namespace qperp {

// Piecewise-constant trajectory of zeta = P^+ - P^-. The path starts at
// level 0; jump_times[i] is the i-th jump instant and levels[i] the level
// held on [jump_times[i], jump_times[i+1]). Successive levels differ by 1.
struct SkeletonPath {
    std::vector<double> jump_times;
    std::vector<int> levels;
    double horizon = 0.0;
};

// Compound Poisson skeleton: holding times Exp(1+z), up-jump probability
// 1/(1+z) (rates 1 up, z down), truncated at the horizon.
SkeletonPath simulate_zeta(const QParams& params, double horizon, RngState& rng);

// int_0^horizon q^zeta_s ds, exact over the skeleton (Kahan-compensated).
double exp_functional_of_path(const SkeletonPath& path, double q);

// E[I^nu]^(1/nu) with nu = mu/2; the natural scale of the law, used for
// default truncation targets.
double perpetuity_scale(const QParams& params);

// Horizon T solving delta^{-nu} e^{T psi(-nu)} E[I^nu] = eps_tail with
// nu = mu/2, so that P(|I - I_T| >= delta) <= eps_tail.
double path_sampler_horizon(const QParams& params, double delta, double eps_tail);

// Finite-horizon path simulation. A draw is within delta of an exact draw
// except on an event of probability at most eps_tail.
class PathSampler {
public:
    // delta <= 0 selects the default 1e-4 * perpetuity_scale(params).
    PathSampler(const QParams& params, double delta = -1.0, double eps_tail = 1e-4);
    double operator()(RngState& rng) const;
    double horizon() const { return horizon_; }
    double delta() const { return delta_; }
    double eps_tail() const { return eps_tail_; }

private:
    QParams params_;
    double delta_;
    double eps_tail_;
    double horizon_;
};

// Embedded random-walk series, run until the walk first hits level_stop.
// By the strong Markov property the unsimulated remainder equals
// q^level_stop times an independent copy of I.
struct SeriesDraw {
    double value;
    double remainder_scale;
};

class SeriesSampler {
public:
    SeriesSampler(const QParams& params, unsigned level_stop);
    SeriesDraw operator()(RngState& rng) const;
    // Number of walk steps consumed by the last draw is exposed via the
    // step-counting overload for the hitting-time checks.
    SeriesDraw sample(RngState& rng, std::uint64_t* steps_out) const;
    unsigned level_stop() const { return level_stop_; }

private:
    QParams params_;
    unsigned level_stop_;
};

// Wiener-Hopf factorization in law: I = (1-q)^{-1} I^(q) / R_z^(q) with
// independent factors. I^(q) is drawn by the truncated series
// sum_{n<N} q^n eps_n with deterministic tail mean q^N/(1-q) <= eps_series;
// R_z is drawn exactly from the q-gamma law.
class FactorizationSampler {
public:
    FactorizationSampler(const QParams& params, double eps_series = 1e-12);
    double operator()(RngState& rng) const;
    unsigned series_terms() const { return n_terms_; }

private:
    QParams params_;
    double eps_series_;
    unsigned n_terms_;
    QGammaLaw rlaw_;
};

// Spec-named convenience wrappers around the sampler classes.
double sample_perpetuity_path(const QParams& params, double delta, double eps_tail, RngState& rng);
SeriesDraw sample_perpetuity_series(const QParams& params, unsigned level_stop, RngState& rng);
double sample_perpetuity_factorization(const QParams& params, double eps_series, RngState& rng);

enum class SamplerId { path, series, factorization, qgamma };

const char* to_string(SamplerId id);
SamplerId sampler_id_from_string(const std::string& name);

struct SamplerOptions {
    double delta = -1.0;      // path: <=0 selects the default scale-based value
    double eps_tail = 1e-4;   // path
    unsigned level_stop = 0;  // series: 0 selects ceil(log(1e-12)/log(q))
    double eps_series = 1e-12; // factorization
};

// Seeded, reproducible batch of draws. For sampler_id = qgamma, mu is the
// kappa parameter of the law (infinite when a = 0) and z its a parameter.
struct SampleBatch {
    SamplerId sampler_id;
    double q;
    double mu;
    double z;
    std::uint64_t seed;
    std::size_t n;
    double bias_bound;
    std::vector<double> values;
};

// Deterministic given (sampler_id, params, seed, n, options): draws are
// generated in fixed chunks of 65536 with per-chunk derived streams, so the
// result is independent of the number of worker threads.
SampleBatch sample_batch(SamplerId id, const QParams& params, std::size_t n,
                         std::uint64_t seed, const SamplerOptions& options = SamplerOptions());
SampleBatch sample_batch_qgamma(const QGammaLaw& law, std::size_t n, std::uint64_t seed);

// Worker threads for batch generation: QPERP_THREADS when set, otherwise
// the hardware concurrency.
unsigned default_thread_count();

// Shortest round-trip decimal representation, capped at 17 significant digits.
std::string to_decimal_string(double x);

// CSV (RFC-4180-style, header row, LF endings) and JSON (stable key order).
void write_csv(const SampleBatch& batch, std::ostream& out);
void write_json(const SampleBatch& batch, std::ostream& out);

} // namespace qperp
