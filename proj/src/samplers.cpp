#include "qperp/samplers.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <thread>

#include "json.hpp"

#include "qperp/perpetuity.hpp"

namespace qperp {

namespace {

constexpr std::size_t kChunkSize = 65536;

// Kahan-compensated accumulator; the trajectory identity is checked at
// 1e-12 relative, so plain summation over long paths is not good enough.
struct Accumulator {
    double sum = 0.0;
    double comp = 0.0;
    void add(double x) {
        const double y = x - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

} // namespace

SkeletonPath simulate_zeta(const QParams& params, double horizon, RngState& rng) {
    if (!(horizon > 0.0)) throw std::domain_error("simulate_zeta: horizon must be > 0");
    const double z = params.z();
    const double total_rate = 1.0 + z;
    const double p_up = 1.0 / total_rate;
    SkeletonPath path;
    path.horizon = horizon;
    double t = 0.0;
    int level = 0;
    for (;;) {
        t += rng.next_exponential() / total_rate;
        if (t >= horizon) break;
        level += (rng.next_unit() <= p_up) ? 1 : -1;
        path.jump_times.push_back(t);
        path.levels.push_back(level);
    }
    return path;
}

double exp_functional_of_path(const SkeletonPath& path, double q) {
    if (!(q > 0.0 && q < 1.0)) throw std::domain_error("exp_functional_of_path: q must lie in (0,1)");
    Accumulator acc;
    double t_prev = 0.0;
    int level = 0;
    for (std::size_t i = 0; i < path.jump_times.size(); ++i) {
        acc.add(std::pow(q, static_cast<double>(level)) * (path.jump_times[i] - t_prev));
        t_prev = path.jump_times[i];
        level = path.levels[i];
    }
    acc.add(std::pow(q, static_cast<double>(level)) * (path.horizon - t_prev));
    return acc.sum;
}

double perpetuity_scale(const QParams& params) {
    const double nu = 0.5 * params.mu();
    const PerpetuityLaw law(params);
    const double moment = law.mellin(complex_t(nu, 0.0)).real();
    return std::pow(moment, 1.0 / nu);
}

double path_sampler_horizon(const QParams& params, double delta, double eps_tail) {
    if (!(delta > 0.0)) throw std::domain_error("path_sampler_horizon: delta must be > 0");
    if (!(eps_tail > 0.0 && eps_tail < 1.0)) {
        throw std::domain_error("path_sampler_horizon: eps_tail must lie in (0,1)");
    }
    const double nu = 0.5 * params.mu();
    const PerpetuityLaw law(params);
    const double moment = law.mellin(complex_t(nu, 0.0)).real();
    const double rate = -levy_exponent(params, complex_t(-nu, 0.0)).real();
    if (!(rate > 0.0)) {
        throw std::runtime_error("path_sampler_horizon: decay rate is not positive");
    }
    const double t = (std::log(moment) + nu * std::log(1.0 / delta) + std::log(1.0 / eps_tail)) / rate;
    return std::max(t, 1.0);
}

PathSampler::PathSampler(const QParams& params, double delta, double eps_tail)
    : params_(params), eps_tail_(eps_tail) {
    delta_ = (delta > 0.0) ? delta : 1e-4 * perpetuity_scale(params);
    horizon_ = path_sampler_horizon(params, delta_, eps_tail_);
}

double PathSampler::operator()(RngState& rng) const {
    const double q = params_.q();
    const double z = params_.z();
    const double total_rate = 1.0 + z;
    const double p_up = 1.0 / total_rate;
    Accumulator acc;
    double t = 0.0;
    int level = 0;
    double qlevel = 1.0;
    unsigned steps = 0;
    for (;;) {
        const double dt = rng.next_exponential() / total_rate;
        if (t + dt >= horizon_) {
            acc.add(qlevel * (horizon_ - t));
            break;
        }
        acc.add(qlevel * dt);
        t += dt;
        if (rng.next_unit() <= p_up) {
            ++level;
            qlevel *= q;
        } else {
            --level;
            qlevel /= q;
        }
        // periodic resync kills multiplicative rounding drift on long paths
        if ((++steps & 0xFFFu) == 0) qlevel = std::pow(q, static_cast<double>(level));
    }
    return acc.sum;
}

SeriesSampler::SeriesSampler(const QParams& params, unsigned level_stop)
    : params_(params), level_stop_(level_stop) {
    if (level_stop_ < 1) throw std::domain_error("SeriesSampler: level_stop must be >= 1");
}

SeriesDraw SeriesSampler::sample(RngState& rng, std::uint64_t* steps_out) const {
    const double q = params_.q();
    const double z = params_.z();
    const double p_up = 1.0 / (1.0 + z);
    const double weight = 1.0 / (1.0 + z);
    Accumulator acc;
    int level = 0;
    double qlevel = 1.0;
    std::uint64_t steps = 0;
    const int stop = static_cast<int>(level_stop_);
    while (level < stop) {
        acc.add(weight * qlevel * rng.next_exponential());
        if (rng.next_unit() <= p_up) {
            ++level;
            qlevel *= q;
        } else {
            --level;
            qlevel /= q;
        }
        if ((++steps & 0xFFFu) == 0) qlevel = std::pow(q, static_cast<double>(level));
    }
    if (steps_out != nullptr) *steps_out = steps;
    return {acc.sum, std::pow(q, static_cast<double>(level_stop_))};
}

SeriesDraw SeriesSampler::operator()(RngState& rng) const {
    return sample(rng, nullptr);
}

FactorizationSampler::FactorizationSampler(const QParams& params, double eps_series)
    : params_(params), eps_series_(eps_series), rlaw_(params.z(), params.q()) {
    if (!(eps_series > 0.0)) throw std::domain_error("FactorizationSampler: eps_series must be > 0");
    const double q = params.q();
    const double n_real = std::ceil(std::log(eps_series * (1.0 - q)) / std::log(q));
    n_terms_ = static_cast<unsigned>(std::max(1.0, n_real));
}

double FactorizationSampler::operator()(RngState& rng) const {
    const double q = params_.q();
    // I^(q) = sum_{n<N} q^n eps_n
    double sum = 0.0;
    double qn = 1.0;
    for (unsigned n = 0; n < n_terms_; ++n) {
        sum += qn * rng.next_exponential();
        qn *= q;
    }
    // (1-q)^{-1} I^(q) / R  with  R = (1-q)^{-1} q^S
    const unsigned s = rlaw_.sample_exponent_invcdf(rng);
    return sum * std::pow(q, -static_cast<double>(s));
}

double sample_perpetuity_path(const QParams& params, double delta, double eps_tail, RngState& rng) {
    return PathSampler(params, delta, eps_tail)(rng);
}

SeriesDraw sample_perpetuity_series(const QParams& params, unsigned level_stop, RngState& rng) {
    return SeriesSampler(params, level_stop)(rng);
}

double sample_perpetuity_factorization(const QParams& params, double eps_series, RngState& rng) {
    return FactorizationSampler(params, eps_series)(rng);
}

const char* to_string(SamplerId id) {
    switch (id) {
        case SamplerId::path: return "path";
        case SamplerId::series: return "series";
        case SamplerId::factorization: return "factorization";
        case SamplerId::qgamma: return "qgamma";
    }
    throw std::logic_error("to_string: invalid SamplerId");
}

SamplerId sampler_id_from_string(const std::string& name) {
    if (name == "path") return SamplerId::path;
    if (name == "series") return SamplerId::series;
    if (name == "factorization") return SamplerId::factorization;
    if (name == "qgamma") return SamplerId::qgamma;
    throw std::invalid_argument("unknown sampler id: " + name);
}

unsigned default_thread_count() {
    if (const char* env = std::getenv("QPERP_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) return static_cast<unsigned>(v);
        throw std::invalid_argument("QPERP_THREADS must be a positive integer");
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

namespace {

template <class DrawFn>
void fill_batch(std::vector<double>& values, std::uint64_t seed, const DrawFn& draw) {
    const std::size_t n = values.size();
    const std::size_t n_chunks = (n + kChunkSize - 1) / kChunkSize;
    const unsigned n_threads =
        static_cast<unsigned>(std::min<std::size_t>(default_thread_count(), std::max<std::size_t>(n_chunks, 1)));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (;;) {
            const std::size_t c = next.fetch_add(1);
            if (c >= n_chunks) return;
            RngState rng = RngState(seed).derive(c);
            const std::size_t begin = c * kChunkSize;
            const std::size_t end = std::min(begin + kChunkSize, n);
            for (std::size_t i = begin; i < end; ++i) values[i] = draw(rng);
        }
    };
    if (n_threads <= 1) {
        work();
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
}

} // namespace

SampleBatch sample_batch(SamplerId id, const QParams& params, std::size_t n,
                         std::uint64_t seed, const SamplerOptions& options) {
    if (n < 1) throw std::invalid_argument("sample_batch: n must be >= 1");
    SampleBatch batch{id, params.q(), params.mu(), params.z(), seed, n, 0.0, {}};
    batch.values.resize(n);
    switch (id) {
        case SamplerId::path: {
            const PathSampler sampler(params, options.delta, options.eps_tail);
            batch.bias_bound = sampler.delta();
            fill_batch(batch.values, seed, [&](RngState& rng) { return sampler(rng); });
            break;
        }
        case SamplerId::series: {
            unsigned level = options.level_stop;
            if (level == 0) {
                level = static_cast<unsigned>(
                    std::max(1.0, std::ceil(std::log(1e-12) / std::log(params.q()))));
            }
            const SeriesSampler sampler(params, level);
            batch.bias_bound =
                std::pow(params.q(), static_cast<double>(level)) * perpetuity_scale(params);
            fill_batch(batch.values, seed, [&](RngState& rng) { return sampler(rng).value; });
            break;
        }
        case SamplerId::factorization: {
            const FactorizationSampler sampler(params, options.eps_series);
            batch.bias_bound = options.eps_series;
            fill_batch(batch.values, seed, [&](RngState& rng) { return sampler(rng); });
            break;
        }
        case SamplerId::qgamma: {
            const QGammaLaw law(params.z(), params.q());
            batch.bias_bound = 0.0;
            fill_batch(batch.values, seed, [&](RngState& rng) { return law.sample_geomsum(rng); });
            break;
        }
    }
    return batch;
}

SampleBatch sample_batch_qgamma(const QGammaLaw& law, std::size_t n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample_batch_qgamma: n must be >= 1");
    SampleBatch batch{SamplerId::qgamma, law.q(), law.kappa(), law.a(), seed, n, 0.0, {}};
    batch.values.resize(n);
    fill_batch(batch.values, seed, [&](RngState& rng) { return law.sample_geomsum(rng); });
    return batch;
}

std::string to_decimal_string(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

void write_csv(const SampleBatch& batch, std::ostream& out) {
    out << "sampler_id,q,mu,z,seed,n,bias_bound,index,value\n";
    const std::string prefix = std::string(to_string(batch.sampler_id)) + "," +
                               to_decimal_string(batch.q) + "," + to_decimal_string(batch.mu) +
                               "," + to_decimal_string(batch.z) + "," + std::to_string(batch.seed) +
                               "," + std::to_string(batch.n) + "," +
                               to_decimal_string(batch.bias_bound) + ",";
    for (std::size_t i = 0; i < batch.values.size(); ++i) {
        out << prefix << i << ',' << to_decimal_string(batch.values[i]) << '\n';
    }
}

void write_json(const SampleBatch& batch, std::ostream& out) {
    nlohmann::ordered_json j;
    j["sampler_id"] = to_string(batch.sampler_id);
    j["q"] = batch.q;
    if (std::isfinite(batch.mu)) {
        j["mu"] = batch.mu;
    } else {
        j["mu"] = "inf";
    }
    j["z"] = batch.z;
    j["seed"] = batch.seed;
    j["n"] = batch.n;
    j["bias_bound"] = batch.bias_bound;
    j["values"] = batch.values;
    out << j.dump(2) << '\n';
}

} // namespace qperp
