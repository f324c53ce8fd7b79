#include "implab/implosion.hpp"

#include <thread>

namespace implab {

double decay_exponent(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw ValidationError("decay_exponent: need >= 2 matching samples");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return -slope;
}

std::complex<double> phase_sum_identity(const Germ& g, const SigmaSchedule& s, int n,
                                        double beta) {
    const auto fr = make_frame<double>(g, n, beta);
    const double pi = std::numbers::pi;
    std::complex<double> acc = 0.0;
    for (int k = 0; k < n; ++k) {
        const double theta = (k + 1) * pi / n;
        const std::complex<double> w = -(pi / n) * (std::cos(theta) / std::sin(theta));
        acc += H_term(fr, s.sigma(k, n), w);
    }
    return static_cast<double>(n) * acc;
}

ImplosionReport run_implosion(const Germ& g, const SigmaSchedule& s, std::complex<double> w0,
                              int n, const RunOptions& opts) {
    if (opts.precision == Precision::f80)
        return detail::run_implosion_t<long double>(g, s, w0, n, opts);
    return detail::run_implosion_t<double>(g, s, w0, n, opts);
}

std::vector<ImplosionReport> convergence_sweep(const Germ& g, const SigmaSchedule& s,
                                               std::complex<double> w0, std::span<const int> ns,
                                               const RunOptions& opts,
                                               std::span<const std::uint64_t> seeds,
                                               int threads) {
    struct Job {
        int n;
        std::uint64_t seed;
        bool reseed;
    };
    std::vector<Job> jobs;
    for (int n : ns) {
        if (seeds.empty()) {
            jobs.push_back({n, 0, false});
        } else {
            for (auto seed : seeds) jobs.push_back({n, seed, true});
        }
    }

    std::vector<ImplosionReport> out(jobs.size());
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned nthreads =
        threads > 0 ? static_cast<unsigned>(threads) : std::min<unsigned>(hw, jobs.size());

    auto worker = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const auto& job = jobs[i];
            try {
                const SigmaSchedule sched = job.reseed ? s.with_seed(job.seed) : s;
                out[i] = run_implosion(g, sched, w0, job.n, opts);
            } catch (const Error& e) {
                out[i].n = job.n;
                out[i].failed = true;
                out[i].message = e.what();
                out[i].error = std::numeric_limits<double>::quiet_NaN();
                out[i].error_chordal = std::numeric_limits<double>::quiet_NaN();
            }
            out[i].seed = job.seed;
        }
    };

    if (nthreads <= 1 || jobs.size() <= 1) {
        worker(0, jobs.size());
        return out;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (jobs.size() + nthreads - 1) / nthreads;
    for (unsigned t = 0; t < nthreads; ++t) {
        const std::size_t b = t * chunk, e = std::min(jobs.size(), b + chunk);
        if (b >= e) break;
        pool.emplace_back(worker, b, e);
    }
    for (auto& th : pool) th.join();
    return out;
}

PropAResult run_prop_a(std::span<const std::complex<double>> p_tail, const Germ& q,
                       std::complex<double> z0, std::complex<double> w0, int n,
                       Precision precision) {
    if (precision == Precision::f80)
        return detail::run_prop_a_t<long double>(p_tail, q, z0, w0, n);
    return detail::run_prop_a_t<double>(p_tail, q, z0, w0, n);
}

} // namespace implab
