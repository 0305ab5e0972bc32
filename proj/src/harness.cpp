// SPDX-License-Identifier: Apache-2.0
#include "bsft/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "bsft/downsampling.hpp"
#include "bsft/fft.hpp"
#include "bsft/filters.hpp"
#include "bsft/hashing.hpp"
#include "bsft/oracles.hpp"

#ifndef BSFT_VERSION
#define BSFT_VERSION "unknown"
#endif

namespace bsft {
namespace {

using json = nlohmann::json;

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& s) {
    T v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) throw InvalidInput("config " + key + ": bad value '" + s + "'");
    return v;
}

bool parse_bool(const std::string& key, const std::string& s) {
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    throw InvalidInput("config " + key + ": expected true or false");
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Linear interpolation between order statistics.
double quantile(std::vector<double> v, double q) {
    if (v.empty()) return 0;
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

// k0 blocks drawn uniformly with no two circularly adjacent.
std::vector<index_t> pick_blocks(index_t m, index_t k0, Rng& rng) {
    if (4 * k0 > m) throw InvalidInput("generator: need n/k1 >= 4 k0 for non-adjacent blocks");
    std::vector<index_t> out;
    while (static_cast<index_t>(out.size()) < k0) {
        index_t j = centered(rng.uniform_int(0, m), m);
        bool ok = true;
        for (index_t b : out) {
            const index_t d = std::abs(centered(j - b, m));
            if (d < 2) ok = false;
        }
        if (ok) out.push_back(j);
    }
    std::sort(out.begin(), out.end());
    return out;
}

void add_at(cvec& xhat, index_t f, cplx v) {
    const auto n = static_cast<index_t>(xhat.size());
    xhat[static_cast<std::size_t>(mod(f, n))] += v;
}

cvec gen_block_random(const ExperimentConfig& c, Rng& rng) {
    cvec xhat(static_cast<std::size_t>(c.n));
    for (index_t j : pick_blocks(c.n / c.k1, c.k0, rng))
        for (index_t i = 0; i < c.k1; ++i) add_at(xhat, block_start(j, c.k1) + i, rng.complex_normal());
    return xhat;
}

// Flat magnitude over each block with a random time center: a Dirichlet
// pulse in time, so the reduced energies vary strongly with the shift.
cvec gen_sinc_blocks(const ExperimentConfig& c, Rng& rng) {
    cvec xhat(static_cast<std::size_t>(c.n));
    for (index_t j : pick_blocks(c.n / c.k1, c.k0, rng)) {
        const index_t t0 = rng.uniform_int(0, c.n);
        const cplx phase = omega(rng.uniform_int(0, c.n), c.n);
        for (index_t i = 0; i < c.k1; ++i) {
            const index_t f = block_start(j, c.k1) + i;
            add_at(xhat, f, phase * omega(-mod(mod(f, c.n) * t0, c.n), c.n));
        }
    }
    return xhat;
}

// One tone per block carrying the block's energy: constant magnitude in time.
cvec gen_rect_blocks(const ExperimentConfig& c, Rng& rng) {
    cvec xhat(static_cast<std::size_t>(c.n));
    const double a = std::sqrt(static_cast<double>(c.k1));
    for (index_t j : pick_blocks(c.n / c.k1, c.k0, rng)) {
        const index_t f = block_start(j, c.k1) + rng.uniform_int(0, c.k1);
        add_at(xhat, f, a * omega(rng.uniform_int(0, c.n), c.n));
    }
    return xhat;
}

cvec gen_tone(const ExperimentConfig& c, Rng& rng) {
    cvec xhat(static_cast<std::size_t>(c.n));
    add_at(xhat, rng.uniform_int(0, c.n), omega(rng.uniform_int(0, c.n), c.n));
    return xhat;
}

}  // namespace

int staircase_levels(index_t k0) {
    int levels = 0;
    while ((index_t{2} << levels) - 1 <= k0) ++levels;
    return std::max(1, levels);
}

double staircase_value(index_t t, index_t n, index_t k0, index_t k1) {
    const index_t width = (k1 / k0) * (n / k1);  // C n / k1
    const int levels = staircase_levels(k0);
    const index_t u = std::abs(centered(t, n));
    for (int l = 1; l <= levels; ++l)
        if (2 * u <= ((index_t{1} << l) - 1) * width) return std::sqrt(std::ldexp(1.0, levels - l));
    return 0.0;
}

namespace {

// k0 copies of the staircase window, shifted by C n / k1 in time and
// modulated onto blocks spaced n/(k0 k1) apart.
cvec gen_staircase(const ExperimentConfig& c, Rng& rng) {
    if (c.k1 % c.k0 != 0) throw InvalidInput("staircase: k0 must divide k1");
    const index_t m = c.n / c.k1;
    if (m < c.k0) throw InvalidInput("staircase: need n/k1 >= k0 to separate the blocks");
    const index_t width = (c.k1 / c.k0) * m;
    const index_t spacing = m / c.k0;
    cvec x(static_cast<std::size_t>(c.n));
    for (index_t q = 0; q < c.k0; ++q) {
        const index_t f = centered((q - c.k0 / 2) * spacing * c.k1, c.n);
        const cplx phase = omega(rng.uniform_int(0, c.n), c.n);
        for (index_t t = 0; t < c.n; ++t) {
            const double w = staircase_value(t - q * width, c.n, c.k0, c.k1);
            if (w != 0.0) x[static_cast<std::size_t>(t)] += w * phase * omega(mod(f * t, c.n), c.n);
        }
    }
    return dft(x);
}

}  // namespace

void ExperimentConfig::set(const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    if (key == "n") n = parse_number<index_t>(key, v);
    else if (key == "k0") k0 = parse_number<index_t>(key, v);
    else if (key == "k1") k1 = parse_number<index_t>(key, v);
    else if (key == "snr") snr = v == "inf" ? kInfiniteSnr : parse_number<double>(key, v);
    else if (key == "eps") eps = parse_number<double>(key, v);
    else if (key == "delta") delta = parse_number<double>(key, v);
    else if (key == "trials") trials = parse_number<index_t>(key, v);
    else if (key == "seed") seed = parse_number<std::uint64_t>(key, v);
    else if (key == "generator") generator = v;
    else if (key == "noise") noise = v;
    else if (key == "out") out = v;
    else if (key == "preset") preset = v;
    else if (key == "c_meas") c_meas = parse_number<double>(key, v);
    else if (key == "workers") workers = parse_number<int>(key, v);
    else if (key == "timing") timing = parse_bool(key, v);
    else if (key == "oracle_tol") oracle_tol = parse_number<double>(key, v);
    else if (key == "oracle_order") oracle_order = parse_number<int>(key, v);
    else if (key.rfind("const.", 0) == 0) {
        Constants probe;
        probe.set(key.substr(6), v);  // rejects unknown names and bad values
        overrides[key.substr(6)] = v;
    } else {
        throw InvalidInput("unknown config key: " + key);
    }
}

void ExperimentConfig::validate() const {
    if (!is_pow2(n) || n < 16) throw InvalidInput("n must be a power of two, at least 16");
    if (!is_pow2(k1) || k1 < 2 || 4 * k1 > n) throw InvalidInput("k1 must be a power of two in [2, n/4]");
    if (k0 < 1 || k0 > n / k1) throw InvalidInput("k0 must lie in [1, n/k1]");
    if (!(eps > 0 && eps <= 0.05)) throw InvalidInput("eps must lie in (0, 0.05]");
    if (!(delta == 0 || (delta > 0 && delta < 1))) throw InvalidInput("delta must lie in (0, 1), or 0 for the preset");
    if (trials < 0) throw InvalidInput("trials must be non-negative");
    if (workers < 1) throw InvalidInput("workers must be positive");
    static const char* gens[] = {"block-random", "sinc-blocks", "rect-blocks", "staircase", "tone"};
    if (std::find(std::begin(gens), std::end(gens), generator) == std::end(gens))
        throw InvalidInput("unknown generator: " + generator);
    if (noise != "gaussian-tail" && noise != "none") throw InvalidInput("unknown noise model: " + noise);
    if (noise == "gaussian-tail" && !(snr > 1)) throw InvalidInput("snr must exceed 1 with gaussian-tail noise");
    constants();
}

Constants ExperimentConfig::constants() const {
    Constants c = Constants::preset(preset);
    if (delta > 0) c.delta_const = delta;
    for (const auto& [k, v] : overrides) c.set(k, v);
    return c;
}

std::string ExperimentConfig::to_text() const {
    std::ostringstream os;
    os << "n = " << n << "\n"
       << "k0 = " << k0 << "\n"
       << "k1 = " << k1 << "\n"
       << "snr = " << (std::isinf(snr) ? std::string("inf") : fmt_double(snr)) << "\n"
       << "eps = " << fmt_double(eps) << "\n"
       << "delta = " << fmt_double(delta) << "\n"
       << "trials = " << trials << "\n"
       << "seed = " << seed << "\n"
       << "generator = " << generator << "\n"
       << "noise = " << noise << "\n"
       << "out = " << out << "\n"
       << "preset = " << preset << "\n"
       << "c_meas = " << fmt_double(c_meas) << "\n"
       << "workers = " << workers << "\n"
       << "timing = " << (timing ? "true" : "false") << "\n"
       << "oracle_tol = " << fmt_double(oracle_tol) << "\n"
       << "oracle_order = " << oracle_order << "\n";
    for (const auto& [k, v] : overrides) os << "const." << k << " = " << v << "\n";
    return os.str();
}

ExperimentConfig ExperimentConfig::from_text(const std::string& text) {
    ExperimentConfig c;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw InvalidInput("config line " + std::to_string(lineno) + ": expected key = value");
        c.set(trim(line.substr(0, eq)), line.substr(eq + 1));
    }
    return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_text(ss.str());
}

GeneratedSignal gen_signal(const ExperimentConfig& config, Rng& rng) {
    config.validate();
    Rng sig = rng.split("signal"), noise = rng.split("noise");
    cvec xhat;
    if (config.generator == "block-random") xhat = gen_block_random(config, sig);
    else if (config.generator == "sinc-blocks") xhat = gen_sinc_blocks(config, sig);
    else if (config.generator == "rect-blocks") xhat = gen_rect_blocks(config, sig);
    else if (config.generator == "staircase") xhat = gen_staircase(config, sig);
    else xhat = gen_tone(config, sig);

    GeneratedSignal g;
    g.truth = SparseSpectrum::from_dense(xhat);
    if (config.noise == "gaussian-tail") {
        // Tail energy E with (S + E) / E = snr, spread over all n frequencies.
        const double e = energy(xhat) / (config.snr - 1);
        const double sd = std::sqrt(e / static_cast<double>(config.n));
        for (auto& v : xhat) v += sd * noise.complex_normal();
    }
    g.x = idft_signal(xhat);
    g.xhat = std::move(xhat);
    g.tail = tail_error(g.xhat, config.k0, config.k1);
    g.mu2 = g.tail / static_cast<double>(config.k0);
    g.snr = snr(g.xhat, config.k0, config.k1);
    return g;
}

RecoveryParams recovery_params(const ExperimentConfig& config, const GeneratedSignal& g, std::uint64_t seed) {
    RecoveryParams p;
    p.k0 = config.k0;
    p.k1 = config.k1;
    p.eps = config.eps;
    p.seed = seed;
    p.constants = config.constants();
    if (g.snr <= kSnrCap) {
        p.snr_prime = std::max(2.0, g.snr);
        p.nu2 = g.mu2;
    } else {
        p.snr_prime = kSnrCap;
        p.nu2 = energy(g.xhat) / (static_cast<double>(config.k0) * kSnrCap);
    }
    if (!(p.nu2 > 0)) p.nu2 = std::numeric_limits<double>::min();
    return p;
}

TrialResult run_trial(const ExperimentConfig& config, index_t trial) {
    Rng trial_rng = Rng(config.seed).split("trial").split(static_cast<std::uint64_t>(trial));
    GeneratedSignal g = gen_signal(config, trial_rng);
    RecoveryParams params = recovery_params(config, g, trial_rng.split("recover").next());

    SampleCounter counter(config.n);
    CountedSignal x(g.x, counter);
    RecoveryReport rep = block_sparse_ft(x, params);

    TrialResult r;
    r.trial = trial;
    r.n = config.n;
    cvec diff = g.xhat;
    for (const auto& [f, v] : rep.chihat.entries()) diff[static_cast<std::size_t>(mod(f, config.n))] -= v;
    r.error2 = energy(diff);
    r.k0mu2 = g.tail;
    r.nu2 = params.nu2;
    r.snr_measured = g.snr;
    r.snr_prime = params.snr_prime;
    const double unit = config.eps * static_cast<double>(config.k0) * params.nu2;
    r.threshold = r.k0mu2 + config.c_meas * unit;
    r.c_measured = std::max(0.0, r.error2 - r.k0mu2) / unit;
    r.success = r.error2 <= r.threshold;

    // Dense baseline: keep the k0 most energetic blocks of the full spectrum.
    auto be = block_energies(g.xhat, config.k1);
    std::vector<index_t> order(be.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<index_t>(i);
    std::stable_sort(order.begin(), order.end(),
                     [&](index_t a, index_t b) { return be[static_cast<std::size_t>(a)] > be[static_cast<std::size_t>(b)]; });
    std::vector<char> keep(be.size(), 0);
    for (index_t i = 0; i < std::min<index_t>(config.k0, static_cast<index_t>(order.size())); ++i)
        keep[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = 1;
    for (index_t f = 0; f < config.n; ++f)
        if (!keep[static_cast<std::size_t>(mod(block_of(f, config.k1, config.n), config.n / config.k1))])
            r.baseline_error2 += std::norm(g.xhat[static_cast<std::size_t>(f)]);

    r.samples_used = rep.samples_used;
    r.wall_time_ms = rep.wall_time_ms;
    r.stage_log = std::move(rep.stage_log);
    r.chihat = std::move(rep.chihat);
    return r;
}

namespace {

json config_json(const ExperimentConfig& c) {
    json j;
    std::istringstream is(c.to_text());
    std::string line;
    while (std::getline(is, line)) {
        const auto eq = line.find('=');
        j[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    json consts;
    for (const auto& [k, v] : c.constants().to_map()) consts[k] = v;
    j["constants"] = consts;
    return j;
}

json trial_json(const TrialResult& r, bool timing) {
    json j;
    j["type"] = "trial";
    j["trial"] = r.trial;
    j["n"] = r.n;
    j["error2"] = r.error2;
    j["k0mu2"] = r.k0mu2;
    j["nu2"] = r.nu2;
    j["snr"] = std::isinf(r.snr_measured) ? json("inf") : json(r.snr_measured);
    j["snr_prime"] = r.snr_prime;
    j["threshold"] = r.threshold;
    j["c_measured"] = r.c_measured;
    j["success"] = r.success;
    j["baseline_error2"] = r.baseline_error2;
    j["samples_used"] = r.samples_used;
    j["samples_frac"] = static_cast<double>(r.samples_used) / static_cast<double>(r.n);
    if (timing) j["wall_time_ms"] = r.wall_time_ms;
    json stages = json::array();
    for (const auto& s : r.stage_log)
        stages.push_back({{"stage", s.stage},
                          {"iteration", s.iteration},
                          {"delta", s.delta},
                          {"p", s.p},
                          {"theta", s.theta},
                          {"located", s.located},
                          {"kept", s.kept},
                          {"estimated", s.estimated},
                          {"residual_estimate", s.residual_estimate},
                          {"samples", s.samples}});
    j["stage_log"] = stages;
    json spec = json::array();
    for (const auto& [f, v] : r.chihat.entries()) spec.push_back({f, v.real(), v.imag()});
    j["spectrum"] = spec;
    return j;
}

// Runs fn(i) for i in [0, count) on `workers` threads and hands results to
// sink in index order.
void ordered_pool(index_t count, int workers, const std::function<TrialResult(index_t)>& fn,
                  const std::function<void(TrialResult&&)>& sink) {
    if (workers <= 1 || count <= 1) {
        for (index_t i = 0; i < count; ++i) sink(fn(i));
        return;
    }
    std::vector<std::optional<TrialResult>> slots(static_cast<std::size_t>(count));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
    std::mutex mu;
    std::condition_variable cv;
    std::atomic<index_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < std::min<index_t>(workers, count); ++w) {
        pool.emplace_back([&] {
            for (index_t i = next++; i < count; i = next++) {
                std::optional<TrialResult> r;
                std::exception_ptr err;
                try {
                    r = fn(i);
                } catch (...) {
                    err = std::current_exception();
                }
                std::lock_guard<std::mutex> lock(mu);
                slots[static_cast<std::size_t>(i)] = std::move(r);
                errors[static_cast<std::size_t>(i)] = err;
                if (!slots[static_cast<std::size_t>(i)]) slots[static_cast<std::size_t>(i)].emplace();
                cv.notify_all();
            }
        });
    }
    std::exception_ptr first_error;
    for (index_t i = 0; i < count; ++i) {
        std::unique_lock<std::mutex> lock(mu);
        cv.wait(lock, [&] { return slots[static_cast<std::size_t>(i)].has_value(); });
        TrialResult r = std::move(*slots[static_cast<std::size_t>(i)]);
        auto err = errors[static_cast<std::size_t>(i)];
        lock.unlock();
        if (err) {
            if (!first_error) first_error = err;
            continue;
        }
        if (!first_error) sink(std::move(r));
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace

std::string version_string() { return BSFT_VERSION; }

std::vector<TrialResult> run_experiment(const ExperimentConfig& config, std::ostream& jsonl) {
    config.validate();
    json header;
    header["type"] = "header";
    header["version"] = version_string();
    header["config"] = config_json(config);
    jsonl << header.dump() << "\n";
    std::vector<TrialResult> results;
    ordered_pool(config.trials, config.workers, [&](index_t i) { return run_trial(config, i); },
                 [&](TrialResult&& r) {
                     jsonl << trial_json(r, config.timing).dump() << "\n";
                     jsonl.flush();
                     r.chihat = SparseSpectrum(r.n);
                     results.push_back(std::move(r));
                 });
    if (!jsonl) throw std::runtime_error("failed writing results");
    return results;
}

Summary summarize(const std::vector<TrialResult>& results, index_t n) {
    Summary s;
    s.n = n;
    s.trials = static_cast<index_t>(results.size());
    if (results.empty()) return s;
    std::vector<double> err, samples, frac, cm, base, wall;
    index_t ok = 0;
    for (const auto& r : results) {
        err.push_back(r.error2);
        samples.push_back(static_cast<double>(r.samples_used));
        frac.push_back(static_cast<double>(r.samples_used) / static_cast<double>(r.n));
        cm.push_back(r.c_measured);
        base.push_back(r.baseline_error2);
        wall.push_back(r.wall_time_ms);
        ok += r.success ? 1 : 0;
    }
    s.success_rate = static_cast<double>(ok) / static_cast<double>(results.size());
    s.median_error2 = quantile(err, 0.5);
    double total = 0;
    for (double e : err) total += e;
    s.mean_error2 = total / static_cast<double>(err.size());
    s.median_samples = quantile(samples, 0.5);
    s.median_samples_frac = quantile(frac, 0.5);
    s.q10_samples = quantile(samples, 0.1);
    s.q90_samples = quantile(samples, 0.9);
    s.c80 = quantile(cm, 0.8);
    s.median_baseline_error2 = quantile(base, 0.5);
    s.median_wall_ms = quantile(wall, 0.5);
    return s;
}

std::string summary_csv_header() {
    return "n,trials,success_rate,median_error2,mean_error2,median_samples,median_samples_frac,q10_samples,"
           "q90_samples,c80,median_baseline_error2,median_wall_ms";
}

std::string summary_csv_row(const Summary& s) {
    std::ostringstream os;
    os << s.n << "," << s.trials << "," << fmt_double(s.success_rate) << "," << fmt_double(s.median_error2) << ","
       << fmt_double(s.mean_error2) << "," << fmt_double(s.median_samples) << "," << fmt_double(s.median_samples_frac)
       << "," << fmt_double(s.q10_samples) << "," << fmt_double(s.q90_samples) << "," << fmt_double(s.c80) << ","
       << fmt_double(s.median_baseline_error2) << "," << fmt_double(s.median_wall_ms);
    return os.str();
}

std::vector<Summary> sweep(const ExperimentConfig& config, const std::vector<index_t>& ns, std::ostream& jsonl) {
    std::vector<Summary> out;
    for (index_t n : ns) {
        ExperimentConfig c = config;
        c.n = n;
        out.push_back(summarize(run_experiment(c, jsonl), n));
    }
    return out;
}

namespace {

SparseSpectrum random_sparse(index_t n, index_t count, Rng& rng) {
    SparseSpectrum s(n);
    while (static_cast<index_t>(s.size()) < count) s.set(centered(rng.uniform_int(0, n), n), rng.complex_normal());
    return s;
}

SparseSpectrum random_block_sparse(index_t n, index_t k0, index_t k1, Rng& rng) {
    SparseSpectrum s(n);
    for (index_t j : pick_blocks(n / k1, k0, rng))
        for (index_t i = 0; i < k1; ++i) s.set(centered(block_start(j, k1) + i, n), rng.complex_normal());
    return s;
}

double max_abs_diff(const cvec& a, const cvec& b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    double e = 0;
    for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]));
    return e;
}

double max_abs(const cvec& a) {
    double e = 0;
    for (const auto& v : a) e = std::max(e, std::abs(v));
    return e;
}

struct CheckAccumulator {
    OracleCheck check;
    void observe(double err) {
        if (!(err <= check.max_error)) check.max_error = std::isnan(err) ? std::numeric_limits<double>::infinity() : err;
    }
};

}  // namespace

std::vector<OracleCheck> oracle_check(const ExperimentConfig& config) {
    config.validate();
    if (config.n > 4096) throw InvalidInput("oracle-check: n must be at most 4096");
    const index_t n = config.n, k1 = config.k1, m = n / k1;
    const double delta = config.delta > 0 ? config.delta : 0.05;
    const Constants consts = config.constants();
    const int order = config.oracle_order != 0 ? config.oracle_order : filter_order(delta, consts.filter_order);
    const index_t cases = std::max<index_t>(1, config.trials);
    auto tol = [&](double own) { return config.oracle_tol >= 0 ? config.oracle_tol : own; };

    std::vector<OracleCheck> out;
    std::shared_ptr<const FlatFilter> g;
    try {
        g = FlatFilter::make(n, m, order, consts.flat_c);
    } catch (const std::exception& e) {
        out.push_back({"flat-filter-construction", std::numeric_limits<double>::infinity(), 0, false, e.what()});
        return out;
    }
    const index_t hb = std::min<index_t>(16, n / 4);
    auto gh = FlatFilter::make(n, hb, order, consts.flat_c);

    CheckAccumulator dft_c{{"dft", 0, tol(1e-12), false, "relative to max |X_hat|"}};
    CheckAccumulator down_c{{"downsampling", 0, tol(1e-9), false, "time-domain Z^r vs frequency convolution"}};
    CheckAccumulator sand_c{{"energy-sandwich", 0, tol(0), false, "violation of (1-12 delta)|X|^2 <= avg |Z^r|^2 <= 6|X|^2"}};
    CheckAccumulator hash_c{{"hashing", 0, tol(1e-8), false, "relative to |chi|_2"}};
    CheckAccumulator red_c{{"hashing-reduced", 0, tol(1e-8), false, "relative to |chi|_2, every r"}};
    CheckAccumulator semi_c{{"semi-equispaced", 0, tol(1e-9), false, "relative to |X_hat|_2, zeta = 1e-9"}};
    CheckAccumulator block_c{{"semi-equispaced-block", 0, tol(1e-8), false, "relative to |chi|_2"}};
    CheckAccumulator filt_c{{"flat-filter-bounds", 0, tol(0), false, "violated bounds"}};

    filt_c.observe(static_cast<double>(g->violations().size() + gh->violations().size()));
    for (index_t i = 0; i < cases; ++i) {
        Rng rng = Rng(config.seed).split("oracle").split(static_cast<std::uint64_t>(i));
        Rng xr = rng.split("x");
        cvec x(static_cast<std::size_t>(n));
        for (auto& v : x) v = xr.complex_normal();
        cvec xhat = dft(x);

        const cvec direct = dft_direct(x);
        dft_c.observe(max_abs_diff(xhat, direct) / max_abs(direct));

        auto dense = z_spectra_dense(x, *g, k1);
        auto exact = exact_downsampled_spectra(xhat, *g, k1);
        double avg = 0;
        for (std::size_t r = 0; r < dense.size(); ++r) {
            down_c.observe(max_abs_diff(dense[r], exact[r]) / std::max(max_abs(exact[r]), 1e-300));
            avg += energy(exact[r]);
        }
        avg /= static_cast<double>(dense.size());
        const double ex = energy(xhat);
        sand_c.observe(std::max({0.0, (1 - 12 * delta) * ex - avg, avg - 6 * ex}) / ex);

        // Residual hashing against the dense formula on X - chi.
        Rng cr = rng.split("chi");
        SparseSpectrum chi = random_sparse(n, 8, cr);
        const double chi_norm = std::sqrt(chi.norm2());
        cvec resid = xhat;
        for (const auto& [f, v] : chi.entries()) resid[static_cast<std::size_t>(mod(f, n))] -= v;
        Signal xs(x);
        SampleCounter counter(n);
        CountedSignal xc(xs, counter);
        Rng hr = rng.split("hash");
        HashParams hp = random_hash_params(n, hb, hr);
        hash_c.observe(max_abs_diff(hash_to_bins(xc, chi, *gh, hp, 1e-12), exact_hashed_spectrum(resid, *gh, hp)) / chi_norm);

        // Per-r hashing of the reduced residuals with mixed bucket counts.
        SparseSpectrum bchi = random_block_sparse(n, std::min<index_t>(2, std::max<index_t>(1, m / 4)), k1, cr);
        const double bchi_norm = std::sqrt(bchi.norm2());
        cvec bresid = xhat;
        for (const auto& [f, v] : bchi.entries()) bresid[static_cast<std::size_t>(mod(f, n))] -= v;
        DownsampleView view;
        view.x = &xc;
        view.n = n;
        view.k1 = k1;
        view.m = m;
        view.delta = delta;
        view.filter = g;
        std::vector<std::shared_ptr<const FlatFilter>> filters(static_cast<std::size_t>(2 * k1));
        const int max_bits = std::max(1, log2_exact(m) - 1);
        for (index_t r = 0; r < 2 * k1; ++r)
            filters[static_cast<std::size_t>(r)] = FlatFilter::make(m, index_t{1} << (1 + r % max_bits), std::max(2, std::min(order, 8)), consts.flat_c);
        const index_t sigma = 2 * hr.uniform_int(0, m / 2) + 1, shift = hr.uniform_int(0, m);
        auto reduced = hash_to_bins_reduced(view, bchi, filters, sigma, shift, 1e-12);
        auto zres = exact_downsampled_spectra(bresid, *g, k1);
        for (index_t r = 0; r < 2 * k1; ++r) {
            const auto& fr = *filters[static_cast<std::size_t>(r)];
            HashParams rp{m, fr.buckets(), sigma, shift};
            red_c.observe(max_abs_diff(reduced[static_cast<std::size_t>(r)], exact_hashed_spectrum(zres[static_cast<std::size_t>(r)], fr, rp)) / bchi_norm);
        }

        // Semi-equispaced evaluation of a sparse spectrum against the dense inverse.
        Rng sr = rng.split("semi");
        const index_t k = 16;
        SparseSpectrum sp = random_sparse(n, 8, sr);
        const index_t ss = 2 * sr.uniform_int(0, n / 2) + 1, sh = sr.uniform_int(0, n);
        cvec ys = semi_equi_inverse_fft(sp, k, 1e-9, ss, sh);
        cvec full = idft(sp.to_dense());
        double err = 0;
        for (index_t s = -k / 2; s <= k / 2; ++s)
            err = std::max(err, std::abs(ys[static_cast<std::size_t>(s + k / 2)] - full[static_cast<std::size_t>(mod(ss * s + sh, n))]));
        semi_c.observe(err / std::sqrt(sp.norm2()));

        const index_t radius = std::min<index_t>(m / 2, 8);
        BlockValues bv = semi_equi_inverse_block_fft(bchi, k1, radius, 1e-10, sigma, shift);
        cvec bfull = idft(bchi.to_dense());
        double berr = 0;
        for (index_t t = -radius; t <= radius; ++t) {
            const index_t j = centered(sigma * (shift + t), m);
            for (index_t s = 0; s < 2 * k1; ++s)
                berr = std::max(berr, std::abs(bv.at(t, s) - bfull[static_cast<std::size_t>(mod(j + (m / 2) * s, n))]));
        }
        block_c.observe(berr / bchi_norm);
    }
    for (auto* a : {&dft_c, &down_c, &sand_c, &hash_c, &red_c, &semi_c, &block_c, &filt_c}) {
        a->check.pass = a->check.max_error <= a->check.tolerance;
        out.push_back(a->check);
    }
    return out;
}

}  // namespace bsft
