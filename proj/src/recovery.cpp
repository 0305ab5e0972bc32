// SPDX-License-Identifier: Apache-2.0
#include "bsft/recovery.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "bsft/downsampling.hpp"
#include "bsft/filters.hpp"
#include "bsft/hashing.hpp"

namespace bsft {
namespace {

double median(std::vector<double> v) {
    if (v.empty()) return 0;
    auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    return *mid;
}

index_t rounds_of(double factor, double x) {
    return std::max<index_t>(1, static_cast<index_t>(std::ceil(factor * std::log2(x) - 1e-9)));
}

double clamp_p(double p, const Constants& c) { return std::min(0.49, std::max(p, c.p_floor)); }

// Estimate of (X - chi)_f from one hashing, G_hat^-1 U_h(f) w^{-sigma Delta f}.
cplx bucket_estimate(const cvec& u, const FlatFilter& g, const HashParams& hp, index_t f) {
    const index_t n = hp.m;
    cplx phase = omega(-mod(mod(hp.sigma * hp.shift, n) * mod(f, n), n), n);
    return u[static_cast<std::size_t>(hp.bucket(f))] * phase / g.freq(hp.offset(f, f));
}

void check_delta(double delta, index_t n, const char* what) {
    if (!(delta > 1.0 / static_cast<double>(n) && delta < 1)) throw InvalidInput(std::string(what) + ": delta out of range");
}

}  // namespace

LocationList prune_location(const CountedSignal& x, const SparseSpectrum& chi, const LocationList& L, index_t k0,
                            index_t k1, double delta, double p, double theta, Rng& rng, const Constants& c,
                            std::map<index_t, double>* energies_out) {
    if (theta <= 0 || L.empty()) return L;
    const index_t n = x.size();
    check_delta(delta, n, "prune_location");
    const index_t B = bucket_count(c.prune_buckets * static_cast<double>(k0 * k1) / delta, n);
    auto g = FlatFilter::make(n, B, filter_order(delta, c.filter_order), c.flat_c);
    const index_t T = rounds_of(c.prune_rounds, 1.0 / (delta * p));
    std::map<index_t, std::vector<double>> w;
    for (index_t t = 0; t < T; ++t) {
        Rng tr = rng.split(static_cast<std::uint64_t>(t));
        HashParams hp = random_hash_params(n, B, tr);
        cvec u = hash_to_bins(x, chi, *g, hp, c.tol);
        for (index_t j : L) {
            double e = 0;
            const index_t f0 = block_start(j, k1);
            for (index_t f = f0; f < f0 + k1; ++f) e += std::norm(bucket_estimate(u, *g, hp, centered(f, n)));
            w[j].push_back(e);
        }
    }
    LocationList out;
    for (auto& [j, v] : w) {
        double m = median(std::move(v));
        if (energies_out) (*energies_out)[j] = m;
        if (m >= theta) out.insert(j);
    }
    return out;
}

SparseSpectrum estimate_values(const CountedSignal& x, const SparseSpectrum& chi, const LocationList& L, double k0,
                               index_t k1, double delta, double p, Rng& rng, const Constants& c) {
    const index_t n = x.size();
    SparseSpectrum out(n);
    if (L.empty()) return out;
    check_delta(delta, n, "estimate_values");
    const index_t B = bucket_count(c.estimate_buckets * k0 * static_cast<double>(k1) / delta, n);
    auto g = FlatFilter::make(n, B, filter_order(delta, c.filter_order), c.flat_c);
    const index_t T = rounds_of(c.estimate_rounds, 2.0 / p);
    std::vector<index_t> freqs;
    for (index_t j : L) {
        const index_t f0 = block_start(j, k1);
        for (index_t f = f0; f < f0 + k1; ++f) freqs.push_back(centered(f, n));
    }
    std::vector<std::vector<double>> re(freqs.size()), im(freqs.size());
    for (index_t t = 0; t < T; ++t) {
        Rng tr = rng.split(static_cast<std::uint64_t>(t));
        HashParams hp = random_hash_params(n, B, tr);
        cvec u = hash_to_bins(x, chi, *g, hp, c.tol);
        for (std::size_t i = 0; i < freqs.size(); ++i) {
            cplx v = bucket_estimate(u, *g, hp, freqs[i]);
            re[i].push_back(v.real());
            im[i].push_back(v.imag());
        }
    }
    for (std::size_t i = 0; i < freqs.size(); ++i) out.add(freqs[i], {median(std::move(re[i])), median(std::move(im[i]))});
    return out;
}

SparseSpectrum reduce_snr(const CountedSignal& x, const RecoveryParams& params, Rng& rng,
                          std::vector<StageRecord>* log) {
    const Constants& c = params.constants;
    if (!(params.snr_prime >= 2)) throw InvalidInput("reduce_snr: SNR bound must be at least 2");
    const index_t n = x.size(), k0 = params.k0, k1 = params.k1;
    const int T = ceil_log2(params.snr_prime);
    const double delta = c.delta_const;
    const double lk = std::log2(static_cast<double>(k0) / delta), ls = std::log2(params.snr_prime);
    const double p = clamp_p(delta / (lk * lk * ls * ls * ls * ls), c);
    SparseSpectrum chi(n);
    Rng stream = rng.split("reduce_snr");
    for (int t = 1; t <= T; ++t) {
        Rng it = stream.split(static_cast<std::uint64_t>(t));
        Rng lr = it.split("locate"), pr = it.split("prune"), er = it.split("estimate");
        LocationList L = multi_block_locate(x, chi, k0, k1, delta, p, lr, c);
        const double theta = c.theta_scale * std::ldexp(1.0, -t) * params.nu2 * params.snr_prime;
        std::map<index_t, double> energies;
        LocationList kept = prune_location(x, chi, L, k0, k1, delta, p, theta, pr, c, &energies);
        SparseSpectrum w = estimate_values(x, chi, kept, static_cast<double>(k0), k1, delta, p, er, c);
        chi.add(w);
        if (c.perturb_dc) {
            Rng dr = it.split("perturb");
            const double scale = 1e-12 * std::max(std::sqrt(chi.norm2()), 1e-300);
            chi.add(0, scale * cplx{dr.uniform() - 0.5, dr.uniform() - 0.5});
        }
        if (log) {
            StageRecord s{"reduce", t, delta, p, theta, static_cast<index_t>(L.size()), static_cast<index_t>(kept.size()),
                          static_cast<index_t>(w.size()), 0, x.counter().distinct()};
            for (index_t j : kept) s.residual_estimate += energies.count(j) ? energies[j] : 0.0;
            log->push_back(s);
        }
    }
    return chi;
}

SparseSpectrum recover_at_const_snr(const CountedSignal& x, const SparseSpectrum& chi, const RecoveryParams& params,
                                    Rng& rng, std::vector<StageRecord>* log) {
    const Constants& c = params.constants;
    const index_t n = x.size(), k0 = params.k0, k1 = params.k1;
    const double eps = params.eps;
    if (!(eps > 1.0 / static_cast<double>(n) && eps <= 0.05)) throw InvalidInput("recover_at_const_snr: eps must lie in (1/n, 1/20]");
    const double lk = std::log2(static_cast<double>(k0) / eps);
    const double p = clamp_p(c.eta_const * eps / (lk * lk), c);
    Rng stream = rng.split("const_snr");
    Rng lr = stream.split("locate"), pr = stream.split("prune"), er = stream.split("estimate");
    const double locate_delta = std::pow(eps, c.final_locate_power);
    LocationList L = multi_block_locate(x, chi, k0, k1, locate_delta, p, lr, c);
    const double theta = c.final_theta * eps * params.nu2;
    std::map<index_t, double> energies;
    LocationList kept = prune_location(x, chi, L, k0, k1, eps, p, theta, pr, c, &energies);
    SparseSpectrum w = estimate_values(x, chi, kept, c.final_sparsity * static_cast<double>(k0) / eps, k1, eps, p, er, c);
    SparseSpectrum out = chi;
    out.add(w);
    if (log) {
        StageRecord s{"final", 0, eps, p, theta, static_cast<index_t>(L.size()), static_cast<index_t>(kept.size()),
                      static_cast<index_t>(w.size()), 0, x.counter().distinct()};
        for (index_t j : kept) s.residual_estimate += energies.count(j) ? energies[j] : 0.0;
        log->push_back(s);
    }
    return out;
}

RecoveryReport block_sparse_ft(const CountedSignal& x, const RecoveryParams& params) {
    if (params.k0 < 1) throw InvalidInput("block_sparse_ft: k0 must be positive");
    if (!(params.nu2 > 0)) throw InvalidInput("block_sparse_ft: noise bound must be positive");
    const auto start = std::chrono::steady_clock::now();
    Rng rng(params.seed);
    RecoveryReport report;
    SparseSpectrum chi = reduce_snr(x, params, rng, &report.stage_log);
    report.chihat = recover_at_const_snr(x, chi, params, rng, &report.stage_log);
    report.samples_used = x.counter().distinct();
    report.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return report;
}

}  // namespace bsft
