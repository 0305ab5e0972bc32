// SPDX-License-Identifier: Apache-2.0
#include "bsft/location.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bsft/hashing.hpp"

namespace bsft {

AliasTable::AliasTable(const std::vector<double>& weights) : prob_(weights.size()), alias_(weights.size()) {
    const std::size_t k = weights.size();
    if (k == 0) throw InvalidInput("alias table: empty distribution");
    double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (!(total > 0)) throw InvalidInput("alias table: weights sum to zero");
    std::vector<double> scaled(k);
    std::vector<std::size_t> small, large;
    for (std::size_t i = 0; i < k; ++i) {
        if (weights[i] < 0) throw InvalidInput("alias table: negative weight");
        scaled[i] = weights[i] * static_cast<double>(k) / total;
        (scaled[i] < 1.0 ? small : large).push_back(i);
    }
    while (!small.empty() && !large.empty()) {
        std::size_t s = small.back(), l = large.back();
        small.pop_back();
        prob_[s] = scaled[s];
        alias_[s] = l;
        scaled[l] -= 1.0 - scaled[s];
        if (scaled[l] < 1.0) {
            large.pop_back();
            small.push_back(l);
        }
    }
    for (auto i : large) prob_[i] = 1.0, alias_[i] = i;
    for (auto i : small) prob_[i] = 1.0, alias_[i] = i;
}

std::size_t AliasTable::sample(Rng& rng) const {
    auto i = static_cast<std::size_t>(rng.uniform_int(0, static_cast<index_t>(prob_.size())));
    return rng.uniform() < prob_[i] ? i : alias_[i];
}

BudgetDistribution budget_distribution(const std::vector<double>& gamma, index_t k0, double delta, const Constants& c) {
    double total = 0;
    for (double g : gamma) {
        if (!(g >= 0 && std::isfinite(g))) throw InvalidInput("budget allocation: negative or non-finite energy estimate");
        total += g;
    }
    if (!(total > 0)) throw InvalidInput("budget allocation: no energy estimate");
    BudgetDistribution d;
    d.levels = std::max(1, ceil_log2(c.budget_levels * static_cast<double>(k0) / delta));
    for (double g : gamma) d.r_weight.push_back(g / total);
    const double norm = 1.0 - std::ldexp(1.0, -d.levels);
    for (int q = 1; q <= d.levels; ++q) d.q_weight.push_back(std::ldexp(1.0, -q) / norm);
    return d;
}

index_t budget_draws(index_t k0, double delta, double p, const Constants& c) {
    return static_cast<index_t>(std::ceil(c.budget_draws * static_cast<double>(k0) / delta * std::log2(1.0 / p) - 1e-9));
}

Budgets budget_allocation(const std::vector<double>& gamma, index_t k0, double delta, double p, Rng& rng,
                          const Constants& c) {
    if (!(p > 0 && p < 0.5)) throw InvalidInput("budget allocation: p must lie in (0, 1/2)");
    if (!(delta > 0 && delta < 1)) throw InvalidInput("budget allocation: delta must lie in (0, 1)");
    BudgetDistribution d = budget_distribution(gamma, k0, delta, c);
    AliasTable rs(d.r_weight), qs(d.q_weight);
    std::vector<int> top(gamma.size(), 0);
    const index_t draws = budget_draws(k0, delta, p, c);
    for (index_t i = 0; i < draws; ++i) {
        std::size_t r = rs.sample(rng);
        int q = static_cast<int>(qs.sample(rng)) + 1;
        top[r] = std::max(top[r], q);
    }
    Budgets s(gamma.size(), 0);
    for (std::size_t r = 0; r < s.size(); ++r)
        if (top[r] > 0) s[r] = std::llround(c.budget_base * std::ldexp(1.0, top[r]));
    return s;
}

std::vector<index_t> active_set(const std::vector<cvec>& zhat, const std::vector<double>& gamma, index_t k0,
                                double delta) {
    if (zhat.size() != gamma.size() || zhat.empty()) throw InvalidInput("active_set: size mismatch");
    const auto m = static_cast<index_t>(zhat.front().size());
    std::vector<double> norms;
    double total = 0;
    for (const auto& z : zhat) {
        norms.push_back(energy(z));
        total += norms.back();
    }
    const double rhs = delta * total / static_cast<double>(k0);
    std::vector<index_t> out;
    for (index_t j = -m / 2 + 1; j <= m / 2; ++j) {
        double lhs = 0;
        for (std::size_t r = 0; r < zhat.size(); ++r)
            if (norms[r] > 0) lhs += std::norm(zhat[r][static_cast<std::size_t>(mod(j, m))]) * gamma[r] / norms[r];
        if (lhs >= rhs && lhs > 0) out.push_back(j);
    }
    return out;
}

DecoderConfig decoder_config(index_t m, const Constants& c) {
    DecoderConfig d;
    d.m = m;
    const double loglog = std::log2(static_cast<double>(log2_exact(m)));
    const int formula = std::max(1, static_cast<int>(std::floor(0.5 * loglog)));
    d.lambda = index_t{1} << std::min(log2_exact(m), c.lambda_bits > 0 ? c.lambda_bits : formula);
    const int bits = log2_exact(d.lambda);
    d.levels = (log2_exact(m) + bits - 1) / bits;
    d.big_n = index_t{1} << (bits * d.levels);
    d.pairs = std::max<index_t>(1, static_cast<index_t>(std::ceil(c.c3 * loglog - 1e-9)));
    return d;
}

LocationList locate_reduced_signals(const DownsampleView& view, const SparseSpectrum& chi, const Budgets& budgets,
                                    double delta, double p, Rng& rng, const Constants& c, LocateStats* stats) {
    const index_t k1 = view.k1, m = view.m, two_k1 = 2 * k1;
    if (static_cast<index_t>(budgets.size()) != two_k1) throw InvalidInput("locate: budget vector must have length 2k1");
    const int order = c.decode_order > 0 ? c.decode_order : std::max(2, filter_order(delta, c.filter_order));
    std::vector<std::shared_ptr<const FlatFilter>> filters(static_cast<std::size_t>(two_k1));
    bool any = false;
    for (index_t r = 0; r < two_k1; ++r) {
        index_t s = budgets[static_cast<std::size_t>(r)];
        if (s <= 0) continue;
        filters[static_cast<std::size_t>(r)] =
            FlatFilter::make(m, bucket_count(c.c2 * static_cast<double>(s), m), order, c.flat_c);
        any = true;
    }
    LocationList out;
    if (!any) return out;

    const DecoderConfig d = decoder_config(m, c);
    const auto trials = static_cast<index_t>(std::ceil(c.c1 * std::log2(2.0 / p) - 1e-9));
    const index_t a_count = d.pairs;
    const auto need = static_cast<index_t>(std::ceil(0.6 * static_cast<double>(a_count) - 1e-9));

    for (index_t trial = 0; trial < trials; ++trial) {
        Rng tr = rng.split(static_cast<std::uint64_t>(trial));
        const index_t sigma = 2 * tr.uniform_int(0, m / 2) + 1;
        std::vector<index_t> alpha(static_cast<std::size_t>(a_count)), beta(static_cast<std::size_t>(a_count));
        for (index_t a = 0; a < a_count; ++a) {
            alpha[static_cast<std::size_t>(a)] = tr.uniform_int(0, m);
            beta[static_cast<std::size_t>(a)] = c.odd_beta ? 2 * tr.uniform_int(0, m / 2) + 1 : tr.uniform_int(0, m);
        }
        // spectra[a][g][r]; g = 0 is the reference shift alpha
        std::vector<std::vector<std::vector<cvec>>> spectra(static_cast<std::size_t>(a_count));
        for (index_t a = 0; a < a_count; ++a) {
            auto& row = spectra[static_cast<std::size_t>(a)];
            for (int g = 0; g <= d.levels; ++g) {
                index_t w = g == 0 ? 0 : d.big_n >> (log2_exact(d.lambda) * g);
                index_t shift = mod(alpha[static_cast<std::size_t>(a)] + mod(w, m) * beta[static_cast<std::size_t>(a)], m);
                row.push_back(hash_to_bins_reduced(view, chi, filters, sigma, shift, c.tol));
                if (stats) ++stats->hash_calls;
            }
        }
        const index_t sigma_inv = inverse_odd(sigma, m);
        const index_t ratio = d.big_n / m;
        std::vector<index_t> votes(static_cast<std::size_t>(d.lambda));
        for (index_t r = 0; r < two_k1; ++r) {
            if (!filters[static_cast<std::size_t>(r)]) continue;
            const index_t B = filters[static_cast<std::size_t>(r)]->buckets();
            for (index_t b = 0; b < B; ++b) {
                index_t f = 0, place = 1;
                for (int g = 1; g <= d.levels; ++g) {
                    const index_t w = d.big_n >> (log2_exact(d.lambda) * g);
                    std::fill(votes.begin(), votes.end(), 0);
                    for (index_t a = 0; a < a_count; ++a) {
                        const auto& row = spectra[static_cast<std::size_t>(a)];
                        cplx ref = row[0][static_cast<std::size_t>(r)][static_cast<std::size_t>(b)];
                        if (ref == cplx{}) continue;
                        cplx q = row[static_cast<std::size_t>(g)][static_cast<std::size_t>(r)][static_cast<std::size_t>(b)] / ref;
                        index_t be = beta[static_cast<std::size_t>(a)];
                        q *= omega(-mod(mod(w * f, d.big_n) * mod(be, d.big_n), d.big_n), d.big_n);
                        for (index_t lam = 0; lam < d.lambda; ++lam)
                            if (std::abs(omega(-mod(lam * be, d.lambda), d.lambda) * q - 1.0) < 1.0 / 3.0)
                                ++votes[static_cast<std::size_t>(lam)];
                    }
                    index_t chosen = -1, passing = 0;
                    for (index_t lam = 0; lam < d.lambda; ++lam)
                        if (votes[static_cast<std::size_t>(lam)] >= need) chosen = lam, ++passing;
                    if (passing == 1) f += place * chosen;
                    place *= d.lambda;
                }
                index_t ff = (f + ratio / 2) / ratio;
                out.insert(centered(sigma_inv * mod(ff, m), m));
            }
        }
        if (stats) ++stats->trials;
    }
    return out;
}

LocationList multi_block_locate(const CountedSignal& x, const SparseSpectrum& chi, index_t k0, index_t k1, double delta,
                                double p, Rng& rng, const Constants& c, Budgets* budgets_out) {
    DownsampleView view = make_downsample_view(x, nullptr, k1, delta, c.filter_order, c.flat_c);
    const auto rounds = std::max<index_t>(1, static_cast<index_t>(std::ceil(c.locate_rounds * std::log2(1.0 / p) - 1e-9)));
    const double p_inner = std::max(delta * p / 2.0, c.p_floor);
    Budgets s(static_cast<std::size_t>(2 * k1), 0);
    Rng energy_rng = rng.split("energy"), budget_rng = rng.split("budget");
    for (index_t t = 0; t < rounds; ++t) {
        Rng er = energy_rng.split(static_cast<std::uint64_t>(t));
        Rng br = budget_rng.split(static_cast<std::uint64_t>(t));
        auto gamma = estimate_energies(view, chi, k0, delta, er, c);
        if (std::accumulate(gamma.begin(), gamma.end(), 0.0) <= 0) continue;
        Budgets st = budget_allocation(gamma, k0, delta, p_inner, br, c);
        for (std::size_t r = 0; r < s.size(); ++r) s[r] = std::max(s[r], st[r]);
    }
    if (budgets_out) *budgets_out = s;
    Rng lr = rng.split("locate");
    return locate_reduced_signals(view, chi, s, delta, p_inner, lr, c);
}

}  // namespace bsft
