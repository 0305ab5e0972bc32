// SPDX-License-Identifier: Apache-2.0
#include "bsft/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

#include "bsft/downsampling.hpp"

namespace bsft {

cvec dft_direct(const cvec& x) {
    const auto n = static_cast<index_t>(x.size());
    cvec out(x.size());
    for (index_t f = 0; f < n; ++f) {
        cplx s{};
        for (index_t t = 0; t < n; ++t) s += x[static_cast<std::size_t>(t)] * omega(-mod(f * t, n), n);
        out[static_cast<std::size_t>(f)] = s / static_cast<double>(n);
    }
    return out;
}

cvec idft_direct(const cvec& xhat) {
    const auto n = static_cast<index_t>(xhat.size());
    cvec out(xhat.size());
    for (index_t t = 0; t < n; ++t) {
        cplx s{};
        for (index_t f = 0; f < n; ++f) s += xhat[static_cast<std::size_t>(f)] * omega(mod(f * t, n), n);
        out[static_cast<std::size_t>(t)] = s;
    }
    return out;
}

double tail_error_exhaustive(const cvec& xhat, index_t k0, index_t k1) {
    auto e = block_energies(xhat, k1);
    const auto m = static_cast<index_t>(e.size());
    if (k0 >= m) return 0.0;
    double subsets = 1;
    for (index_t i = 0; i < k0; ++i) subsets = subsets * static_cast<double>(m - i) / static_cast<double>(i + 1);
    if (subsets > 2e7) throw InvalidInput("tail_error_exhaustive: too many subsets");
    const double total = std::accumulate(e.begin(), e.end(), 0.0);
    double best = total;
    std::vector<index_t> pick(static_cast<std::size_t>(k0));
    std::iota(pick.begin(), pick.end(), index_t{0});
    while (true) {
        double kept = 0;
        for (index_t j : pick) kept += e[static_cast<std::size_t>(j)];
        best = std::min(best, std::max(0.0, total - kept));
        index_t i = k0 - 1;
        while (i >= 0 && pick[static_cast<std::size_t>(i)] == m - k0 + i) --i;
        if (i < 0) break;
        ++pick[static_cast<std::size_t>(i)];
        for (index_t q = i + 1; q < k0; ++q) pick[static_cast<std::size_t>(q)] = pick[static_cast<std::size_t>(q - 1)] + 1;
    }
    return best;
}

cvec exact_hashed_spectrum(const cvec& xhat, const FlatFilter& g, const HashParams& p) {
    const auto n = static_cast<index_t>(xhat.size());
    if (n != p.m || g.n() != n) throw InvalidInput("exact_hashed_spectrum: size mismatch");
    cvec out(static_cast<std::size_t>(p.B));
    const index_t w = p.m / p.B;
    for (index_t b = 0; b < p.B; ++b) {
        cplx s{};
        for (index_t f = 0; f < n; ++f) {
            const cplx v = xhat[static_cast<std::size_t>(f)];
            if (v == cplx{}) continue;
            s += v * g.freq(p.permute(f) - b * w) * omega(mod(mod(p.sigma * p.shift, n) * f, n), n);
        }
        out[static_cast<std::size_t>(b)] = s;
    }
    return out;
}

std::vector<cvec> exact_downsampled_spectra(const cvec& xhat, const FlatFilter& g, index_t k1) {
    std::vector<cvec> out;
    for (index_t r = 0; r < 2 * k1; ++r) out.push_back(z_spectrum_exact(xhat, g, k1, r));
    return out;
}

namespace {

// Smallest integer s >= 1 with |z|^2 s >= total, matching is_covered.
index_t cover_cost(double z2, double total) {
    if (z2 >= total) return 1;
    auto s = static_cast<index_t>(std::ceil(total / z2));
    while (z2 * static_cast<double>(s) < total) ++s;
    while (s > 1 && z2 * static_cast<double>(s - 1) >= total) --s;
    return s;
}

}  // namespace

CoveringSolution optimal_covering_budget(const std::vector<cvec>& zhat_all, const cvec& xhat, index_t k0, index_t k1,
                                         double alpha) {
    if (static_cast<index_t>(zhat_all.size()) != 2 * k1) throw InvalidInput("covering: need 2 k1 spectra");
    if (!(alpha >= 0 && alpha < 1)) throw InvalidInput("covering: alpha must lie in [0, 1)");
    const auto e = block_energies(xhat, k1);
    const auto m = static_cast<index_t>(e.size());
    const index_t k = std::min(k0, m);
    if (k > 20 || (index_t{1} << k) * 2 * k1 > (index_t{1} << 25)) throw InvalidInput("covering: instance too large");

    std::vector<index_t> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), index_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](index_t a, index_t b) { return e[static_cast<std::size_t>(a)] > e[static_cast<std::size_t>(b)]; });
    std::vector<index_t> top(order.begin(), order.begin() + k);

    CoveringSolution sol;
    std::vector<double> mask_energy(std::size_t{1} << k, 0.0);
    for (std::size_t mask = 1; mask < mask_energy.size(); ++mask) {
        int low = __builtin_ctzll(mask);
        mask_energy[mask] = mask_energy[mask & (mask - 1)] + e[static_cast<std::size_t>(top[static_cast<std::size_t>(low)])];
    }
    sol.target_energy = (1 - alpha) * mask_energy.back();
    sol.budgets.assign(static_cast<std::size_t>(2 * k1), 0);
    if (sol.target_energy <= 0) {
        sol.feasible = true;
        return sol;
    }

    // Per r, covering the i largest tracked entries costs the threshold of the i-th.
    struct Option {
        std::uint32_t mask;
        index_t cost;
    };
    std::vector<std::vector<Option>> options(zhat_all.size());
    for (std::size_t r = 0; r < zhat_all.size(); ++r) {
        const cvec& z = zhat_all[r];
        if (static_cast<index_t>(z.size()) != m) throw InvalidInput("covering: spectrum length must be n/k1");
        const double total = energy(z);
        if (!(total > 0)) continue;
        std::vector<int> idx(static_cast<std::size_t>(k));
        std::iota(idx.begin(), idx.end(), 0);
        auto z2 = [&](int i) { return std::norm(z[static_cast<std::size_t>(top[static_cast<std::size_t>(i)])]); };
        std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return z2(a) > z2(b); });
        std::uint32_t mask = 0;
        for (int i : idx) {
            if (!(z2(i) > 0)) break;
            mask |= std::uint32_t{1} << i;
            index_t cost = cover_cost(z2(i), total);
            if (!options[r].empty() && options[r].back().cost == cost)
                options[r].back().mask = mask;
            else
                options[r].push_back({mask, cost});
        }
    }

    constexpr index_t kInf = std::numeric_limits<index_t>::max() / 4;
    const std::size_t states = std::size_t{1} << k;
    std::vector<index_t> dp(states, kInf);
    dp[0] = 0;
    // prev[r][mask] and pick[r][mask] rebuild the budgets.
    std::vector<std::vector<std::uint32_t>> prev(zhat_all.size(), std::vector<std::uint32_t>(states));
    std::vector<std::vector<std::uint8_t>> pick(zhat_all.size(), std::vector<std::uint8_t>(states, 0));
    for (std::size_t r = 0; r < zhat_all.size(); ++r) {
        std::vector<index_t> next = dp;
        auto& pr = prev[r];
        auto& pk = pick[r];
        for (std::size_t s = 0; s < states; ++s) pr[s] = static_cast<std::uint32_t>(s);
        for (std::size_t s = 0; s < states; ++s) {
            if (dp[s] >= kInf) continue;
            for (std::size_t o = 0; o < options[r].size(); ++o) {
                const std::size_t t = s | options[r][o].mask;
                const index_t v = dp[s] + options[r][o].cost;
                if (v < next[t]) {
                    next[t] = v;
                    pr[t] = static_cast<std::uint32_t>(s);
                    pk[t] = static_cast<std::uint8_t>(o + 1);
                }
            }
        }
        dp = std::move(next);
    }

    std::size_t best = 0;
    index_t best_cost = kInf;
    for (std::size_t s = 0; s < states; ++s)
        if (dp[s] < best_cost && mask_energy[s] >= sol.target_energy * (1 - 1e-12)) best_cost = dp[s], best = s;
    if (best_cost >= kInf) return sol;

    sol.feasible = true;
    sol.total = best_cost;
    sol.covered_energy = mask_energy[best];
    for (int i = 0; i < k; ++i)
        if (best >> i & 1) sol.covered.push_back(top[static_cast<std::size_t>(i)]);
    std::sort(sol.covered.begin(), sol.covered.end());
    std::size_t s = best;
    for (std::size_t r = zhat_all.size(); r-- > 0;) {
        if (pick[r][s]) sol.budgets[r] = options[r][pick[r][s] - 1u].cost;
        s = prev[r][s];
    }
    return sol;
}

}  // namespace bsft
