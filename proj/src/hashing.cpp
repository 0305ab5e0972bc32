// SPDX-License-Identifier: Apache-2.0
#include "bsft/hashing.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace bsft {
namespace {

index_t floor_div(index_t a, index_t b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }
index_t ceil_div(index_t a, index_t b) { return -floor_div(-a, b); }

using Entries = std::vector<std::pair<index_t, cplx>>;

Entries entries_of(const SparseSpectrum& s) { return {s.entries().begin(), s.entries().end()}; }

// X_t at t = sigma s + shift, s = -h..h, by direct summation.
cvec direct_range(const Entries& xhat, index_t n, index_t h, index_t sigma, index_t shift) {
    cvec out(static_cast<std::size_t>(2 * h + 1));
    for (const auto& [f, v] : xhat) {
        index_t fm = mod(f, n);
        cplx step = omega(mod(fm * mod(sigma, n), n), n);
        cplx ph{};
        for (index_t s = -h; s <= h; ++s) {
            // resynchronize the phasor periodically to bound drift
            if ((s + h) % 64 == 0) ph = v * omega(mod(fm * mod(sigma * s + shift, n), n), n);
            out[static_cast<std::size_t>(s + h)] += ph;
            ph *= step;
        }
    }
    return out;
}

cvec semi_equi_range(const Entries& xhat, index_t n, index_t h, double zeta, index_t sigma, index_t shift) {
    if (xhat.empty()) return cvec(static_cast<std::size_t>(2 * h + 1));
    const index_t pass = std::max<index_t>(64, pow2_ceil(static_cast<double>(h)));
    const index_t len = 4 * pass;
    if (2 * len > n) {
        if (static_cast<double>(xhat.size()) * static_cast<double>(2 * h + 1) <= 8.0 * static_cast<double>(n) * log2_exact(n))
            return direct_range(xhat, n, h, sigma, shift);
        cvec dense(static_cast<std::size_t>(n));
        for (const auto& [f, v] : xhat) dense[static_cast<std::size_t>(mod(f, n))] += v;
        fft_inplace(dense, true);
        cvec out(static_cast<std::size_t>(2 * h + 1));
        for (index_t s = -h; s <= h; ++s) out[static_cast<std::size_t>(s + h)] = dense[static_cast<std::size_t>(mod(sigma * s + shift, n))];
        return out;
    }
    const index_t k = n / (2 * pass);
    auto filt = SharpFilter::make(n, k, zeta);
    const index_t w = filt->width(), step = n / len;
    cvec yhat(static_cast<std::size_t>(len));
    for (const auto& [f, v] : xhat) {
        // permuted spectrum: X_{sigma t + shift} has coefficient v w^{f shift} at sigma f
        index_t g = centered(mod(sigma, n) * mod(f, n), n);
        cplx val = v * omega(mod(mod(f, n) * mod(shift, n), n), n);
        for (index_t i = ceil_div(g - w, step); i <= floor_div(g + w, step); ++i)
            yhat[static_cast<std::size_t>(mod(i, len))] += val * filt->freq(i * step - g);
    }
    fft_inplace(yhat, true);
    const double scale = static_cast<double>(step);
    cvec out(static_cast<std::size_t>(2 * h + 1));
    for (index_t s = -h; s <= h; ++s) out[static_cast<std::size_t>(s + h)] = scale * yhat[static_cast<std::size_t>(mod(s, len))];
    return out;
}

// Cost model used to pick direct summation when it is cheaper.
bool direct_is_cheaper(std::size_t entries, index_t targets, index_t k1) {
    double direct = static_cast<double>(entries) * static_cast<double>(targets);
    double fast = static_cast<double>(entries) * 400.0 + static_cast<double>(targets) * 2.0 * static_cast<double>(k1) * 40.0;
    return direct <= fast;
}

// chi at j_t + (m/2) s, direct summation.
BlockValues direct_block(const Entries& chi, index_t n, index_t k1, index_t lo, index_t hi, index_t radius,
                         index_t sigma, index_t shift) {
    const index_t m = n / k1, two_k1 = 2 * k1;
    BlockValues out;
    out.radius = radius;
    out.k1 = k1;
    out.values.assign(static_cast<std::size_t>((2 * radius + 1) * two_k1), cplx{});
    cvec q(static_cast<std::size_t>(two_k1));
    for (index_t t = lo; t <= hi; ++t) {
        index_t j = centered(sigma * (shift + t), m);
        std::fill(q.begin(), q.end(), cplx{});
        for (const auto& [f, v] : chi) q[static_cast<std::size_t>(mod(f, two_k1))] += v * omega(mod(mod(f, n) * mod(j, n), n), n);
        fft_inplace(q, true);
        std::copy(q.begin(), q.end(), out.values.begin() + (t + radius) * two_k1);
    }
    return out;
}

}  // namespace

index_t HashParams::bucket(index_t f) const {
    index_t w = m / B;
    return mod(floor_div(permute(f) + w / 2, w), B);
}

index_t HashParams::offset(index_t f, index_t f2) const { return centered(permute(f2) - bucket(f) * (m / B), m); }

HashParams random_hash_params(index_t m, index_t B, Rng& rng) {
    if (!is_pow2(m)) throw InvalidInput("hash domain must be a power of two");
    HashParams p;
    p.m = m;
    p.B = B;
    p.sigma = 2 * rng.uniform_int(0, std::max<index_t>(1, m / 2)) + 1;
    p.shift = rng.uniform_int(0, m);
    return p;
}

index_t bucket_count(double b, index_t m) { return std::clamp<index_t>(pow2_ceil(b), 2, m / 2); }

cvec bucket_spectrum(cvec u) {
    fft_inplace(u, false);
    const double s = 1.0 / static_cast<double>(u.size());
    for (auto& z : u) z *= s;
    return u;
}

cvec semi_equi_inverse_fft(const std::vector<std::pair<index_t, cplx>>& xhat, index_t n, index_t k, double zeta,
                           index_t sigma, index_t shift) {
    if (!is_pow2(n)) throw InvalidInput("semi-equispaced FFT: n must be a power of two");
    if (k < 0 || static_cast<index_t>(xhat.size()) > std::max<index_t>(k, 1))
        throw InvalidInput("semi-equispaced FFT: spectrum has more than k entries");
    if (sigma % 2 == 0) throw InvalidInput("semi-equispaced FFT: sigma must be odd");
    return semi_equi_range(xhat, n, (k + 1) / 2, zeta, sigma, shift);
}

cvec semi_equi_inverse_fft(const SparseSpectrum& xhat, index_t k, double zeta, index_t sigma, index_t shift) {
    return semi_equi_inverse_fft(entries_of(xhat), xhat.n(), k, zeta, sigma, shift);
}

double semi_equi_zeta(index_t n, double tol) { return std::max(tol, 2e-13 * std::sqrt(static_cast<double>(n))); }

BlockValues semi_equi_inverse_block_fft(const SparseSpectrum& chi, index_t k1, index_t radius, double zeta,
                                        index_t sigma, index_t shift) {
    const index_t n = chi.n();
    if (!is_pow2(k1) || k1 < 2 || 4 * k1 > n) throw InvalidInput("block semi-equispaced FFT: bad k1");
    if (sigma % 2 == 0) throw InvalidInput("block semi-equispaced FFT: sigma must be odd");
    const index_t m = n / k1, two_k1 = 2 * k1, half = k1 / 2, n2 = 2 * m;
    BlockValues out;
    out.radius = radius;
    out.k1 = k1;
    out.values.assign(static_cast<std::size_t>((2 * radius + 1) * two_k1), cplx{});
    if (chi.empty()) return out;

    // Filter at rate k1/2 and fold the 2k1 residues of f into one inverse
    // DFT per sample position.
    auto gs = SharpFilter::make(n, k1, zeta);
    const index_t w = gs->width();
    std::map<index_t, cvec> acc;
    for (const auto& [f, v] : chi.entries()) {
        auto b = static_cast<std::size_t>(mod(f, two_k1));
        for (index_t i = ceil_div(f - w, half); i <= floor_div(f + w, half); ++i) {
            auto& slot = acc[centered(i, n2)];
            if (slot.empty()) slot.assign(static_cast<std::size_t>(two_k1), cplx{});
            slot[b] += static_cast<double>(half) * v * gs->freq(i * half - f);
        }
    }
    std::vector<Entries> per_shift(static_cast<std::size_t>(two_k1));
    for (auto& [i, slot] : acc) {
        fft_inplace(slot, true);
        for (index_t s = 0; s < two_k1; ++s) per_shift[static_cast<std::size_t>(s)].emplace_back(i, slot[static_cast<std::size_t>(s)]);
    }

    // Length-2m evaluation; targets are only known modulo m, so evaluate at
    // both lifts and keep the one inside (-m/2, m/2].
    const double zeta2 = std::max(zeta, semi_equi_zeta(n2, 0.0));
    const index_t base = mod(sigma * shift, n2);
    for (index_t s = 0; s < two_k1; ++s) {
        const auto& e = per_shift[static_cast<std::size_t>(s)];
        cvec a = semi_equi_range(e, n2, radius, zeta2, sigma, base);
        cvec b = semi_equi_range(e, n2, radius, zeta2, sigma, base + m);
        for (index_t t = -radius; t <= radius; ++t) {
            index_t u = centered(sigma * (shift + t), n2);
            bool inside = 2 * u > -m && 2 * u <= m;
            out.values[static_cast<std::size_t>((t + radius) * two_k1 + s)] =
                inside ? a[static_cast<std::size_t>(t + radius)] : b[static_cast<std::size_t>(t + radius)];
        }
    }
    return out;
}

cvec hash_to_bins(const CountedSignal& x, const SparseSpectrum& chi, const FlatFilter& g, const HashParams& p,
                  double tol) {
    const index_t n = p.m;
    index_t lo = -g.radius(), hi = g.radius();
    if (g.full_support()) lo = -n / 2 + 1, hi = n / 2;
    const index_t h = std::max(-lo, hi);
    cvec chi_vals;
    if (!chi.empty()) {
        Entries e = entries_of(chi);
        const index_t base = mod(p.sigma * p.shift, n);
        if (direct_is_cheaper(e.size(), 2 * h + 1, 1))
            chi_vals = direct_range(e, n, h, p.sigma, base);
        else
            chi_vals = semi_equi_range(e, n, h, semi_equi_zeta(n, tol), p.sigma, base);
    }
    cvec u(static_cast<std::size_t>(p.B));
    const double scale = static_cast<double>(p.B) / static_cast<double>(n);
    for (index_t t = lo; t <= hi; ++t) {
        double w = g.time(t);
        if (w == 0.0) continue;
        cplx v = x.read(p.sigma * (p.shift + t));
        if (!chi_vals.empty()) v -= chi_vals[static_cast<std::size_t>(t + h)];
        u[static_cast<std::size_t>(mod(t, p.B))] += scale * w * v;
    }
    return bucket_spectrum(std::move(u));
}

std::vector<cvec> hash_to_bins_reduced(const DownsampleView& view, const SparseSpectrum& chi,
                                       const std::vector<std::shared_ptr<const FlatFilter>>& filters, index_t sigma,
                                       index_t shift, double tol) {
    const index_t k1 = view.k1, m = view.m, n = view.n, two_k1 = 2 * k1;
    if (static_cast<index_t>(filters.size()) != two_k1) throw InvalidInput("hash_to_bins_reduced: need 2k1 filters");
    if (sigma % 2 == 0) throw InvalidInput("hash_to_bins_reduced: sigma must be odd");

    auto range_of = [&](const FlatFilter& g) {
        return g.full_support() ? std::pair<index_t, index_t>{-m / 2 + 1, m / 2}
                                : std::pair<index_t, index_t>{-g.radius(), g.radius()};
    };
    index_t lo = 0, hi = -1;
    for (const auto& g : filters) {
        if (!g) continue;
        if (g->n() != m) throw InvalidInput("hash_to_bins_reduced: filter length must be n/k1");
        auto [a, b] = range_of(*g);
        lo = std::min(lo, a);
        hi = std::max(hi, b);
    }
    std::vector<cvec> out(static_cast<std::size_t>(two_k1));
    if (hi < lo) return out;
    const index_t radius = std::max(-lo, hi);

    BlockValues chi_vals;
    const bool has_chi = !chi.empty();
    if (has_chi) {
        Entries e = entries_of(chi);
        if (direct_is_cheaper(e.size(), 2 * radius + 1, k1))
            chi_vals = direct_block(e, n, k1, lo, hi, radius, sigma, shift);
        else
            chi_vals = semi_equi_inverse_block_fft(chi, k1, radius, semi_equi_zeta(n, tol), sigma, shift);
    }

    // Filter weights of the downsampling window per alias i, for each target.
    std::vector<cvec> u(static_cast<std::size_t>(two_k1));
    for (index_t r = 0; r < two_k1; ++r)
        if (filters[static_cast<std::size_t>(r)]) u[static_cast<std::size_t>(r)].assign(static_cast<std::size_t>(filters[static_cast<std::size_t>(r)]->buckets()), cplx{});

    cvec xs(static_cast<std::size_t>(two_k1));
    std::vector<char> loaded(static_cast<std::size_t>(two_k1));
    std::vector<double> gw(static_cast<std::size_t>(k1));
    for (index_t t = lo; t <= hi; ++t) {
        const index_t j = centered(sigma * (shift + t), m);
        std::fill(loaded.begin(), loaded.end(), 0);
        for (index_t i = 0; i < k1; ++i) gw[static_cast<std::size_t>(i)] = view.filter->time(centered(j + m * i, n));
        for (index_t r = 0; r < two_k1; ++r) {
            const auto& g = filters[static_cast<std::size_t>(r)];
            if (!g) continue;
            double h = g->time(t);
            if (h == 0.0 || (!g->full_support() && (t < -g->radius() || t > g->radius()))) continue;
            cplx z{};
            for (index_t i = 0; i < k1; ++i) {
                double w = gw[static_cast<std::size_t>(i)];
                if (w == 0.0) continue;
                auto s = static_cast<std::size_t>(mod(2 * i + r, two_k1));
                if (!loaded[s]) {
                    xs[s] = view.x->read(j + (m / 2) * static_cast<index_t>(s));
                    loaded[s] = 1;
                }
                cplx v = xs[s];
                if (has_chi) v -= chi_vals.at(t, static_cast<index_t>(s));
                z += w * v;
            }
            z /= static_cast<double>(k1);
            const index_t B = g->buckets();
            u[static_cast<std::size_t>(r)][static_cast<std::size_t>(mod(t, B))] += (static_cast<double>(B) / static_cast<double>(m)) * h * z;
        }
    }
    for (index_t r = 0; r < two_k1; ++r)
        if (filters[static_cast<std::size_t>(r)]) out[static_cast<std::size_t>(r)] = bucket_spectrum(std::move(u[static_cast<std::size_t>(r)]));
    return out;
}

std::vector<double> estimate_energies(const DownsampleView& view, const SparseSpectrum& chi, index_t k0, double delta,
                                      Rng& rng, const Constants& c) {
    const index_t B = bucket_count(c.energy_buckets * static_cast<double>(k0) / (delta * delta), view.m);
    auto h = FlatFilter::make(view.m, B, filter_order(delta, c.filter_order), c.flat_c);
    HashParams p = random_hash_params(view.m, B, rng);
    std::vector<std::shared_ptr<const FlatFilter>> filters(static_cast<std::size_t>(2 * view.k1), h);
    auto spectra = hash_to_bins_reduced(view, chi, filters, p.sigma, p.shift, c.tol);
    std::vector<double> gamma;
    for (const auto& s : spectra) gamma.push_back(energy(s));
    return gamma;
}

}  // namespace bsft
