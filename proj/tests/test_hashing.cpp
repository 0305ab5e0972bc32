// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <set>

#include "bsft/downsampling.hpp"
#include "bsft/fft.hpp"
#include "bsft/hashing.hpp"
#include "bsft/oracles.hpp"
#include "support.hpp"

using namespace bsft;
using namespace bsft::test;

namespace {

cvec dense_at(const cvec& time, const std::vector<index_t>& idx) {
    const auto n = static_cast<index_t>(time.size());
    cvec out;
    for (index_t t : idx) out.push_back(time[static_cast<std::size_t>(mod(t, n))]);
    return out;
}

}  // namespace

TEST_SUITE("hashing") {

TEST_CASE("permutations are approximately pairwise independent") {
    const index_t m = 16;
    for (index_t i = 0; i < m; ++i)
        for (index_t ip = 0; ip < m; ++ip) {
            if (i == ip) continue;
            for (index_t t = 0; t <= 4; ++t) {
                int hits = 0;
                for (index_t s = 1; s < m; s += 2) {
                    HashParams p{m, 4, s, 0};
                    hits += std::abs(centered(p.permute(i) - p.permute(ip), m)) <= t;
                }
                CHECK(static_cast<double>(hits) / (m / 2) <= 4.0 * static_cast<double>(t) / static_cast<double>(m) + 1e-12);
            }
        }
}

TEST_CASE("identity permutation and bucket rounding") {
    HashParams p{64, 8, 1, 0};
    for (index_t f = -31; f <= 32; ++f) {
        CHECK(p.permute(f) == f);
        CHECK(p.bucket(f) == mod(static_cast<index_t>(std::floor(static_cast<double>(f) * 8 / 64 + 0.5)), 8));
        CHECK(std::abs(p.offset(f, f)) <= 4);
    }
    for (index_t s = 1; s < 64; s += 2) {
        std::set<index_t> img;
        HashParams q{64, 8, s, 5};
        for (index_t f = 0; f < 64; ++f) img.insert(q.permute(f));
        CHECK(img.size() == 64);
    }
}

TEST_CASE("random hash parameters draw odd sigma and a shift in range") {
    Rng rng(41);
    std::set<index_t> sigmas;
    for (int i = 0; i < 500; ++i) {
        HashParams p = random_hash_params(64, 8, rng);
        CHECK(p.sigma % 2 == 1);
        CHECK(p.sigma > 0);
        CHECK(p.sigma < 64);
        CHECK(p.shift >= 0);
        CHECK(p.shift < 64);
        sigmas.insert(p.sigma);
    }
    CHECK(sigmas.size() == 32);
    CHECK(bucket_count(1000, 64) == 32);
    CHECK(bucket_count(0.1, 64) == 2);
    CHECK(bucket_count(5, 64) == 8);
}

TEST_CASE("time-domain hashing matches the exact bucket formula") {
    Rng rng(42);
    const index_t n = 256, B = 16;
    auto g = FlatFilter::make(n, B, 8);
    for (int rep = 0; rep < 10; ++rep) {
        cvec x = random_vector(n, rng);
        cvec xhat = dft(x);
        HashParams p = random_hash_params(n, B, rng);
        cvec u = bucket_spectrum(hash_time_domain([&](index_t t) { return x[static_cast<std::size_t>(mod(t, n))]; }, *g, p));
        cvec exact = exact_hashed_spectrum(xhat, *g, p);
        CHECK(max_abs_diff(u, exact) <= 1e-9 * max_abs(exact));
    }
    cvec zero(static_cast<std::size_t>(n));
    HashParams p = random_hash_params(n, B, rng);
    for (auto v : hash_time_domain([&](index_t) { return cplx{}; }, *g, p)) CHECK(v == cplx{});
    // single frequency: one term per bucket
    cvec delta(static_cast<std::size_t>(n));
    delta[37] = cplx{2, 1};
    cvec one = exact_hashed_spectrum(delta, *g, p);
    for (index_t b = 0; b < B; ++b) {
        cplx expect = delta[37] * g->freq(p.permute(37) - b * (n / B)) * omega(mod(mod(p.sigma * p.shift, n) * 37, n), n);
        CHECK(std::abs(one[static_cast<std::size_t>(b)] - expect) <= 1e-12);
    }
}

TEST_CASE("semi-equispaced inverse transform") {
    const index_t n = 1024, k = 8;
    const double zeta = 1e-9;
    SparseSpectrum empty(n);
    for (auto v : semi_equi_inverse_fft(empty, k, zeta)) CHECK(v == cplx{});

    SparseSpectrum tone(n);
    tone.set(77, 1);
    cvec y = semi_equi_inverse_fft(tone, k, zeta);
    for (index_t j = -k / 2; j <= k / 2; ++j)
        CHECK(std::abs(y[static_cast<std::size_t>(j + k / 2)] - omega(mod(77 * j, n), n)) <= zeta);

    Rng rng(43);
    for (int rep = 0; rep < 20; ++rep) {
        SparseSpectrum s = random_sparse(n, 8, rng);
        const index_t sigma = rep % 2 ? 1 : 2 * rng.uniform_int(0, n / 2) + 1;
        const index_t shift = rep % 2 ? 0 : rng.uniform_int(0, n);
        cvec fast = semi_equi_inverse_fft(s, 8, zeta, sigma, shift);
        std::vector<index_t> idx;
        for (index_t j = -4; j <= 4; ++j) idx.push_back(sigma * j + shift);
        cvec dense = dense_at(idft(s.to_dense()), idx);
        CHECK(max_abs_diff(fast, dense) <= zeta * std::sqrt(s.norm2()));
    }
    CHECK_THROWS_AS(semi_equi_inverse_fft(random_sparse(n, 9, rng), 8, zeta), InvalidInput);
    CHECK_THROWS_AS(semi_equi_inverse_fft(tone, 8, zeta, 2, 0), InvalidInput);
}

TEST_CASE("block semi-equispaced values of every shifted reduced signal") {
    const index_t n = 1024, k1 = 4, m = n / k1, radius = 12;
    SparseSpectrum empty(n);
    for (auto v : semi_equi_inverse_block_fft(empty, k1, radius, 1e-10).values) CHECK(v == cplx{});
    Rng rng(44);
    for (int rep = 0; rep < 10; ++rep) {
        SparseSpectrum chi = random_block_sparse(n, 2, k1, rng);
        const index_t sigma = 2 * rng.uniform_int(0, m / 2) + 1, shift = rng.uniform_int(0, m);
        BlockValues bv = semi_equi_inverse_block_fft(chi, k1, radius, 1e-10, sigma, shift);
        cvec dense = idft(chi.to_dense());
        double err = 0;
        for (index_t t = -radius; t <= radius; ++t) {
            const index_t j = centered(sigma * (shift + t), m);
            for (index_t s = 0; s < 2 * k1; ++s)
                err = std::max(err, std::abs(bv.at(t, s) - dense[static_cast<std::size_t>(mod(j + (m / 2) * s, n))]));
        }
        CHECK(err <= 1e-8 * std::sqrt(chi.norm2()));
    }
}

TEST_CASE("hash to bins subtracts the estimate and matches the residual formula") {
    Rng rng(45);
    const index_t n = 512, B = 16;
    auto g = FlatFilter::make(n, B, 8);
    for (int rep = 0; rep < 10; ++rep) {
        Signal x(random_vector(n, rng));
        cvec xhat = dft(x.values());
        SparseSpectrum chi = random_sparse(n, 6, rng);
        SampleCounter c(n);
        CountedSignal cx(x, c);
        HashParams p = random_hash_params(n, B, rng);
        cvec u = hash_to_bins(cx, chi, *g, p);
        CHECK(max_abs_diff(u, exact_hashed_spectrum(subtract(xhat, chi), *g, p)) <= 1e-8 * std::sqrt(chi.norm2()));
        // reads only the filter window
        const index_t window = g->full_support() ? n : 2 * g->radius() + 1;
        CHECK(c.distinct() <= window);

        SparseSpectrum none(n);
        cvec plain = hash_to_bins(cx, none, *g, p);
        cvec direct = bucket_spectrum(hash_time_domain([&](index_t t) { return x.values()[static_cast<std::size_t>(mod(t, n))]; }, *g, p));
        CHECK(max_abs_diff(plain, direct) == 0.0);
    }
    // zero residual
    SparseSpectrum chi = random_sparse(n, 12, rng);
    Signal x = idft_signal(chi.to_dense());
    SampleCounter c(n);
    CountedSignal cx(x, c);
    HashParams p = random_hash_params(n, B, rng);
    CHECK(max_abs(hash_to_bins(cx, chi, *g, p)) <= 1e-8 * std::sqrt(chi.norm2()));
}

TEST_CASE("reduced hashing matches per-shift exact hashings") {
    Rng rng(46);
    const index_t n = 2048, k1 = 4, m = n / k1;
    for (int rep = 0; rep < 6; ++rep) {
        Signal x(random_vector(n, rng));
        cvec xhat = dft(x.values());
        SampleCounter c(n);
        CountedSignal cx(x, c);
        auto view = make_downsample_view(cx, nullptr, k1, 0.1, 1.0);
        const bool mixed = rep % 2 == 1;
        SparseSpectrum chi = mixed ? random_block_sparse(n, 2, k1, rng) : SparseSpectrum(n);
        std::vector<std::shared_ptr<const FlatFilter>> filters(static_cast<std::size_t>(2 * k1));
        for (index_t r = 0; r < 2 * k1; ++r)
            filters[static_cast<std::size_t>(r)] = FlatFilter::make(m, mixed ? index_t{2} << (r % 5) : 16, 4);
        const index_t sigma = 2 * rng.uniform_int(0, m / 2) + 1, shift = rng.uniform_int(0, m);
        auto u = hash_to_bins_reduced(view, chi, filters, sigma, shift);
        auto z = exact_downsampled_spectra(subtract(xhat, chi), *view.filter, k1);
        const double scale = mixed ? std::sqrt(chi.norm2()) : 1.0;
        for (index_t r = 0; r < 2 * k1; ++r) {
            const auto& g = *filters[static_cast<std::size_t>(r)];
            HashParams p{m, g.buckets(), sigma, shift};
            cvec exact = exact_hashed_spectrum(z[static_cast<std::size_t>(r)], g, p);
            CHECK(max_abs_diff(u[static_cast<std::size_t>(r)], exact) <= 1e-8 * scale);
        }
    }
}

TEST_CASE("reduced hashing skips zero budgets") {
    Rng rng(47);
    const index_t n = 1 << 14, k1 = 8, m = n / k1;
    Signal x(random_vector(n, rng));
    auto run = [&](index_t buckets) {
        SampleCounter c(n);
        CountedSignal cx(x, c);
        auto view = make_downsample_view(cx, nullptr, k1, 0.1, 0.25, 0.25);
        std::vector<std::shared_ptr<const FlatFilter>> filters(static_cast<std::size_t>(2 * k1));
        filters[5] = FlatFilter::make(m, buckets, 2, 0.25);
        auto u = hash_to_bins_reduced(view, SparseSpectrum(n), filters, 3, 7);
        for (index_t r = 0; r < 2 * k1; ++r) CHECK(u[static_cast<std::size_t>(r)].empty() == (r != 5));
        return c.distinct();
    };
    const index_t small = run(8), large = run(64);
    CHECK(small > 0);
    CHECK(large > 4 * small);
    CHECK(large < 16 * small);

    SampleCounter c(n);
    CountedSignal cx(x, c);
    auto view = make_downsample_view(cx, nullptr, k1, 0.1);
    std::vector<std::shared_ptr<const FlatFilter>> none(static_cast<std::size_t>(2 * k1));
    auto u = hash_to_bins_reduced(view, SparseSpectrum(n), none, 1, 0);
    CHECK(c.total() == 0);
    CHECK_THROWS_AS(hash_to_bins_reduced(view, SparseSpectrum(n), none, 2, 0), InvalidInput);
    none.pop_back();
    CHECK_THROWS_AS(hash_to_bins_reduced(view, SparseSpectrum(n), none, 1, 0), InvalidInput);
}

TEST_CASE("leakage into a bucket averages below 10/B of the energy") {
    const index_t m = 64, B = 8;
    auto g = FlatFilter::make(m, B, 4);
    Rng rng(48);
    cvec xhat = random_vector(m, rng);
    const double total = energy(xhat);
    for (index_t f = 0; f < m; ++f) {
        double mean = 0;
        for (index_t s = 1; s < m; s += 2) {
            HashParams p{m, B, s, 0};
            for (index_t fp = 0; fp < m; ++fp) {
                if (fp == f) continue;
                const double gv = g->freq(p.offset(f, fp));
                mean += std::norm(xhat[static_cast<std::size_t>(fp)]) * gv * gv;
            }
        }
        mean /= static_cast<double>(m / 2);
        CHECK(mean <= 10.0 / static_cast<double>(B) * total);
    }
}

TEST_CASE("energy estimates") {
    Rng rng(49);
    const index_t n = 4096, k1 = 8, k0 = 1;
    const double delta = 0.25;
    Constants c = Constants::nominal();

    SparseSpectrum chi = random_sparse(n, 5, rng);
    Signal zero_resid = idft_signal(chi.to_dense());
    {
        SampleCounter cnt(n);
        CountedSignal cx(zero_resid, cnt);
        auto view = make_downsample_view(cx, nullptr, k1, delta);
        Rng er(1);
        for (double g : estimate_energies(view, chi, k0, delta, er, c)) CHECK(g <= 1e-16 * chi.norm2());
    }

    Signal x(random_vector(n, rng));
    SampleCounter cnt(n);
    CountedSignal cx(x, cnt);
    auto view = make_downsample_view(cx, nullptr, k1, delta);
    auto z = exact_downsampled_spectra(dft(x.values()), *view.filter, k1);
    std::vector<double> mean(static_cast<std::size_t>(2 * k1), 0.0);
    const int trials = 200;
    for (int t = 0; t < trials; ++t) {
        Rng er = rng.split(static_cast<std::uint64_t>(t));
        auto g = estimate_energies(view, SparseSpectrum(n), k0, delta, er, c);
        for (std::size_t r = 0; r < g.size(); ++r) mean[r] += g[r] / trials;
    }
    for (std::size_t r = 0; r < mean.size(); ++r) CHECK(mean[r] <= 3 * energy(z[r]) * 1.2);
}

}  // TEST_SUITE
