// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "bsft/downsampling.hpp"
#include "bsft/fft.hpp"
#include "bsft/harness.hpp"
#include "bsft/oracles.hpp"
#include "support.hpp"

using namespace bsft;
using namespace bsft::test;

namespace {

cvec entries_of_z(const DownsampleView& v, index_t r) {
    cvec z(static_cast<std::size_t>(v.m));
    for (index_t j = 0; j < v.m; ++j) z[static_cast<std::size_t>(j)] = z_entry(v, r, j);
    return z;
}

}  // namespace

TEST_SUITE("downsampling") {

TEST_CASE("filter order rounds up to even") {
    CHECK(filter_order(0.05) == 50);
    CHECK(filter_order(0.01) == 70);
    CHECK(filter_order(0.3, 1.0) == 2);
    CHECK(filter_order(0.05, 0.25) == 2);
    CHECK(filter_order(0.01, 0.5) == 4);
    CHECK_THROWS_AS(filter_order(0.0), InvalidInput);
}

TEST_CASE("zero signal gives zero entries") {
    Signal x(cvec(256));
    SampleCounter c(256);
    CountedSignal cx(x, c);
    auto v = make_downsample_view(cx, nullptr, 4, 0.05);
    for (index_t r = 0; r < 8; ++r)
        for (index_t j = 0; j < 64; j += 7) CHECK(z_entry(v, r, j) == cplx{});
}

TEST_CASE("entries match the frequency-side convolution") {
    Rng rng(31);
    for (int rep = 0; rep < 5; ++rep) {
        Signal x(random_vector(256, rng));
        SampleCounter c(256);
        CountedSignal cx(x, c);
        auto v = make_downsample_view(cx, nullptr, 4, 0.05);
        cvec xhat = dft(x.values());
        for (index_t r = 0; r < 8; ++r) {
            cvec fast = dft(entries_of_z(v, r));
            cvec exact = z_spectrum_exact(xhat, *v.filter, 4, r);
            CHECK(max_abs_diff(fast, exact) <= 1e-9 * max_abs(exact));
        }
        auto dense = z_spectra_dense(x.values(), *v.filter, 4);
        auto exact = exact_downsampled_spectra(xhat, *v.filter, 4);
        for (std::size_t r = 0; r < dense.size(); ++r) CHECK(max_abs_diff(dense[r], exact[r]) <= 1e-9 * max_abs(exact[r]));
    }
}

TEST_CASE("subtracting the exact spectrum leaves a numerically zero residual") {
    Rng rng(32);
    SparseSpectrum chi = random_sparse(256, 12, rng);
    Signal x = idft_signal(chi.to_dense());
    SampleCounter c(256);
    CountedSignal cx(x, c);
    auto v = make_downsample_view(cx, &chi, 4, 0.05);
    double xnorm = std::sqrt(energy(x.values()));
    for (index_t r = 0; r < 8; ++r)
        for (index_t j = 0; j < 64; ++j) CHECK(std::abs(z_entry(v, r, j)) <= 1e-9 * xnorm);
}

TEST_CASE("a pure tone lands in its block") {
    const index_t n = 1024, k1 = 8, f0 = 48;
    cvec xhat(static_cast<std::size_t>(n));
    xhat[f0] = cplx{0.6, -0.8};
    Signal x = idft_signal(xhat);
    SampleCounter c(n);
    CountedSignal cx(x, c);
    auto v = make_downsample_view(cx, nullptr, k1, 0.05);
    const index_t m = n / k1;
    for (index_t r = 0; r < 2 * k1; ++r) {
        cvec zh = dft(entries_of_z(v, r));
        auto best = std::max_element(zh.begin(), zh.end(), [](cplx a, cplx b) { return std::abs(a) < std::abs(b); }) - zh.begin();
        CHECK(centered(best, m) == block_of(f0, k1, n));
        for (index_t j = 0; j < m; ++j) {
            cplx expect = v.filter->freq(f0 - k1 * j) * xhat[f0] * omega(mod(v.shift(r) * f0, n), n);
            CHECK(std::abs(zh[static_cast<std::size_t>(j)] - expect) <= 1e-9);
        }
    }
}

TEST_CASE("energy sandwich and per-block lower bound") {
    Rng rng(33);
    const index_t n = 1024, k1 = 8, m = n / k1;
    const double delta = 0.05;
    auto g = FlatFilter::make(n, m, filter_order(delta));
    for (int rep = 0; rep < 50; ++rep) {
        cvec xhat = rep % 2 ? dft(random_vector(n, rng)) : random_block_sparse(n, 3, k1, rng).to_dense();
        auto z = exact_downsampled_spectra(xhat, *g, k1);
        double avg = 0;
        for (const auto& s : z) avg += energy(s);
        avg /= static_cast<double>(2 * k1);
        const double ex = energy(xhat);
        CHECK(avg >= (1 - 12 * delta) * ex);
        CHECK(avg <= 6 * ex);

        auto be = block_energies(xhat, k1);
        const int F = g->order();
        for (index_t j = 0; j < m; ++j) {
            double lhs = 0;
            for (const auto& s : z) lhs += std::norm(s[static_cast<std::size_t>(j)]);
            lhs /= static_cast<double>(2 * k1);
            auto e = [&](index_t b) { return be[static_cast<std::size_t>(mod(b, m))]; };
            double far = 0;
            for (index_t jp = 0; jp < m; ++jp) {
                if (jp == j) continue;
                far += e(jp) / std::pow(std::abs(static_cast<double>(centered(jp - j, m))), F - 1);
            }
            const double rhs = (1 - delta) * e(j) - 3 * delta * (e(j - 1) + e(j) + e(j + 1) + delta * far);
            CHECK(lhs >= rhs - 1e-12 * ex);
        }
    }
}

TEST_CASE("each entry reads a bounded number of samples") {
    Rng rng(34);
    const index_t n = 1 << 14, k1 = 8;
    Signal x(random_vector(n, rng));
    SampleCounter c(n);
    CountedSignal cx(x, c);
    auto v = make_downsample_view(cx, nullptr, k1, 0.05);
    const index_t bound = 2 * v.filter->radius() / v.m + 2;
    index_t worst = 0;
    for (index_t j = 0; j < v.m; j += 37) {
        const auto before = c.total();
        z_entry(v, 3, j);
        worst = std::max<index_t>(worst, static_cast<index_t>(c.total() - before));
    }
    CHECK(worst <= bound);
    CHECK(worst <= k1);
    // O(F) reads with a constant set by B' = 8 c B
    CHECK(static_cast<double>(worst) <= 8 * v.filter->c_used() * v.filter->order() + 1);
}

TEST_CASE("covering test") {
    cvec delta(8);
    delta[3] = 2;
    for (index_t j = 0; j < 8; ++j) CHECK(is_covered(delta, j, 1) == (j == 3));
    cvec flat(8, cplx{1, 1});
    for (int s = 1; s <= 10; ++s) CHECK(is_covered(flat, 0, s) == (s >= 8));
    Rng rng(35);
    cvec z = random_vector(32, rng);
    const double total = energy(z);
    for (index_t j = 0; j < 32; ++j)
        for (double s : {1.0, 2.0, 5.0, 16.0, 33.0, 200.0})
            CHECK(is_covered(z, j, s) == (std::norm(z[static_cast<std::size_t>(j)]) * s >= total));
    CHECK_THROWS_AS(is_covered(z, 0, 0.5), InvalidInput);
}

TEST_CASE("sinc pulses give spiky shift profiles, tones flat ones") {
    ExperimentConfig c;
    c.n = 2048;
    c.k0 = 1;
    c.k1 = 16;
    c.noise = "none";
    auto g = FlatFilter::make(c.n, c.n / c.k1, filter_order(0.05));
    auto ratio = [&](const std::string& gen, std::uint64_t seed) {
        c.generator = gen;
        Rng rng(seed);
        auto s = gen_signal(c, rng);
        auto z = exact_downsampled_spectra(s.xhat, *g, c.k1);
        double mx = 0, mean = 0;
        for (const auto& v : z) {
            mx = std::max(mx, energy(v));
            mean += energy(v) / static_cast<double>(z.size());
        }
        return mx / mean;
    };
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        CHECK(ratio("sinc-blocks", seed) >= c.k1 / 2.0);
        CHECK(ratio("rect-blocks", seed) <= 1.1);
    }
}

TEST_CASE("view validates k1") {
    Signal x(cvec(64));
    SampleCounter c(64);
    CountedSignal cx(x, c);
    CHECK_THROWS_AS(make_downsample_view(cx, nullptr, 3, 0.05), InvalidInput);
    CHECK_THROWS_AS(make_downsample_view(cx, nullptr, 32, 0.05), InvalidInput);
    auto v = make_downsample_view(cx, nullptr, 4, 0.05);
    CHECK_THROWS_AS(z_entry(v, 8, 0), InvalidInput);
}

}  // TEST_SUITE
