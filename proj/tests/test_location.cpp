// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "bsft/fft.hpp"
#include "bsft/location.hpp"
#include "support.hpp"

using namespace bsft;
using namespace bsft::test;

namespace {

// One Gaussian block at j0 plus white noise of relative energy noise.
cvec planted_block(index_t n, index_t k1, index_t j0, double noise, Rng& rng) {
    cvec xhat(static_cast<std::size_t>(n));
    double s = 0;
    for (index_t i = 0; i < k1; ++i) {
        cplx v = rng.complex_normal();
        xhat[static_cast<std::size_t>(mod(block_start(j0, k1) + i, n))] = v;
        s += std::norm(v);
    }
    for (auto& v : xhat) v += std::sqrt(noise * s / static_cast<double>(n)) * rng.complex_normal();
    return xhat;
}

}  // namespace

TEST_SUITE("location") {

TEST_CASE("alias table reproduces its weights") {
    std::vector<double> w = {0.5, 0.0, 0.25, 0.125, 0.125};
    AliasTable t(w);
    Rng rng(51);
    std::vector<int> hits(w.size(), 0);
    const int draws = 80000;
    for (int i = 0; i < draws; ++i) ++hits[t.sample(rng)];
    for (std::size_t i = 0; i < w.size(); ++i) CHECK(std::abs(hits[i] / static_cast<double>(draws) - w[i]) <= 0.01);
    CHECK(hits[1] == 0);
    CHECK_THROWS_AS(AliasTable(std::vector<double>{}), InvalidInput);
    CHECK_THROWS_AS(AliasTable(std::vector<double>{0, 0}), InvalidInput);
    CHECK_THROWS_AS(AliasTable(std::vector<double>{1, -1}), InvalidInput);
}

TEST_CASE("budget distribution is a product of normalized weights") {
    Constants c = Constants::nominal();
    std::vector<double> gamma = {1, 3, 0, 4};
    auto d = budget_distribution(gamma, 8, 0.1, c);
    CHECK(d.levels == ceil_log2(10.0 * 8 / 0.1));
    CHECK(std::abs(std::accumulate(d.r_weight.begin(), d.r_weight.end(), 0.0) - 1) <= 1e-12);
    CHECK(std::abs(std::accumulate(d.q_weight.begin(), d.q_weight.end(), 0.0) - 1) <= 1e-12);
    CHECK(d.weight(1, 1) == doctest::Approx(0.375 * 0.5 / (1 - std::ldexp(1.0, -d.levels))));
    for (int q = 2; q <= d.levels; ++q) CHECK(d.q_weight[static_cast<std::size_t>(q - 1)] == doctest::Approx(d.q_weight[0] / std::ldexp(1.0, q - 1)));
    CHECK(budget_draws(8, 0.1, 0.1, c) == static_cast<index_t>(std::ceil(10 * 80 * std::log2(10.0))));
    CHECK_THROWS_AS(budget_distribution({0, 0}, 1, 0.1, c), InvalidInput);
    CHECK_THROWS_AS(budget_distribution({1, -1}, 1, 0.1, c), InvalidInput);
}

TEST_CASE("budgets take the values base 2^q") {
    Constants c = Constants::nominal();
    Rng rng(52);
    std::vector<double> gamma(16);
    for (auto& g : gamma) g = rng.uniform();
    const int Q = budget_distribution(gamma, 4, 0.2, c).levels;
    for (int rep = 0; rep < 20; ++rep) {
        Budgets s = budget_allocation(gamma, 4, 0.2, 0.1, rng, c);
        REQUIRE(s.size() == 16);
        for (index_t v : s) {
            if (v == 0) continue;
            bool ok = false;
            for (int q = 1; q <= Q; ++q) ok = ok || v == std::llround(10 * std::ldexp(1.0, q));
            CHECK(ok);
        }
    }
    std::vector<double> e1(16, 0.0);
    e1[0] = 2.5;
    Budgets s = budget_allocation(e1, 4, 0.2, 0.1, rng, c);
    CHECK(s[0] > 0);
    for (std::size_t r = 1; r < s.size(); ++r) CHECK(s[r] == 0);
    CHECK_THROWS_AS(budget_allocation(gamma, 4, 0.2, 0.5, rng, c), InvalidInput);
    CHECK_THROWS_AS(budget_allocation(gamma, 4, 1.0, 0.1, rng, c), InvalidInput);
}

TEST_CASE("mean total budget stays under its expectation bound") {
    // E[s^r] <= base * draws * Q * w_r / (1 - 2^-Q), summed over r
    Constants c = Constants::nominal();
    const index_t k0 = 8;
    const double delta = 0.1, p = 0.1;
    Rng rng(53);
    std::vector<double> gamma(16);
    for (auto& g : gamma) g = rng.uniform();
    const auto d = budget_distribution(gamma, k0, delta, c);
    const double bound = c.budget_base * static_cast<double>(budget_draws(k0, delta, p, c)) * d.levels /
                         (1 - std::ldexp(1.0, -d.levels));
    double mean = 0;
    const int runs = 200;
    for (int i = 0; i < runs; ++i) {
        Budgets s = budget_allocation(gamma, k0, delta, p, rng, c);
        mean += static_cast<double>(std::accumulate(s.begin(), s.end(), index_t{0})) / runs;
    }
    CHECK(mean <= bound);
    const double k = static_cast<double>(k0) / delta;
    CHECK(mean <= 200 * k * std::log2(k) * std::log2(1 / p));
}

TEST_CASE("active set applies the weighted energy threshold") {
    std::vector<cvec> z(2, cvec(8));
    z[0][1] = 3;
    z[0][2] = 1;
    z[1][2] = 2;
    z[1][5] = 2;
    // norms 10 and 8; weights gamma^r / |Z^r|^2
    std::vector<double> gamma = {10, 8};
    // lhs_j = sum_r |Z^r_j|^2 gamma^r / |Z^r|^2 = |Z^0_j|^2 + |Z^1_j|^2 here
    auto a = active_set(z, gamma, 1, 0.25);  // threshold 0.25 * 18 = 4.5
    CHECK(a == std::vector<index_t>{1, 2});
    auto b = active_set(z, gamma, 1, 0.2);  // threshold 3.6
    CHECK(b == std::vector<index_t>{-3, 1, 2});
    std::vector<double> only0 = {10, 0};
    CHECK(active_set(z, only0, 1, 0.2) == std::vector<index_t>{1});
    CHECK_THROWS_AS(active_set(z, {1.0}, 1, 0.2), InvalidInput);
}

TEST_CASE("decoder configuration") {
    auto p = decoder_config(1024, Constants::nominal());
    CHECK(p.lambda == 2);
    CHECK(p.levels == 10);
    CHECK(p.big_n == 1024);
    CHECK(p.pairs == static_cast<index_t>(std::ceil(8 * std::log2(10.0))));
    auto d = decoder_config(1024, Constants::desk());
    CHECK(d.lambda == 8);
    CHECK(d.levels == 4);
    CHECK(d.big_n == 4096);
    CHECK(d.pairs == 3);
    CHECK(decoder_config(4, Constants::nominal()).pairs >= 1);
}

TEST_CASE("zero budgets locate nothing and read nothing") {
    Rng rng(54);
    Signal x(random_vector(1024, rng));
    SampleCounter cnt(1024);
    CountedSignal cx(x, cnt);
    auto view = make_downsample_view(cx, nullptr, 4, 0.1);
    Budgets zero(8, 0);
    CHECK(locate_reduced_signals(view, SparseSpectrum(1024), zero, 0.1, 0.1, rng, Constants::desk()).empty());
    CHECK(cnt.total() == 0);
    CHECK_THROWS_AS(locate_reduced_signals(view, SparseSpectrum(1024), Budgets(7, 1), 0.1, 0.1, rng, Constants::desk()),
                    InvalidInput);
}

TEST_CASE("a pure tone is located with probability at least 1 - p") {
    const index_t n = 4096, k1 = 8, m = n / k1;
    Constants c = Constants::desk();
    Rng rng(55);
    for (double p : {0.1, 0.01}) {
        int hits = 0;
        const int runs = 100;
        for (int i = 0; i < runs; ++i) {
            cvec xhat(static_cast<std::size_t>(n));
            const index_t f0 = centered(rng.uniform_int(0, n), n);
            xhat[static_cast<std::size_t>(mod(f0, n))] = rng.complex_normal();
            Signal x = idft_signal(xhat);
            SampleCounter cnt(n);
            CountedSignal cx(x, cnt);
            auto view = make_downsample_view(cx, nullptr, k1, 0.1, c.filter_order, c.flat_c);
            Rng lr = rng.split(static_cast<std::uint64_t>(i));
            auto L = locate_reduced_signals(view, SparseSpectrum(n), Budgets(2 * k1, 2), 0.1, p, lr, c);
            hits += L.count(centered(block_of(f0, k1, n), m)) > 0;
        }
        CHECK(hits >= static_cast<int>((1 - p) * runs));
    }
}

TEST_CASE("a planted dominant block is located when covered") {
    const index_t n = 1 << 12, k1 = 8, m = n / k1;
    const double delta = 0.1, p = 0.1;
    Constants c = Constants::desk();
    Rng rng(56);
    int hits = 0, runs = 0;
    for (int i = 0; i < 60; ++i) {
        const index_t j0 = centered(rng.uniform_int(0, m), m);
        cvec xhat = planted_block(n, k1, j0, 1.0, rng);
        Signal x = idft_signal(xhat);
        SampleCounter cnt(n);
        CountedSignal cx(x, cnt);
        auto view = make_downsample_view(cx, nullptr, k1, delta, c.filter_order, c.flat_c);
        auto z = z_spectra_dense(x.values(), *view.filter, k1);
        Budgets b(static_cast<std::size_t>(2 * k1), 0);
        bool any = false;
        for (index_t r = 0; r < 2 * k1; ++r)
            if (is_covered(z[static_cast<std::size_t>(r)], mod(j0, m), 8)) b[static_cast<std::size_t>(r)] = 8, any = true;
        if (!any) continue;
        ++runs;
        Rng lr = rng.split(static_cast<std::uint64_t>(i));
        hits += locate_reduced_signals(view, SparseSpectrum(n), b, delta, p, lr, c).count(j0) > 0;
    }
    REQUIRE(runs >= 50);
    CHECK(hits >= static_cast<int>((1 - p) * runs));
}

TEST_CASE("multi-block locate finds the planted blocks of a sparse signal") {
    const index_t n = 1 << 13, k0 = 3, k1 = 8, m = n / k1;
    Constants c = Constants::desk();
    Rng rng(57);
    int found = 0;
    const int runs = 10;
    for (int i = 0; i < runs; ++i) {
        SparseSpectrum s = random_block_sparse(n, k0, k1, rng);
        Signal x = idft_signal(s.to_dense());
        SampleCounter cnt(n);
        CountedSignal cx(x, cnt);
        Rng lr = rng.split(static_cast<std::uint64_t>(i));
        Budgets b;
        auto L = multi_block_locate(cx, SparseSpectrum(n), k0, k1, 0.01, 0.1, lr, c, &b);
        CHECK(b.size() == static_cast<std::size_t>(2 * k1));
        std::set<index_t> truth;
        for (const auto& [f, v] : s.entries()) truth.insert(centered(block_of(f, k1, n), m));
        for (index_t j : truth) found += L.count(j) > 0;
    }
    CHECK(found >= static_cast<int>(0.9 * runs * k0));
    // a zero signal has no energy to allocate budgets to
    Signal zero(cvec(static_cast<std::size_t>(n)));
    SampleCounter cnt(n);
    CountedSignal cz(zero, cnt);
    Budgets b;
    CHECK(multi_block_locate(cz, SparseSpectrum(n), k0, k1, 0.01, 0.1, rng, c, &b).empty());
    for (index_t v : b) CHECK(v == 0);
}

}  // TEST_SUITE
