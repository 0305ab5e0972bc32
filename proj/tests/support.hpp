// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <vector>

#include "bsft/rng.hpp"
#include "bsft/signal.hpp"

namespace bsft::test {

inline cvec random_vector(index_t n, Rng& rng) {
    cvec v(static_cast<std::size_t>(n));
    for (auto& z : v) z = rng.complex_normal();
    return v;
}

inline SparseSpectrum random_sparse(index_t n, index_t count, Rng& rng) {
    SparseSpectrum s(n);
    while (static_cast<index_t>(s.size()) < count) s.set(centered(rng.uniform_int(0, n), n), rng.complex_normal());
    return s;
}

// Distinct blocks in (-m/2, m/2], filled with Gaussian coefficients.
inline SparseSpectrum random_block_sparse(index_t n, index_t k0, index_t k1, Rng& rng) {
    const index_t m = n / k1;
    SparseSpectrum s(n);
    std::vector<index_t> used;
    while (static_cast<index_t>(used.size()) < k0) {
        index_t j = centered(rng.uniform_int(0, m), m);
        bool fresh = true;
        for (index_t u : used) fresh = fresh && std::abs(centered(u - j, m)) >= 2;
        if (!fresh) continue;
        used.push_back(j);
        for (index_t i = 0; i < k1; ++i) s.set(centered(block_start(j, k1) + i, n), rng.complex_normal());
    }
    return s;
}

inline double max_abs_diff(const cvec& a, const cvec& b) {
    double e = 0;
    for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]));
    return e;
}

inline double max_abs(const cvec& a) {
    double e = 0;
    for (const auto& z : a) e = std::max(e, std::abs(z));
    return e;
}

inline cvec subtract(cvec a, const SparseSpectrum& s) {
    const auto n = static_cast<index_t>(a.size());
    for (const auto& [f, v] : s.entries()) a[static_cast<std::size_t>(mod(f, n))] -= v;
    return a;
}

}  // namespace bsft::test
