// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "bsft/filters.hpp"
#include "bsft/hashing.hpp"
#include "bsft/location.hpp"
#include "bsft/signal.hpp"

// Brute-force references. These read the whole signal and are meant for
// tests and the oracle-check subcommand only.
namespace bsft {

// O(n^2) transforms with the same normalization as dft/idft.
cvec dft_direct(const cvec& x);
cvec idft_direct(const cvec& xhat);

// Minimum over all k0-subsets of the energy left outside them.
double tail_error_exhaustive(const cvec& xhat, index_t k0, index_t k1);

// U*_b = sum_f X_hat_f G_hat_{sigma f - b m/B} w^{sigma Delta f}, direct O(mB).
cvec exact_hashed_spectrum(const cvec& xhat, const FlatFilter& g, const HashParams& p);

// All 2 k1 reduced spectra by direct convolution.
std::vector<cvec> exact_downsampled_spectra(const cvec& xhat, const FlatFilter& g, index_t k1);

struct CoveringSolution {
    bool feasible = false;
    index_t total = 0;
    Budgets budgets;
    std::vector<index_t> covered;  // block indices
    double covered_energy = 0;
    double target_energy = 0;
};

// Exact minimum of sum_r s^r such that the blocks covered by some s^r in
// Z_hat^r carry at least (1 - alpha) of the best k0-block approximation's
// energy. Only the top k0 blocks are tracked, so k0 <= 20.
CoveringSolution optimal_covering_budget(const std::vector<cvec>& zhat_all, const cvec& xhat, index_t k0, index_t k1,
                                         double alpha);

}  // namespace bsft
