// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <vector>

#include "bsft/constants.hpp"
#include "bsft/location.hpp"
#include "bsft/rng.hpp"
#include "bsft/signal.hpp"

namespace bsft {

struct RecoveryParams {
    index_t k0 = 1, k1 = 2;
    double snr_prime = 2;   // upper bound on the SNR
    double nu2 = 0;         // upper bound on the per-block tail noise
    double eps = 0.05;
    std::uint64_t seed = 0;
    Constants constants = Constants::nominal();
};

struct StageRecord {
    std::string stage;        // "reduce" or "final"
    int iteration = 0;
    double delta = 0, p = 0, theta = 0;
    index_t located = 0;      // |L|
    index_t kept = 0;         // |L'|
    index_t estimated = 0;    // nonzero values written
    double residual_estimate = 0;  // sum of W_j over L'
    index_t samples = 0;      // distinct reads after the stage
};

struct RecoveryReport {
    SparseSpectrum chihat;
    index_t samples_used = 0;
    std::vector<StageRecord> stage_log;
    double wall_time_ms = 0;
};

// Blocks of L whose median hashed energy reaches theta. Median energies of
// every block of L go to energies_out when given.
LocationList prune_location(const CountedSignal& x, const SparseSpectrum& chi, const LocationList& L, index_t k0,
                            index_t k1, double delta, double p, double theta, Rng& rng, const Constants& c,
                            std::map<index_t, double>* energies_out = nullptr);

// Median-of-hashings estimate of (X - chi)_f for every f in the blocks of L.
// k0 is real-valued since the constant-SNR pass uses 3 k0 / eps.
SparseSpectrum estimate_values(const CountedSignal& x, const SparseSpectrum& chi, const LocationList& L, double k0,
                               index_t k1, double delta, double p, Rng& rng, const Constants& c);

SparseSpectrum reduce_snr(const CountedSignal& x, const RecoveryParams& params, Rng& rng,
                          std::vector<StageRecord>* log = nullptr);

SparseSpectrum recover_at_const_snr(const CountedSignal& x, const SparseSpectrum& chi, const RecoveryParams& params,
                                    Rng& rng, std::vector<StageRecord>* log = nullptr);

RecoveryReport block_sparse_ft(const CountedSignal& x, const RecoveryParams& params);

}  // namespace bsft
