// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <set>
#include <vector>

#include "bsft/constants.hpp"
#include "bsft/downsampling.hpp"
#include "bsft/rng.hpp"
#include "bsft/signal.hpp"

namespace bsft {

using Budgets = std::vector<index_t>;
using LocationList = std::set<index_t>;

// Walker/Vose alias table over a finite distribution.
class AliasTable {
public:
    explicit AliasTable(const std::vector<double>& weights);
    std::size_t sample(Rng& rng) const;
    std::size_t size() const { return prob_.size(); }

private:
    std::vector<double> prob_;
    std::vector<std::size_t> alias_;
};

struct BudgetDistribution {
    int levels = 0;                      // Q
    std::vector<double> r_weight;        // gamma^r / |gamma|_1
    std::vector<double> q_weight;        // 2^-q renormalized, q = 1..Q
    double weight(index_t r, int q) const { return r_weight[static_cast<std::size_t>(r)] * q_weight[static_cast<std::size_t>(q - 1)]; }
};

BudgetDistribution budget_distribution(const std::vector<double>& gamma, index_t k0, double delta, const Constants& c);
index_t budget_draws(index_t k0, double delta, double p, const Constants& c);
Budgets budget_allocation(const std::vector<double>& gamma, index_t k0, double delta, double p, Rng& rng,
                          const Constants& c);

// {j : sum_r |Z^r_j|^2 gamma^r / |Z^r|^2 >= delta sum_r |Z^r|^2 / k0}
std::vector<index_t> active_set(const std::vector<cvec>& zhat, const std::vector<double>& gamma, index_t k0,
                                double delta);

struct DecoderConfig {
    index_t m = 0;
    index_t lambda = 2;   // digit base
    index_t big_n = 0;    // N = lambda^levels >= m
    int levels = 0;
    index_t pairs = 0;    // |A|
};

DecoderConfig decoder_config(index_t m, const Constants& c);

struct LocateStats {
    index_t hash_calls = 0;
    index_t trials = 0;
};

LocationList locate_reduced_signals(const DownsampleView& view, const SparseSpectrum& chi, const Budgets& budgets,
                                    double delta, double p, Rng& rng, const Constants& c, LocateStats* stats = nullptr);

LocationList multi_block_locate(const CountedSignal& x, const SparseSpectrum& chi, index_t k0, index_t k1, double delta,
                                double p, Rng& rng, const Constants& c, Budgets* budgets_out = nullptr);

}  // namespace bsft
