// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>

namespace bsft {

// Multipliers of every size and repetition expression in the pipeline.
// nominal() reproduces the stated constants; they make bucket counts exceed n
// below n ~ 2^30, so desk() shrinks them for end-to-end runs.
struct Constants {
    double flat_c = 2.0;             // B' = 8 C B
    double filter_order = 10.0;      // F = filter_order * ceil(log2(1/delta))
    double tol = 1e-10;              // numeric stand-in for n^-c

    double energy_buckets = 4.0;     // B = energy_buckets * k0 / delta^2
    double budget_draws = 10.0;      // draws = budget_draws * k0 / delta * log2(1/p)
    double budget_base = 10.0;       // s = budget_base * 2^q
    double budget_levels = 10.0;     // Q = ceil(log2(budget_levels * k0 / delta))
    double locate_rounds = 10.0;     // rounds = locate_rounds * log2(1/p)

    double c1 = 4.0;                 // outer trials = c1 * log2(2/p)
    double c2 = 8.0;                 // B^r = c2 * s^r
    double c3 = 8.0;                 // |A| = c3 * log2 log2 m
    int decode_order = 0;            // F' override for location filters, 0 = max(2, F)
    int lambda_bits = 0;             // log2 of the digit base, 0 = floor(log2 log2 m / 2)
    bool odd_beta = false;           // draw the decoding stride beta from odd residues only

    double prune_buckets = 160.0;    // B = prune_buckets * k0 k1 / delta
    double prune_rounds = 10.0;      // T = prune_rounds * log2(1/(delta p))
    double estimate_buckets = 1200.0;
    double estimate_rounds = 10.0;   // T = estimate_rounds * log2(2/p)

    double delta_const = 0.01;       // delta of the SNR reduction loop
    double eta_const = 0.01;         // eta of the constant-SNR pass
    double theta_scale = 10.0;       // theta_t = theta_scale 2^-t nu^2 SNR'
    double final_theta = 200.0;      // theta = final_theta eps nu^2
    double final_locate_power = 2.0; // locate with delta = eps^power
    double final_sparsity = 3.0;     // estimate with k0' = final_sparsity k0 / eps
    double p_floor = 0.0;            // lower clamp on derived failure probabilities
    bool perturb_dc = false;

    static Constants nominal();
    static Constants desk();
    static Constants preset(const std::string& name);

    std::map<std::string, std::string> to_map() const;
    // Unknown keys are rejected.
    void set(const std::string& key, const std::string& value);
};

}  // namespace bsft
