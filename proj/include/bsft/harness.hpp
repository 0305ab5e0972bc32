// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "bsft/constants.hpp"
#include "bsft/recovery.hpp"
#include "bsft/rng.hpp"
#include "bsft/signal.hpp"

namespace bsft {

struct ExperimentConfig {
    index_t n = 1 << 14;
    index_t k0 = 4, k1 = 8;
    double snr = 16;
    double eps = 0.05;
    double delta = 0;             // 0 keeps the preset's delta_const
    index_t trials = 1;
    std::uint64_t seed = 1;
    std::string generator = "block-random";  // block-random, sinc-blocks, rect-blocks, staircase, tone
    std::string noise = "gaussian-tail";     // gaussian-tail, none
    std::string out;              // results prefix; empty writes JSON-lines to stdout
    std::string preset = "desk";
    double c_meas = 20;           // success: err^2 <= k0 mu^2 + c_meas eps k0 nu^2
    int workers = 1;
    bool timing = false;          // wall time in the JSON-lines (breaks byte equality)
    double oracle_tol = -1;       // < 0 keeps each oracle check's own tolerance
    int oracle_order = 0;         // flat filter order for oracle-check, 0 derives it from delta
    std::map<std::string, std::string> overrides;  // constant name -> value

    // Keys are the field names above; "const.<name>" sets a constant override.
    void set(const std::string& key, const std::string& value);
    void validate() const;
    Constants constants() const;
    std::string to_text() const;
    static ExperimentConfig from_text(const std::string& text);
    static ExperimentConfig load(const std::string& path);
};

struct GeneratedSignal {
    Signal x;
    cvec xhat;
    SparseSpectrum truth;   // noiseless component
    double tail = 0;        // Err^2(X_hat, k0, k1)
    double mu2 = 0;         // tail / k0
    double snr = kInfiniteSnr;
};

// Staircase window: L = floor(log2(k0 + 1)) levels, level l spanning
// (2^(l-1) - 1) W/2 < |t| <= (2^l - 1) W/2 with value sqrt(2^(L-l)), W = n/k0.
int staircase_levels(index_t k0);
double staircase_value(index_t t, index_t n, index_t k0, index_t k1);

GeneratedSignal gen_signal(const ExperimentConfig& config, Rng& rng);

// Parameters handed to the recovery: measured SNR and mu^2 when noisy, a
// capped SNR bound and the matching nu^2 when the tail vanishes.
RecoveryParams recovery_params(const ExperimentConfig& config, const GeneratedSignal& g, std::uint64_t seed);

inline constexpr double kSnrCap = 16777216.0;  // 2^24

struct TrialResult {
    index_t trial = 0;
    index_t n = 0;
    double error2 = 0;
    double k0mu2 = 0;
    double nu2 = 0;
    double snr_measured = 0, snr_prime = 0;
    double threshold = 0;
    double c_measured = 0;
    double baseline_error2 = 0;  // best k0-block approximation from the dense FFT
    bool success = false;
    index_t samples_used = 0;
    double wall_time_ms = 0;
    std::vector<StageRecord> stage_log;
    SparseSpectrum chihat;
};

TrialResult run_trial(const ExperimentConfig& config, index_t trial);

struct Summary {
    index_t n = 0, trials = 0;
    double success_rate = 0;
    double median_error2 = 0, mean_error2 = 0;
    double median_samples = 0, median_samples_frac = 0, q10_samples = 0, q90_samples = 0;
    double c80 = 0;              // 80th percentile of c_measured
    double median_baseline_error2 = 0;
    double median_wall_ms = 0;
};

Summary summarize(const std::vector<TrialResult>& results, index_t n);

// Runs trials on config.workers threads, writing one JSON line per trial in
// trial order after a header line with version and resolved config.
std::vector<TrialResult> run_experiment(const ExperimentConfig& config, std::ostream& jsonl);

std::string summary_csv_header();
std::string summary_csv_row(const Summary& s);

// One run_experiment per n, all into the same stream.
std::vector<Summary> sweep(const ExperimentConfig& config, const std::vector<index_t>& ns, std::ostream& jsonl);

struct OracleCheck {
    std::string name;
    double max_error = 0;
    double tolerance = 0;
    bool pass = false;
    std::string detail;
};

std::vector<OracleCheck> oracle_check(const ExperimentConfig& config);

std::string version_string();

}  // namespace bsft
