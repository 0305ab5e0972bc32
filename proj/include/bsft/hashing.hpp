// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "bsft/constants.hpp"
#include "bsft/downsampling.hpp"
#include "bsft/filters.hpp"
#include "bsft/fft.hpp"
#include "bsft/rng.hpp"
#include "bsft/signal.hpp"

namespace bsft {

struct HashParams {
    index_t m = 0;       // domain length
    index_t B = 0;       // buckets, power of two dividing m
    index_t sigma = 1;   // odd
    index_t shift = 0;   // Delta

    index_t permute(index_t f) const { return centered(sigma * centered(f, m), m); }
    // Bucket of f in [0, B).
    index_t bucket(index_t f) const;
    // pi(f2) - h(f) m / B, centered.
    index_t offset(index_t f, index_t f2) const;
};

HashParams random_hash_params(index_t m, index_t B, Rng& rng);
// Bucket count: power of two in [2, m/2] so the flat filter stays defined.
index_t bucket_count(double b, index_t m);

// U_b = (B/m) sum_i x(sigma(Delta + b + B i)) G_{b + B i}, over the filter support.
template <class Access>
cvec hash_time_domain(Access&& x, const FlatFilter& g, const HashParams& p) {
    cvec u(static_cast<std::size_t>(p.B));
    const double scale = static_cast<double>(p.B) / static_cast<double>(p.m);
    index_t lo = -g.radius(), hi = g.radius();
    if (g.full_support()) lo = -p.m / 2 + 1, hi = p.m / 2;
    for (index_t t = lo; t <= hi; ++t) {
        double w = g.time(t);
        if (w == 0.0) continue;
        u[static_cast<std::size_t>(mod(t, p.B))] += scale * w * x(p.sigma * (p.shift + t));
    }
    return u;
}

// Normalized length-B transform: U_hat_b = (1/B) sum_t U_t w_B^{-bt}.
cvec bucket_spectrum(cvec u);

// Values of X_t = sum_f X_hat_f w_n^{ft} at t = sigma s + shift for s = -k/2..k/2
// (k + 1 values, index s + k/2). xhat holds at most k entries.
cvec semi_equi_inverse_fft(const std::vector<std::pair<index_t, cplx>>& xhat, index_t n, index_t k, double zeta,
                           index_t sigma = 1, index_t shift = 0);
cvec semi_equi_inverse_fft(const SparseSpectrum& xhat, index_t k, double zeta, index_t sigma = 1, index_t shift = 0);

// chi(j_t + (m/2) s) for j_t = sigma (shift + t) mod m (centered), t = -radius..radius,
// s in [0, 2 k1); m = n / k1.
struct BlockValues {
    index_t radius = 0;
    index_t k1 = 0;
    cvec values;
    cplx at(index_t t, index_t s) const {
        return values[static_cast<std::size_t>((t + radius) * 2 * k1 + s)];
    }
};

BlockValues semi_equi_inverse_block_fft(const SparseSpectrum& chi, index_t k1, index_t radius, double zeta,
                                        index_t sigma = 1, index_t shift = 0);

// Internal tolerance used for the semi-equispaced steps of a length-n problem.
double semi_equi_zeta(index_t n, double tol);

// Bucket spectrum of the residual X - chi.
cvec hash_to_bins(const CountedSignal& x, const SparseSpectrum& chi, const FlatFilter& g, const HashParams& p,
                  double tol = 1e-10);

// Per-r bucket spectra of the reduced residual signals, all sharing (sigma, shift).
// An empty output means r was skipped (budget 0).
std::vector<cvec> hash_to_bins_reduced(const DownsampleView& view, const SparseSpectrum& chi,
                                       const std::vector<std::shared_ptr<const FlatFilter>>& filters, index_t sigma,
                                       index_t shift, double tol = 1e-10);

std::vector<double> estimate_energies(const DownsampleView& view, const SparseSpectrum& chi, index_t k0, double delta,
                                      Rng& rng, const Constants& c);

}  // namespace bsft
