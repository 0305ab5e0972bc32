// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>

#include "bsft/filters.hpp"
#include "bsft/signal.hpp"

namespace bsft {

// Filter order for a given delta: factor * ceil(log2(1/delta)), rounded up to even.
int filter_order(double delta, double factor = 10.0);

// The 2 k1 reduced signals Z^r_j = (1/k1) sum_i (G X^r)_{j + m i}, m = n/k1,
// X^r_t = X_{t + a_r}, a_r = (m/2) r.
struct DownsampleView {
    const CountedSignal* x = nullptr;
    const SparseSpectrum* chi = nullptr;  // subtracted exactly when set
    index_t n = 0, k1 = 0, m = 0;
    double delta = 0;
    std::shared_ptr<const FlatFilter> filter;

    index_t shift(index_t r) const { return (m / 2) * r; }
};

DownsampleView make_downsample_view(const CountedSignal& x, const SparseSpectrum* chi, index_t k1, double delta,
                                    double order_factor = 10.0, double flat_c = 2.0);

// Time positions u = j + m i (centered) that carry nonzero filter weight.
template <class Fn>
void for_each_alias(const DownsampleView& v, index_t j, Fn&& fn) {
    const FlatFilter& g = *v.filter;
    for (index_t i = 0; i < v.k1; ++i) {
        index_t u = centered(j + v.m * i, v.n);
        double w = g.time(u);
        if (w != 0.0) fn(u, i, w);
    }
}

// Signal part of Z^r_j, read through the counter.
cplx z_signal(const DownsampleView& v, index_t r, index_t j);
// Z^r_j of chi, by direct summation over its support.
cplx z_chi_exact(const DownsampleView& v, const SparseSpectrum& chi, index_t r, index_t j);
// Z^r_j of the residual X - chi (chi taken from the view).
cplx z_entry(const DownsampleView& v, index_t r, index_t j);

// Dense Z_hat^r_j = sum_f G_hat_{f - k1 j} X_hat_f w^{a_r f}, oracle use only.
cvec z_spectrum_exact(const cvec& xhat, const FlatFilter& g, index_t k1, index_t r);
// All 2 k1 spectra through the time domain with dense FFTs, oracle use only.
std::vector<cvec> z_spectra_dense(const cvec& x_time, const FlatFilter& g, index_t k1);

bool is_covered(const cvec& zhat, index_t j, double s);

}  // namespace bsft
