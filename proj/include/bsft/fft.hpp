// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "bsft/signal.hpp"

namespace bsft {

// In-place radix-2 transform without normalization.
// forward: a_f <- sum_t a_t w^{-ft}; inverse: a_t <- sum_f a_f w^{ft}.
void fft_inplace(cvec& a, bool inverse);

// xhat_f = (1/n) sum_t x_t w^{-ft}
cvec dft(const cvec& x);
cvec dft(const Signal& x);
// x_t = sum_f xhat_f w^{ft}
cvec idft(const cvec& xhat);
Signal idft_signal(const cvec& xhat);

}  // namespace bsft
