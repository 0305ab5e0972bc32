// SPDX-License-Identifier: Apache-2.0
#include "bsft/fft.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace bsft {
namespace {

struct Plan {
    std::vector<std::uint32_t> bitrev;
    cvec twiddle;  // exp(-2 pi i k / n), k < n/2
};

const Plan& plan_for(index_t n) {
    static std::mutex mu;
    static std::map<index_t, std::unique_ptr<Plan>> plans;
    std::lock_guard lock(mu);
    auto& slot = plans[n];
    if (!slot) {
        auto p = std::make_unique<Plan>();
        int bits = log2_exact(n);
        p->bitrev.resize(static_cast<std::size_t>(n));
        for (index_t i = 0; i < n; ++i) {
            std::uint32_t r = 0;
            for (int b = 0; b < bits; ++b)
                if (i & (index_t{1} << b)) r |= 1u << (bits - 1 - b);
            p->bitrev[static_cast<std::size_t>(i)] = r;
        }
        p->twiddle.resize(static_cast<std::size_t>(n / 2));
        for (index_t k = 0; k < n / 2; ++k) {
            double a = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
            p->twiddle[static_cast<std::size_t>(k)] = {std::cos(a), std::sin(a)};
        }
        slot = std::move(p);
    }
    return *slot;
}

}  // namespace

void fft_inplace(cvec& a, bool inverse) {
    auto n = static_cast<index_t>(a.size());
    if (!is_pow2(n)) throw InvalidInput("fft length " + std::to_string(n) + " is not a power of two");
    if (n == 1) return;
    const Plan& p = plan_for(n);
    for (index_t i = 0; i < n; ++i) {
        auto j = static_cast<index_t>(p.bitrev[static_cast<std::size_t>(i)]);
        if (i < j) std::swap(a[static_cast<std::size_t>(i)], a[static_cast<std::size_t>(j)]);
    }
    for (index_t len = 2; len <= n; len <<= 1) {
        index_t half = len / 2, step = n / len;
        for (index_t i = 0; i < n; i += len) {
            for (index_t j = 0; j < half; ++j) {
                cplx w = p.twiddle[static_cast<std::size_t>(j * step)];
                if (inverse) w = std::conj(w);
                cplx& lo = a[static_cast<std::size_t>(i + j)];
                cplx& hi = a[static_cast<std::size_t>(i + j + half)];
                cplx v = hi * w;
                hi = lo - v;
                lo += v;
            }
        }
    }
}

cvec dft(const cvec& x) {
    cvec a = x;
    fft_inplace(a, false);
    double s = 1.0 / static_cast<double>(a.size());
    for (auto& z : a) z *= s;
    return a;
}

cvec dft(const Signal& x) { return dft(x.values()); }

cvec idft(const cvec& xhat) {
    cvec a = xhat;
    fft_inplace(a, true);
    return a;
}

Signal idft_signal(const cvec& xhat) { return Signal(idft(xhat)); }

}  // namespace bsft
