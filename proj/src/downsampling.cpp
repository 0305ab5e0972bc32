// SPDX-License-Identifier: Apache-2.0
#include "bsft/downsampling.hpp"

#include <cmath>

#include "bsft/fft.hpp"

namespace bsft {

int filter_order(double delta, double factor) {
    if (!(delta > 0 && delta < 1)) throw InvalidInput("delta must lie in (0,1)");
    int f = static_cast<int>(std::ceil(factor * ceil_log2(1.0 / delta) - 1e-9));
    f = std::max(f, 2);
    return f % 2 == 0 ? f : f + 1;
}

DownsampleView make_downsample_view(const CountedSignal& x, const SparseSpectrum* chi, index_t k1, double delta,
                                    double order_factor, double flat_c) {
    DownsampleView v;
    v.x = &x;
    v.chi = chi;
    v.n = x.size();
    if (!is_pow2(k1) || k1 < 2 || k1 > v.n / 4) throw InvalidInput("downsampling: k1 must be a power of two in [2, n/4]");
    v.k1 = k1;
    v.m = v.n / k1;
    v.delta = delta;
    v.filter = FlatFilter::make(v.n, v.m, filter_order(delta, order_factor), flat_c);
    return v;
}

cplx z_signal(const DownsampleView& v, index_t r, index_t j) {
    if (r < 0 || r >= 2 * v.k1) throw InvalidInput("z_entry: r out of range");
    cplx s{};
    const index_t a = v.shift(r);
    for_each_alias(v, j, [&](index_t u, index_t, double w) { s += w * v.x->read(u + a); });
    return s / static_cast<double>(v.k1);
}

cplx z_chi_exact(const DownsampleView& v, const SparseSpectrum& chi, index_t r, index_t j) {
    cplx s{};
    const index_t a = v.shift(r);
    for_each_alias(v, j, [&](index_t u, index_t, double w) {
        cplx c{};
        for (const auto& [f, val] : chi.entries()) c += val * omega(mod(f, v.n) * mod(u + a, v.n), v.n);
        s += w * c;
    });
    return s / static_cast<double>(v.k1);
}

cplx z_entry(const DownsampleView& v, index_t r, index_t j) {
    cplx z = z_signal(v, r, j);
    if (v.chi && !v.chi->empty()) z -= z_chi_exact(v, *v.chi, r, j);
    return z;
}

cvec z_spectrum_exact(const cvec& xhat, const FlatFilter& g, index_t k1, index_t r) {
    auto n = static_cast<index_t>(xhat.size());
    index_t m = n / k1, a = (m / 2) * r;
    cvec shifted(xhat.size());
    for (index_t f = 0; f < n; ++f) shifted[static_cast<std::size_t>(f)] = xhat[static_cast<std::size_t>(f)] * omega(a * f, n);
    cvec out(static_cast<std::size_t>(m));
    for (index_t j = 0; j < m; ++j) {
        cplx s{};
        for (index_t f = 0; f < n; ++f) s += g.freq(f - k1 * j) * shifted[static_cast<std::size_t>(f)];
        out[static_cast<std::size_t>(j)] = s;
    }
    return out;
}

std::vector<cvec> z_spectra_dense(const cvec& x_time, const FlatFilter& g, index_t k1) {
    auto n = static_cast<index_t>(x_time.size());
    index_t m = n / k1;
    std::vector<cvec> out;
    for (index_t r = 0; r < 2 * k1; ++r) {
        index_t a = (m / 2) * r;
        cvec z(static_cast<std::size_t>(m));
        for (index_t t = 0; t < n; ++t) {
            double w = g.time(t);
            if (w != 0.0) z[static_cast<std::size_t>(mod(t, m))] += w * x_time[static_cast<std::size_t>(mod(t + a, n))];
        }
        for (auto& c : z) c /= static_cast<double>(k1);
        out.push_back(dft(z));
    }
    return out;
}

bool is_covered(const cvec& zhat, index_t j, double s) {
    if (!(s >= 1)) throw InvalidInput("is_covered: s must be at least 1");
    auto m = static_cast<index_t>(zhat.size());
    return std::norm(zhat[static_cast<std::size_t>(mod(j, m))]) * s >= energy(zhat);
}

}  // namespace bsft
