// SPDX-License-Identifier: Apache-2.0
#include "bsft/filters.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <tuple>

#include "bsft/fft.hpp"

namespace bsft {
namespace {

constexpr double kPi = std::numbers::pi;

// sin(pi * a / n) with a reduced exactly modulo 2n first.
double sin_pi_frac(index_t a, index_t n) {
    index_t r = centered(a, 2 * n);  // angle in (-pi, pi]
    if (2 * r > n) r = n - r;          // fold into [-pi/2, pi/2] for accuracy
    if (2 * r < -n) r = -n - r;
    return std::sin(kPi * static_cast<double>(r) / static_cast<double>(n));
}

}  // namespace

FlatFilter::FlatFilter(index_t n, index_t B, int F, double c) : n_(n), B_(B), F_(F) {
    if (!is_pow2(n)) throw InvalidInput("flat filter: n must be a power of two");
    if (!is_pow2(B) || B >= n) throw InvalidInput("flat filter: B must be a power of two below n");
    if (F < 2 || F % 2 != 0) throw InvalidInput("flat filter: F must be even and at least 2");
    if (!(c > 0)) throw InvalidInput("flat filter: c must be positive");

    std::vector<std::string> last;
    for (int attempt = 0; attempt <= 3; ++attempt) {
        build(c);
        last = violations();
        if (last.empty()) return;
        c *= 2;
    }
    std::ostringstream msg;
    msg << "flat filter (n=" << n << ", B=" << B << ", F=" << F << ") failed: " << last.front();
    throw FilterConstructionError(msg.str());
}

void FlatFilter::build(double c) {
    c_used_ = c;
    b_prime_ = std::max<index_t>(2, std::llround(8.0 * c * static_cast<double>(B_)));
    const index_t half = n_ / 2;
    const index_t width = b_prime_ - 1;

    std::vector<double> w(static_cast<std::size_t>(half + 1));
    w[0] = 1.0;
    for (index_t x = 1; x <= half; ++x) {
        double d = sin_pi_frac(width * x, n_) / (static_cast<double>(width) * sin_pi_frac(x, n_));
        w[static_cast<std::size_t>(x)] = std::pow(std::abs(d), F_);
    }

    // Prefix sums are accurate near the main lobe, suffix sums (accumulated
    // from the far end) in the tail where values are tiny.
    std::vector<long double> pre(w.size()), suf(w.size() + 1, 0.0L);
    long double acc = 0;
    for (std::size_t x = 0; x < w.size(); ++x) pre[x] = acc += w[x];
    acc = 0;
    for (auto x = static_cast<index_t>(w.size()) - 1; x >= 0; --x)
        suf[static_cast<std::size_t>(x)] = acc += w[static_cast<std::size_t>(x)];
    const index_t cutoff = std::max<index_t>(1, n_ / width);
    auto range = [&](index_t a, index_t b) -> long double {
        if (a > b) return 0.0L;
        if (a > cutoff) return suf[static_cast<std::size_t>(a)] - suf[static_cast<std::size_t>(b + 1)];
        return pre[static_cast<std::size_t>(b)] - (a > 0 ? pre[static_cast<std::size_t>(a - 1)] : 0.0L);
    };

    const long double z = 2.0L * pre[static_cast<std::size_t>(half)] - w[0] - w[static_cast<std::size_t>(half)];
    const index_t h = 3 * n_ / (4 * B_);

    freq_.assign(static_cast<std::size_t>(n_), 0.0);
    for (index_t f = 0; f <= half; ++f) {
        long double s = range(std::max<index_t>(0, f - h), std::min(f + h, half));
        if (f - h < 0) s += range(1, h - f);
        if (f + h > half) s += range(n_ - f - h, half - 1);
        double g = std::min(1.0, static_cast<double>(s / z));
        freq_[static_cast<std::size_t>(f)] = g;
        freq_[static_cast<std::size_t>(mod(-f, n_))] = g;
    }

    cvec t(freq_.begin(), freq_.end());
    fft_inplace(t, true);

    index_t r0 = static_cast<index_t>(F_) * (b_prime_ / 2 - 1);
    if (2 * r0 + 1 >= n_) r0 = half;
    auto sym = [&](index_t x) {
        return 0.5 * (t[static_cast<std::size_t>(mod(x, n_))].real() + t[static_cast<std::size_t>(mod(-x, n_))].real());
    };
    // Trim the numerically negligible tail of the support.
    double total = 0;
    for (index_t x = -r0; x <= r0; ++x) total += std::abs(sym(x));
    double dropped = 0;
    index_t r = r0;
    while (r > 0) {
        double next = dropped + 2.0 * std::abs(sym(r));
        if (next > 1e-15 * total) break;
        dropped = next;
        --r;
    }
    if (r0 == half && r == half) {
        radius_ = half;
        time_.assign(static_cast<std::size_t>(n_), 0.0);
        for (index_t x = 0; x < n_; ++x) time_[static_cast<std::size_t>(x)] = sym(x);
    } else {
        radius_ = r;
        time_.assign(static_cast<std::size_t>(2 * r + 1), 0.0);
        for (index_t x = -r; x <= r; ++x) time_[static_cast<std::size_t>(x + r)] = sym(x);
    }
}

double FlatFilter::time(index_t t) const {
    if (radius_ == n_ / 2) return time_[static_cast<std::size_t>(mod(t, n_))];
    index_t c = centered(t, n_);
    if (c < -radius_ || c > radius_) return 0.0;
    return time_[static_cast<std::size_t>(c + radius_)];
}

std::vector<std::string> FlatFilter::violations() const {
    std::vector<std::string> out;
    auto fail = [&](const std::string& what, index_t f, double v) {
        std::ostringstream s;
        s << what << " at f=" << f << " (value " << v << ")";
        out.push_back(s.str());
    };
    const double pass_floor = 1.0 - std::pow(0.25, F_ - 1);
    const double log_quarter = std::log(0.25);
    double sum_sq = 0;
    for (index_t f = -n_ / 2 + 1; f <= n_ / 2; ++f) {
        double g = freq(f);
        sum_sq += g * g;
        if (!(g >= 0.0 && g <= 1.0)) fail("range [0,1] violated", f, g);
        if (g != freq(-f)) fail("asymmetry", f, g);
        index_t a = f < 0 ? -f : f;
        if (2 * a * B_ <= n_ && g < pass_floor) fail("pass band below 1-(1/4)^(F-1)", f, g);
        if (a * B_ >= n_ && g > 0) {
            double log_bound = (F_ - 1) * (log_quarter + std::log(static_cast<double>(n_) / (static_cast<double>(B_) * a)));
            if (std::log(g) > log_bound + 1e-9) fail("stop band above (1/4)^(F-1)(n/(B|f|))^(F-1)", f, g);
        }
        if (out.size() > 8) return out;
    }
    if (sum_sq > 3.0 * static_cast<double>(n_) / static_cast<double>(B_))
        fail("energy above 3n/B", 0, sum_sq);
    return out;
}

std::shared_ptr<const FlatFilter> FlatFilter::make(index_t n, index_t B, int F, double c) {
    static std::mutex mu;
    static std::map<std::tuple<index_t, index_t, int, double>, std::shared_ptr<const FlatFilter>> cache;
    std::lock_guard lock(mu);
    auto& slot = cache[{n, B, F, c}];
    if (!slot) slot = std::make_shared<const FlatFilter>(n, B, F, c);
    return slot;
}

double ideal_sharp_value(index_t n, index_t k, index_t t, double g) {
    index_t a = std::abs(centered(t, n));
    if (2 * k * a <= n) return 1.0;
    if (k * a >= n) return 0.0;
    return std::clamp(g, 0.0, 1.0);
}

SharpFilter::SharpFilter(index_t n, index_t k, double zeta) : n_(n), k_(k), zeta_(zeta) {
    if (!is_pow2(n) || !is_pow2(k)) throw InvalidInput("sharp filter: n and k must be powers of two");
    if (4 * k > n) throw InvalidInput("sharp filter: need n/k >= 4");
    if (!(zeta > 0 && zeta < 1)) throw InvalidInput("sharp filter: zeta must lie in (0,1)");
    if (zeta < 1e-13 * std::sqrt(static_cast<double>(n)))
        throw InfeasibleTolerance("sharp filter: zeta below double-precision floor 1e-13*sqrt(n)");

    const index_t box = 3 * n / (4 * k);   // half-width of the time-domain box
    const double margin = static_cast<double>(n) / (4.0 * k);
    const double dn = static_cast<double>(n);
    double point_tol = zeta / (4.0 * std::sqrt(dn));

    for (int attempt = 0; attempt < 6; ++attempt, point_tol /= 100.0) {
        // Gaussian width so each box edge leaks < point_tol across the margin.
        double lo = 0.0, hi = 40.0;
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (lo + hi);
            (0.5 * std::erfc(mid / std::sqrt(2.0)) > 0.5 * point_tol ? lo : hi) = mid;
        }
        double sigma_t = margin / hi;
        double w = dn / (kPi * sigma_t * std::sqrt(2.0)) * std::sqrt(std::log(10.0 / point_tol));
        width_ = std::min<index_t>(n / 2 - 1, static_cast<index_t>(std::ceil(w)));

        freq_.assign(static_cast<std::size_t>(2 * width_ + 1), 0.0);
        for (index_t f = -width_; f <= width_; ++f) {
            double d = f == 0 ? static_cast<double>(2 * box + 1)
                              : sin_pi_frac((2 * box + 1) * f, n) / sin_pi_frac(f, n);
            double x = kPi * sigma_t * static_cast<double>(f) / dn;
            freq_[static_cast<std::size_t>(f + width_)] = d * std::exp(-2.0 * x * x) / dn;
        }

        cvec t(static_cast<std::size_t>(n));
        for (index_t f = -width_; f <= width_; ++f) t[static_cast<std::size_t>(mod(f, n))] = freq_[static_cast<std::size_t>(f + width_)];
        fft_inplace(t, true);
        time_.resize(static_cast<std::size_t>(n));
        double d2 = 0;
        for (index_t x = 0; x < n; ++x) {
            double g = t[static_cast<std::size_t>(x)].real();
            time_[static_cast<std::size_t>(x)] = g;
            double e = g - ideal_sharp_value(n, k, x, g);
            d2 += e * e;
        }
        distance_ = std::sqrt(d2);
        if (distance_ <= zeta) break;
    }
    if (distance_ > zeta)
        throw FilterConstructionError("sharp filter (n=" + std::to_string(n) + ", k=" + std::to_string(k) +
                                      "): could not reach the requested zeta");
    if (static_cast<double>(2 * width_ + 1) > kSupportConstant * static_cast<double>(k) * std::log2(dn / zeta))
        throw FilterConstructionError("sharp filter: frequency support exceeds 4 k log2(n/zeta)");
}

std::shared_ptr<const SharpFilter> SharpFilter::make(index_t n, index_t k, double zeta) {
    static std::mutex mu;
    static std::map<std::tuple<index_t, index_t, double>, std::shared_ptr<const SharpFilter>> cache;
    std::lock_guard lock(mu);
    auto& slot = cache[{n, k, zeta}];
    if (!slot) slot = std::make_shared<const SharpFilter>(n, k, zeta);
    return slot;
}

}  // namespace bsft
