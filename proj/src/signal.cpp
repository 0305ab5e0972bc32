// SPDX-License-Identifier: Apache-2.0
#include "bsft/signal.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

namespace bsft {

bool is_pow2(index_t n) { return n > 0 && (n & (n - 1)) == 0; }

int log2_exact(index_t n) {
    if (!is_pow2(n)) throw InvalidInput("length " + std::to_string(n) + " is not a power of two");
    return std::countr_zero(static_cast<std::uint64_t>(n));
}

int ceil_log2(double x) {
    if (x <= 1.0) return 0;
    int e = static_cast<int>(std::ceil(std::log2(x)));
    // guard against log2 rounding on exact powers
    if (std::ldexp(1.0, e - 1) >= x) --e;
    return e;
}

index_t pow2_ceil(double x) { return index_t{1} << ceil_log2(x); }

index_t mod(index_t a, index_t n) {
    index_t r = a % n;
    return r < 0 ? r + n : r;
}

index_t centered(index_t a, index_t n) {
    index_t r = mod(a, n);
    return r > n / 2 ? r - n : r;
}

cplx omega(index_t e, index_t n) {
    double angle = 2.0 * std::numbers::pi * static_cast<double>(centered(e, n)) / static_cast<double>(n);
    return {std::cos(angle), std::sin(angle)};
}

index_t inverse_odd(index_t sigma, index_t m) {
    if (sigma % 2 == 0) throw InvalidInput("sigma must be odd");
    auto s = static_cast<std::uint64_t>(mod(sigma, m));
    std::uint64_t inv = s;  // correct to 3 bits
    for (int i = 0; i < 6; ++i) inv *= 2 - s * inv;
    return static_cast<index_t>(inv & static_cast<std::uint64_t>(m - 1));
}

Signal::Signal(cvec values) : values_(std::move(values)) {
    if (!is_pow2(size())) throw InvalidInput("signal length must be a power of two");
}

cplx SparseSpectrum::get(index_t f) const {
    auto it = entries_.find(centered(f, n_));
    return it == entries_.end() ? cplx{} : it->second;
}

void SparseSpectrum::set(index_t f, cplx v) {
    index_t key = centered(f, n_);
    if (v == cplx{})
        entries_.erase(key);
    else
        entries_[key] = v;
}

void SparseSpectrum::add(index_t f, cplx v) {
    if (v == cplx{}) return;
    index_t key = centered(f, n_);
    auto [it, inserted] = entries_.try_emplace(key, v);
    if (!inserted) {
        it->second += v;
        if (it->second == cplx{}) entries_.erase(it);
    }
}

void SparseSpectrum::add(const SparseSpectrum& other) {
    for (const auto& [f, v] : other.entries_) add(f, v);
}

double SparseSpectrum::norm2() const {
    double s = 0;
    for (const auto& [f, v] : entries_) s += std::norm(v);
    return s;
}

cvec SparseSpectrum::to_dense() const {
    cvec out(static_cast<std::size_t>(n_));
    for (const auto& [f, v] : entries_) out[static_cast<std::size_t>(mod(f, n_))] = v;
    return out;
}

SparseSpectrum SparseSpectrum::from_dense(const cvec& xhat) {
    auto n = static_cast<index_t>(xhat.size());
    SparseSpectrum s(n);
    for (index_t i = 0; i < n; ++i) s.set(i, xhat[static_cast<std::size_t>(i)]);
    return s;
}

SampleCounter::SampleCounter(index_t n, std::uint64_t cap)
    : n_(n), cap_(cap), seen_(static_cast<std::size_t>(n), false) {}

void SampleCounter::record(index_t t) {
    ++total_;
    if (cap_ != 0 && total_ > cap_)
        throw SampleBudgetExceeded("sample budget of " + std::to_string(cap_) + " reads exceeded");
    auto i = static_cast<std::size_t>(mod(t, n_));
    if (!seen_[i]) {
        seen_[i] = true;
        ++distinct_;
    }
}

cplx counted_read(const Signal& x, SampleCounter& counter, index_t t) {
    counter.record(t);
    return x.values()[static_cast<std::size_t>(mod(t, x.size()))];
}

index_t block_of(index_t f, index_t k1, index_t n) {
    index_t c = centered(f, n);
    index_t q = c + k1 / 2 - 1;
    index_t j = q >= 0 ? q / k1 : -((-q + k1 - 1) / k1);
    return centered(j, n / k1);
}

index_t block_start(index_t j, index_t k1) { return j * k1 - k1 / 2 + 1; }

std::vector<double> block_energies(const cvec& xhat, index_t k1) {
    auto n = static_cast<index_t>(xhat.size());
    if (k1 <= 0 || n % k1 != 0) throw InvalidInput("k1 must divide n");
    index_t m = n / k1;
    std::vector<double> e(static_cast<std::size_t>(m), 0.0);
    for (index_t f = 0; f < n; ++f)
        e[static_cast<std::size_t>(mod(block_of(f, k1, n), m))] += std::norm(xhat[static_cast<std::size_t>(f)]);
    return e;
}

double energy(const cvec& v) {
    double s = 0;
    for (const auto& z : v) s += std::norm(z);
    return s;
}

double tail_error(const cvec& xhat, index_t k0, index_t k1) {
    auto e = block_energies(xhat, k1);
    if (k0 >= static_cast<index_t>(e.size())) return 0.0;
    std::sort(e.begin(), e.end(), std::greater<>());
    double s = 0;
    // smallest first
    for (auto i = static_cast<index_t>(e.size()) - 1; i >= k0; --i) s += e[static_cast<std::size_t>(i)];
    return s;
}

double snr(const cvec& xhat, index_t k0, index_t k1) {
    double tail = tail_error(xhat, k0, k1);
    if (tail == 0.0) return kInfiniteSnr;
    return energy(xhat) / tail;
}

namespace {

constexpr char kMagic[5] = {'B', 'S', 'F', 'T', '1'};

template <class T>
T to_little(T v) {
    if constexpr (std::endian::native == std::endian::big) {
        unsigned char b[sizeof(T)];
        std::memcpy(b, &v, sizeof(T));
        std::reverse(b, b + sizeof(T));
        std::memcpy(&v, b, sizeof(T));
    }
    return v;
}

}  // namespace

void write_signal(const std::string& path, const Signal& x) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out.write(kMagic, sizeof(kMagic));
    auto n = to_little(static_cast<std::uint64_t>(x.size()));
    out.write(reinterpret_cast<const char*>(&n), sizeof(n));
    for (const auto& z : x.values()) {
        double re = to_little(z.real()), im = to_little(z.imag());
        out.write(reinterpret_cast<const char*>(&re), sizeof(re));
        out.write(reinterpret_cast<const char*>(&im), sizeof(im));
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

Signal read_signal(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    char magic[5];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw InvalidInput(path + ": not a BSFT1 signal file");
    std::uint64_t n = 0;
    in.read(reinterpret_cast<char*>(&n), sizeof(n));
    n = to_little(n);
    if (!in || n == 0 || n > (std::uint64_t{1} << 40)) throw InvalidInput(path + ": bad length header");
    cvec v(n);
    for (auto& z : v) {
        double re = 0, im = 0;
        in.read(reinterpret_cast<char*>(&re), sizeof(re));
        in.read(reinterpret_cast<char*>(&im), sizeof(im));
        z = {to_little(re), to_little(im)};
    }
    if (!in) throw InvalidInput(path + ": truncated signal data");
    return Signal(std::move(v));
}

Signal read_signal_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    cvec v;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        double re = 0, im = 0;
        if (!(ss >> re)) {
            if (lineno == 1) continue;  // header row
            throw InvalidInput(path + ":" + std::to_string(lineno) + ": expected re,im");
        }
        if (!(ss >> im)) im = 0;
        v.emplace_back(re, im);
    }
    return Signal(std::move(v));
}

}  // namespace bsft
