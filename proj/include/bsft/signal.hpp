// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace bsft {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;
using index_t = std::int64_t;

struct InvalidInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct SampleBudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr double kInfiniteSnr = std::numeric_limits<double>::infinity();

bool is_pow2(index_t n);
int log2_exact(index_t n);
int ceil_log2(double x);
// Smallest power of two >= x, at least 1.
index_t pow2_ceil(double x);
// Representative in [0, n).
index_t mod(index_t a, index_t n);
// Representative in (-n/2, n/2].
index_t centered(index_t a, index_t n);
// exp(2 pi i e / n)
cplx omega(index_t e, index_t n);
// Inverse of an odd number modulo the power of two m.
index_t inverse_odd(index_t sigma, index_t m);

class Signal {
public:
    Signal() = default;
    explicit Signal(cvec values);

    index_t size() const { return static_cast<index_t>(values_.size()); }
    // Unrestricted access, for generators and dense oracles only.
    const cvec& values() const { return values_; }

private:
    cvec values_;
};

// Sparse map from canonical frequency to value; exact zeros are never stored.
class SparseSpectrum {
public:
    explicit SparseSpectrum(index_t n = 0) : n_(n) {}

    index_t n() const { return n_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    const std::map<index_t, cplx>& entries() const { return entries_; }

    cplx get(index_t f) const;
    void set(index_t f, cplx v);
    void add(index_t f, cplx v);
    void add(const SparseSpectrum& other);

    double norm2() const;
    cvec to_dense() const;
    static SparseSpectrum from_dense(const cvec& xhat);

private:
    index_t n_;
    std::map<index_t, cplx> entries_;
};

class SampleCounter {
public:
    explicit SampleCounter(index_t n, std::uint64_t cap = 0);

    void record(index_t t);
    index_t distinct() const { return distinct_; }
    std::uint64_t total() const { return total_; }
    bool contains(index_t t) const { return seen_[static_cast<std::size_t>(mod(t, n_))]; }

private:
    index_t n_;
    std::uint64_t cap_;
    std::vector<bool> seen_;
    index_t distinct_ = 0;
    std::uint64_t total_ = 0;
};

cplx counted_read(const Signal& x, SampleCounter& counter, index_t t);

// The only handle sublinear routines get on the time-domain input.
class CountedSignal {
public:
    CountedSignal(const Signal& x, SampleCounter& counter) : x_(&x), counter_(&counter) {}

    index_t size() const { return x_->size(); }
    cplx read(index_t t) const { return counted_read(*x_, *counter_, t); }
    const SampleCounter& counter() const { return *counter_; }

private:
    const Signal* x_;
    SampleCounter* counter_;
};

// Block j containing frequency f, i.e. f in ((j-1/2)k1, (j+1/2)k1].
index_t block_of(index_t f, index_t k1, index_t n);
// First (lowest) frequency of block j.
index_t block_start(index_t j, index_t k1);

std::vector<double> block_energies(const cvec& xhat, index_t k1);
double energy(const cvec& v);
double tail_error(const cvec& xhat, index_t k0, index_t k1);
double snr(const cvec& xhat, index_t k0, index_t k1);

void write_signal(const std::string& path, const Signal& x);
Signal read_signal(const std::string& path);
Signal read_signal_csv(const std::string& path);

}  // namespace bsft
