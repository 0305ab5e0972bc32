// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "bsft/signal.hpp"

namespace bsft {

struct FilterConstructionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InfeasibleTolerance : InvalidInput {
    using InvalidInput::InvalidInput;
};

// Near-rectangular window: G_hat ~ 1 on |f| <= n/(2B), decays past n/B.
class FlatFilter {
public:
    // Builds with B' = 8 c B, doubling c up to three times until the
    // flatness bounds hold.
    FlatFilter(index_t n, index_t B, int F, double c = 2.0);

    // Cached construction keyed by (n, B, F, c).
    static std::shared_ptr<const FlatFilter> make(index_t n, index_t B, int F, double c = 2.0);

    index_t n() const { return n_; }
    index_t buckets() const { return B_; }
    int order() const { return F_; }
    index_t b_prime() const { return b_prime_; }
    double c_used() const { return c_used_; }

    double freq(index_t f) const { return freq_[static_cast<std::size_t>(mod(f, n_))]; }
    double time(index_t t) const;
    // G_t = 0 for |t| > radius(); radius() == n/2 means every t is used.
    index_t radius() const { return radius_; }
    bool full_support() const { return 2 * radius_ + 1 >= n_; }

    const std::vector<double>& freq_values() const { return freq_; }

    // Empty when all flatness bounds, the energy bound and symmetry hold.
    std::vector<std::string> violations() const;

private:
    void build(double c);

    index_t n_, B_;
    int F_;
    index_t b_prime_ = 0;
    double c_used_ = 0;
    index_t radius_ = 0;
    std::vector<double> freq_;
    std::vector<double> time_;  // index t + radius_
};

// Pass band |t| <= n/(2k), stop band |t| >= n/k, compact frequency support.
class SharpFilter {
public:
    SharpFilter(index_t n, index_t k, double zeta);

    static std::shared_ptr<const SharpFilter> make(index_t n, index_t k, double zeta);

    index_t n() const { return n_; }
    index_t k() const { return k_; }
    double zeta() const { return zeta_; }
    // G_hat_f = 0 for |f| > width().
    index_t width() const { return width_; }
    double freq(index_t f) const {
        index_t c = centered(f, n_);
        return (c < -width_ || c > width_) ? 0.0 : freq_[static_cast<std::size_t>(c + width_)];
    }
    double time(index_t t) const { return time_[static_cast<std::size_t>(mod(t, n_))]; }
    // Measured distance to the ideal window.
    double ideal_distance() const { return distance_; }

    static constexpr double kSupportConstant = 4.0;

private:
    index_t n_, k_;
    double zeta_;
    index_t width_ = 0;
    double distance_ = 0;
    std::vector<double> freq_;
    std::vector<double> time_;
};

// Clamps G_t to [0,1] in the transition band of a sharp filter.
double ideal_sharp_value(index_t n, index_t k, index_t t, double g);

}  // namespace bsft
