// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

#include "bsft/signal.hpp"

namespace bsft {

// Counter-based generator: output i is a hash of (key, i). Child streams are
// derived from the key alone, so a stream's values do not depend on how much
// the parent has been consumed.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed = 0);

    std::uint64_t next();
    result_type operator()() { return next(); }
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    Rng split(std::string_view tag) const;
    Rng split(std::uint64_t index) const;

    // Uniform in [0, 1).
    double uniform();
    // Uniform in [lo, hi).
    index_t uniform_int(index_t lo, index_t hi);
    double normal();
    // Circularly symmetric, E|z|^2 = 1.
    cplx complex_normal();

    std::uint64_t key() const { return key_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace bsft
