// SPDX-License-Identifier: Apache-2.0
#include "bsft/rng.hpp"

#include <cmath>
#include <numbers>

namespace bsft {
namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed) : key_(mix(seed + kGolden)) {}

std::uint64_t Rng::next() {
    ++counter_;
    return mix(key_ ^ mix(counter_ * kGolden));
}

Rng Rng::split(std::string_view tag) const {
    // FNV-1a over the tag
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : tag) h = (h ^ c) * 0x100000001b3ULL;
    Rng child(0);
    child.key_ = mix(key_ ^ mix(h + 0x632be59bd9b4e019ULL));
    return child;
}

Rng Rng::split(std::uint64_t index) const {
    Rng child(0);
    child.key_ = mix(key_ + mix(index ^ 0xd1b54a32d192ed03ULL));
    return child;
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

index_t Rng::uniform_int(index_t lo, index_t hi) {
    if (hi <= lo) throw InvalidInput("empty range in uniform_int");
    auto span = static_cast<std::uint64_t>(hi - lo);
    // rejection keeps the draw exactly uniform
    std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % span;
    std::uint64_t v;
    do v = next();
    while (v >= limit);
    return lo + static_cast<index_t>(v % span);
}

double Rng::normal() {
    double u1 = 1.0 - uniform();  // (0, 1]
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

cplx Rng::complex_normal() {
    constexpr double s = 0.70710678118654752440;
    double re = normal(), im = normal();
    return {s * re, s * im};
}

}  // namespace bsft
