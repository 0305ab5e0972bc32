// SPDX-License-Identifier: Apache-2.0
#include "bsft/constants.hpp"

#include <charconv>
#include <cstdio>
#include <stdexcept>
#include <type_traits>
#include <variant>
#include <vector>

#include "bsft/signal.hpp"

namespace bsft {
namespace {

using Field = std::variant<double Constants::*, int Constants::*, bool Constants::*>;

const std::vector<std::pair<std::string, Field>>& fields() {
    static const std::vector<std::pair<std::string, Field>> table = {
        {"flat_c", &Constants::flat_c},
        {"filter_order", &Constants::filter_order},
        {"tol", &Constants::tol},
        {"energy_buckets", &Constants::energy_buckets},
        {"budget_draws", &Constants::budget_draws},
        {"budget_base", &Constants::budget_base},
        {"budget_levels", &Constants::budget_levels},
        {"locate_rounds", &Constants::locate_rounds},
        {"c1", &Constants::c1},
        {"c2", &Constants::c2},
        {"c3", &Constants::c3},
        {"decode_order", &Constants::decode_order},
        {"lambda_bits", &Constants::lambda_bits},
        {"odd_beta", &Constants::odd_beta},
        {"prune_buckets", &Constants::prune_buckets},
        {"prune_rounds", &Constants::prune_rounds},
        {"estimate_buckets", &Constants::estimate_buckets},
        {"estimate_rounds", &Constants::estimate_rounds},
        {"delta_const", &Constants::delta_const},
        {"eta_const", &Constants::eta_const},
        {"theta_scale", &Constants::theta_scale},
        {"final_theta", &Constants::final_theta},
        {"final_locate_power", &Constants::final_locate_power},
        {"final_sparsity", &Constants::final_sparsity},
        {"p_floor", &Constants::p_floor},
        {"perturb_dc", &Constants::perturb_dc},
    };
    return table;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& key, const std::string& s) {
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) throw InvalidInput("constant " + key + ": not a number: " + s);
    return v;
}

}  // namespace

Constants Constants::nominal() { return Constants{}; }

Constants Constants::desk() {
    Constants c;
    c.flat_c = 0.25;
    c.filter_order = 0.25;
    c.energy_buckets = 0.01;
    c.budget_draws = 0.05;
    c.budget_base = 1.0;
    c.budget_levels = 0.08;
    c.locate_rounds = 0.1;
    c.c1 = 0.2;
    c.c2 = 8.0;
    c.c3 = 0.8;
    c.decode_order = 2;
    c.lambda_bits = 3;
    c.odd_beta = true;
    c.prune_buckets = 0.5;
    c.prune_rounds = 0.5;
    c.estimate_buckets = 0.1;
    c.estimate_rounds = 0.5;
    c.delta_const = 0.04;
    c.theta_scale = 2.5;
    c.final_locate_power = 1.0;
    c.p_floor = 0.1;
    return c;
}

Constants Constants::preset(const std::string& name) {
    if (name == "nominal") return nominal();
    if (name == "desk") return desk();
    throw InvalidInput("unknown constants preset: " + name);
}

std::map<std::string, std::string> Constants::to_map() const {
    std::map<std::string, std::string> out;
    for (const auto& [key, field] : fields()) {
        std::visit(
            [&](auto member) {
                using T = std::remove_cvref_t<decltype(this->*member)>;
                if constexpr (std::is_same_v<T, double>)
                    out[key] = format_double(this->*member);
                else if constexpr (std::is_same_v<T, bool>)
                    out[key] = (this->*member) ? "true" : "false";
                else
                    out[key] = std::to_string(this->*member);
            },
            field);
    }
    return out;
}

void Constants::set(const std::string& key, const std::string& value) {
    for (const auto& [name, field] : fields()) {
        if (name != key) continue;
        std::visit(
            [&](auto member) {
                using T = std::remove_cvref_t<decltype(this->*member)>;
                if constexpr (std::is_same_v<T, bool>) {
                    if (value == "true" || value == "1")
                        this->*member = true;
                    else if (value == "false" || value == "0")
                        this->*member = false;
                    else
                        throw InvalidInput("constant " + key + ": expected true or false");
                } else if constexpr (std::is_same_v<T, int>) {
                    int v = 0;
                    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
                    if (ec != std::errc{} || ptr != value.data() + value.size())
                        throw InvalidInput("constant " + key + ": not an integer: " + value);
                    this->*member = v;
                } else {
                    this->*member = parse_double(key, value);
                }
            },
            field);
        return;
    }
    throw InvalidInput("unknown constant: " + key);
}

}  // namespace bsft
