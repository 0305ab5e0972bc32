// SPDX-License-Identifier: Apache-2.0
// Command line front end: gen, run, sweep, oracle-check.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bsft/harness.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailure = 1;
constexpr int kUsage = 2;

struct Flags {
    std::string config_path;
    std::map<std::string, std::string> values;  // config key -> raw value
    std::vector<std::string> sets;              // key=value
    std::vector<std::string> consts;            // name=value
};

void add_common(CLI::App* app, Flags& f) {
    app->add_option("--config", f.config_path, "key = value config file; flags override it");
    static const std::vector<std::pair<std::string, std::string>> keys = {
        {"n", "signal length (power of two)"},
        {"k0", "number of active blocks"},
        {"k1", "block width (power of two)"},
        {"snr", "target SNR for gaussian-tail noise"},
        {"eps", "accuracy parameter of the final pass"},
        {"delta", "delta of the SNR reduction loop (0 keeps the preset)"},
        {"trials", "number of trials"},
        {"seed", "64-bit run seed"},
        {"out", "output path or prefix"},
        {"generator", "block-random, sinc-blocks, rect-blocks, staircase or tone"},
        {"noise", "gaussian-tail or none"},
        {"preset", "constants preset: desk or nominal"},
        {"workers", "worker threads for trials"},
        {"c-meas", "success threshold constant"},
    };
    for (const auto& [k, help] : keys) {
        std::string key = k == "c-meas" ? "c_meas" : k;
        app->add_option_function<std::string>("--" + k, [&f, key](const std::string& v) { f.values[key] = v; }, help);
    }
    app->add_flag_callback("--timing", [&f] { f.values["timing"] = "true"; }, "include wall time in the JSON-lines");
    app->add_option("--set", f.sets, "extra config entry key=value")->take_all();
    app->add_option("--const", f.consts, "constant override name=value")->take_all();
}

bsft::ExperimentConfig resolve(const Flags& f) {
    bsft::ExperimentConfig c;
    if (!f.config_path.empty()) c = bsft::ExperimentConfig::load(f.config_path);
    auto split = [](const std::string& s) {
        auto eq = s.find('=');
        if (eq == std::string::npos) throw bsft::InvalidInput("expected key=value, got " + s);
        return std::pair{s.substr(0, eq), s.substr(eq + 1)};
    };
    for (const auto& s : f.sets) {
        auto [k, v] = split(s);
        c.set(k, v);
    }
    for (const auto& s : f.consts) {
        auto [k, v] = split(s);
        c.set("const." + k, v);
    }
    for (const auto& [k, v] : f.values) c.set(k, v);
    c.validate();
    return c;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    return out;
}

int cmd_gen(const bsft::ExperimentConfig& c) {
    bsft::Rng rng = bsft::Rng(c.seed).split("trial").split(std::uint64_t{0});
    auto g = bsft::gen_signal(c, rng);
    if (!c.out.empty()) bsft::write_signal(c.out, g.x);
    nlohmann::json j;
    j["n"] = c.n;
    j["generator"] = c.generator;
    j["noise"] = c.noise;
    j["energy"] = bsft::energy(g.xhat);
    j["tail_error"] = g.tail;
    j["mu2"] = g.mu2;
    j["snr"] = std::isinf(g.snr) ? nlohmann::json("inf") : nlohmann::json(g.snr);
    j["support"] = g.truth.size();
    if (!c.out.empty()) j["path"] = c.out;
    std::cout << j.dump() << "\n";
    return kOk;
}

int cmd_run(const bsft::ExperimentConfig& c) {
    std::vector<bsft::TrialResult> results;
    bsft::Summary s;
    if (c.out.empty()) {
        results = bsft::run_experiment(c, std::cout);
        s = bsft::summarize(results, c.n);
        std::cerr << bsft::summary_csv_header() << "\n" << bsft::summary_csv_row(s) << "\n";
    } else {
        auto jl = open_out(c.out + ".jsonl");
        results = bsft::run_experiment(c, jl);
        s = bsft::summarize(results, c.n);
        auto csv = open_out(c.out + ".csv");
        csv << bsft::summary_csv_header() << "\n";
        if (s.trials > 0) csv << bsft::summary_csv_row(s) << "\n";
        std::cerr << "wrote " << c.out << ".jsonl and " << c.out << ".csv\n";
    }
    std::fprintf(stderr, "success rate %.3f over %lld trials, median samples/n %.4f\n", s.success_rate,
                 static_cast<long long>(s.trials), s.median_samples_frac);
    return kOk;
}

int cmd_sweep(const bsft::ExperimentConfig& c, const std::vector<bsft::index_t>& ns) {
    std::vector<bsft::Summary> rows;
    if (c.out.empty()) {
        rows = bsft::sweep(c, ns, std::cout);
    } else {
        auto jl = open_out(c.out + ".jsonl");
        rows = bsft::sweep(c, ns, jl);
    }
    std::ofstream csv_file;
    if (!c.out.empty()) csv_file = open_out(c.out + ".csv");
    std::ostream& csv = c.out.empty() ? std::cerr : csv_file;
    csv << bsft::summary_csv_header() << "\n";
    for (const auto& r : rows) csv << bsft::summary_csv_row(r) << "\n";
    return kOk;
}

int cmd_oracle(const bsft::ExperimentConfig& c) {
    auto checks = bsft::oracle_check(c);
    int status = kOk;
    for (const auto& ch : checks) {
        std::printf("%-24s %s  max_error=%.3e  tol=%.3e  %s\n", ch.name.c_str(), ch.pass ? "PASS" : "FAIL", ch.max_error,
                    ch.tolerance, ch.detail.c_str());
        if (!ch.pass) {
            std::fprintf(stderr, "oracle check failed: %s\n", ch.name.c_str());
            status = kCheckFailure;
        }
    }
    return status;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Block-sparse sublinear Fourier transform: signal generation, recovery experiments and oracle checks"};
    app.require_subcommand(1);
    app.set_version_flag("--version", bsft::version_string());

    Flags gen_f, run_f, sweep_f, oracle_f;
    auto* gen = app.add_subcommand("gen", "generate one signal and print its ground-truth metrics");
    add_common(gen, gen_f);
    auto* run = app.add_subcommand("run", "run recovery trials, write JSON-lines and a CSV summary");
    add_common(run, run_f);
    auto* sw = app.add_subcommand("sweep", "run the same experiment over several n");
    add_common(sw, sweep_f);
    std::vector<bsft::index_t> ns = {1 << 14, 1 << 16, 1 << 18, 1 << 20};
    sw->add_option("--ns", ns, "signal lengths")->delimiter(',');
    auto* oc = app.add_subcommand("oracle-check", "compare fast routines against dense references (n <= 4096)");
    add_common(oc, oracle_f);
    oc->add_option_function<std::string>("--tol", [&oracle_f](const std::string& v) { oracle_f.values["oracle_tol"] = v; },
                                         "override every check tolerance");
    oc->add_option_function<std::string>("--filter-order", [&oracle_f](const std::string& v) { oracle_f.values["oracle_order"] = v; },
                                         "flat filter order used by the checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*gen) return cmd_gen(resolve(gen_f));
        if (*run) return cmd_run(resolve(run_f));
        if (*sw) return cmd_sweep(resolve(sweep_f), ns);
        if (*oc) {
            auto c = resolve(oracle_f);
            if (oracle_f.values.count("n") == 0 && oracle_f.config_path.empty()) c.n = 1024;
            c.validate();
            return cmd_oracle(c);
        }
    } catch (const bsft::InvalidInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kCheckFailure;
    }
    return kUsage;
}
