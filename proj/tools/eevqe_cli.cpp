// Copyright 2026 The eevqe Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
/**
 * @file
 * Command line front end of the experiment runner. Options come from an
 * optional --config file; flags given on the command line override it.
 */
#include <CLI11.hpp>

#include <eevqe/experiment.hpp>

#include <cstdio>
#include <iostream>
#include <map>
#include <string>

namespace {

struct FlagSpec {
    const char *flag;
    const char *key;
    const char *help;
};

constexpr FlagSpec flag_specs[] = {
    {"--model", "model", "ising | xyz | heisenberg | rainbow"},
    {"--sites", "sites", "number of sites N (power of two)"},
    {"--chi", "chi", "bond dimension, or comma list per level"},
    {"--chi-lists", "chi_lists", "chi-sweep lists, e.g. \"2,2,2;2,4,16\""},
    {"--pattern", "pattern", "binary | full | branchK | flag bits"},
    {"--realizations", "realizations", "number of Hamiltonian realizations"},
    {"--seed", "seed", "base seed; realization r uses seed + r"},
    {"--network-seed", "network_seed", "seed of the shared initial network"},
    {"--mera-iters", "mera_iters", "MERA sweeps (or BFGS iterations)"},
    {"--vqe-iters", "vqe_iters", "VQE iterations"},
    {"--noise-sigma", "noise_sigma", "Gaussian noise on embedded gate angles"},
    {"--optimizers", "optimizers", "comma list of ev, modified-ev, bfgs"},
    {"--rule", "rule", "MERA rule of the pipeline stage"},
    {"--h-values", "h_values", "comma list of rainbow decay values"},
    {"--workers", "workers", "worker threads"},
    {"--out", "out", "output directory"},
};

void print_summary(const eevqe::ExperimentSummary &s,
                   const eevqe::ExperimentConfig &cfg) {
    for (const auto &arm : s.arms) {
        std::printf("%-28s n=%-4d", arm.name.c_str(), arm.curve.n);
        if (!arm.curve.mean.empty()) {
            std::printf(" %s first=%.4f last=%.4f",
                        arm.curve.log_scale ? "mean_log10_delta" : "mean_delta",
                        arm.curve.mean.front(), arm.curve.mean.back());
        }
        if (!arm.failures.empty()) {
            std::printf(" failed=%zu", arm.failures.size());
        }
        std::printf("\n");
    }
    if (cfg.command == "exact") {
        for (const auto &[key, e] : s.exact) {
            std::printf("%-28s E_exact=%.12f\n", key.c_str(), e);
        }
    }
    std::printf("results in %s\n", cfg.out.c_str());
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Entangled-embedding VQE experiments"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string config_path;
    bool plain_mean = false;
    bool quiet = false;
    app.add_option("--config", config_path, "key = value configuration file")
        ->check(CLI::ExistingFile);
    app.add_flag("--plain-mean", plain_mean,
                 "aggregate Delta itself instead of log10 Delta");
    app.add_flag("-q,--quiet", quiet, "no per-realization progress lines");
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option *> options;
    for (const auto &spec : flag_specs) {
        options[spec.key] = app.add_option(spec.flag, values[spec.key], spec.help);
    }
    for (const char *cmd : eevqe::experiment_commands) {
        app.add_subcommand(cmd, std::string("run the ") + cmd + " experiment");
    }
    CLI11_PARSE(app, argc, argv);

    try {
        eevqe::ExperimentConfig cfg;
        if (!config_path.empty()) {
            cfg = eevqe::load_config(config_path);
        }
        cfg.command = app.get_subcommands().front()->get_name();
        for (const auto &[key, opt] : options) {
            if (opt->count() > 0) {
                eevqe::set_option(cfg, key, values[key]);
            }
        }
        if (plain_mean) {
            cfg.plain_mean = true;
        }
        const eevqe::ExperimentSummary s =
            eevqe::run_experiment(cfg, quiet ? nullptr : &std::cerr);
        print_summary(s, cfg);
        for (const auto &arm : s.arms) {
            if (!arm.failures.empty()) {
                return 2;
            }
        }
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
