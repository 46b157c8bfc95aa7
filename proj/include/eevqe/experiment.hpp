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
 * Batch experiments over Hamiltonian realizations: configuration, per-run
 * histories on disk (so interrupted sweeps resume), and aggregation of the
 * relative error into mean log10 curves.
 */
#pragma once
#include "error.hpp"
#include "hamiltonian.hpp"
#include "mera_bfgs.hpp"
#include "mera_network.hpp"
#include "mera_optimizer.hpp"
#include "random.hpp"
#include "run_history.hpp"
#include "vqe.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace eevqe {

inline constexpr const char *experiment_commands[] = {
    "bench-optimizers", "eevqe",  "vqe-baseline", "branching-sweep",
    "chi-sweep",        "rainbow", "exact"};

struct ExperimentConfig {
    std::string command = "eevqe";
    std::string model = "ising";
    int sites = 8;
    /// One value for every level above the physical one, or one per level.
    std::vector<std::size_t> chi{2};
    /// Bond-dimension lists for chi-sweep.
    std::vector<std::vector<std::size_t>> chi_lists{{2, 2, 2}, {2, 4, 16}};
    std::string pattern = "full";
    int realizations = 10;
    /// Realization r uses Hamiltonian seed `seed + r`.
    std::uint64_t seed = 0;
    /// Seed of the initial network, shared by all realizations; derived
    /// from `seed` when unset.
    std::optional<std::uint64_t> network_seed;
    int mera_iters = 1000;
    int vqe_iters = 10000;
    double noise_sigma = 0.0;
    /// Arms of bench-optimizers and rules of the sweeps.
    std::vector<std::string> optimizers{"ev", "modified-ev", "bfgs"};
    /// MERA rule of the pipeline stage.
    std::string rule = "modified-ev";
    /// Rainbow decay values.
    std::vector<double> h_values{0.0, 2.0, 3.5};
    bool plain_mean = false;
    int workers = 1;
    std::string out = "results";
};

namespace detail {

inline std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string trim(const std::string &s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

/// Non-empty trimmed fields.
inline std::vector<std::string> split(const std::string &text, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream is(text);
    while (std::getline(is, cur, sep)) {
        cur = trim(cur);
        if (!cur.empty()) {
            parts.push_back(cur);
        }
    }
    return parts;
}

template <class T, class F>
std::string join(const std::vector<T> &v, char sep, F fmt) {
    std::string s;
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (k > 0) {
            s += sep;
        }
        s += fmt(v[k]);
    }
    return s;
}

inline std::string join_sizes(const std::vector<std::size_t> &v, char sep) {
    return join(v, sep, [](std::size_t x) { return std::to_string(x); });
}

inline std::vector<std::size_t> parse_sizes(const std::string &text) {
    std::vector<std::size_t> out;
    for (const auto &p : split(text, ',')) {
        out.push_back(static_cast<std::size_t>(std::stoul(p)));
    }
    require(!out.empty(), ErrorKind::Parse, "empty bond-dimension list");
    return out;
}

inline bool parse_bool(const std::string &v) {
    if (v == "true" || v == "1" || v == "yes") {
        return true;
    }
    require(v == "false" || v == "0" || v == "no", ErrorKind::Parse,
            "expected a boolean, got '" + v + "'");
    return false;
}

} // namespace detail

[[nodiscard]] inline std::uint64_t network_seed(const ExperimentConfig &cfg) {
    return cfg.network_seed ? *cfg.network_seed : derive_seed(cfg.seed, 1);
}

/// Hamiltonian seed of realization r.
[[nodiscard]] inline std::uint64_t realization_seed(const ExperimentConfig &cfg,
                                                    int r) {
    return cfg.seed + static_cast<std::uint64_t>(r);
}

inline constexpr const char *experiment_keys[] = {
    "command",      "model",      "sites",        "chi",
    "chi_lists",    "pattern",    "realizations", "seed",
    "network_seed", "mera_iters", "vqe_iters",    "noise_sigma",
    "optimizers",   "rule",       "h_values",     "plain_mean",
    "workers",      "out"};

[[nodiscard]] inline bool is_experiment_key(const std::string &key) {
    return std::find(std::begin(experiment_keys), std::end(experiment_keys),
                     key) != std::end(experiment_keys);
}

/// Set one option from its text form; throws Parse on unknown keys.
inline void set_option(ExperimentConfig &cfg, const std::string &key,
                       const std::string &value) {
    try {
        if (key == "command") {
            require(std::find(std::begin(experiment_commands),
                              std::end(experiment_commands),
                              value) != std::end(experiment_commands),
                    ErrorKind::Parse, "unknown command '" + value + "'");
            cfg.command = value;
        } else if (key == "model") {
            (void)parse_model(value);
            cfg.model = value;
        } else if (key == "sites") {
            cfg.sites = std::stoi(value);
        } else if (key == "chi") {
            cfg.chi = detail::parse_sizes(value);
        } else if (key == "chi_lists") {
            cfg.chi_lists.clear();
            for (const auto &list : detail::split(value, ';')) {
                cfg.chi_lists.push_back(detail::parse_sizes(list));
            }
        } else if (key == "pattern") {
            cfg.pattern = value;
        } else if (key == "realizations") {
            cfg.realizations = std::stoi(value);
        } else if (key == "seed") {
            cfg.seed = std::stoull(value);
        } else if (key == "network_seed") {
            cfg.network_seed = std::stoull(value);
        } else if (key == "mera_iters") {
            cfg.mera_iters = std::stoi(value);
        } else if (key == "vqe_iters") {
            cfg.vqe_iters = std::stoi(value);
        } else if (key == "noise_sigma") {
            cfg.noise_sigma = std::stod(value);
        } else if (key == "optimizers") {
            cfg.optimizers = detail::split(value, ',');
        } else if (key == "rule") {
            cfg.rule = value;
        } else if (key == "h_values") {
            cfg.h_values.clear();
            for (const auto &p : detail::split(value, ',')) {
                cfg.h_values.push_back(std::stod(p));
            }
        } else if (key == "plain_mean") {
            cfg.plain_mean = detail::parse_bool(value);
        } else if (key == "workers") {
            cfg.workers = std::stoi(value);
        } else if (key == "out") {
            cfg.out = value;
        } else {
            throw Error(ErrorKind::Parse, "unknown config key '" + key + "'");
        }
    } catch (const std::logic_error &e) {
        throw Error(ErrorKind::Parse,
                    "bad value '" + value + "' for '" + key + "': " + e.what());
    }
}

/**
 * @brief Read "key = value" lines. Blank lines and lines starting with '#'
 * that hold no '=' are skipped. A leading "# " is stripped and unknown keys
 * on such lines are ignored, so the comment header of an output CSV is itself
 * a valid config. Reading stops at the first line that is neither.
 */
inline void read_config(std::istream &is, ExperimentConfig &cfg) {
    std::string line;
    while (std::getline(is, line)) {
        std::string body = line;
        const bool comment = body.rfind("# ", 0) == 0;
        if (comment) {
            body = body.substr(2);
        }
        const auto b = body.find_first_not_of(" \t");
        if (b == std::string::npos || body[b] == '#') {
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            if (line.rfind('#', 0) == 0) {
                continue;
            }
            break;
        }
        const std::string key = detail::trim(body.substr(0, eq));
        require(!key.empty(), ErrorKind::Parse, "missing key in '" + line + "'");
        if (comment && !is_experiment_key(key)) {
            continue;
        }
        set_option(cfg, key, detail::trim(body.substr(eq + 1)));
    }
}

[[nodiscard]] inline ExperimentConfig parse_config(const std::string &text) {
    ExperimentConfig cfg;
    std::istringstream is(text);
    read_config(is, cfg);
    return cfg;
}

[[nodiscard]] inline ExperimentConfig load_config(const std::string &path) {
    std::ifstream is(path);
    require(static_cast<bool>(is), ErrorKind::Io, "cannot read " + path);
    ExperimentConfig cfg;
    read_config(is, cfg);
    return cfg;
}

/**
 * @brief Resolved configuration as ordered key/value pairs. Worker count and
 * output directory are left out since they do not change results.
 */
[[nodiscard]] inline std::vector<std::pair<std::string, std::string>>
config_entries(const ExperimentConfig &cfg) {
    using detail::join;
    return {
        {"command", cfg.command},
        {"model", cfg.model},
        {"sites", std::to_string(cfg.sites)},
        {"chi", detail::join_sizes(cfg.chi, ',')},
        {"chi_lists",
         join(cfg.chi_lists, ';',
              [](const auto &l) { return detail::join_sizes(l, ','); })},
        {"pattern", cfg.pattern},
        {"realizations", std::to_string(cfg.realizations)},
        {"seed", std::to_string(cfg.seed)},
        {"network_seed", std::to_string(network_seed(cfg))},
        {"mera_iters", std::to_string(cfg.mera_iters)},
        {"vqe_iters", std::to_string(cfg.vqe_iters)},
        {"noise_sigma", detail::format_real(cfg.noise_sigma)},
        {"optimizers", join(cfg.optimizers, ',', [](const auto &s) { return s; })},
        {"rule", cfg.rule},
        {"h_values", join(cfg.h_values, ',', detail::format_real)},
        {"plain_mean", cfg.plain_mean ? "true" : "false"},
    };
}

[[nodiscard]] inline std::string to_text(const ExperimentConfig &cfg) {
    std::string s;
    for (const auto &[k, v] : config_entries(cfg)) {
        s += k + " = " + v + "\n";
    }
    return s;
}

/// Bond dimensions per level from a scalar or a full list.
[[nodiscard]] inline std::vector<std::size_t>
resolve_chi(const std::vector<std::size_t> &chi, int levels) {
    if (chi.size() == static_cast<std::size_t>(levels)) {
        return chi;
    }
    require(chi.size() == 1, ErrorKind::InvalidArgument,
            "chi needs 1 or " + std::to_string(levels) + " values");
    std::vector<std::size_t> out(static_cast<std::size_t>(levels), chi[0]);
    out[0] = 2;
    return out;
}

[[nodiscard]] inline SweepRule parse_rule(const std::string &name) {
    if (name == "ev") {
        return SweepRule::EvenblyVidal;
    }
    require(name == "modified-ev", ErrorKind::InvalidArgument,
            "unknown sweep rule '" + name + "'");
    return SweepRule::Modified;
}

/// Shifted Hamiltonian of realization r (`decay` is used by the rainbow model).
[[nodiscard]] inline PairHamiltonian make_instance(const ExperimentConfig &cfg,
                                                   int r, double decay = 0.0) {
    const std::uint64_t s = realization_seed(cfg, r);
    switch (parse_model(cfg.model)) {
    case ModelTag::Ising:
        return shift_negative(gen_ising(cfg.sites, s));
    case ModelTag::XYZ:
        return shift_negative(gen_xyz(cfg.sites, s));
    case ModelTag::Heisenberg:
        return shift_negative(gen_heisenberg(cfg.sites, s));
    case ModelTag::Rainbow:
        return shift_negative(gen_rainbow(cfg.sites, decay));
    case ModelTag::Custom:
        break;
    }
    throw Error(ErrorKind::InvalidArgument,
                "experiments need a generated model, not 'custom'");
}

/// Realizations are clamped to this floor before taking log10.
inline constexpr double delta_floor = 1e-16;

struct AggregateCurve {
    std::vector<int> iteration;
    std::vector<Stage> stage;
    /// Mean of log10 Delta, or of Delta itself for plain-mean curves.
    std::vector<double> mean;
    /// Population variance of the same quantity.
    std::vector<double> variance;
    /// Number of completed realizations.
    int n = 0;
    bool log_scale = true;
};

/// Pointwise statistics over histories of equal length.
[[nodiscard]] inline AggregateCurve
aggregate(const std::vector<RunHistory> &runs, bool plain_mean = false) {
    AggregateCurve c;
    c.log_scale = !plain_mean;
    c.n = static_cast<int>(runs.size());
    if (runs.empty()) {
        return c;
    }
    const std::size_t len = runs.front().rows.size();
    for (const auto &r : runs) {
        require(r.rows.size() == len, ErrorKind::DimensionMismatch,
                "histories of different lengths cannot be aggregated");
    }
    std::vector<double> v(runs.size());
    for (std::size_t t = 0; t < len; ++t) {
        double mean = 0.0;
        for (std::size_t k = 0; k < runs.size(); ++k) {
            const double d = runs[k].rows[t].delta;
            v[k] = plain_mean ? d : std::log10(std::max(d, delta_floor));
            mean += v[k] / c.n;
        }
        double var = 0.0;
        for (double x : v) {
            var += (x - mean) * (x - mean) / c.n;
        }
        c.iteration.push_back(runs.front().rows[t].iteration);
        c.stage.push_back(runs.front().rows[t].stage);
        c.mean.push_back(mean);
        c.variance.push_back(var);
    }
    return c;
}

/// Value of the curve at the first row with this iteration and stage.
[[nodiscard]] inline double curve_at(const AggregateCurve &c, int iteration,
                                     Stage stage) {
    for (std::size_t t = 0; t < c.iteration.size(); ++t) {
        if (c.iteration[t] == iteration && c.stage[t] == stage) {
            return c.mean[t];
        }
    }
    throw Error(ErrorKind::InvalidArgument,
                "curve has no row at iteration " + std::to_string(iteration));
}

inline void write_curve_csv(
    std::ostream &os, const AggregateCurve &c,
    const std::vector<std::pair<std::string, std::string>> &header) {
    for (const auto &[k, v] : header) {
        os << "# " << k << " = " << v << '\n';
    }
    os << "# completed = " << c.n << '\n';
    os << "iteration,stage," << (c.log_scale ? "mean_log10_delta" : "mean_delta")
       << ",variance,n\n";
    for (std::size_t t = 0; t < c.mean.size(); ++t) {
        os << c.iteration[t] << ',' << to_string(c.stage[t]) << ','
           << detail::format_real(c.mean[t]) << ','
           << detail::format_real(c.variance[t]) << ',' << c.n << '\n';
    }
}

/// One arm of an experiment: a named way of producing a history.
struct ExperimentArm {
    std::string name;
    /// Extra header entries written with the arm's curve.
    std::vector<std::pair<std::string, std::string>> header;
    std::function<RunHistory(int realization)> run;
};

struct ArmResult {
    std::string name;
    AggregateCurve curve;
    std::vector<RunHistory> runs;
    /// Realizations whose run threw, with the message.
    std::vector<std::pair<int, std::string>> failures;
};

struct ExperimentSummary {
    std::vector<ArmResult> arms;
    /// Exact ground energies by instance key.
    std::map<std::string, double> exact;

    [[nodiscard]] const ArmResult &arm(const std::string &name) const {
        for (const auto &a : arms) {
            if (a.name == name) {
                return a;
            }
        }
        throw Error(ErrorKind::InvalidArgument, "no arm named '" + name + "'");
    }
};

namespace detail {

/// Run f(0..count-1) on `workers` threads; f must be thread safe.
inline void parallel_for(int count, int workers,
                         const std::function<void(int)> &f) {
    const int n_threads = std::max(1, std::min(workers, count));
    if (n_threads == 1) {
        for (int k = 0; k < count; ++k) {
            f(k);
        }
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) {
        pool.emplace_back([&] {
            for (int k = next++; k < count; k = next++) {
                f(k);
            }
        });
    }
    for (auto &th : pool) {
        th.join();
    }
}

inline std::string arm_directory(const std::string &arm) {
    std::string s = arm;
    std::replace(s.begin(), s.end(), '/', '_');
    return s;
}

} // namespace detail

/**
 * @brief Runs the arms of a command over all realizations, writing
 * `<out>/<arm>/realization-<r>.csv` per run, `<out>/<arm>/curves.csv` per arm
 * and `<out>/instances/<key>.txt` per Hamiltonian. Runs whose file already
 * exists are loaded instead of recomputed.
 */
class ExperimentRunner {
  public:
    explicit ExperimentRunner(ExperimentConfig cfg, std::ostream *log = nullptr)
        : cfg_{std::move(cfg)}, log_{log} {
        require(cfg_.realizations >= 0, ErrorKind::InvalidArgument,
                "realization count must be non-negative");
        require(cfg_.workers >= 1, ErrorKind::InvalidArgument,
                "need at least one worker");
    }

    [[nodiscard]] const ExperimentConfig &config() const { return cfg_; }

    ExperimentSummary run() {
        namespace fs = std::filesystem;
        fs::create_directories(fs::path(cfg_.out) / "instances");
        check_output_directory();
        ExperimentSummary summary;
        const auto arms = build_arms();
        if (cfg_.command == "exact") {
            write_exact_table();
        }
        for (const auto &arm : arms) {
            summary.arms.push_back(run_arm(arm));
        }
        std::lock_guard<std::mutex> lock(mutex_);
        summary.exact = exact_;
        return summary;
    }

    /// Exact energy of an instance, cached on disk next to the instance.
    double exact_energy(const std::string &key, const PairHamiltonian &h) {
        {
            std::lock_guard<std::mutex> lock(mutex_);
            if (const auto it = exact_.find(key); it != exact_.end()) {
                return it->second;
            }
        }
        namespace fs = std::filesystem;
        const fs::path dir = fs::path(cfg_.out) / "instances";
        const fs::path energy_file = dir / (key + ".exact");
        const std::string text = serialize(h);
        double e = 0.0;
        bool cached = false;
        if (fs::exists(energy_file) && fs::exists(dir / (key + ".txt"))) {
            std::ifstream is(dir / (key + ".txt"));
            const std::string stored((std::istreambuf_iterator<char>(is)),
                                     std::istreambuf_iterator<char>());
            std::ifstream es(energy_file);
            cached = stored == text && static_cast<bool>(es >> e);
        }
        if (!cached) {
            e = exact_ground_energy(h);
            std::ofstream(dir / (key + ".txt")) << text;
            std::ofstream(energy_file) << detail::format_real(e) << '\n';
        }
        std::lock_guard<std::mutex> lock(mutex_);
        exact_[key] = e;
        return e;
    }

  private:
    [[nodiscard]] int levels() const { return log2_exact(cfg_.sites); }

    /// Refuse to resume from results of a different configuration. The
    /// realization count may grow and the aggregation may change.
    void check_output_directory() const {
        namespace fs = std::filesystem;
        std::string text;
        for (const auto &[k, v] : config_entries(cfg_)) {
            if (k != "realizations" && k != "plain_mean") {
                text += k + " = " + v + "\n";
            }
        }
        const fs::path file = fs::path(cfg_.out) / "config.txt";
        if (fs::exists(file)) {
            std::ifstream is(file);
            const std::string stored((std::istreambuf_iterator<char>(is)),
                                     std::istreambuf_iterator<char>());
            require(stored == text, ErrorKind::InvalidArgument,
                    "output directory " + cfg_.out +
                        " holds results of a different configuration");
            return;
        }
        std::ofstream(file) << text;
    }

    [[nodiscard]] std::string instance_key(int r) const {
        return "realization-" + std::to_string(r);
    }

    /// Metadata shared by every history of realization r.
    void tag(RunHistory &h, const PairHamiltonian &ham, int r,
             std::uint64_t net_seed, const std::vector<std::size_t> &chi,
             const std::string &pattern) const {
        h.set("model", to_string(ham.model));
        h.set("sites", std::to_string(ham.n_sites));
        h.set("chi", detail::join_sizes(chi, ','));
        h.set("pattern", pattern);
        h.set("realization", std::to_string(r));
        h.set("hamiltonian_seed", std::to_string(ham.seed));
        h.set("network_seed", std::to_string(net_seed));
        h.set("instance_hash", instance_hash(ham));
        if (ham.model == ModelTag::Rainbow) {
            h.set("decay", detail::format_real(ham.parameter));
        }
    }

    RunHistory tn_run(int r, const std::string &optimizer,
                      const std::vector<std::size_t> &chi,
                      const BranchPattern &pattern) {
        const PairHamiltonian h = make_instance(cfg_, r);
        const double exact = exact_energy(instance_key(r), h);
        const std::uint64_t ns = network_seed(cfg_);
        MeraNetwork net = build(cfg_.sites, chi, pattern, ns);
        RunHistory hist;
        if (optimizer == "bfgs") {
            hist = bfgs_optimize(net, h, cfg_.mera_iters, exact);
        } else {
            hist = run_sweeps(net, h, SweepSchedule::full(net, cfg_.mera_iters),
                              parse_rule(optimizer), exact);
        }
        tag(hist, h, r, ns, chi, pattern.bits());
        return hist;
    }

    RunHistory pipeline_run(const PairHamiltonian &h, const std::string &key,
                            int r, std::uint64_t net_seed) {
        const double exact = exact_energy(key, h);
        PipelineConfig p;
        p.pattern = parse_pattern(cfg_.pattern, levels());
        p.mera_iters = cfg_.mera_iters;
        p.vqe_iters = cfg_.vqe_iters;
        p.noise_sigma = cfg_.noise_sigma;
        p.network_seed = net_seed;
        p.noise_seed = derive_seed(realization_seed(cfg_, r), 2);
        p.rule = parse_rule(cfg_.rule);
        const PipelineResult res = eevqe_pipeline(h, exact, p);
        RunHistory hist = res.combined;
        tag(hist, h, r, net_seed, std::vector<std::size_t>(
                                      static_cast<std::size_t>(levels()), 2),
            p.pattern.bits());
        hist.set("termination", res.vqe.history.get("termination"));
        hist.set("embedding_gap", detail::format_real(res.embedding_gap));
        if (h.n_sites <= 16) {
            hist.set("embedding_overlap",
                     detail::format_real(res.embedding_overlap));
        }
        return hist;
    }

    std::vector<ExperimentArm> build_arms() {
        std::vector<ExperimentArm> arms;
        const std::string &cmd = cfg_.command;
        if (cmd == "bench-optimizers") {
            const auto chi = resolve_chi(cfg_.chi, levels());
            const BranchPattern pattern = parse_pattern(cfg_.pattern, levels());
            for (const auto &opt : cfg_.optimizers) {
                arms.push_back({opt, {{"arm", opt}}, [this, opt, chi, pattern](int r) {
                                    return tn_run(r, opt, chi, pattern);
                                }});
            }
        } else if (cmd == "eevqe") {
            arms.push_back({"eevqe", {{"arm", "eevqe"}}, [this](int r) {
                                return pipeline_run(make_instance(cfg_, r),
                                                    instance_key(r), r,
                                                    network_seed(cfg_));
                            }});
        } else if (cmd == "vqe-baseline") {
            arms.push_back({"vqe-baseline", {{"arm", "vqe-baseline"}}, [this](int r) {
                                const PairHamiltonian h = make_instance(cfg_, r);
                                const double exact =
                                    exact_energy(instance_key(r), h);
                                const BranchPattern pattern =
                                    parse_pattern(cfg_.pattern, levels());
                                const std::uint64_t cs =
                                    derive_seed(realization_seed(cfg_, r), 3);
                                VqeResult v = random_baseline(
                                    h, exact, pattern, cfg_.vqe_iters, cs);
                                tag(v.history, h, r, cs,
                                    std::vector<std::size_t>(
                                        static_cast<std::size_t>(levels()), 2),
                                    pattern.bits());
                                v.history.set("circuit_seed", std::to_string(cs));
                                return v.history;
                            }});
        } else if (cmd == "branching-sweep") {
            const auto chi = resolve_chi(cfg_.chi, levels());
            for (int k = 0; k < levels(); ++k) {
                const BranchPattern pattern = BranchPattern::top_down(k, levels());
                for (const auto &opt : cfg_.optimizers) {
                    if (opt == "bfgs") {
                        continue;
                    }
                    const std::string name = "branch" + std::to_string(k) + "/" + opt;
                    arms.push_back({name,
                                    {{"arm", name}, {"branch_pattern", pattern.bits()}},
                                    [this, opt, chi, pattern](int r) {
                                        return tn_run(r, opt, chi, pattern);
                                    }});
                }
            }
        } else if (cmd == "chi-sweep") {
            const BranchPattern pattern = parse_pattern(cfg_.pattern, levels());
            for (const auto &list : cfg_.chi_lists) {
                const auto chi = resolve_chi(list, levels());
                for (const auto &opt : cfg_.optimizers) {
                    if (opt == "bfgs") {
                        continue;
                    }
                    const std::string name =
                        "chi-" + detail::join_sizes(chi, '-') + "/" + opt;
                    arms.push_back({name, {{"arm", name}},
                                    [this, opt, chi, pattern](int r) {
                                        return tn_run(r, opt, chi, pattern);
                                    }});
                }
            }
        } else if (cmd == "rainbow") {
            require(parse_model(cfg_.model) == ModelTag::Rainbow,
                    ErrorKind::InvalidArgument, "rainbow needs model = rainbow");
            for (double decay : cfg_.h_values) {
                const std::string name = "h-" + detail::format_real(decay);
                arms.push_back({name, {{"arm", name}}, [this, decay, name](int r) {
                                    // The Hamiltonian is fixed; realizations
                                    // vary the initial network.
                                    return pipeline_run(
                                        make_instance(cfg_, r, decay), name, r,
                                        network_seed(cfg_) +
                                            static_cast<std::uint64_t>(r));
                                }});
            }
        } else {
            require(cmd == "exact", ErrorKind::InvalidArgument,
                    "unknown command '" + cmd + "'");
        }
        return arms;
    }

    void write_exact_table() {
        std::vector<double> energies(static_cast<std::size_t>(cfg_.realizations));
        std::vector<std::string> hashes(energies.size());
        detail::parallel_for(cfg_.realizations, cfg_.workers, [&](int r) {
            const PairHamiltonian h = make_instance(cfg_, r);
            energies[static_cast<std::size_t>(r)] = exact_energy(instance_key(r), h);
            hashes[static_cast<std::size_t>(r)] = instance_hash(h);
        });
        std::ofstream os(std::filesystem::path(cfg_.out) / "exact.csv");
        for (const auto &[k, v] : config_entries(cfg_)) {
            os << "# " << k << " = " << v << '\n';
        }
        os << "realization,seed,exact_energy,instance_hash\n";
        for (int r = 0; r < cfg_.realizations; ++r) {
            os << r << ',' << realization_seed(cfg_, r) << ','
               << detail::format_real(energies[static_cast<std::size_t>(r)]) << ','
               << hashes[static_cast<std::size_t>(r)] << '\n';
        }
    }

    ArmResult run_arm(const ExperimentArm &arm) {
        namespace fs = std::filesystem;
        const fs::path dir = fs::path(cfg_.out) / detail::arm_directory(arm.name);
        fs::create_directories(dir);
        const auto n = static_cast<std::size_t>(cfg_.realizations);
        std::vector<std::optional<RunHistory>> runs(n);
        ArmResult out;
        out.name = arm.name;
        std::mutex fail_mutex;
        detail::parallel_for(cfg_.realizations, cfg_.workers, [&](int r) {
            const fs::path file = dir / ("realization-" + std::to_string(r) + ".csv");
            try {
                if (fs::exists(file)) {
                    runs[static_cast<std::size_t>(r)] = load_history(file.string());
                    return;
                }
                RunHistory h = arm.run(r);
                h.set("arm", arm.name);
                const fs::path tmp = file.string() + ".tmp";
                save_history(tmp.string(), h);
                fs::rename(tmp, file);
                runs[static_cast<std::size_t>(r)] = std::move(h);
                log("  " + arm.name + " realization " + std::to_string(r) + " done");
            } catch (const std::exception &e) {
                std::lock_guard<std::mutex> lock(fail_mutex);
                out.failures.emplace_back(r, e.what());
                log("  " + arm.name + " realization " + std::to_string(r) +
                    " failed: " + e.what());
            }
        });
        for (auto &r : runs) {
            if (r) {
                out.runs.push_back(std::move(*r));
            }
        }
        std::sort(out.failures.begin(), out.failures.end());
        out.curve = aggregate(out.runs, cfg_.plain_mean);
        auto header = config_entries(cfg_);
        header.insert(header.end(), arm.header.begin(), arm.header.end());
        std::ofstream os(dir / "curves.csv");
        write_curve_csv(os, out.curve, header);
        return out;
    }

    void log(const std::string &msg) {
        if (log_ != nullptr) {
            std::lock_guard<std::mutex> lock(mutex_);
            *log_ << msg << '\n';
        }
    }

    ExperimentConfig cfg_;
    std::ostream *log_;
    std::mutex mutex_;
    std::map<std::string, double> exact_;
};

/// Run the command named in the configuration.
inline ExperimentSummary run_experiment(const ExperimentConfig &cfg,
                                        std::ostream *log = nullptr) {
    ExperimentRunner runner(cfg, log);
    return runner.run();
}

} // namespace eevqe
