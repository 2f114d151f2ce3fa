// Copyright 2026 The spinsteer Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Batch layer: config parsing, the Z sweep over dephasing curves, CSV
// emission, and the causality utility. Everything here is deterministic
// for a fixed config, including under the thread pool; rows land in grid
// order and Monte-Carlo seeds derive from the row index.

#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "spinsteer/common.hpp"
#include "spinsteer/dynamics.hpp"
#include "spinsteer/measurement.hpp"
#include "spinsteer/model.hpp"
#include "spinsteer/witnesses.hpp"

namespace spinsteer {

enum class SweepScale { Linear, Log };

/// Monte-Carlo block of a config; present only when mc_samples is set.
struct MonteCarloConfig {
    std::size_t samples = 0;
    std::uint64_t seed = 1;
    double alpha = 10.0;
    double n_p = 1e6;
    double r_light = 0.0;
};

/// Full batch configuration with the documented defaults. The z/t_end/step
/// and gamma_d_add entries drive the single-point subcommands; the grid
/// fields and gamma_d_add_list drive sweeps.
struct SweepConfig {
    double z_min = 1.0;
    double z_max = 4.0;
    std::size_t z_steps = 300;
    SweepScale scale = SweepScale::Log;
    double z = 2.0;
    double d = 30.0;
    double gamma = 1.0;
    double gamma_d_add = 0.0;
    std::vector<double> gamma_d_add_list = {0.0, 2.0, 5.0};
    double n_atoms = 1e6;
    PopulationModel pop = PopulationModel::rate_balance();
    std::optional<MonteCarloConfig> mc;
    std::string output_path = "sweep.csv";
    std::size_t threads = 1;
    double t_end = 1.0;
    double step = 1e-3;
};

namespace detail {

inline std::string_view trim(std::string_view sv) {
    while (!sv.empty() && (sv.front() == ' ' || sv.front() == '\t' || sv.front() == '\r')) {
        sv.remove_prefix(1);
    }
    while (!sv.empty() && (sv.back() == ' ' || sv.back() == '\t' || sv.back() == '\r')) {
        sv.remove_suffix(1);
    }
    return sv;
}

inline bool parse_double(std::string_view sv, double& out) {
    const char* end = sv.data() + sv.size();
    auto res = std::from_chars(sv.data(), end, out);
    return res.ec == std::errc{} && res.ptr == end;
}

inline bool parse_u64(std::string_view sv, std::uint64_t& out) {
    const char* end = sv.data() + sv.size();
    auto res = std::from_chars(sv.data(), end, out);
    return res.ec == std::errc{} && res.ptr == end;
}

}  // namespace detail

/// Parses line-oriented `key = value` text. `#` starts a comment; blank
/// lines are skipped; unknown and duplicate keys are rejected with the
/// offending line and key.
inline SweepConfig parse_config(std::string_view text) {
    SweepConfig cfg;
    std::map<std::string, int, std::less<>> seen;
    bool mc_requested = false;
    MonteCarloConfig mc;
    bool pop_fixed_mode = false;
    double pop_fixed_value = 1.0;

    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;

        if (const std::size_t hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = detail::trim(line);
        if (line.empty()) continue;

        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("expected 'key = value'", line_no, std::string(line));
        }
        const std::string key(detail::trim(line.substr(0, eq)));
        const std::string_view value = detail::trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("empty key", line_no, key);
        if (value.empty()) throw ConfigError("empty value", line_no, key);
        if (!seen.emplace(key, line_no).second) {
            throw ConfigError("duplicate key", line_no, key);
        }

        const auto bad_value = [&]() {
            return ConfigError("malformed value '" + std::string(value) + "'", line_no, key);
        };
        const auto as_double = [&]() {
            double v;
            if (!detail::parse_double(value, v) || !std::isfinite(v)) throw bad_value();
            return v;
        };
        const auto as_count = [&]() {
            std::uint64_t v;
            if (!detail::parse_u64(value, v)) throw bad_value();
            return v;
        };

        if (key == "z_min") cfg.z_min = as_double();
        else if (key == "z_max") cfg.z_max = as_double();
        else if (key == "z_steps") cfg.z_steps = as_count();
        else if (key == "scale") {
            if (value == "linear") cfg.scale = SweepScale::Linear;
            else if (value == "log") cfg.scale = SweepScale::Log;
            else throw ConfigError("scale must be 'linear' or 'log'", line_no, key);
        }
        else if (key == "z") cfg.z = as_double();
        else if (key == "d") cfg.d = as_double();
        else if (key == "gamma") cfg.gamma = as_double();
        else if (key == "gamma_d_add") cfg.gamma_d_add = as_double();
        else if (key == "gamma_d_add_list") {
            std::vector<double> list;
            std::string_view rest = value;
            while (true) {
                const std::size_t comma = rest.find(',');
                const std::string_view item = detail::trim(rest.substr(0, comma));
                double v;
                if (item.empty() || !detail::parse_double(item, v) || !std::isfinite(v)) {
                    throw bad_value();
                }
                list.push_back(v);
                if (comma == std::string_view::npos) break;
                rest = rest.substr(comma + 1);
            }
            cfg.gamma_d_add_list = std::move(list);
        }
        else if (key == "n_atoms") cfg.n_atoms = as_double();
        else if (key == "pop") {
            if (value == "rate-balance") pop_fixed_mode = false;
            else if (value == "fixed") pop_fixed_mode = true;
            else throw ConfigError("pop must be 'rate-balance' or 'fixed'", line_no, key);
        }
        else if (key == "pop_fixed") pop_fixed_value = as_double();
        else if (key == "mc_samples") { mc.samples = as_count(); mc_requested = true; }
        else if (key == "mc_seed") { mc.seed = as_count(); }
        else if (key == "mc_alpha") { mc.alpha = as_double(); }
        else if (key == "mc_np") { mc.n_p = as_double(); }
        else if (key == "mc_r_light") { mc.r_light = as_double(); }
        else if (key == "output_path") cfg.output_path = std::string(value);
        else if (key == "threads") cfg.threads = as_count();
        else if (key == "t_end") cfg.t_end = as_double();
        else if (key == "step") cfg.step = as_double();
        else throw ConfigError("unknown key", line_no, key);
    }

    const auto line_of = [&](std::string_view key) {
        const auto it = seen.find(key);
        return it == seen.end() ? 0 : it->second;
    };
    const auto invalid = [&](const std::string& what, const char* key) {
        return ConfigError(what, line_of(key), key);
    };

    if (cfg.z_min < 1.0) throw invalid("z_min must be >= 1", "z_min");
    if (cfg.z_min > cfg.z_max) {
        const char* key = line_of("z_max") >= line_of("z_min") ? "z_max" : "z_min";
        throw ConfigError("z_min > z_max", line_of(key), key);
    }
    if (cfg.z_steps < 1) throw invalid("z_steps must be >= 1", "z_steps");
    if (cfg.z < 1.0) throw invalid("z must be >= 1", "z");
    if (cfg.d < 0.0) throw invalid("d must be >= 0", "d");
    if (!(cfg.gamma > 0.0)) throw invalid("gamma must be > 0", "gamma");
    if (cfg.gamma_d_add < 0.0) throw invalid("gamma_d_add must be >= 0", "gamma_d_add");
    if (cfg.gamma_d_add_list.empty()) throw invalid("needs at least one entry", "gamma_d_add_list");
    for (double v : cfg.gamma_d_add_list) {
        if (v < 0.0) throw invalid("entries must be >= 0", "gamma_d_add_list");
    }
    if (!(cfg.n_atoms > 0.0)) throw invalid("n_atoms must be > 0", "n_atoms");
    if (cfg.threads < 1 || cfg.threads > 256) throw invalid("threads out of range [1, 256]", "threads");
    if (!(cfg.t_end > 0.0)) throw invalid("t_end must be > 0", "t_end");
    if (!(cfg.step > 0.0)) throw invalid("step must be > 0", "step");

    if (pop_fixed_mode) {
        if (pop_fixed_value < 0.0 || pop_fixed_value > 1.0) {
            throw invalid("pop_fixed must lie in [0, 1]", "pop_fixed");
        }
        cfg.pop = PopulationModel::fixed(pop_fixed_value);
    } else if (line_of("pop_fixed") != 0) {
        throw invalid("pop_fixed requires pop = fixed", "pop_fixed");
    }

    if (mc_requested) {
        if (mc.samples < 100) throw invalid("mc_samples must be >= 100", "mc_samples");
        if (!(mc.alpha > 0.0)) throw invalid("mc_alpha must be > 0", "mc_alpha");
        if (!(mc.n_p > 0.0)) throw invalid("mc_np must be > 0", "mc_np");
        cfg.mc = mc;
    } else {
        for (const char* key : {"mc_seed", "mc_alpha", "mc_np", "mc_r_light"}) {
            if (line_of(key) != 0) {
                throw invalid("mc_samples is required when Monte-Carlo keys are set", key);
            }
        }
    }
    return cfg;
}

/// One sweep point. Numeric witness fields hold NaN when status != "ok".
struct SweepRow {
    double z = std::numeric_limits<double>::quiet_NaN();
    double mu = std::numeric_limits<double>::quiet_NaN();
    double nu = std::numeric_limits<double>::quiet_NaN();
    double p2 = std::numeric_limits<double>::quiet_NaN();
    double gamma_d_add = std::numeric_limits<double>::quiet_NaN();
    double g_opt = std::numeric_limits<double>::quiet_NaN();
    double var_inf_z = std::numeric_limits<double>::quiet_NaN();
    double var_inf_y = std::numeric_limits<double>::quiet_NaN();
    double xi_inf = std::numeric_limits<double>::quiet_NaN();
    double xi_g_inf = std::numeric_limits<double>::quiet_NaN();
    double e_epr_inf = std::numeric_limits<double>::quiet_NaN();
    bool entangled = false;
    bool epr_ab = false;
    bool epr_via_sum = false;
    std::string status = "ok";
    std::optional<WitnessEstimate> mc;
};

/// Per-curve minima over the Z grid (rows with status "ok" only).
struct CurveMinimum {
    double gamma_d_add = 0.0;
    double z_at_min_e = std::numeric_limits<double>::quiet_NaN();
    double min_e = std::numeric_limits<double>::quiet_NaN();
    double z_at_min_xi = std::numeric_limits<double>::quiet_NaN();
    double min_xi = std::numeric_limits<double>::quiet_NaN();
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<CurveMinimum> minima;
};

namespace detail {

inline std::string sanitize_status(std::string msg) {
    for (char& c : msg) {
        if (c == ',') c = ';';
        if (c == '\n' || c == '\r') c = ' ';
    }
    return msg.empty() ? std::string("error") : msg;
}

}  // namespace detail

/// Grid of Z values, endpoints exact.
inline std::vector<double> z_grid(const SweepConfig& cfg) {
    std::vector<double> zs(cfg.z_steps);
    if (cfg.z_steps == 1) {
        zs[0] = cfg.z_min;
        return zs;
    }
    const double lo = cfg.scale == SweepScale::Log ? std::log(cfg.z_min) : cfg.z_min;
    const double hi = cfg.scale == SweepScale::Log ? std::log(cfg.z_max) : cfg.z_max;
    for (std::size_t i = 0; i < cfg.z_steps; ++i) {
        const double f = static_cast<double>(i) / static_cast<double>(cfg.z_steps - 1);
        const double x = lo + f * (hi - lo);
        zs[i] = cfg.scale == SweepScale::Log ? std::exp(x) : x;
    }
    zs.front() = cfg.z_min;
    zs.back() = cfg.z_max;
    return zs;
}

/// Steady state, gains, and witnesses at one (Z, gamma_d_add) point.
/// Failures are captured in the row status; the sweep keeps going.
inline SweepRow evaluate_point(const SweepConfig& cfg, double z, double gamma_d_add,
                               std::size_t row_index) {
    SweepRow row;
    row.z = z;
    row.gamma_d_add = gamma_d_add;
    try {
        const ModelParams params =
            make_params(z, cfg.d, gamma_d_add, cfg.n_atoms, cfg.gamma, cfg.pop);
        row.mu = params.squeeze.mu;
        row.nu = params.squeeze.nu;
        const MomentState steady = steady_state(params);
        row.p2 = steady.p2;
        const WitnessReport rep = classify(steady, params);
        row.g_opt = optimal_gain(params).g_z;
        row.var_inf_z = rep.var_inf_z;
        row.var_inf_y = rep.var_inf_y;
        row.xi_inf = rep.delta_ent;
        row.xi_g_inf = rep.delta_g_ent;
        row.e_epr_inf = rep.e_epr_ab;
        row.entangled = rep.entangled;
        row.epr_ab = rep.epr_ab;
        row.epr_via_sum = rep.epr_via_sum;
        if (cfg.mc) {
            const MonteCarloConfig& mc = *cfg.mc;
            const PulseModel pulse{mc.alpha, mc.n_p, mc.r_light};
            const SpinSampleSet samples =
                sample_spins(covariance_from_moments(steady), mc.samples,
                             derive_seed(mc.seed, 2 * row_index));
            const LocalReadout readout =
                local_readout(samples, pulse, derive_seed(mc.seed, 2 * row_index + 1));
            row.mc = estimate_witnesses(readout, params);
        }
    } catch (const std::exception& e) {
        row.status = detail::sanitize_status(e.what());
    }
    return row;
}

/// Runs the full (gamma_d_add x Z) grid, optionally on a thread pool.
/// Row order and content are schedule-independent.
inline SweepResult run_sweep(const SweepConfig& cfg) {
    const std::vector<double> zs = z_grid(cfg);
    const std::size_t per_curve = zs.size();
    const std::size_t total = per_curve * cfg.gamma_d_add_list.size();

    SweepResult result;
    result.rows.resize(total);
    const auto work = [&](std::size_t index) {
        const double add = cfg.gamma_d_add_list[index / per_curve];
        const double z = zs[index % per_curve];
        result.rows[index] = evaluate_point(cfg, z, add, index);
    };

    const std::size_t workers = std::min<std::size_t>(cfg.threads, total);
    if (workers <= 1) {
        for (std::size_t i = 0; i < total; ++i) work(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t t = 0; t < workers; ++t) {
            pool.emplace_back([&]() {
                for (std::size_t i = next.fetch_add(1); i < total; i = next.fetch_add(1)) {
                    work(i);
                }
            });
        }
        for (std::thread& t : pool) t.join();
    }

    for (std::size_t curve = 0; curve < cfg.gamma_d_add_list.size(); ++curve) {
        CurveMinimum m;
        m.gamma_d_add = cfg.gamma_d_add_list[curve];
        for (std::size_t i = 0; i < per_curve; ++i) {
            const SweepRow& row = result.rows[curve * per_curve + i];
            if (row.status != "ok") continue;
            if (!(row.e_epr_inf >= m.min_e)) {  // NaN-safe: first hit always wins
                m.min_e = row.e_epr_inf;
                m.z_at_min_e = row.z;
            }
            if (!(row.xi_inf >= m.min_xi)) {
                m.min_xi = row.xi_inf;
                m.z_at_min_xi = row.z;
            }
        }
        result.minima.push_back(m);
    }
    return result;
}

/// 9 significant digits, locale-free, '.' decimal point.
inline std::string format_number(double x) {
    std::array<char, 48> buf;
    const auto res =
        std::to_chars(buf.data(), buf.data() + buf.size(), x, std::chars_format::general, 9);
    return std::string(buf.data(), res.ptr);
}

inline const char* format_bool(bool b) { return b ? "true" : "false"; }

inline constexpr const char* kCsvHeader =
    "Z,mu,nu,p2,gamma_d_add,g_opt,var_inf_z,var_inf_y,xi_inf,xi_g_inf,E_epr_inf,"
    "entangled,epr_ab,epr_via_sum,status";

inline constexpr const char* kCsvMcHeader =
    ",mc_g,mc_g_se,mc_var_inf_z,mc_var_inf_z_se,mc_var_inf_y,mc_var_inf_y_se,mc_E,mc_E_se";

/// Writes the rows as UTF-8 CSV with `\n` endings. Monte-Carlo columns are
/// appended after the base header when requested.
inline void emit_csv(const std::vector<SweepRow>& rows, const std::string& path, bool with_mc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");

    out << kCsvHeader;
    if (with_mc) out << kCsvMcHeader;
    out << '\n';
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const SweepRow& row : rows) {
        out << format_number(row.z) << ',' << format_number(row.mu) << ','
            << format_number(row.nu) << ',' << format_number(row.p2) << ','
            << format_number(row.gamma_d_add) << ',' << format_number(row.g_opt) << ','
            << format_number(row.var_inf_z) << ',' << format_number(row.var_inf_y) << ','
            << format_number(row.xi_inf) << ',' << format_number(row.xi_g_inf) << ','
            << format_number(row.e_epr_inf) << ',' << format_bool(row.entangled) << ','
            << format_bool(row.epr_ab) << ',' << format_bool(row.epr_via_sum) << ','
            << row.status;
        if (with_mc) {
            const auto field = [&](double v, double se) {
                out << ',' << format_number(v) << ',' << format_number(se);
            };
            if (row.mc) {
                field(row.mc->g_z.value, row.mc->g_z.se);
                field(row.mc->var_inf_z.value, row.mc->var_inf_z.se);
                field(row.mc->var_inf_y.value, row.mc->var_inf_y.se);
                field(row.mc->e_epr_ab.value, row.mc->e_epr_ab.se);
            } else {
                for (int i = 0; i < 4; ++i) field(nan, nan);
            }
        }
        out << '\n';
    }
    if (!out.flush()) throw IoError("write to '" + path + "' failed");
}

inline void emit_csv(const std::vector<SweepRow>& rows, const std::string& path) {
    const bool with_mc =
        std::any_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.mc.has_value(); });
    emit_csv(rows, path, with_mc);
}

/// Minimum separation (meters) for spacelike measurement events a time
/// delta_t (seconds) apart.
inline double causal_separation(double delta_t) {
    require_finite(delta_t, "delta_t");
    if (delta_t < 0.0) throw std::domain_error("time separation must be >= 0");
    return kSpeedOfLight * delta_t;
}

}  // namespace spinsteer
