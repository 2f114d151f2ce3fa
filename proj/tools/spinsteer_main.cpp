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
// Batch front-end. Exit codes: 0 success, 1 config error, 2 numerical or
// I/O failure.

#include <cstdio>
#include <exception>
#include <fstream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "spinsteer/spinsteer.hpp"

namespace {

spinsteer::SweepConfig load_config(const std::string& path) {
    if (path.empty()) return spinsteer::SweepConfig{};
    std::ifstream in(path, std::ios::binary);
    if (!in) throw spinsteer::IoError("cannot open config '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return spinsteer::parse_config(text.str());
}

void print_estimate(const char* name, const spinsteer::Estimate& e) {
    std::printf("%s = %s +/- %s\n", name, spinsteer::format_number(e.value).c_str(),
                spinsteer::format_number(e.se).c_str());
}

int run_sweep_cmd(const std::string& config_path) {
    const spinsteer::SweepConfig cfg = load_config(config_path);
    const spinsteer::SweepResult result = spinsteer::run_sweep(cfg);
    spinsteer::emit_csv(result.rows, cfg.output_path, cfg.mc.has_value());
    std::printf("wrote %zu rows to %s\n", result.rows.size(), cfg.output_path.c_str());
    for (const spinsteer::CurveMinimum& m : result.minima) {
        std::printf("gamma_d_add = %s: min E_epr = %s at Z = %s; min xi = %s at Z = %s\n",
                    spinsteer::format_number(m.gamma_d_add).c_str(),
                    spinsteer::format_number(m.min_e).c_str(),
                    spinsteer::format_number(m.z_at_min_e).c_str(),
                    spinsteer::format_number(m.min_xi).c_str(),
                    spinsteer::format_number(m.z_at_min_xi).c_str());
    }
    return 0;
}

int run_steady_cmd(const std::string& config_path) {
    const spinsteer::SweepConfig cfg = load_config(config_path);
    const spinsteer::ModelParams params = spinsteer::make_params(
        cfg.z, cfg.d, cfg.gamma_d_add, cfg.n_atoms, cfg.gamma, cfg.pop);
    const spinsteer::MomentState s = spinsteer::steady_state(params);
    const spinsteer::WitnessReport rep = spinsteer::classify(s, params);
    const spinsteer::GainPair g = spinsteer::optimal_gain(params);

    std::printf("Z = %s  d = %s  gamma_d_add = %s  P2 = %s\n",
                spinsteer::format_number(cfg.z).c_str(), spinsteer::format_number(cfg.d).c_str(),
                spinsteer::format_number(cfg.gamma_d_add).c_str(),
                spinsteer::format_number(s.p2).c_str());
    std::printf("v = %s  c_zz = %s  mean_x = %s\n", spinsteer::format_number(s.v_az).c_str(),
                spinsteer::format_number(s.c_zz).c_str(),
                spinsteer::format_number(s.mean_x_a).c_str());
    std::printf("g_opt = %s  var_inf_z = %s  var_inf_y = %s\n",
                spinsteer::format_number(g.g_z).c_str(),
                spinsteer::format_number(rep.var_inf_z).c_str(),
                spinsteer::format_number(rep.var_inf_y).c_str());
    std::printf("xi = %s  xi_g = %s  E_epr = %s\n", spinsteer::format_number(rep.delta_ent).c_str(),
                spinsteer::format_number(rep.delta_g_ent).c_str(),
                spinsteer::format_number(rep.e_epr_ab).c_str());
    std::printf("entangled = %s  epr_ab = %s  epr_via_sum = %s\n",
                spinsteer::format_bool(rep.entangled), spinsteer::format_bool(rep.epr_ab),
                spinsteer::format_bool(rep.epr_via_sum));
    return 0;
}

int run_dynamics_cmd(const std::string& config_path) {
    const spinsteer::SweepConfig cfg = load_config(config_path);
    const spinsteer::ModelParams params = spinsteer::make_params(
        cfg.z, cfg.d, cfg.gamma_d_add, cfg.n_atoms, cfg.gamma, cfg.pop);
    const spinsteer::Trajectory traj = spinsteer::integrate(
        spinsteer::coherent_initial(cfg.n_atoms), params, cfg.t_end, cfg.step);
    const spinsteer::MomentState& fin = traj.final_state();
    const spinsteer::MomentState steady = spinsteer::steady_state(params);

    std::printf("t = %s  steps = %zu\n", spinsteer::format_number(traj.times.back()).c_str(),
                traj.times.size() - 1);
    std::printf("v_az = %s  v_ay = %s  c_zz = %s  c_yy = %s\n",
                spinsteer::format_number(fin.v_az).c_str(),
                spinsteer::format_number(fin.v_ay).c_str(),
                spinsteer::format_number(fin.c_zz).c_str(),
                spinsteer::format_number(fin.c_yy).c_str());
    std::printf("distance to steady state = %s\n",
                spinsteer::format_number(spinsteer::moment_distance(fin, steady)).c_str());
    return 0;
}

int run_montecarlo_cmd(const std::string& config_path) {
    spinsteer::SweepConfig cfg = load_config(config_path);
    if (!cfg.mc) cfg.mc = spinsteer::MonteCarloConfig{10000, 1, 10.0, 1e6, 0.0};
    const spinsteer::MonteCarloConfig& mc = *cfg.mc;
    const spinsteer::ModelParams params = spinsteer::make_params(
        cfg.z, cfg.d, cfg.gamma_d_add, cfg.n_atoms, cfg.gamma, cfg.pop);
    const spinsteer::MomentState steady = spinsteer::steady_state(params);
    const spinsteer::PulseModel pulse{mc.alpha, mc.n_p, mc.r_light};
    const spinsteer::SpinSampleSet samples = spinsteer::sample_spins(
        spinsteer::covariance_from_moments(steady), mc.samples, spinsteer::derive_seed(mc.seed, 0));
    const spinsteer::LocalReadout readout =
        spinsteer::local_readout(samples, pulse, spinsteer::derive_seed(mc.seed, 1));
    const spinsteer::WitnessEstimate est = spinsteer::estimate_witnesses(readout, params);

    std::printf("m = %zu  readout noise variance = %s\n", est.m,
                spinsteer::format_number(pulse.noise_variance()).c_str());
    print_estimate("g_z", est.g_z);
    print_estimate("g_y", est.g_y);
    print_estimate("var_inf_z", est.var_inf_z);
    print_estimate("var_inf_y", est.var_inf_y);
    print_estimate("xi", est.delta_ent);
    print_estimate("E_epr", est.e_epr_ab);
    std::printf("entangled = %s  epr_ab = %s  epr_via_sum = %s\n",
                spinsteer::format_bool(est.entangled), spinsteer::format_bool(est.epr_ab),
                spinsteer::format_bool(est.epr_via_sum));
    return 0;
}

int run_causality_cmd(double delta_t_ms) {
    if (delta_t_ms < 0.0) {
        std::fprintf(stderr, "config error: --delta-t-ms must be >= 0\n");
        return 1;
    }
    const double meters = spinsteer::causal_separation(delta_t_ms * 1e-3);
    std::printf("delta_t = %s ms -> separation >= %s m\n",
                spinsteer::format_number(delta_t_ms).c_str(),
                spinsteer::format_number(meters).c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-ensemble dissipative spin toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    double delta_t_ms = 0.0;

    CLI::App* sweep = app.add_subcommand("sweep", "Z sweep over dephasing curves, CSV output");
    sweep->add_option("--config", config_path, "config file (key = value lines)");
    CLI::App* steady = app.add_subcommand("steady", "steady state and witnesses at one point");
    steady->add_option("--config", config_path, "config file");
    CLI::App* dynamics = app.add_subcommand("dynamics", "integrate the moment equations");
    dynamics->add_option("--config", config_path, "config file");
    CLI::App* montecarlo = app.add_subcommand("montecarlo", "simulated readout estimation");
    montecarlo->add_option("--config", config_path, "config file");
    CLI::App* causality = app.add_subcommand("causality", "minimum spacelike separation");
    causality->add_option("--delta-t-ms", delta_t_ms, "measurement time window in ms")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (sweep->parsed()) return run_sweep_cmd(config_path);
        if (steady->parsed()) return run_steady_cmd(config_path);
        if (dynamics->parsed()) return run_dynamics_cmd(config_path);
        if (montecarlo->parsed()) return run_montecarlo_cmd(config_path);
        if (causality->parsed()) return run_causality_cmd(delta_t_ms);
    } catch (const spinsteer::ConfigError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
