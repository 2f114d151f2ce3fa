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

#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "spinsteer/common.hpp"
#include "spinsteer/model.hpp"

namespace spinsteer {

enum class Axis { Y, Z };
enum class SignBranch { Plus, Minus };

/// Second moments of the two collective spins plus the population and
/// mean-spin scalars that close the dynamics. Units: atoms^2 for the
/// moments, atoms for the means.
///
/// The Y/Z means are identically zero in this picture; only the moments
/// listed here evolve.
struct MomentState {
    double v_az = 0.0;  // <(J_A^Z)^2>
    double v_ay = 0.0;  // <(J_A^Y)^2>
    double v_bz = 0.0;  // <(J_B^Z)^2>
    double v_by = 0.0;  // <(J_B^Y)^2>
    double c_zz = 0.0;  // <J_A^Z J_B^Z>
    double c_yy = 0.0;  // <J_A^Y J_B^Y>
    double p2 = 1.0;    // normalized population, in [0, 1]
    double mean_x_a = 0.0;
    double mean_x_b = 0.0;

    double variance(Axis axis, bool ensemble_a) const {
        if (axis == Axis::Z) return ensemble_a ? v_az : v_bz;
        return ensemble_a ? v_ay : v_by;
    }
    double correlation(Axis axis) const { return axis == Axis::Z ? c_zz : c_yy; }
};

/// Checks positivity, the Cauchy-Schwarz bound on both correlation blocks,
/// and the anti-parallel mean-spin geometry. `slack` absorbs integrator
/// round-off; it is an absolute tolerance in atoms^2.
inline void validate(const MomentState& s, double slack = 0.0) {
    for (double v : {s.v_az, s.v_ay, s.v_bz, s.v_by}) {
        if (!std::isfinite(v) || v < -slack) {
            throw std::domain_error("moment state has a negative or non-finite variance");
        }
    }
    if (!std::isfinite(s.c_zz) || !std::isfinite(s.c_yy) || !std::isfinite(s.p2)) {
        throw std::domain_error("moment state has a non-finite entry");
    }
    if (s.c_zz * s.c_zz > s.v_az * s.v_bz + slack * (s.v_az + s.v_bz + 1.0) ||
        s.c_yy * s.c_yy > s.v_ay * s.v_by + slack * (s.v_ay + s.v_by + 1.0)) {
        throw std::domain_error("moment state violates the Cauchy-Schwarz bound");
    }
    if (s.p2 < -slack || s.p2 > 1.0 + slack) {
        throw std::domain_error("population must lie in [0, 1]");
    }
    const double mean_scale = std::abs(s.mean_x_a) + std::abs(s.mean_x_b);
    if (std::abs(s.mean_x_a + s.mean_x_b) > 1e-9 * mean_scale + slack) {
        throw std::domain_error("mean spins must be equal and opposite");
    }
}

/// Spin coherent state of both ensembles: shot-noise variances N/4, no
/// correlations, full polarization with anti-parallel mean spins.
inline MomentState coherent_initial(double n_atoms) {
    if (!(n_atoms > 0.0) || !std::isfinite(n_atoms)) {
        throw std::domain_error("n_atoms must be > 0");
    }
    MomentState s;
    s.v_az = s.v_ay = s.v_bz = s.v_by = 0.25 * n_atoms;
    s.c_zz = s.c_yy = 0.0;
    s.p2 = 1.0;
    s.mean_x_a = 0.5 * n_atoms;
    s.mean_x_b = -0.5 * n_atoms;
    return s;
}

/// Shared relaxation rate of all six moment equations at population p2.
inline double relaxation_rate(const ModelParams& p, double p2) {
    return p.rates.gamma_tilde + p.rates.d * p.rates.gamma * p2;
}

/// Source bracket gamma_tilde + d gamma P2^2 (mu^2 + nu^2) at population p2.
inline double source_bracket(const ModelParams& p, double p2) {
    return p.rates.gamma_tilde + p.rates.d * p.rates.gamma * p2 * p2 * p.squeeze.moment_sum();
}

/// Right-hand side of the moment equations. All four variances share one
/// linear decay and one source; the two correlations gain/lose the
/// mu*nu-proportional drive with opposite signs. The population is frozen
/// (dp2/dt = 0) and the means do not evolve.
inline MomentState moment_derivatives(const MomentState& s, const ModelParams& p) {
    validate(s, 1e-9 * (p.n_atoms + 1.0));
    const double p2 = s.p2;
    const double decay = relaxation_rate(p, p2);
    const double source = 0.25 * p.n_atoms * source_bracket(p, p2);
    const double drive =
        0.5 * p.n_atoms * p.squeeze.mu * p.squeeze.nu * p.rates.d * p.rates.gamma * p2 * p2;

    MomentState ds;
    ds.v_az = -decay * s.v_az + source;
    ds.v_ay = -decay * s.v_ay + source;
    ds.v_bz = -decay * s.v_bz + source;
    ds.v_by = -decay * s.v_by + source;
    ds.c_zz = -decay * s.c_zz + drive;
    ds.c_yy = -decay * s.c_yy - drive;
    ds.p2 = 0.0;
    ds.mean_x_a = 0.0;
    ds.mean_x_b = 0.0;
    return ds;
}

/// Right-hand side for a single conditional variance Delta^2(J_A +/- g J_B).
///
/// The branch encodes the sign inside the combination; the drive term then
/// carries opposite signs on the Y and Z axes, matching the correlation
/// signs in the moment equations. Population is taken at the model steady
/// value.
inline double conditional_variance_derivative(double value, double gain, Axis axis,
                                              SignBranch branch, const ModelParams& p) {
    if (!std::isfinite(value) || value < 0.0) {
        throw std::domain_error("conditional variance must be finite and >= 0");
    }
    const double p2 = p2_steady(p);
    const double decay = relaxation_rate(p, p2);
    const double source = 0.25 * p.n_atoms * (1.0 + gain * gain) * source_bracket(p, p2);
    const double drive =
        p.n_atoms * gain * p.squeeze.mu * p.squeeze.nu * p.rates.d * p.rates.gamma * p2 * p2;
    const double branch_sign = (branch == SignBranch::Plus) ? 1.0 : -1.0;
    const double axis_sign = (axis == Axis::Z) ? 1.0 : -1.0;
    return -decay * value + source + branch_sign * axis_sign * drive;
}

/// Steady-state mean spin magnitude |<J^X>| = (N/2) P2.
inline double mean_spin_steady(const ModelParams& p) {
    return 0.5 * p.n_atoms * p2_steady(p);
}

/// Analytic fixed point of the moment equations at the model population.
inline MomentState steady_state(const ModelParams& p) {
    const double p2 = p2_steady(p);
    const double decay = relaxation_rate(p, p2);
    if (decay <= 0.0) {
        throw NumericalError("steady state undefined: zero relaxation rate");
    }
    MomentState s;
    const double v = 0.25 * p.n_atoms * source_bracket(p, p2) / decay;
    s.v_az = s.v_ay = s.v_bz = s.v_by = v;
    s.c_zz = 0.5 * p.n_atoms * p.squeeze.mu * p.squeeze.nu * p.rates.d * p.rates.gamma * p2 * p2 /
             decay;
    s.c_yy = -s.c_zz;
    s.p2 = p2;
    s.mean_x_a = mean_spin_steady(p);
    s.mean_x_b = -s.mean_x_a;
    return s;
}

/// Integrated moment history on a fixed time grid (times in units of
/// 1/gamma, strictly increasing).
struct Trajectory {
    std::vector<double> times;
    std::vector<MomentState> states;

    const MomentState& final_state() const { return states.back(); }
};

namespace detail {

inline MomentState axpy(const MomentState& s, const MomentState& ds, double factor) {
    MomentState out = s;
    out.v_az += factor * ds.v_az;
    out.v_ay += factor * ds.v_ay;
    out.v_bz += factor * ds.v_bz;
    out.v_by += factor * ds.v_by;
    out.c_zz += factor * ds.c_zz;
    out.c_yy += factor * ds.c_yy;
    return out;
}

}  // namespace detail

/// Fixed-step classical 4th-order integration of the moment equations.
///
/// The population and the mean spins are pinned to the model steady values
/// at t = 0 and held there; only the six second moments step. The step must
/// satisfy step * (gamma_tilde + d gamma) <= 0.1, which keeps the shared
/// relaxation rate well inside the stability region. Every accepted state
/// is validated.
inline Trajectory integrate(MomentState init, const ModelParams& p, double t_end, double step) {
    if (!(step > 0.0) || !(t_end > 0.0)) {
        throw std::domain_error("integration needs step > 0 and t_end > 0");
    }
    const double stiffness = p.rates.gamma_tilde + p.rates.d * p.rates.gamma;
    if (step * stiffness > 0.1) {
        throw std::domain_error("step too large: step * (gamma_tilde + d gamma) must be <= 0.1");
    }

    init.p2 = p2_steady(p);
    init.mean_x_a = mean_spin_steady(p);
    init.mean_x_b = -init.mean_x_a;
    const double slack = 1e-9 * (p.n_atoms + 1.0);
    validate(init, slack);

    Trajectory traj;
    const auto n_steps = static_cast<std::size_t>(std::ceil(t_end / step - 1e-12));
    traj.times.reserve(n_steps + 1);
    traj.states.reserve(n_steps + 1);
    traj.times.push_back(0.0);
    traj.states.push_back(init);

    MomentState s = init;
    double t = 0.0;
    for (std::size_t i = 0; i < n_steps; ++i) {
        const double h = std::min(step, t_end - t);
        MomentState next = s;
        try {
            const MomentState k1 = moment_derivatives(s, p);
            const MomentState k2 = moment_derivatives(detail::axpy(s, k1, 0.5 * h), p);
            const MomentState k3 = moment_derivatives(detail::axpy(s, k2, 0.5 * h), p);
            const MomentState k4 = moment_derivatives(detail::axpy(s, k3, h), p);

            next.v_az += h / 6.0 * (k1.v_az + 2.0 * k2.v_az + 2.0 * k3.v_az + k4.v_az);
            next.v_ay += h / 6.0 * (k1.v_ay + 2.0 * k2.v_ay + 2.0 * k3.v_ay + k4.v_ay);
            next.v_bz += h / 6.0 * (k1.v_bz + 2.0 * k2.v_bz + 2.0 * k3.v_bz + k4.v_bz);
            next.v_by += h / 6.0 * (k1.v_by + 2.0 * k2.v_by + 2.0 * k3.v_by + k4.v_by);
            next.c_zz += h / 6.0 * (k1.c_zz + 2.0 * k2.c_zz + 2.0 * k3.c_zz + k4.c_zz);
            next.c_yy += h / 6.0 * (k1.c_yy + 2.0 * k2.c_yy + 2.0 * k3.c_yy + k4.c_yy);
            validate(next, slack);
        } catch (const std::domain_error& e) {
            throw NumericalError(std::string("integration produced an invalid state at t=") +
                                 std::to_string(t + h) + ": " + e.what());
        }
        t += h;
        s = next;
        traj.times.push_back(t);
        traj.states.push_back(s);
    }
    return traj;
}

/// Euclidean distance between the six evolving moments of two states.
inline double moment_distance(const MomentState& a, const MomentState& b) {
    const double dv1 = a.v_az - b.v_az;
    const double dv2 = a.v_ay - b.v_ay;
    const double dv3 = a.v_bz - b.v_bz;
    const double dv4 = a.v_by - b.v_by;
    const double dc1 = a.c_zz - b.c_zz;
    const double dc2 = a.c_yy - b.c_yy;
    return std::sqrt(dv1 * dv1 + dv2 * dv2 + dv3 * dv3 + dv4 * dv4 + dc1 * dc1 + dc2 * dc2);
}

}  // namespace spinsteer
