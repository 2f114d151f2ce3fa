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
#include <stdexcept>

#include "spinsteer/common.hpp"

namespace spinsteer {

/// Squeezing parametrization of the engineered dissipation.
/// Satisfies mu = cosh(r), nu = sinh(r), z = exp(r) = 1/(mu - nu),
/// and the hyperbolic identity mu^2 - nu^2 = 1.
struct SqueezeParams {
    double mu = 1.0;
    double nu = 0.0;
    double r = 0.0;
    double z = 1.0;

    /// mu^2 + nu^2, the combination every rate formula uses.
    double moment_sum() const { return mu * mu + nu * nu; }
};

/// Builds SqueezeParams from z = 1/(mu - nu) >= 1.
///
/// mu = (z + 1/z)/2 and nu = (z - 1/z)/2 keep mu^2 - nu^2 = 1 exactly
/// (up to rounding) for every admissible z.
inline SqueezeParams squeeze_from_z(double z) {
    require_finite(z, "z");
    if (z < 1.0) {
        throw std::domain_error("squeeze z must be >= 1 (z < 1 would need nu < 0)");
    }
    SqueezeParams sq;
    sq.z = z;
    sq.mu = 0.5 * (z + 1.0 / z);
    sq.nu = 0.5 * (z - 1.0 / z);
    sq.r = std::log(z);
    return sq;
}

/// All single-particle decay/dephasing rates plus the optical depth.
/// Rates are expressed in units of the radiative decay gamma (gamma = 1
/// by default); every steady-state witness is a ratio in which the unit
/// cancels.
struct RateSet {
    double gamma = 1.0;        // single-atom radiative decay
    double gamma_cool = 0.0;   // single-particle cooling rate
    double gamma_heat = 0.0;   // single-particle heating rate
    double gamma_d_rad = 0.0;  // light-induced dephasing
    double gamma_d_add = 0.0;  // nonradiative dephasing
    double gamma_d = 0.0;      // total dephasing
    double gamma_tilde = 0.0;  // gamma_cool + gamma_heat + gamma_d
    double d = 0.0;            // optical depth per ensemble
};

/// Rate algebra of the driven two-ensemble system:
///   gamma_cool = mu^2 gamma,  gamma_heat = nu^2 gamma,
///   gamma_d_rad = 2 (mu^2 + nu^2) gamma.
/// gamma_d_add = 0 reproduces pure radiative damping.
inline RateSet rates_from_squeeze(const SqueezeParams& sq, double gamma, double gamma_d_add,
                                  double d) {
    require_finite(gamma, "gamma");
    require_finite(gamma_d_add, "gamma_d_add");
    require_finite(d, "d");
    if (gamma <= 0.0) {
        throw std::domain_error("gamma must be > 0");
    }
    if (gamma_d_add < 0.0 || d < 0.0) {
        throw std::domain_error("rates and optical depth must be >= 0");
    }
    RateSet rs;
    rs.gamma = gamma;
    rs.d = d;
    rs.gamma_cool = sq.mu * sq.mu * gamma;
    rs.gamma_heat = sq.nu * sq.nu * gamma;
    rs.gamma_d_rad = 2.0 * sq.moment_sum() * gamma;
    rs.gamma_d_add = gamma_d_add;
    rs.gamma_d = rs.gamma_d_rad + rs.gamma_d_add;
    rs.gamma_tilde = rs.gamma_cool + rs.gamma_heat + rs.gamma_d;
    return rs;
}

/// Steady-state population model. The rate-balance mode derives the
/// normalized population from the cooling/heating competition; the fixed
/// mode pins a user-chosen value.
struct PopulationModel {
    enum class Mode { RateBalance, Fixed };

    Mode mode = Mode::RateBalance;
    double fixed_value = 1.0;

    static PopulationModel rate_balance() { return PopulationModel{}; }
    static PopulationModel fixed(double value) {
        if (!(value >= 0.0 && value <= 1.0)) {
            throw std::domain_error("fixed population must lie in [0, 1]");
        }
        return PopulationModel{Mode::Fixed, value};
    }
};

/// Full parameter point: squeezing, rates, atom number, population model.
struct ModelParams {
    SqueezeParams squeeze;
    RateSet rates;
    double n_atoms = 1e6;  // atoms per ensemble
    PopulationModel pop;
};

/// Convenience constructor for the common sweep axis (z, d, gamma_d_add).
inline ModelParams make_params(double z, double d, double gamma_d_add = 0.0,
                               double n_atoms = 1e6, double gamma = 1.0,
                               PopulationModel pop = PopulationModel::rate_balance()) {
    if (!(n_atoms > 0.0) || !std::isfinite(n_atoms)) {
        throw std::domain_error("n_atoms must be > 0");
    }
    ModelParams p;
    p.squeeze = squeeze_from_z(z);
    p.rates = rates_from_squeeze(p.squeeze, gamma, gamma_d_add, d);
    p.n_atoms = n_atoms;
    p.pop = pop;
    return p;
}

/// Normalized steady-state population P2.
///
/// Rate-balance mode: (gamma_cool - gamma_heat)/(gamma_cool + gamma_heat),
/// which reduces to 1/(mu^2 + nu^2). Fixed mode returns the pinned value.
inline double p2_steady(const ModelParams& p) {
    if (p.pop.mode == PopulationModel::Mode::Fixed) {
        return p.pop.fixed_value;
    }
    const double total = p.rates.gamma_cool + p.rates.gamma_heat;
    if (total <= 0.0) {
        throw NumericalError("population rate balance degenerate: gamma_cool + gamma_heat = 0");
    }
    const double p2 = (p.rates.gamma_cool - p.rates.gamma_heat) / total;
    return p2 < 0.0 ? 0.0 : p2;
}

}  // namespace spinsteer
