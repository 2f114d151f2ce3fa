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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "spinsteer/dynamics.hpp"
#include "spinsteer/model.hpp"
#include "helpers.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using namespace spinsteer;

namespace {

std::vector<double> moments_of(const MomentState& s) {
    return {s.v_az, s.v_ay, s.v_bz, s.v_by, s.c_zz, s.c_yy};
}

}  // namespace

TEST_CASE("coherent_initial carries shot noise N/4") {
    const MomentState s4 = coherent_initial(4.0);
    for (double v : {s4.v_az, s4.v_ay, s4.v_bz, s4.v_by}) REQUIRE(v == 1.0);
    REQUIRE(s4.c_zz == 0.0);
    REQUIRE(s4.c_yy == 0.0);
    REQUIRE(s4.p2 == 1.0);
    REQUIRE(s4.mean_x_a == 2.0);
    REQUIRE(s4.mean_x_b == -2.0);
    REQUIRE_NOTHROW(validate(s4));

    REQUIRE(coherent_initial(1.0).v_az == 0.25);
    REQUIRE_THROWS_AS(coherent_initial(0.0), std::domain_error);
    REQUIRE_THROWS_AS(coherent_initial(-3.0), std::domain_error);
}

TEST_CASE("moment_derivatives vanishes at the analytic steady state") {
    oracle::ParamSampler sampler(21);
    for (int i = 0; i < 100; ++i) {
        const ModelParams p =
            make_params(sampler.z(), sampler.d(), sampler.add(), 1e6, sampler.gamma());
        const MomentState ds = moment_derivatives(steady_state(p), p);
        for (double v : moments_of(ds)) REQUIRE_THAT(v, WithinAbs(0.0, 1e-10 * p.n_atoms));
    }
}

TEST_CASE("coherent state is the exact fixed point without squeezing") {
    const ModelParams p = make_params(1.0, 30.0, 0.0, 1e6);
    const MomentState ds = moment_derivatives(coherent_initial(p.n_atoms), p);
    for (double v : moments_of(ds)) REQUIRE(v == 0.0);
}

TEST_CASE("correlation source term at Z = 2, d = 30") {
    const ModelParams p = make_params(2.0, 30.0);
    MomentState s = steady_state(p);
    s.c_zz = 0.0;
    const MomentState ds = moment_derivatives(s, p);
    REQUIRE_THAT(ds.c_zz / p.n_atoms, WithinRel(oracle::kCdotPerN, 1e-12));
}

TEST_CASE("moment_derivatives rejects invalid states") {
    const ModelParams p = make_params(2.0, 30.0, 0.0, 4.0);
    MomentState s = coherent_initial(4.0);
    s.v_az = -1.0;
    REQUIRE_THROWS_AS(moment_derivatives(s, p), std::domain_error);

    s = coherent_initial(4.0);
    s.c_zz = 2.0;  // exceeds sqrt(v_az v_bz) = 1
    REQUIRE_THROWS_AS(moment_derivatives(s, p), std::domain_error);

    s = coherent_initial(4.0);
    s.mean_x_b = s.mean_x_a;
    REQUIRE_THROWS_AS(moment_derivatives(s, p), std::domain_error);
}

TEST_CASE("conditional variance equation reduces to the single-variance one at g = 0") {
    oracle::ParamSampler sampler(22);
    for (int i = 0; i < 50; ++i) {
        const ModelParams p =
            make_params(sampler.z(), sampler.d(), sampler.add(), 1e6, sampler.gamma());
        MomentState s = steady_state(p);
        // The variance equation does not couple to the correlations; dropping
        // c_zz keeps the state valid for any v_az down to zero.
        s.c_zz = 0.0;
        const double val = sampler.uniform(0.0, p.n_atoms);
        s.v_az = val;
        const double expected = moment_derivatives(s, p).v_az;
        const double got = conditional_variance_derivative(val, 0.0, Axis::Z, SignBranch::Plus, p);
        REQUIRE_THAT(got, WithinRel(expected, 1e-12) || WithinAbs(expected, 1e-7 * p.n_atoms));
    }
}

TEST_CASE("conditional variance equation matches the moment-equation combination") {
    oracle::ParamSampler sampler(23);
    for (int i = 0; i < 100; ++i) {
        const ModelParams p =
            make_params(sampler.z(), sampler.d(), sampler.add(), 1e3, sampler.gamma());
        MomentState s = steady_state(p);
        // Random valid state sharing the steady p2 (the conditional form
        // evaluates the population at the model value).
        const double n = p.n_atoms;
        s.v_az = sampler.uniform(0.1, 0.5) * n;
        s.v_bz = sampler.uniform(0.1, 0.5) * n;
        s.v_ay = sampler.uniform(0.1, 0.5) * n;
        s.v_by = sampler.uniform(0.1, 0.5) * n;
        s.c_zz = sampler.uniform(-0.9, 0.9) * std::sqrt(s.v_az * s.v_bz);
        s.c_yy = sampler.uniform(-0.9, 0.9) * std::sqrt(s.v_ay * s.v_by);
        const MomentState ds = moment_derivatives(s, p);
        const double g = sampler.uniform(-2.0, 2.0);

        for (const Axis axis : {Axis::Z, Axis::Y}) {
            const double va = s.variance(axis, true);
            const double vb = s.variance(axis, false);
            const double c = s.correlation(axis);
            const double dva = axis == Axis::Z ? ds.v_az : ds.v_ay;
            const double dvb = axis == Axis::Z ? ds.v_bz : ds.v_by;
            const double dc = axis == Axis::Z ? ds.c_zz : ds.c_yy;
            for (const SignBranch branch : {SignBranch::Plus, SignBranch::Minus}) {
                const double sign = branch == SignBranch::Plus ? 1.0 : -1.0;
                const double val = va + g * g * vb + sign * 2.0 * g * c;
                if (val < 0.0) continue;  // combination not realizable as a variance
                const double expected = dva + g * g * dvb + sign * 2.0 * g * dc;
                const double scale =
                    std::abs(dva) + g * g * std::abs(dvb) + 2.0 * std::abs(g) * std::abs(dc);
                const double got = conditional_variance_derivative(val, g, axis, branch, p);
                REQUIRE_THAT(got, WithinAbs(expected, 1e-12 * scale + 1e-12));
            }
        }
    }
}

TEST_CASE("conditional variance is stationary at its steady value") {
    const ModelParams p = make_params(2.0, 30.0);
    const double n = p.n_atoms;
    const double g = oracle::kGain;
    const double var_inf = oracle::kVarInfPerN * n;
    // Z axis: the reduced combination is J_A - g J_B, the Minus branch.
    const double dz = conditional_variance_derivative(var_inf, g, Axis::Z, SignBranch::Minus, p);
    REQUIRE_THAT(dz, WithinAbs(0.0, 1e-10 * n));
    // Y axis: the signed optimal gain is -g and the inference combination
    // J_A - (-g) J_B again reads off the Minus branch.
    const double dy = conditional_variance_derivative(var_inf, -g, Axis::Y, SignBranch::Minus, p);
    REQUIRE_THAT(dy, WithinAbs(0.0, 1e-10 * n));
}

TEST_CASE("steady_state without squeezing is the coherent state") {
    const ModelParams p = make_params(1.0, 30.0);
    const MomentState s = steady_state(p);
    REQUIRE(s.v_az == 0.25 * p.n_atoms);
    REQUIRE(s.v_by == 0.25 * p.n_atoms);
    REQUIRE(s.c_zz == 0.0);
    REQUIRE(s.c_yy == 0.0);
    REQUIRE(s.p2 == 1.0);
    REQUIRE(s.mean_x_a == 0.5 * p.n_atoms);
}

TEST_CASE("steady_state at Z = 2, d = 30 hits the frozen oracle") {
    const ModelParams p = make_params(2.0, 30.0);
    const MomentState s = steady_state(p);
    const double n = p.n_atoms;
    // Pure-radiative identity: the source bracket equals the relaxation
    // rate, so the variances sit exactly at shot noise.
    REQUIRE_THAT(s.v_az, WithinRel(0.25 * n, 1e-14));
    REQUIRE_THAT(s.c_zz, WithinRel(oracle::kCPerN * n, 1e-13));
    REQUIRE(s.c_yy == -s.c_zz);
    REQUIRE_THAT(s.p2, WithinRel(oracle::kP2, 1e-13));
    REQUIRE_THAT(s.mean_x_a, WithinRel(oracle::kMeanSpinPerN * n, 1e-13));
    REQUIRE_NOTHROW(validate(s));
}

TEST_CASE("steady_state agrees with the independent closed form on a grid") {
    oracle::ParamSampler sampler(24);
    for (int i = 0; i < 100; ++i) {
        const double z = sampler.z();
        const double d = sampler.d();
        const double add = sampler.add();
        const double gamma = sampler.gamma();
        const ModelParams p = make_params(z, d, add, 1e6, gamma);
        const oracle::Point o = oracle::point(z, d, add, p.n_atoms, gamma);
        const MomentState s = steady_state(p);
        REQUIRE_THAT(s.v_az, WithinRel(o.v, 1e-12));
        REQUIRE_THAT(s.c_zz, WithinRel(o.c, 1e-12));
        REQUIRE_THAT(s.p2, WithinRel(o.p2, 1e-12));
    }
}

TEST_CASE("steady_state rejects a degenerate relaxation rate") {
    ModelParams p = make_params(2.0, 30.0);
    p.rates.gamma_tilde = 0.0;
    p.rates.d = 0.0;
    REQUIRE_THROWS_AS(steady_state(p), NumericalError);
}

TEST_CASE("mean_spin_steady") {
    REQUIRE(mean_spin_steady(make_params(1.0, 30.0, 0.0, 10.0)) == 5.0);
    REQUIRE_THAT(mean_spin_steady(make_params(2.0, 30.0, 0.0, 1.0)),
                 WithinRel(oracle::kMeanSpinPerN, 1e-13));
    oracle::ParamSampler sampler(25);
    for (int i = 0; i < 50; ++i) {
        const double n = sampler.uniform(1.0, 1e9);
        REQUIRE(mean_spin_steady(make_params(sampler.z(), sampler.d(), 0.0, n)) <= 0.5 * n);
    }
}

TEST_CASE("integrate holds the steady state") {
    const ModelParams p = make_params(2.0, 30.0);
    const MomentState steady = steady_state(p);
    const Trajectory traj = integrate(steady, p, 0.5, 1e-3);
    for (const MomentState& s : traj.states) {
        REQUIRE(moment_distance(s, steady) <= 1e-9 * p.n_atoms);
    }
}

TEST_CASE("integrate reproduces the exponential correlation growth") {
    const ModelParams p = make_params(2.0, 30.0);
    const double n = p.n_atoms;
    const Trajectory traj = integrate(coherent_initial(n), p, 0.1, 1e-3);
    REQUIRE_THAT(traj.times.back(), WithinAbs(0.1, 1e-12));
    REQUIRE_THAT(traj.final_state().c_zz / n, WithinRel(oracle::kCzzAtT01PerN, 1e-6));

    // The whole path follows c(t) = c_inf (1 - e^{-lambda t}).
    for (std::size_t i = 0; i < traj.times.size(); i += 10) {
        const double expected = oracle::kCPerN * n * (1.0 - std::exp(-oracle::kLambda * traj.times[i]));
        REQUIRE_THAT(traj.states[i].c_zz, WithinAbs(expected, 1e-6 * n * oracle::kCPerN + 1e-12 * n));
    }
}

TEST_CASE("integrate converges at fourth order") {
    const ModelParams p = make_params(2.0, 30.0, 0.0, 1.0);
    const double exact = oracle::kCPerN * (1.0 - std::exp(-oracle::kLambda * 0.1));
    const auto endpoint_error = [&](double h) {
        const Trajectory traj = integrate(coherent_initial(1.0), p, 0.1, h);
        return std::abs(traj.final_state().c_zz - exact);
    };
    const double ratio = endpoint_error(2e-3) / endpoint_error(1e-3);
    REQUIRE(ratio > 13.0);
    REQUIRE(ratio < 19.0);
}

TEST_CASE("integrate rejects an unstable step") {
    const ModelParams p = make_params(2.0, 30.0);
    // gamma_tilde + d gamma = 36.375, so the guard allows h <= 0.00275.
    REQUIRE_THROWS_AS(integrate(coherent_initial(1e6), p, 1.0, 0.01), std::domain_error);
    REQUIRE_THROWS_AS(integrate(coherent_initial(1e6), p, 1.0, 0.0), std::domain_error);
    REQUIRE_THROWS_AS(integrate(coherent_initial(1e6), p, 0.0, 1e-3), std::domain_error);
    REQUIRE_NOTHROW(integrate(coherent_initial(1e6), p, 0.05, 2.7e-3));
}

TEST_CASE("integrate flags non-finite intermediates as numerical failures") {
    const ModelParams p = make_params(2.0, 30.0, 0.0, 1e308);
    REQUIRE_THROWS_AS(integrate(coherent_initial(1e308), p, 0.1, 1e-3), NumericalError);
}

TEST_CASE("trajectories stay valid and relax at the single shared rate") {
    oracle::ParamSampler sampler(26);
    for (int i = 0; i < 10; ++i) {
        const ModelParams p = make_params(sampler.z(), sampler.d(), sampler.add(), 1e6);
        const double rate = relaxation_rate(p, p2_steady(p));
        const double h = std::min(1e-3, 0.09 / (p.rates.gamma_tilde + p.rates.d));
        const Trajectory traj = integrate(coherent_initial(p.n_atoms), p, 1.0 / rate, h);
        const MomentState steady = steady_state(p);
        const double slack = 1e-9 * (p.n_atoms + 1.0);

        double prev = moment_distance(traj.states.front(), steady);
        for (std::size_t k = 1; k < traj.states.size(); ++k) {
            REQUIRE_NOTHROW(validate(traj.states[k], slack));
            const double dist = moment_distance(traj.states[k], steady);
            REQUIRE(dist <= prev * (1.0 + 1e-12));
            const double dt = traj.times[k] - traj.times[k - 1];
            if (prev > 1e-6 * p.n_atoms) {
                REQUIRE_THAT(dist / prev, WithinRel(std::exp(-rate * dt), 1e-4));
            }
            prev = dist;
        }
    }
}

TEST_CASE("integrate relaxation bound at t = 2 / rate") {
    const ModelParams p = make_params(2.0, 30.0);
    const MomentState init = coherent_initial(p.n_atoms);
    const MomentState steady = steady_state(p);
    const double rate = relaxation_rate(p, p2_steady(p));
    const Trajectory traj = integrate(init, p, 2.0 / rate, 1e-3);
    const double gap0 = moment_distance(init, steady);
    const double gap = moment_distance(traj.final_state(), steady);
    REQUIRE_THAT(gap, WithinRel(std::exp(-2.0) * gap0, 1e-3));
}

TEST_CASE("integration is exactly scale covariant in N") {
    const double n = 8192.0;
    const ModelParams p1 = make_params(1.7, 45.0, 2.0, n);
    const ModelParams p2 = make_params(1.7, 45.0, 2.0, 2.0 * n);
    const MomentState f1 = integrate(coherent_initial(n), p1, 0.2, 1e-3).final_state();
    const MomentState f2 = integrate(coherent_initial(2.0 * n), p2, 0.2, 1e-3).final_state();
    REQUIRE(f2.v_az == 2.0 * f1.v_az);
    REQUIRE(f2.v_by == 2.0 * f1.v_by);
    REQUIRE(f2.c_zz == 2.0 * f1.c_zz);
    REQUIRE(f2.c_yy == 2.0 * f1.c_yy);
}

TEST_CASE("trajectory times are strictly increasing") {
    const ModelParams p = make_params(2.0, 30.0);
    const Trajectory traj = integrate(coherent_initial(1e6), p, 0.0321, 1e-3);
    for (std::size_t i = 1; i < traj.times.size(); ++i) {
        REQUIRE(traj.times[i] > traj.times[i - 1]);
    }
    REQUIRE_THAT(traj.times.back(), WithinAbs(0.0321, 1e-12));
}
