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
// Monte-Carlo model of the optical readout. Spins are drawn from the
// Gaussian state described by a MomentState; verifying pulses map a spin
// component onto the output Stokes-Y component of the light, S_out^Y =
// S_in^Y + alpha * j, while S_out^Z = S_in^Z passes through. The local
// scheme sends one pulse per ensemble per axis, inverts each output to an
// estimate j_hat = j + S_in^Y / alpha, and feeds regression-based witness
// estimators. The collective scheme sends a single pulse through both
// ensembles and can only ever report sums, which is exactly why the local
// scheme exists; no operation here converts collective readouts into
// inference variances.

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "spinsteer/common.hpp"
#include "spinsteer/dynamics.hpp"
#include "spinsteer/model.hpp"
#include "spinsteer/witnesses.hpp"

namespace spinsteer {

/// One verifying pulse. alpha converts atom-spin units into Stokes units;
/// n_p is the photon number per pulse; r_light squeezes the input Stokes-Y
/// quadrature (the one that lands on the signal), so its variance is
/// e^{-2 r_light} n_p / 4 and the conserved Stokes-Z quadrature carries the
/// anti-squeezed e^{+2 r_light} n_p / 4.
struct PulseModel {
    double alpha = 1.0;
    double n_p = 1e6;
    double r_light = 0.0;

    double stokes_y_variance() const { return std::exp(-2.0 * r_light) * n_p / 4.0; }
    double stokes_z_variance() const { return std::exp(2.0 * r_light) * n_p / 4.0; }

    /// Variance added to a single spin estimate, e^{-2 r_light} n_p / (4 alpha^2).
    double noise_variance() const { return stokes_y_variance() / (alpha * alpha); }

    /// Gain so large that the added noise is absorbed below one ulp of any
    /// spin value. A power of two keeps the scaling itself exact, so the
    /// estimates come back bit-identical to the spins.
    static PulseModel noiseless() { return PulseModel{0x1p512, 1.0, 0.0}; }
};

inline void validate(const PulseModel& pulse) {
    require_finite(pulse.alpha, "alpha");
    require_finite(pulse.n_p, "n_p");
    require_finite(pulse.r_light, "r_light");
    if (pulse.alpha < 0.0) throw std::domain_error("alpha must be >= 0");
    if (!(pulse.n_p > 0.0)) throw std::domain_error("n_p must be > 0");
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Decorrelated per-stream seed for concurrent batches.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    return splitmix64(base + stream * 0x9E3779B97F4A7C15ull);
}

/// m joint draws of the four fluctuation components.
struct SpinSampleSet {
    std::size_t m = 0;
    std::uint64_t seed = 0;
    std::vector<double> a_y;
    std::vector<double> b_y;
    std::vector<double> a_z;
    std::vector<double> b_z;
};

/// Symmetric 4x4 covariance over (J_A^Y, J_B^Y, J_A^Z, J_B^Z), row-major.
struct Covariance4 {
    std::array<double, 16> m{};
    double& at(int i, int j) { return m[static_cast<std::size_t>(4 * i + j)]; }
    double at(int i, int j) const { return m[static_cast<std::size_t>(4 * i + j)]; }
};

/// Block-diagonal Gaussian representation of the tracked moments. The Y-Z
/// cross blocks are zero because the moment equations carry no such
/// correlators.
inline Covariance4 covariance_from_moments(const MomentState& s) {
    for (double v : {s.v_ay, s.v_by, s.v_az, s.v_bz, s.c_yy, s.c_zz}) {
        if (!std::isfinite(v)) throw NumericalError("non-finite moment");
    }
    const double scale = s.v_ay + s.v_by + s.v_az + s.v_bz;
    if (s.v_ay < 0.0 || s.v_by < 0.0 || s.v_az < 0.0 || s.v_bz < 0.0) {
        throw NumericalError("moment covariance is not positive semidefinite");
    }
    Covariance4 cov;
    cov.at(0, 0) = s.v_ay;
    cov.at(1, 1) = s.v_by;
    cov.at(0, 1) = cov.at(1, 0) = s.c_yy;
    cov.at(2, 2) = s.v_az;
    cov.at(3, 3) = s.v_bz;
    cov.at(2, 3) = cov.at(3, 2) = s.c_zz;
    if (s.c_yy * s.c_yy > s.v_ay * s.v_by * (1.0 + 1e-12) + 1e-12 * scale ||
        s.c_zz * s.c_zz > s.v_az * s.v_bz * (1.0 + 1e-12) + 1e-12 * scale) {
        throw NumericalError("moment covariance is not positive semidefinite");
    }
    return cov;
}

namespace detail {

/// Lower-triangular factor L with L L^T = a, tolerating semidefinite
/// input (zero pivots zero out their column).
inline std::array<double, 16> cholesky_psd(const Covariance4& cov) {
    double scale = 0.0;
    for (int i = 0; i < 4; ++i) scale = std::max(scale, std::abs(cov.at(i, i)));
    const double tol = 1e-12 * (scale + 1.0);

    std::array<double, 16> l{};
    for (int j = 0; j < 4; ++j) {
        double diag = cov.at(j, j);
        for (int k = 0; k < j; ++k) diag -= l[static_cast<std::size_t>(4 * j + k)] * l[static_cast<std::size_t>(4 * j + k)];
        if (diag < -tol) throw NumericalError("covariance factorization failed");
        if (diag <= tol) continue;
        const double root = std::sqrt(diag);
        l[static_cast<std::size_t>(4 * j + j)] = root;
        for (int i = j + 1; i < 4; ++i) {
            double v = cov.at(i, j);
            for (int k = 0; k < j; ++k) v -= l[static_cast<std::size_t>(4 * i + k)] * l[static_cast<std::size_t>(4 * j + k)];
            l[static_cast<std::size_t>(4 * i + j)] = v / root;
        }
    }
    return l;
}

}  // namespace detail

/// Draws m independent zero-mean Gaussian samples with the given
/// covariance. Identical seed, identical samples.
inline SpinSampleSet sample_spins(const Covariance4& cov, std::size_t m, std::uint64_t seed) {
    if (m < 1) throw std::domain_error("sample count must be >= 1");
    const std::array<double, 16> l = detail::cholesky_psd(cov);

    SpinSampleSet out;
    out.m = m;
    out.seed = seed;
    out.a_y.resize(m);
    out.b_y.resize(m);
    out.a_z.resize(m);
    out.b_z.resize(m);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> unit;
    for (std::size_t i = 0; i < m; ++i) {
        std::array<double, 4> z;
        for (double& v : z) v = unit(rng);
        out.a_y[i] = l[0] * z[0];
        out.b_y[i] = l[4] * z[0] + l[5] * z[1];
        out.a_z[i] = l[8] * z[0] + l[9] * z[1] + l[10] * z[2];
        out.b_z[i] = l[12] * z[0] + l[13] * z[1] + l[14] * z[2] + l[15] * z[3];
    }
    return out;
}

/// Stokes components of one verifying pulse, before and after the pass.
struct StokesRecord {
    double s_in_y = 0.0;
    double s_in_z = 0.0;
    double s_out_y = 0.0;
    double s_out_z = 0.0;
};

namespace detail {

inline double gaussian(std::mt19937_64& rng, std::normal_distribution<double>& unit, double variance) {
    return variance > 0.0 ? std::sqrt(variance) * unit(rng) : 0.0;
}

}  // namespace detail

/// Sends one pulse past a spin with value j. The signal lands on Stokes-Y;
/// Stokes-Z is conserved by the interaction.
inline StokesRecord pulse_pass(double j, const PulseModel& pulse, std::mt19937_64& rng) {
    std::normal_distribution<double> unit;
    StokesRecord rec;
    rec.s_in_y = detail::gaussian(rng, unit, pulse.stokes_y_variance());
    rec.s_in_z = detail::gaussian(rng, unit, pulse.stokes_z_variance());
    rec.s_out_y = rec.s_in_y + pulse.alpha * j;
    rec.s_out_z = rec.s_in_z;
    return rec;
}

/// Per-sample spin estimates from the local scheme, one verifying pulse
/// per ensemble per axis.
struct LocalReadout {
    std::size_t m = 0;
    std::vector<double> a_y;
    std::vector<double> b_y;
    std::vector<double> a_z;
    std::vector<double> b_z;

    const std::vector<double>& estimates(Axis axis, bool ensemble_a) const {
        if (axis == Axis::Y) return ensemble_a ? a_y : b_y;
        return ensemble_a ? a_z : b_z;
    }
};

/// Reads every sample with four independent pulse streams (A and B, Y and
/// Z axes measured in separate procedures). Each estimate carries noise of
/// variance e^{-2 r_light} n_p / (4 alpha^2).
inline LocalReadout local_readout(const SpinSampleSet& s, const PulseModel& pulse,
                                  std::uint64_t seed) {
    validate(pulse);
    if (!(pulse.alpha > 0.0)) {
        throw std::domain_error("alpha must be positive to invert the readout");
    }

    LocalReadout out;
    out.m = s.m;
    const std::array<const std::vector<double>*, 4> spins = {&s.a_y, &s.b_y, &s.a_z, &s.b_z};
    std::array<std::vector<double>*, 4> estimates = {&out.a_y, &out.b_y, &out.a_z, &out.b_z};
    for (int k = 0; k < 4; ++k) {
        std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(k)));
        estimates[static_cast<std::size_t>(k)]->resize(s.m);
        for (std::size_t i = 0; i < s.m; ++i) {
            const StokesRecord rec = pulse_pass((*spins[static_cast<std::size_t>(k)])[i], pulse, rng);
            (*estimates[static_cast<std::size_t>(k)])[i] = rec.s_out_y / pulse.alpha;
        }
    }
    return out;
}

/// Sum estimates from the collective scheme. Individual-ensemble values
/// are deliberately absent.
struct CollectiveReadout {
    std::size_t m = 0;
    std::vector<double> sum_y;
    std::vector<double> sum_z;
};

/// Back-action strength of the collective pass in atom-spin units per
/// Stokes unit. Only its antisymmetric structure matters for the sum
/// observables, so a unit stand-in serves.
inline constexpr double kCollectiveBackaction = 1.0;

/// One pulse through both ensembles, reading the given axis. Returns the
/// per-sample sum estimates and applies the conjugate-axis back-action
/// kick in place: the conserved Stokes-Z noise feeds the conjugate spin
/// components with opposite signs at A and B, so their sum is untouched.
inline std::vector<double> collective_pass(SpinSampleSet& s, Axis axis, const PulseModel& pulse,
                                           std::mt19937_64& rng) {
    std::normal_distribution<double> unit;
    std::vector<double>& read_a = axis == Axis::Z ? s.a_z : s.a_y;
    std::vector<double>& read_b = axis == Axis::Z ? s.b_z : s.b_y;
    std::vector<double>& conj_a = axis == Axis::Z ? s.a_y : s.a_z;
    std::vector<double>& conj_b = axis == Axis::Z ? s.b_y : s.b_z;

    std::vector<double> sums(s.m);
    for (std::size_t i = 0; i < s.m; ++i) {
        const double s_in_y = detail::gaussian(rng, unit, pulse.stokes_y_variance());
        const double s_in_z = detail::gaussian(rng, unit, pulse.stokes_z_variance());
        sums[i] = read_a[i] + read_b[i] + s_in_y / pulse.alpha;
        conj_a[i] += kCollectiveBackaction * s_in_z;
        conj_b[i] -= kCollectiveBackaction * s_in_z;
    }
    return sums;
}

/// Runs the Z pass, then the Y pass on the kicked spins.
inline CollectiveReadout collective_readout(const SpinSampleSet& s, const PulseModel& pulse,
                                            std::uint64_t seed) {
    validate(pulse);
    if (!(pulse.alpha > 0.0)) {
        throw std::domain_error("alpha must be positive to invert the readout");
    }
    SpinSampleSet work = s;
    CollectiveReadout out;
    out.m = s.m;
    std::mt19937_64 rng_z(derive_seed(seed, 0));
    out.sum_z = collective_pass(work, Axis::Z, pulse, rng_z);
    std::mt19937_64 rng_y(derive_seed(seed, 1));
    out.sum_y = collective_pass(work, Axis::Y, pulse, rng_y);
    return out;
}

/// A point estimate with its standard error.
struct Estimate {
    double value = 0.0;
    double se = 0.0;
};

/// Witness estimates assembled from finite samples, mirroring
/// WitnessReport field by field.
struct WitnessEstimate {
    std::size_t m = 0;
    Estimate g_y;
    Estimate g_z;
    Estimate var_inf_z;
    Estimate var_inf_y;
    Estimate delta_ent;
    Estimate delta_g_ent;
    Estimate e_epr_ab;
    Estimate e_epr_ba;
    bool entangled = false;
    bool epr_ab = false;
    bool epr_ba = false;
    bool epr_via_sum = false;
};

namespace detail {

inline double mean_product(const std::vector<double>& x, const std::vector<double>& y) {
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
    return acc / static_cast<double>(x.size());
}

}  // namespace detail

/// Least-squares gain of the A estimates on the B estimates through the
/// origin (the fluctuations are zero-mean by construction). The standard
/// error is the usual regression one, sqrt(residual variance / sum b^2).
inline Estimate fit_gain(const LocalReadout& r, Axis axis) {
    if (r.m < 2) throw std::domain_error("need at least 2 samples to fit a gain");
    const std::vector<double>& a = r.estimates(axis, true);
    const std::vector<double>& b = r.estimates(axis, false);
    const double sbb = detail::mean_product(b, b) * static_cast<double>(r.m);
    if (!(sbb > 0.0)) throw NumericalError("degenerate regressor: reference estimates have zero variance");
    const double sab = detail::mean_product(a, b) * static_cast<double>(r.m);
    const double g = sab / sbb;

    double resid = 0.0;
    for (std::size_t i = 0; i < r.m; ++i) {
        const double e = a[i] - g * b[i];
        resid += e * e;
    }
    resid /= static_cast<double>(r.m);
    return Estimate{g, std::sqrt(resid / sbb)};
}

/// Sample variance of (a_hat - g * b_hat) at a caller-fixed gain, with the
/// chi-square standard error v * sqrt(2/m).
inline Estimate fixed_gain_variance(const LocalReadout& r, double gain, Axis axis) {
    if (r.m < 2) throw std::domain_error("need at least 2 samples");
    const std::vector<double>& a = r.estimates(axis, true);
    const std::vector<double>& b = r.estimates(axis, false);
    double acc = 0.0;
    for (std::size_t i = 0; i < r.m; ++i) {
        const double e = a[i] - gain * b[i];
        acc += e * e;
    }
    const double v = acc / static_cast<double>(r.m);
    return Estimate{v, v * std::sqrt(2.0 / static_cast<double>(r.m))};
}

/// Second moments of the readout estimates, packaged as a MomentState so
/// the witness module can consume them unchanged. Mean spins are not
/// observable from fluctuation samples and are taken from the model.
inline MomentState empirical_moments(const LocalReadout& r, const ModelParams& p) {
    if (r.m < 1) throw std::domain_error("empty readout");
    MomentState s;
    s.v_ay = detail::mean_product(r.a_y, r.a_y);
    s.v_by = detail::mean_product(r.b_y, r.b_y);
    s.v_az = detail::mean_product(r.a_z, r.a_z);
    s.v_bz = detail::mean_product(r.b_z, r.b_z);
    s.c_yy = detail::mean_product(r.a_y, r.b_y);
    s.c_zz = detail::mean_product(r.a_z, r.b_z);
    s.p2 = p2_steady(p);
    s.mean_x_a = mean_spin_steady(p);
    s.mean_x_b = -s.mean_x_a;
    return s;
}

/// Full witness estimation from local readouts: regression gains per axis,
/// inference variances from the residuals, witnesses assembled exactly as
/// in the witness module, each with an O(1/sqrt(m)) standard error.
inline WitnessEstimate estimate_witnesses(const LocalReadout& r, const ModelParams& p) {
    if (r.m < 100) throw std::domain_error("witness estimation needs at least 100 samples");

    const MomentState emp = empirical_moments(r, p);
    if (!(emp.v_by > 0.0) || !(emp.v_bz > 0.0) || !(emp.v_ay > 0.0) || !(emp.v_az > 0.0)) {
        throw NumericalError("degenerate regressor: zero estimate variance");
    }
    const WitnessReport rep = classify(emp, p);

    const double m = static_cast<double>(r.m);
    const double rel_var = std::sqrt(2.0 / m);

    WitnessEstimate est;
    est.m = r.m;
    est.g_z = Estimate{emp.c_zz / emp.v_bz, std::sqrt(rep.var_inf_z / (m * emp.v_bz))};
    est.g_y = Estimate{emp.c_yy / emp.v_by, std::sqrt(rep.var_inf_y / (m * emp.v_by))};
    est.var_inf_z = Estimate{rep.var_inf_z, rep.var_inf_z * rel_var};
    est.var_inf_y = Estimate{rep.var_inf_y, rep.var_inf_y * rel_var};
    est.delta_ent = Estimate{rep.delta_ent, rep.delta_ent * rel_var};
    est.delta_g_ent = Estimate{rep.delta_g_ent, rep.delta_g_ent * rel_var};
    est.e_epr_ab = Estimate{rep.e_epr_ab, rep.e_epr_ab / std::sqrt(m)};
    est.e_epr_ba = Estimate{rep.e_epr_ba, rep.e_epr_ba / std::sqrt(m)};
    est.entangled = rep.entangled;
    est.epr_ab = rep.epr_ab;
    est.epr_ba = rep.epr_ba;
    est.epr_via_sum = rep.epr_via_sum;
    return est;
}

}  // namespace spinsteer
