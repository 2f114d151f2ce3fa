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
// Minimal library walkthrough: build a model, take its steady state, and
// read off the witnesses at one operating point.
//
//   ./steady_report [Z [d [gamma_d_add]]]
//
// defaults to the Z = 2, d = 30 showcase point.

#include <cstdio>
#include <cstdlib>
#include <exception>

#include "spinsteer/spinsteer.hpp"

int main(int argc, char** argv) {
    const double z = argc > 1 ? std::strtod(argv[1], nullptr) : 2.0;
    const double d = argc > 2 ? std::strtod(argv[2], nullptr) : 30.0;
    const double add = argc > 3 ? std::strtod(argv[3], nullptr) : 0.0;

    try {
        const spinsteer::ModelParams params = spinsteer::make_params(z, d, add);
        const spinsteer::MomentState steady = spinsteer::steady_state(params);
        const spinsteer::WitnessReport rep = spinsteer::classify(steady, params);
        const spinsteer::GainPair gain = spinsteer::optimal_gain(params);

        std::printf("operating point: Z = %g, d = %g, gamma_d_add = %g, N = %g\n", z, d, add,
                    params.n_atoms);
        std::printf("  squeeze         mu = %-12.6g nu = %.6g\n", params.squeeze.mu,
                    params.squeeze.nu);
        std::printf("  population      P2 = %.6g\n", steady.p2);
        std::printf("  moments         v = %-12.6g c_zz = %-12.6g mean_x = %.6g\n", steady.v_az,
                    steady.c_zz, steady.mean_x_a);
        std::printf("  inference       g_opt = %-12.6g var_inf = %.6g\n", gain.g_z,
                    rep.var_inf_z);
        std::printf("  witnesses       xi = %-12.6g xi_g = %-12.6g E = %.6g\n", rep.delta_ent,
                    rep.delta_g_ent, rep.e_epr_ab);
        std::printf("  verdict         entangled = %s, paradox = %s, paradox via sum = %s\n",
                    rep.entangled ? "yes" : "no", rep.epr_ab ? "yes" : "no",
                    rep.epr_via_sum ? "yes" : "no");
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
