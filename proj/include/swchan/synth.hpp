// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include "swchan/core.hpp"
#include "swchan/fit.hpp"

#include <complex>
#include <cstdint>
#include <random>
#include <variant>
#include <vector>

namespace swchan
{

// Evenly spaced distances start, start + step, ... up to and including stop.
struct DistanceGrid
{
    double start_m;
    double stop_m;
    double step_m;
};

// 10.16 cm to 81.28 cm in 5.08 cm increments (15 points).
inline constexpr DistanceGrid reference_grid{0.1016, 0.8128, 0.0508};

/// Expands a grid as start + i*step; a stop that is within 1e-9 steps of a
/// grid point is included. Throws validation_error for non-positive steps or
/// stop < start.
std::vector<double> expand_grid(const DistanceGrid &grid);

/// Standard normal draws from a pinned, portable stream.
///
/// Uniforms come from std::mt19937_64 seeded with the 64-bit seed (the
/// standard fixes its output sequence). Each normal consumes two outputs a, b:
///
///   u1 = ((a >> 11) + 1) * 2^-53      in (0, 1]
///   u2 = (b >> 11) * 2^-53            in [0, 1)
///   z  = sqrt(-2 ln u1) * cos(2 pi u2)
///
/// The sine half of the Box-Muller pair is discarded so the stream has no
/// hidden state beyond the engine.
class GaussianStream
{
  public:
    explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

    double next();

  private:
    std::mt19937_64 engine_;
};

struct SynthConfig
{
    ChannelModel model;
    std::variant<DistanceGrid, std::vector<double>> distances = reference_grid;
    double sigma_db = 0.0;
    std::uint64_t seed = 0;
    // Forward amplitude A; path loss is normalized by |A|^2 so only the
    // oracle sees it.
    std::complex<double> forward_amplitude{1.0, 0.0};
};

std::vector<double> synth_distances(const SynthConfig &c);

/// PL_i = combined_path_loss(d_i) + sigma * z_i with z_i drawn in distance
/// order from GaussianStream(seed). sigma = 0 gives the exact forward model.
/// Throws validation_error for an invalid grid (fewer than 3 points, a
/// distance below d0, negative sigma, zero amplitude).
MeasurementSet generate_measurements(const SynthConfig &c);

struct OracleWave
{
    std::complex<double> v_net;
    double magnitude_sq;
};

/// Forward plus reflected wave summed from explicit complex exponentials,
/// V_f = e^{-ik(d-d0)} A and V_r = G e^{ik(d-d0)} A, with no algebraic
/// simplification. Independent check on standing_wave_magnitude_sq.
OracleWave oracle_standing_wave(const ComplexReflection &gamma, double k_rad_per_m, double d_m, double d0_m,
                                std::complex<double> forward_amplitude = {1.0, 0.0});

} // namespace swchan
