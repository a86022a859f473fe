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

#include "swchan/synth.hpp"
#include "swchan/error.hpp"

#include <cmath>

namespace swchan
{

std::vector<double> expand_grid(const DistanceGrid &grid)
{
    if (!std::isfinite(grid.start_m) || !std::isfinite(grid.stop_m) || !std::isfinite(grid.step_m))
        throw validation_error("grid bounds must be finite");
    if (!(grid.step_m > 0.0))
        throw validation_error("grid step must be positive");
    if (grid.stop_m < grid.start_m)
        throw validation_error("grid stop must not be below grid start");
    const auto count = static_cast<std::size_t>(std::floor((grid.stop_m - grid.start_m) / grid.step_m + 1e-9)) + 1;
    std::vector<double> d(count);
    for (std::size_t i = 0; i < count; ++i)
        d[i] = grid.start_m + static_cast<double>(i) * grid.step_m;
    return d;
}

double GaussianStream::next()
{
    constexpr double scale = 0x1.0p-53;
    const std::uint64_t a = engine_();
    const std::uint64_t b = engine_();
    const double u1 = static_cast<double>((a >> 11) + 1) * scale;
    const double u2 = static_cast<double>(b >> 11) * scale;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

std::vector<double> synth_distances(const SynthConfig &c)
{
    if (const auto *grid = std::get_if<DistanceGrid>(&c.distances))
        return expand_grid(*grid);
    return std::get<std::vector<double>>(c.distances);
}

MeasurementSet generate_measurements(const SynthConfig &c)
{
    if (!std::isfinite(c.sigma_db) || c.sigma_db < 0.0)
        throw validation_error("sigma must be a non-negative number of dB");
    if (!(std::abs(c.forward_amplitude) > 0.0))
        throw validation_error("forward amplitude must be nonzero");

    const auto distances = synth_distances(c);
    const double d0 = c.model.sffl.d0_m();
    if (distances.size() < 3)
        throw validation_error("synthetic grid must contain at least 3 distances, got " +
                               std::to_string(distances.size()));
    for (double d : distances)
        if (!(d >= d0))
            throw validation_error("synthetic grid reaches below the reference distance");

    GaussianStream noise(c.seed);
    std::vector<Sample> samples;
    samples.reserve(distances.size());
    for (double d : distances)
        samples.push_back({d, combined_path_loss(c.model, d) + c.sigma_db * noise.next()});
    try
    {
        return MeasurementSet(c.model.frequency, std::move(samples), d0);
    }
    catch (const data_error &e)
    {
        throw validation_error(std::string("invalid synthetic grid: ") + e.what());
    }
}

OracleWave oracle_standing_wave(const ComplexReflection &gamma, double k_rad_per_m, double d_m, double d0_m,
                                std::complex<double> forward_amplitude)
{
    if (!(d_m >= d0_m))
        throw distance_below_reference(d_m, d0_m);
    const std::complex<double> i{0.0, 1.0};
    const double x = d_m - d0_m;
    const std::complex<double> g = std::polar(gamma.magnitude(), gamma.phase_rad());
    const std::complex<double> v_f = std::exp(-i * k_rad_per_m * x) * forward_amplitude;
    const std::complex<double> v_r = g * std::exp(i * k_rad_per_m * x) * forward_amplitude;
    const std::complex<double> v_net = v_f + v_r;
    return {v_net, (v_net * std::conj(v_net)).real()};
}

} // namespace swchan
