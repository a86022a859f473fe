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

#include <cstddef>
#include <span>
#include <vector>

namespace swchan
{

struct Sample
{
    double distance_m;
    double path_loss_db;

    friend bool operator==(const Sample &, const Sample &) = default;
};

/// Distance-swept path-loss samples at one center frequency.
///
/// Invariants: at least three samples, strictly increasing distances, every
/// distance >= d0 and every value finite. Violations throw degenerate_input
/// (too few samples) or data_error.
class MeasurementSet
{
  public:
    MeasurementSet(Frequency frequency, std::vector<Sample> samples, double d0_m = default_d0_m);

    Frequency frequency() const noexcept { return frequency_; }
    const std::vector<Sample> &samples() const noexcept { return samples_; }
    double d0_m() const noexcept { return d0_m_; }
    std::size_t size() const noexcept { return samples_.size(); }

    // Smallest spacing between consecutive distances.
    double min_step_m() const noexcept;

    friend bool operator==(const MeasurementSet &, const MeasurementSet &) = default;

  private:
    Frequency frequency_;
    std::vector<Sample> samples_;
    double d0_m_;
};

struct ResidualPoint
{
    double distance_m;
    double residual_db;
};

// residual = fitted model - measured, so constructive interference is positive.
struct ResidualSeries
{
    std::vector<ResidualPoint> points;
};

struct Extremum
{
    std::size_t index;
    double distance_m;
    double value;
};

struct Extrema
{
    std::vector<Extremum> maxima;
    std::vector<Extremum> minima;

    std::size_t count() const noexcept { return maxima.size() + minima.size(); }
};

/// Tunables for the estimation pipeline. Defaults are the documented repo
/// constants; the CLI can override them from a config file.
struct FitConfig
{
    // used when the residuals show no usable maximum/minimum pair
    double fallback_gamma_mag = 0.05;
    double fallback_gamma_phase_rad = 0.0;
    std::size_t initial_phase_steps = 64;

    // coarse grid: |G| over [0, gamma_mag_max], phase over [0, 2pi),
    // k over (0, pi/min_step]
    std::size_t grid_gamma_steps = 50;
    double gamma_mag_max = 0.99;
    std::size_t grid_phase_steps = 64;
    std::size_t grid_k_steps = 200;

    // coordinate descent
    double min_improvement_db = 1e-6;
    std::size_t max_iterations = 500;

    // Re-solve alpha and beta by least squares for every candidate (G, k).
    // When false they stay at the values passed to refine_fit.
    bool refine_sffl = true;

    // RMS is compared in buckets of this width; equal buckets are ties,
    // broken toward smaller |G|, then smaller k.
    double rms_tie_db = 1e-9;

    // Worker threads for the coarse grid; 0 picks hardware_concurrency().
    unsigned threads = 0;
};

struct InitialGamma
{
    ComplexReflection gamma;
    bool fallback = false;
};

struct FitReport
{
    // fitted combined model; sigma is the spread about it
    ChannelModel model;
    // plain least-squares floating-intercept fit
    SfflParams plain;
    double rms_sffl_db = 0.0;
    double rms_combined_db = 0.0;
    StandingWaveParams initial_estimate;
    bool refined = false;
    std::size_t iterations = 0;
    std::size_t extrema_found = 0;
    // initial |G| came from the fallback default rather than residual extrema
    bool initial_fallback = false;
    // initial k came from maxima/minima spacing rather than the k grid
    bool k_from_period = false;

    friend bool operator==(const FitReport &, const FitReport &) = default;
};

/// Ordinary least squares for alpha and beta on x = 10*log10(d/d0).
/// sigma is the population standard deviation of the residuals.
/// Throws degenerate_input for fewer than three samples or a single distance.
SfflParams fit_sffl_ols(const MeasurementSet &m);

ResidualSeries residuals(const MeasurementSet &m, const SfflParams &p);

/// Interior local extrema by three-point comparison. Endpoints are never
/// reported; a plateau of equal values counts once, at its leftmost index.
/// Throws degenerate_input for fewer than three points.
Extrema detect_extrema(const ResidualSeries &r);

/// k = pi / T with T the mean spacing of consecutive extrema.
/// Throws insufficient_extrema for fewer than two entries.
double estimate_k_from_period(std::span<const Extremum> extrema);

/// Initial |G| from the largest maximum and smallest minimum of the residuals
/// (dB to amplitude with factor 20), then the phase by a grid search that
/// minimizes the RMS between the residuals and the standing-wave gain at k.
/// Falls back to the configured default when no max/min pair exists.
InitialGamma initial_gamma_estimate(const ResidualSeries &r, double k_rad_per_m, double d0_m,
                                    const FitConfig &config = {});

// Best k on the coarse k grid (with phase grid) for a fixed |G|; used when the
// residuals have too few extrema to read a period off.
double initial_k_by_grid(const ResidualSeries &r, double gamma_mag, double d0_m, double k_max,
                         const FitConfig &config = {});

// Upper end of the k search range: pi / smallest distance step.
double k_search_limit(const MeasurementSet &m);

// RMS of (measured - model) over the set, in dB.
double rms_error(const MeasurementSet &m, const ChannelModel &model);

/// Coarse grid over (|G|, phase, k) followed by coordinate descent on the
/// RMS of measured minus combined path loss. The grid always contains
/// |G| = 0, so rms_combined_db <= rms_sffl_db.
FitReport refine_fit(const MeasurementSet &m, const SfflParams &p, const StandingWaveParams &init,
                     const FitConfig &config = {});

/// Full pipeline: OLS, residuals, extrema, period, initial G, refinement.
FitReport fit_channel(const MeasurementSet &m, const FitConfig &config = {});

} // namespace swchan
