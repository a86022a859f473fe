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

#include "swchan/core.hpp"
#include "swchan/error.hpp"

#include <array>
#include <cmath>
#include <sstream>

namespace swchan
{

namespace
{

std::string describe(double value)
{
    std::ostringstream os;
    os.precision(9);
    os << value;
    return os.str();
}

void require_finite(double value, const char *what)
{
    if (!std::isfinite(value))
        throw validation_error(std::string(what) + " must be finite");
}

double normalize_phase(double phase_rad)
{
    double p = std::fmod(phase_rad, two_pi);
    if (p < 0.0)
        p += two_pi;
    // fmod of a tiny negative value plus 2*pi rounds up to 2*pi.
    if (p >= two_pi)
        p = 0.0;
    return p;
}

} // namespace

distance_below_reference::distance_below_reference(double d_m, double d0_m)
    : validation_error("distance " + describe(d_m) + " m is below the reference distance " + describe(d0_m) + " m")
{
}

Frequency::Frequency(double center_ghz) : center_ghz_(center_ghz)
{
    require_finite(center_ghz, "center frequency");
    if (center_ghz <= 0.0)
        throw validation_error("center frequency must be positive, got " + describe(center_ghz) + " GHz");
}

SfflParams::SfflParams(double alpha_db, double beta, double sigma_db, double d0_m)
    : alpha_db_(alpha_db), beta_(beta), sigma_db_(sigma_db), d0_m_(d0_m)
{
    require_finite(alpha_db, "alpha");
    require_finite(beta, "beta");
    require_finite(sigma_db, "sigma");
    require_finite(d0_m, "reference distance");
    if (d0_m <= 0.0)
        throw validation_error("reference distance must be positive, got " + describe(d0_m) + " m");
    if (sigma_db < 0.0)
        throw validation_error("sigma must be non-negative, got " + describe(sigma_db) + " dB");
}

ComplexReflection::ComplexReflection(double magnitude, double phase_rad)
{
    require_finite(magnitude, "reflection magnitude");
    require_finite(phase_rad, "reflection phase");
    if (magnitude < 0.0 || magnitude >= 1.0)
        throw validation_error("reflection magnitude must lie in [0, 1), got " + describe(magnitude));
    magnitude_ = magnitude;
    phase_rad_ = normalize_phase(phase_rad);
}

ComplexReflection ComplexReflection::from_complex(std::complex<double> gamma)
{
    return {std::abs(gamma), std::arg(gamma)};
}

StandingWaveParams::StandingWaveParams(ComplexReflection gamma, double k_rad_per_m)
    : gamma_(gamma), k_rad_per_m_(k_rad_per_m)
{
    require_finite(k_rad_per_m, "wavenumber");
    if (k_rad_per_m <= 0.0)
        throw validation_error("wavenumber must be positive, got " + describe(k_rad_per_m) + " rad/m");
}

AntennaSpec::AntennaSpec(std::string band_name, double band_low_ghz, double band_high_ghz,
                         double half_power_beamwidth_deg, double gain_dbi, double beam_waist_radius_mm)
    : band_name_(std::move(band_name)), band_low_ghz_(band_low_ghz), band_high_ghz_(band_high_ghz),
      half_power_beamwidth_deg_(half_power_beamwidth_deg), gain_dbi_(gain_dbi),
      beam_waist_radius_mm_(beam_waist_radius_mm)
{
    require_finite(band_low_ghz, "band_low_ghz");
    require_finite(band_high_ghz, "band_high_ghz");
    require_finite(half_power_beamwidth_deg, "half_power_beamwidth_deg");
    require_finite(gain_dbi, "gain_dbi");
    require_finite(beam_waist_radius_mm, "beam_waist_radius_mm");
    if (band_name_.empty())
        throw validation_error("antenna band name must not be empty");
    if (band_low_ghz <= 0.0 || band_high_ghz <= 0.0)
        throw validation_error("antenna " + band_name_ + ": band edges must be positive");
    if (band_low_ghz >= band_high_ghz)
        throw validation_error("antenna " + band_name_ + ": band_low_ghz must be below band_high_ghz");
    if (half_power_beamwidth_deg <= 0.0)
        throw validation_error("antenna " + band_name_ + ": beamwidth must be positive");
    if (beam_waist_radius_mm <= 0.0)
        throw validation_error("antenna " + band_name_ + ": beam waist radius must be positive");
}

bool AntennaSpec::covers(Frequency f) const noexcept
{
    return f.ghz() >= band_low_ghz_ && f.ghz() <= band_high_ghz_;
}

std::span<const AntennaSpec> antenna_presets()
{
    static const std::array<AntennaSpec, 3> presets{
        AntennaSpec{"WR-2.2", 325.0, 500.0, 12.0, 25.0, 1.3},
        AntennaSpec{"WR-4.3", 170.0, 260.0, 13.0, 21.0, 2.7},
        AntennaSpec{"WR-6.5", 110.0, 170.0, 13.0, 21.0, 4.1},
    };
    return presets;
}

const AntennaSpec &antenna_preset(std::string_view band_name)
{
    for (const auto &a : antenna_presets())
        if (a.band_name() == band_name)
            return a;
    throw validation_error("unknown antenna preset '" + std::string(band_name) +
                           "' (known: WR-2.2, WR-4.3, WR-6.5)");
}

double amplitude_from_db(double db) { return std::pow(10.0, db / 20.0); }
double power_from_db(double db) { return std::pow(10.0, db / 10.0); }
double amplitude_to_db(double linear) { return 20.0 * std::log10(linear); }
double power_to_db(double linear) { return 10.0 * std::log10(linear); }

double path_loss_sffl(const SfflParams &p, double d_m)
{
    if (!(d_m >= p.d0_m()))
        throw distance_below_reference(d_m, p.d0_m());
    return p.alpha_db() + 10.0 * p.beta() * std::log10(d_m / p.d0_m());
}

double standing_wave_magnitude_sq(const StandingWaveParams &s, double d_m, double d0_m)
{
    if (!(d_m >= d0_m))
        throw distance_below_reference(d_m, d0_m);
    const double mag = s.gamma().magnitude();
    const double theta = 2.0 * s.k_rad_per_m() * (d_m - d0_m);
    return 1.0 + mag * mag + 2.0 * mag * std::cos(theta + s.gamma().phase_rad());
}

double standing_wave_gain_db(const StandingWaveParams &s, double d_m, double d0_m)
{
    return power_to_db(standing_wave_magnitude_sq(s, d_m, d0_m));
}

double combined_path_loss(const ChannelModel &m, double d_m)
{
    const double d0 = m.sffl.d0_m();
    return path_loss_sffl(m.sffl, d_m) - standing_wave_gain_db(m.standing, d_m, d0);
}

double swr_of_gamma(const ComplexReflection &g)
{
    return (1.0 + g.magnitude()) / (1.0 - g.magnitude());
}

double gamma_mag_from_extrema(double v_max, double v_min)
{
    if (!std::isfinite(v_max) || !std::isfinite(v_min) || !(v_min > 0.0) || v_max < v_min)
        throw invalid_extrema("invalid standing-wave extrema: need v_max >= v_min > 0, got v_max=" +
                              describe(v_max) + ", v_min=" + describe(v_min));
    return (v_max - v_min) / (v_max + v_min);
}

double predicted_received_power(const ChannelModel &m, double tx_power_dbm, const AntennaSpec &tx,
                                const AntennaSpec &rx, double d_m)
{
    for (const auto *a : {&tx, &rx})
        if (!a->covers(m.frequency))
            throw band_mismatch((a == &tx ? "tx antenna " : "rx antenna ") + a->band_name() + " (" +
                                describe(a->band_low_ghz()) + "-" + describe(a->band_high_ghz()) +
                                " GHz) does not cover " + describe(m.frequency.ghz()) + " GHz");
    return tx_power_dbm + tx.gain_dbi() + rx.gain_dbi() - combined_path_loss(m, d_m);
}

} // namespace swchan
