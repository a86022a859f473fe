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

#include <complex>
#include <numbers>
#include <span>
#include <string>
#include <string_view>

namespace swchan
{

inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Reference distance used when none is given (10 cm).
inline constexpr double default_d0_m = 0.10;

// Center frequency in GHz, strictly positive.
class Frequency
{
  public:
    explicit Frequency(double center_ghz);

    double ghz() const noexcept { return center_ghz_; }

    friend bool operator==(const Frequency &, const Frequency &) = default;

  private:
    double center_ghz_;
};

/// Floating-intercept path-loss parameters.
///
/// `alpha_db` is the intercept at the reference distance `d0_m`, `beta` the
/// log-distance exponent and `sigma_db` the standard deviation of the
/// zero-mean Gaussian shadow-fading term. Prediction never applies the
/// shadow-fading draw; only the synthetic generator does.
class SfflParams
{
  public:
    SfflParams(double alpha_db, double beta, double sigma_db = 0.0, double d0_m = default_d0_m);

    double alpha_db() const noexcept { return alpha_db_; }
    double beta() const noexcept { return beta_; }
    double sigma_db() const noexcept { return sigma_db_; }
    double d0_m() const noexcept { return d0_m_; }

    SfflParams with_sigma(double sigma_db) const { return {alpha_db_, beta_, sigma_db, d0_m_}; }

    friend bool operator==(const SfflParams &, const SfflParams &) = default;

  private:
    double alpha_db_;
    double beta_;
    double sigma_db_;
    double d0_m_;
};

/// Passive complex reflection coefficient, 0 <= |G| < 1.
///
/// The phase is normalized into [0, 2*pi) on construction, so a negative real
/// coefficient such as -0.333 is stored as magnitude 0.333 with phase pi.
class ComplexReflection
{
  public:
    ComplexReflection() = default;
    ComplexReflection(double magnitude, double phase_rad);

    static ComplexReflection from_complex(std::complex<double> gamma);

    double magnitude() const noexcept { return magnitude_; }
    double phase_rad() const noexcept { return phase_rad_; }
    std::complex<double> value() const { return std::polar(magnitude_, phase_rad_); }

    friend bool operator==(const ComplexReflection &, const ComplexReflection &) = default;

  private:
    double magnitude_ = 0.0;
    double phase_rad_ = 0.0;
};

// Reflection coefficient plus the effective wavenumber of the interference
// pattern. The pattern repeats every pi/k meters.
class StandingWaveParams
{
  public:
    StandingWaveParams(ComplexReflection gamma, double k_rad_per_m);

    const ComplexReflection &gamma() const noexcept { return gamma_; }
    double k_rad_per_m() const noexcept { return k_rad_per_m_; }
    double period_m() const noexcept { return std::numbers::pi / k_rad_per_m_; }

    friend bool operator==(const StandingWaveParams &, const StandingWaveParams &) = default;

  private:
    ComplexReflection gamma_;
    double k_rad_per_m_;
};

struct ChannelModel
{
    Frequency frequency;
    SfflParams sffl;
    StandingWaveParams standing;

    friend bool operator==(const ChannelModel &, const ChannelModel &) = default;
};

class AntennaSpec
{
  public:
    AntennaSpec(std::string band_name, double band_low_ghz, double band_high_ghz,
                double half_power_beamwidth_deg, double gain_dbi, double beam_waist_radius_mm);

    const std::string &band_name() const noexcept { return band_name_; }
    double band_low_ghz() const noexcept { return band_low_ghz_; }
    double band_high_ghz() const noexcept { return band_high_ghz_; }
    double half_power_beamwidth_deg() const noexcept { return half_power_beamwidth_deg_; }
    double gain_dbi() const noexcept { return gain_dbi_; }
    double beam_waist_radius_mm() const noexcept { return beam_waist_radius_mm_; }

    bool covers(Frequency f) const noexcept;

    friend bool operator==(const AntennaSpec &, const AntennaSpec &) = default;

  private:
    std::string band_name_;
    double band_low_ghz_;
    double band_high_ghz_;
    double half_power_beamwidth_deg_;
    double gain_dbi_;
    double beam_waist_radius_mm_;
};

// VDI horn antennas: WR-2.2, WR-4.3, WR-6.5.
std::span<const AntennaSpec> antenna_presets();

// Looks up a preset by band name; throws validation_error for unknown names.
const AntennaSpec &antenna_preset(std::string_view band_name);

// dB <-> linear. Amplitude quantities (voltages) use 20, power uses 10.
double amplitude_from_db(double db);
double power_from_db(double db);
double amplitude_to_db(double linear);
double power_to_db(double linear);

// ----- Channel model -----------------------------------------------------

/// Mean floating-intercept path loss: alpha + 10*beta*log10(d/d0), in dB.
/// Throws distance_below_reference when d < d0.
double path_loss_sffl(const SfflParams &p, double d_m);

/// |V_net|^2 / |A|^2 = 1 + |G|^2 + 2|G| cos(2k(d - d0) + phase).
///
/// Always lies in [(1-|G|)^2, (1+|G|)^2] and is periodic in d with period pi/k.
double standing_wave_magnitude_sq(const StandingWaveParams &s, double d_m, double d0_m);

// 10*log10 of standing_wave_magnitude_sq (power ratio, factor 10).
double standing_wave_gain_db(const StandingWaveParams &s, double d_m, double d0_m);

// Floating-intercept loss minus the standing-wave gain.
double combined_path_loss(const ChannelModel &m, double d_m);

// (1+|G|)/(1-|G|)
double swr_of_gamma(const ComplexReflection &g);

/// |G| = (Vmax - Vmin)/(Vmax + Vmin) from linear amplitude extrema.
/// Throws invalid_extrema unless v_max >= v_min > 0.
double gamma_mag_from_extrema(double v_max, double v_min);

/// Link budget: tx power + both antenna gains - combined path loss, in dBm.
/// Throws band_mismatch naming the antenna whose band excludes the model
/// frequency.
double predicted_received_power(const ChannelModel &m, double tx_power_dbm, const AntennaSpec &tx,
                                const AntennaSpec &rx, double d_m);

} // namespace swchan
