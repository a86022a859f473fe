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

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace swchan::io
{

// Nine significant digits, '.' separator, no locale; -0 prints as 0.
std::string format_number(double value);

// Whole-string decimal parse; throws data_error naming `what` on failure.
double parse_number(std::string_view text, std::string_view what = "number");

// ----- Campaign CSV ------------------------------------------------------
//
// Header is one of
//   frequency_ghz,distance_m,path_loss_db
//   frequency_ghz,distance_m,received_power_dbm
//   frequency_ghz,distance_m,s21_db          (VNA sweep, many rows per distance)
// Blank lines and lines starting with '#' are skipped.

enum class CampaignKind
{
    path_loss,
    received_power,
    sweep
};

struct CampaignRow
{
    double frequency_ghz;
    double distance_m;
    double value;
    std::size_t line;
};

struct Campaign
{
    CampaignKind kind = CampaignKind::path_loss;
    std::vector<CampaignRow> rows;
};

// Throws data_error with "<source>:<line>:" prefixes for malformed input.
Campaign read_campaign(std::istream &in, std::string_view source = "<input>");

// Gains and transmit power needed to turn received power into path loss.
struct LinkBudget
{
    double tx_power_dbm;
    AntennaSpec tx;
    AntennaSpec rx;
};

/// Converts a campaign into a MeasurementSet sorted by distance.
///
/// Received power becomes PL = Ptx + Gt + Gr - Prx and needs `link`. Sweep
/// rows are band-averaged: PL(d) = -mean(s21_db) over the rows at d, and the
/// center frequency is the midpoint of the swept span, which must be the same
/// at every distance. Throws data_error for mixed frequencies (listing them),
/// duplicate distances or too few samples; validation_error when the
/// received-power convention is used without a link budget.
MeasurementSet to_measurement_set(const Campaign &c, double d0_m, const std::optional<LinkBudget> &link = {});

void write_campaign(std::ostream &out, const MeasurementSet &m);

// ----- Report ------------------------------------------------------------

struct ReportFile
{
    double frequency_ghz = 0.0;
    double alpha_db = 0.0;
    double beta = 0.0;
    double sigma_db = 0.0;
    double d0_m = 0.0;
    double gamma_mag = 0.0;
    double gamma_phase_rad = 0.0;
    double k_rad_per_m = 0.0;
    double rms_sffl_db = 0.0;
    double rms_combined_db = 0.0;
    std::size_t extrema_found = 0;
    bool refined = false;
    std::string tool_version = SWCHAN_VERSION;

    friend bool operator==(const ReportFile &, const ReportFile &) = default;
};

ReportFile make_report(const FitReport &r);

// Validates every field through the model types.
ChannelModel to_channel_model(const ReportFile &r);

// Flat JSON object, fixed key order, numbers via format_number.
void write_report(std::ostream &out, const ReportFile &r);
std::string report_to_string(const ReportFile &r);

// Throws data_error for syntax errors, missing keys or an incompatible
// tool_version major.
ReportFile read_report(std::istream &in);

// ----- Antenna spec files ------------------------------------------------
//
// Same key/value layout as the report:
//   {"band_name": "WR-6.5", "band_low_ghz": 110, "band_high_ghz": 170,
//    "half_power_beamwidth_deg": 13, "gain_dbi": 21, "beam_waist_radius_mm": 4.1}

AntennaSpec read_antenna(std::istream &in);
void write_antenna(std::ostream &out, const AntennaSpec &a);

// Preset name, or otherwise a path to an antenna spec file.
AntennaSpec resolve_antenna(std::string_view name_or_path);

// ----- Fit configuration -------------------------------------------------

// Overrides any FitConfig field present in a JSON object; unknown keys throw.
FitConfig read_fit_config(std::istream &in, FitConfig base = {});

} // namespace swchan::io
