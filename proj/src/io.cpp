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

#include "swchan/io.hpp"
#include "swchan/error.hpp"

#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace swchan::io
{

using nlohmann::json;

namespace
{

std::string_view trim(std::string_view s)
{
    const auto not_space = [](char c) { return c != ' ' && c != '\t' && c != '\r' && c != '\n'; };
    const auto b = std::find_if(s.begin(), s.end(), not_space);
    const auto e = std::find_if(s.rbegin(), std::make_reverse_iterator(b), not_space).base();
    return {b, e};
}

std::vector<std::string_view> split_fields(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true)
    {
        const auto comma = line.find(',', pos);
        out.push_back(trim(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos)));
        if (comma == std::string_view::npos)
            break;
        pos = comma + 1;
    }
    return out;
}

std::string join_header(const std::vector<std::string_view> &fields)
{
    std::string h;
    for (std::size_t i = 0; i < fields.size(); ++i)
    {
        if (i)
            h += ',';
        h += fields[i];
    }
    return h;
}

std::string location(std::string_view source, std::size_t line)
{
    return std::string(source) + ":" + std::to_string(line) + ": ";
}

bool same_frequency(double a, double b)
{
    return std::abs(a - b) <= 1e-9 * std::max(std::abs(a), std::abs(b));
}

double number_field(const json &doc, const char *key)
{
    const auto it = doc.find(key);
    if (it == doc.end())
        throw data_error(std::string("missing key '") + key + "'");
    if (!it->is_number())
        throw data_error(std::string("key '") + key + "' must be a number");
    return it->get<double>();
}

json parse_json_object(std::istream &in, const char *what)
{
    json doc;
    try
    {
        doc = json::parse(in);
    }
    catch (const json::parse_error &e)
    {
        throw data_error(std::string(what) + ": " + e.what());
    }
    if (!doc.is_object())
        throw data_error(std::string(what) + ": expected a JSON object");
    return doc;
}

std::string json_string(std::string_view s)
{
    return json(std::string(s)).dump();
}

} // namespace

std::string format_number(double value)
{
    if (value == 0.0)
        value = 0.0;
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 9);
    return {buf, res.ptr};
}

double parse_number(std::string_view text, std::string_view what)
{
    std::string_view t = trim(text);
    if (!t.empty() && t.front() == '+')
        t.remove_prefix(1);
    double value = 0.0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), value);
    if (t.empty() || res.ec != std::errc{} || res.ptr != t.data() + t.size() || !std::isfinite(value))
        throw data_error("invalid " + std::string(what) + " '" + std::string(trim(text)) + "'");
    return value;
}

Campaign read_campaign(std::istream &in, std::string_view source)
{
    Campaign c;
    bool have_header = false;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line))
    {
        ++line_no;
        const auto t = trim(line);
        if (t.empty() || t.front() == '#')
            continue;
        const auto fields = split_fields(t);
        if (!have_header)
        {
            const std::string header = join_header(fields);
            if (header == "frequency_ghz,distance_m,path_loss_db")
                c.kind = CampaignKind::path_loss;
            else if (header == "frequency_ghz,distance_m,received_power_dbm")
                c.kind = CampaignKind::received_power;
            else if (header == "frequency_ghz,distance_m,s21_db")
                c.kind = CampaignKind::sweep;
            else
                throw data_error(location(source, line_no) + "unrecognized header '" + header +
                                 "' (expected frequency_ghz,distance_m,path_loss_db or "
                                 "frequency_ghz,distance_m,received_power_dbm)");
            have_header = true;
            continue;
        }
        if (fields.size() != 3)
            throw data_error(location(source, line_no) + "malformed row: expected 3 fields, got " +
                             std::to_string(fields.size()));
        try
        {
            c.rows.push_back({parse_number(fields[0], "frequency"), parse_number(fields[1], "distance"),
                              parse_number(fields[2], "value"), line_no});
        }
        catch (const data_error &e)
        {
            throw data_error(location(source, line_no) + "malformed row: " + e.what());
        }
    }
    if (!have_header)
        throw data_error(std::string(source) + ": missing header row");
    return c;
}

MeasurementSet to_measurement_set(const Campaign &c, double d0_m, const std::optional<LinkBudget> &link)
{
    if (c.rows.empty())
        throw degenerate_input("insufficient samples: 0 given, at least 3 required");

    std::vector<CampaignRow> rows = c.rows;
    std::stable_sort(rows.begin(), rows.end(),
                     [](const CampaignRow &a, const CampaignRow &b) { return a.distance_m < b.distance_m; });

    std::vector<Sample> samples;
    double center_ghz = 0.0;

    if (c.kind == CampaignKind::sweep)
    {
        std::vector<double> centers;
        for (std::size_t i = 0; i < rows.size();)
        {
            std::size_t j = i;
            double sum = 0.0;
            double f_lo = rows[i].frequency_ghz;
            double f_hi = rows[i].frequency_ghz;
            for (; j < rows.size() && rows[j].distance_m == rows[i].distance_m; ++j)
            {
                sum += rows[j].value;
                f_lo = std::min(f_lo, rows[j].frequency_ghz);
                f_hi = std::max(f_hi, rows[j].frequency_ghz);
            }
            samples.push_back({rows[i].distance_m, -sum / static_cast<double>(j - i)});
            centers.push_back(0.5 * (f_lo + f_hi));
            i = j;
        }
        center_ghz = centers.front();
        for (double f : centers)
            if (std::abs(f - center_ghz) > 1e-6)
                throw data_error("sweep spans differ between distances (centers " + format_number(center_ghz) +
                                 " and " + format_number(f) + " GHz)");
    }
    else
    {
        std::vector<double> freqs;
        for (const auto &r : rows)
            if (std::none_of(freqs.begin(), freqs.end(), [&](double f) { return same_frequency(f, r.frequency_ghz); }))
                freqs.push_back(r.frequency_ghz);
        if (freqs.size() > 1)
        {
            std::sort(freqs.begin(), freqs.end());
            std::string list;
            for (double f : freqs)
                list += (list.empty() ? "" : ", ") + format_number(f);
            throw data_error("mixed frequencies in one campaign (" + list + " GHz); fit one frequency per file");
        }
        center_ghz = freqs.front();

        const Frequency f(center_ghz);
        if (c.kind == CampaignKind::received_power)
        {
            if (!link)
                throw validation_error(
                    "received-power campaigns need --tx-power-dbm, --tx-antenna and --rx-antenna");
            for (const auto *a : {&link->tx, &link->rx})
                if (!a->covers(f))
                    throw band_mismatch((a == &link->tx ? "tx antenna " : "rx antenna ") + a->band_name() +
                                        " does not cover " + format_number(center_ghz) + " GHz");
        }
        for (std::size_t i = 0; i < rows.size(); ++i)
        {
            if (i > 0 && rows[i].distance_m == rows[i - 1].distance_m)
                throw data_error("duplicate distance " + format_number(rows[i].distance_m) + " m (lines " +
                                 std::to_string(rows[i - 1].line) + " and " + std::to_string(rows[i].line) + ")");
            double pl = rows[i].value;
            if (c.kind == CampaignKind::received_power)
                pl = link->tx_power_dbm + link->tx.gain_dbi() + link->rx.gain_dbi() - rows[i].value;
            samples.push_back({rows[i].distance_m, pl});
        }
    }

    Frequency frequency(1.0);
    try
    {
        frequency = Frequency(center_ghz);
    }
    catch (const validation_error &e)
    {
        throw data_error(e.what());
    }
    return MeasurementSet(frequency, std::move(samples), d0_m);
}

void write_campaign(std::ostream &out, const MeasurementSet &m)
{
    out << "frequency_ghz,distance_m,path_loss_db\n";
    const std::string f = format_number(m.frequency().ghz());
    for (const auto &s : m.samples())
        out << f << ',' << format_number(s.distance_m) << ',' << format_number(s.path_loss_db) << '\n';
}

ReportFile make_report(const FitReport &r)
{
    ReportFile out;
    out.frequency_ghz = r.model.frequency.ghz();
    out.alpha_db = r.model.sffl.alpha_db();
    out.beta = r.model.sffl.beta();
    out.sigma_db = r.model.sffl.sigma_db();
    out.d0_m = r.model.sffl.d0_m();
    out.gamma_mag = r.model.standing.gamma().magnitude();
    out.gamma_phase_rad = r.model.standing.gamma().phase_rad();
    out.k_rad_per_m = r.model.standing.k_rad_per_m();
    out.rms_sffl_db = r.rms_sffl_db;
    out.rms_combined_db = r.rms_combined_db;
    out.extrema_found = r.extrema_found;
    out.refined = r.refined;
    return out;
}

ChannelModel to_channel_model(const ReportFile &r)
{
    return {Frequency(r.frequency_ghz), SfflParams(r.alpha_db, r.beta, r.sigma_db, r.d0_m),
            StandingWaveParams(ComplexReflection(r.gamma_mag, r.gamma_phase_rad), r.k_rad_per_m)};
}

void write_report(std::ostream &out, const ReportFile &r)
{
    const std::pair<const char *, std::string> entries[] = {
        {"frequency_ghz", format_number(r.frequency_ghz)},
        {"alpha_db", format_number(r.alpha_db)},
        {"beta", format_number(r.beta)},
        {"sigma_db", format_number(r.sigma_db)},
        {"d0_m", format_number(r.d0_m)},
        {"gamma_mag", format_number(r.gamma_mag)},
        {"gamma_phase_rad", format_number(r.gamma_phase_rad)},
        {"k_rad_per_m", format_number(r.k_rad_per_m)},
        {"rms_sffl_db", format_number(r.rms_sffl_db)},
        {"rms_combined_db", format_number(r.rms_combined_db)},
        {"extrema_found", std::to_string(r.extrema_found)},
        {"refined", r.refined ? "true" : "false"},
        {"tool_version", json_string(r.tool_version)},
    };
    out << "{\n";
    for (std::size_t i = 0; i < std::size(entries); ++i)
        out << "  \"" << entries[i].first << "\": " << entries[i].second << (i + 1 < std::size(entries) ? ",\n" : "\n");
    out << "}\n";
}

std::string report_to_string(const ReportFile &r)
{
    std::ostringstream os;
    write_report(os, r);
    return os.str();
}

ReportFile read_report(std::istream &in)
{
    const json doc = parse_json_object(in, "report");
    ReportFile r;
    r.frequency_ghz = number_field(doc, "frequency_ghz");
    r.alpha_db = number_field(doc, "alpha_db");
    r.beta = number_field(doc, "beta");
    r.sigma_db = number_field(doc, "sigma_db");
    r.d0_m = number_field(doc, "d0_m");
    r.gamma_mag = number_field(doc, "gamma_mag");
    r.gamma_phase_rad = number_field(doc, "gamma_phase_rad");
    r.k_rad_per_m = number_field(doc, "k_rad_per_m");
    r.rms_sffl_db = number_field(doc, "rms_sffl_db");
    r.rms_combined_db = number_field(doc, "rms_combined_db");

    const auto extrema = doc.find("extrema_found");
    if (extrema == doc.end() || !extrema->is_number_unsigned())
        throw data_error("key 'extrema_found' must be a non-negative integer");
    r.extrema_found = extrema->get<std::size_t>();

    const auto refined = doc.find("refined");
    if (refined == doc.end() || !refined->is_boolean())
        throw data_error("key 'refined' must be true or false");
    r.refined = refined->get<bool>();

    const auto version = doc.find("tool_version");
    if (version == doc.end() || !version->is_string())
        throw data_error("key 'tool_version' must be a string");
    r.tool_version = version->get<std::string>();
    const std::string ours = SWCHAN_VERSION;
    if (r.tool_version.substr(0, r.tool_version.find('.')) != ours.substr(0, ours.find('.')))
        throw data_error("report tool_version " + r.tool_version + " is incompatible with " + ours);
    return r;
}

AntennaSpec read_antenna(std::istream &in)
{
    const json doc = parse_json_object(in, "antenna spec");
    const auto name = doc.find("band_name");
    if (name == doc.end() || !name->is_string())
        throw data_error("antenna spec: key 'band_name' must be a string");
    return {name->get<std::string>(),           number_field(doc, "band_low_ghz"),
            number_field(doc, "band_high_ghz"), number_field(doc, "half_power_beamwidth_deg"),
            number_field(doc, "gain_dbi"),      number_field(doc, "beam_waist_radius_mm")};
}

void write_antenna(std::ostream &out, const AntennaSpec &a)
{
    out << "{\n"
        << "  \"band_name\": " << json_string(a.band_name()) << ",\n"
        << "  \"band_low_ghz\": " << format_number(a.band_low_ghz()) << ",\n"
        << "  \"band_high_ghz\": " << format_number(a.band_high_ghz()) << ",\n"
        << "  \"half_power_beamwidth_deg\": " << format_number(a.half_power_beamwidth_deg()) << ",\n"
        << "  \"gain_dbi\": " << format_number(a.gain_dbi()) << ",\n"
        << "  \"beam_waist_radius_mm\": " << format_number(a.beam_waist_radius_mm()) << "\n"
        << "}\n";
}

AntennaSpec resolve_antenna(std::string_view name_or_path)
{
    for (const auto &a : antenna_presets())
        if (a.band_name() == name_or_path)
            return a;
    std::ifstream in{std::string(name_or_path)};
    if (!in)
        throw validation_error("unknown antenna '" + std::string(name_or_path) +
                               "': not a preset (WR-2.2, WR-4.3, WR-6.5) and not a readable file");
    return read_antenna(in);
}

FitConfig read_fit_config(std::istream &in, FitConfig base)
{
    const json doc = parse_json_object(in, "fit config");
    auto count = [&](const json &v, const std::string &key) {
        if (!v.is_number_unsigned())
            throw validation_error("fit config: '" + key + "' must be a non-negative integer");
        return v.get<std::size_t>();
    };
    auto real = [&](const json &v, const std::string &key) {
        if (!v.is_number())
            throw validation_error("fit config: '" + key + "' must be a number");
        return v.get<double>();
    };
    for (const auto &[key, v] : doc.items())
    {
        if (key == "fallback_gamma_mag")
            base.fallback_gamma_mag = real(v, key);
        else if (key == "fallback_gamma_phase_rad")
            base.fallback_gamma_phase_rad = real(v, key);
        else if (key == "initial_phase_steps")
            base.initial_phase_steps = count(v, key);
        else if (key == "grid_gamma_steps")
            base.grid_gamma_steps = count(v, key);
        else if (key == "gamma_mag_max")
            base.gamma_mag_max = real(v, key);
        else if (key == "grid_phase_steps")
            base.grid_phase_steps = count(v, key);
        else if (key == "grid_k_steps")
            base.grid_k_steps = count(v, key);
        else if (key == "min_improvement_db")
            base.min_improvement_db = real(v, key);
        else if (key == "max_iterations")
            base.max_iterations = count(v, key);
        else if (key == "rms_tie_db")
            base.rms_tie_db = real(v, key);
        else if (key == "threads")
            base.threads = static_cast<unsigned>(count(v, key));
        else if (key == "refine_sffl")
        {
            if (!v.is_boolean())
                throw validation_error("fit config: 'refine_sffl' must be true or false");
            base.refine_sffl = v.get<bool>();
        }
        else
            throw validation_error("fit config: unknown key '" + key + "'");
    }
    if (!(base.gamma_mag_max > 0.0 && base.gamma_mag_max < 1.0))
        throw validation_error("fit config: gamma_mag_max must lie in (0, 1)");
    if (!(base.fallback_gamma_mag >= 0.0 && base.fallback_gamma_mag < 1.0))
        throw validation_error("fit config: fallback_gamma_mag must lie in [0, 1)");
    if (base.grid_gamma_steps < 2 || base.grid_phase_steps < 1 || base.grid_k_steps < 1 ||
        base.initial_phase_steps < 1)
        throw validation_error("fit config: grid step counts must be positive (grid_gamma_steps >= 2)");
    return base;
}

} // namespace swchan::io
