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

// swchan: fit, predict, simulate and export standing-wave curves.
//
// Exit codes: 0 success, 1 usage/validation error, 2 data error.

#include "swchan/core.hpp"
#include "swchan/error.hpp"
#include "swchan/fit.hpp"
#include "swchan/io.hpp"
#include "swchan/synth.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace
{

using swchan::io::format_number;
using swchan::io::parse_number;

constexpr int exit_validation = 1;
constexpr int exit_data = 2;

// Output goes to a file when a path is given, stdout otherwise.
class Output
{
  public:
    explicit Output(const std::string &path)
    {
        if (!path.empty() && path != "-")
        {
            file_.open(path, std::ios::binary);
            if (!file_)
                throw swchan::data_error("cannot open '" + path + "' for writing");
        }
    }
    std::ostream &stream() { return file_.is_open() ? file_ : std::cout; }

  private:
    std::ofstream file_;
};

std::vector<std::string> split(const std::string &text, char sep)
{
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (true)
    {
        const auto next = text.find(sep, pos);
        parts.push_back(text.substr(pos, next == std::string::npos ? std::string::npos : next - pos));
        if (next == std::string::npos)
            return parts;
        pos = next + 1;
    }
}

// Flag values are checked here and reported as validation errors (exit 1).
double flag_number(const std::string &text, const std::string &flag)
{
    try
    {
        return parse_number(text, flag);
    }
    catch (const swchan::data_error &e)
    {
        throw swchan::validation_error(e.what());
    }
}

swchan::DistanceGrid parse_grid(const std::string &text)
{
    const auto parts = split(text, ':');
    if (parts.size() != 3)
        throw swchan::validation_error("--grid expects start:stop:step, got '" + text + "'");
    return {flag_number(parts[0], "--grid start"), flag_number(parts[1], "--grid stop"),
            flag_number(parts[2], "--grid step")};
}

swchan::ComplexReflection parse_gamma(const std::string &text)
{
    const auto parts = split(text, ':');
    if (parts.size() != 2)
        throw swchan::validation_error("--gamma expects mag:phase_deg, got '" + text + "'");
    const double mag = flag_number(parts[0], "--gamma magnitude");
    const double deg = flag_number(parts[1], "--gamma phase");
    return {mag, deg * std::numbers::pi / 180.0};
}

std::vector<double> parse_distances(const std::string &text)
{
    std::vector<double> d;
    for (const auto &p : split(text, ','))
        d.push_back(flag_number(p, "--distances"));
    return d;
}

swchan::io::Campaign read_campaign_from(const std::string &path)
{
    if (path == "-")
        return swchan::io::read_campaign(std::cin, "<stdin>");
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw swchan::data_error("cannot open '" + path + "'");
    return swchan::io::read_campaign(in, path);
}

// ----- fit ---------------------------------------------------------------

struct FitOptions
{
    std::string input = "-";
    std::string output;
    double d0_m = swchan::default_d0_m;
    std::optional<double> tx_power_dbm;
    std::string tx_antenna;
    std::string rx_antenna;
    std::string curves;
    std::size_t curve_points = 1000;
    std::string config;
};

void write_curves(const std::string &prefix, const swchan::MeasurementSet &m, const swchan::FitReport &r,
                  std::size_t points)
{
    if (points < 2)
        throw swchan::validation_error("--curve-points must be at least 2");
    Output model_out(prefix + "_model.csv");
    auto &mo = model_out.stream();
    mo << "distance_m,path_loss_sffl_db,path_loss_combined_db,standing_wave_gain_db\n";
    const double lo = m.samples().front().distance_m;
    const double hi = m.samples().back().distance_m;
    for (std::size_t i = 0; i < points; ++i)
    {
        double d = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
        if (i + 1 == points)
            d = hi;
        mo << format_number(d) << ',' << format_number(swchan::path_loss_sffl(r.plain, d)) << ','
           << format_number(swchan::combined_path_loss(r.model, d)) << ','
           << format_number(swchan::standing_wave_gain_db(r.model.standing, d, r.model.sffl.d0_m())) << '\n';
    }

    Output resid_out(prefix + "_residuals.csv");
    auto &ro = resid_out.stream();
    ro << "distance_m,measured_db,residual_sffl_db,residual_combined_db\n";
    for (const auto &s : m.samples())
        ro << format_number(s.distance_m) << ',' << format_number(s.path_loss_db) << ','
           << format_number(swchan::path_loss_sffl(r.plain, s.distance_m) - s.path_loss_db) << ','
           << format_number(swchan::combined_path_loss(r.model, s.distance_m) - s.path_loss_db) << '\n';
}

void run_fit(const FitOptions &o)
{
    swchan::FitConfig config;
    if (!o.config.empty())
    {
        std::ifstream in(o.config);
        if (!in)
            throw swchan::validation_error("cannot open config '" + o.config + "'");
        config = swchan::io::read_fit_config(in);
    }

    const auto campaign = read_campaign_from(o.input);
    std::optional<swchan::io::LinkBudget> link;
    if (o.tx_power_dbm || !o.tx_antenna.empty() || !o.rx_antenna.empty())
    {
        if (!o.tx_power_dbm || o.tx_antenna.empty() || o.rx_antenna.empty())
            throw swchan::validation_error("--tx-power-dbm, --tx-antenna and --rx-antenna must be given together");
        link = swchan::io::LinkBudget{*o.tx_power_dbm, swchan::io::resolve_antenna(o.tx_antenna),
                                      swchan::io::resolve_antenna(o.rx_antenna)};
    }
    if (!(o.d0_m > 0.0))
        throw swchan::validation_error("--d0 must be positive");

    const auto measurements = swchan::io::to_measurement_set(campaign, o.d0_m, link);
    const auto report = swchan::fit_channel(measurements, config);

    Output out(o.output);
    swchan::io::write_report(out.stream(), swchan::io::make_report(report));
    if (!o.curves.empty())
        write_curves(o.curves, measurements, report, o.curve_points);
}

// ----- predict -----------------------------------------------------------

struct PredictOptions
{
    std::string model;
    std::string distances;
    std::string grid;
    std::string tx_antenna;
    std::string rx_antenna;
    double tx_power_dbm = 5.0;
    std::string output;
};

void run_predict(const PredictOptions &o)
{
    std::ifstream in(o.model, std::ios::binary);
    if (!in)
        throw swchan::data_error("cannot open model '" + o.model + "'");
    const auto model = swchan::io::to_channel_model(swchan::io::read_report(in));
    const auto tx = swchan::io::resolve_antenna(o.tx_antenna);
    const auto rx = swchan::io::resolve_antenna(o.rx_antenna);

    if (!o.distances.empty() && !o.grid.empty())
        throw swchan::validation_error("give either --distances or --grid, not both");
    std::vector<double> distances;
    if (!o.distances.empty())
        distances = parse_distances(o.distances);
    else
        distances = swchan::expand_grid(o.grid.empty() ? swchan::reference_grid : parse_grid(o.grid));

    // evaluate everything before writing so a failure leaves no partial table
    std::vector<std::array<double, 3>> rows;
    for (double d : distances)
        rows.push_back({d, swchan::combined_path_loss(model, d),
                        swchan::predicted_received_power(model, o.tx_power_dbm, tx, rx, d)});

    Output out(o.output);
    auto &os = out.stream();
    os << "distance_m,path_loss_db,received_power_dbm\n";
    for (const auto &r : rows)
        os << format_number(r[0]) << ',' << format_number(r[1]) << ',' << format_number(r[2]) << '\n';
}

// ----- simulate ----------------------------------------------------------

struct SimulateOptions
{
    double frequency_ghz = 140.0;
    double alpha_db = 70.0;
    double beta = 2.0;
    std::string gamma = "0:0";
    double k_rad_per_m = 10.0 * std::numbers::pi;
    double sigma_db = 0.0;
    std::optional<std::uint64_t> seed;
    std::string grid;
    std::string distances;
    double d0_m = swchan::default_d0_m;
    std::string output;
};

void run_simulate(const SimulateOptions &o)
{
    if (o.sigma_db > 0.0 && !o.seed)
        throw swchan::validation_error("--seed is required when --sigma is positive");
    if (!o.grid.empty() && !o.distances.empty())
        throw swchan::validation_error("give either --distances or --grid, not both");

    swchan::SynthConfig c{
        .model = {swchan::Frequency(o.frequency_ghz), swchan::SfflParams(o.alpha_db, o.beta, o.sigma_db, o.d0_m),
                  swchan::StandingWaveParams(parse_gamma(o.gamma), o.k_rad_per_m)},
        .sigma_db = o.sigma_db,
        .seed = o.seed.value_or(0),
    };
    if (!o.distances.empty())
        c.distances = parse_distances(o.distances);
    else if (!o.grid.empty())
        c.distances = parse_grid(o.grid);

    const auto m = swchan::generate_measurements(c);
    Output out(o.output);
    swchan::io::write_campaign(out.stream(), m);
}

// ----- export-standing-wave ----------------------------------------------

struct ExportOptions
{
    std::vector<std::string> gammas{"0.6:0", "0.333:180", "0.8:60"};
    double k_rad_per_m = 2.0 * std::numbers::pi;
    std::string grid = "0:1:0.001";
    double d0_m = 0.0;
    std::string output;
};

void run_export(const ExportOptions &o)
{
    std::vector<std::pair<std::string, swchan::ComplexReflection>> gammas;
    for (const auto &g : o.gammas)
        gammas.emplace_back(g, parse_gamma(g));
    const auto distances = swchan::expand_grid(parse_grid(o.grid));

    Output out(o.output);
    auto &os = out.stream();
    os << "gamma_mag,gamma_phase_deg,distance_m,v_net_magnitude,magnitude_sq,gain_db\n";
    for (const auto &[label, gamma] : gammas)
    {
        const swchan::StandingWaveParams s(gamma, o.k_rad_per_m);
        const auto parts = split(label, ':');
        const std::string mag = format_number(gamma.magnitude());
        const std::string deg = format_number(flag_number(parts[1], "--gamma phase"));
        for (double d : distances)
        {
            const double msq = swchan::standing_wave_magnitude_sq(s, d, o.d0_m);
            os << mag << ',' << deg << ',' << format_number(d) << ',' << format_number(std::sqrt(msq)) << ','
               << format_number(msq) << ',' << format_number(swchan::power_to_db(msq)) << '\n';
        }
    }
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Terahertz line-of-sight channel model with standing-wave correction"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("swchan ") + SWCHAN_VERSION);

    FitOptions fit;
    auto *fit_cmd = app.add_subcommand("fit", "Fit the channel model to a campaign CSV and write a JSON report");
    fit_cmd->add_option("input", fit.input, "Campaign CSV ('-' for stdin)");
    fit_cmd->add_option("-o,--output", fit.output, "Report path (default stdout)");
    fit_cmd->add_option("--d0", fit.d0_m, "Reference distance in meters")->capture_default_str();
    fit_cmd->add_option("--tx-power-dbm", fit.tx_power_dbm, "Transmit power for received-power campaigns");
    fit_cmd->add_option("--tx-antenna", fit.tx_antenna, "Antenna preset (WR-2.2, WR-4.3, WR-6.5) or spec file");
    fit_cmd->add_option("--rx-antenna", fit.rx_antenna, "Antenna preset or spec file");
    fit_cmd->add_option("--curves", fit.curves, "Write PREFIX_model.csv and PREFIX_residuals.csv");
    fit_cmd->add_option("--curve-points", fit.curve_points, "Dense model grid size")->capture_default_str();
    fit_cmd->add_option("--config", fit.config, "JSON file overriding fit tunables");

    PredictOptions predict;
    auto *predict_cmd = app.add_subcommand("predict", "Path loss and received power from a fitted report");
    predict_cmd->add_option("--model", predict.model, "Report written by 'fit'")->required();
    predict_cmd->add_option("--distances", predict.distances, "Comma-separated distances in meters");
    predict_cmd->add_option("--grid", predict.grid, "start:stop:step in meters (default measurement grid)");
    predict_cmd->add_option("--tx-antenna", predict.tx_antenna, "Antenna preset or spec file")->required();
    predict_cmd->add_option("--rx-antenna", predict.rx_antenna, "Antenna preset or spec file")->required();
    predict_cmd->add_option("--tx-power-dbm", predict.tx_power_dbm, "Transmit power")->capture_default_str();
    predict_cmd->add_option("-o,--output", predict.output, "CSV path (default stdout)");

    SimulateOptions sim;
    auto *sim_cmd = app.add_subcommand("simulate", "Generate a seeded synthetic campaign CSV");
    sim_cmd->add_option("--frequency", sim.frequency_ghz, "Center frequency in GHz")->capture_default_str();
    sim_cmd->add_option("--alpha", sim.alpha_db, "Intercept in dB")->capture_default_str();
    sim_cmd->add_option("--beta", sim.beta, "Path-loss exponent")->capture_default_str();
    sim_cmd->add_option("--gamma", sim.gamma, "Reflection coefficient mag:phase_deg")->capture_default_str();
    sim_cmd->add_option("--k", sim.k_rad_per_m, "Effective wavenumber in rad/m")->capture_default_str();
    sim_cmd->add_option("--sigma", sim.sigma_db, "Shadow-fading std. dev. in dB")->capture_default_str();
    sim_cmd->add_option("--seed", sim.seed, "RNG seed (required when sigma > 0)");
    sim_cmd->add_option("--grid", sim.grid, "start:stop:step in meters (default 0.1016:0.8128:0.0508)");
    sim_cmd->add_option("--distances", sim.distances, "Comma-separated distances in meters");
    sim_cmd->add_option("--d0", sim.d0_m, "Reference distance in meters")->capture_default_str();
    sim_cmd->add_option("-o,--output", sim.output, "CSV path (default stdout)");

    ExportOptions exp;
    auto *exp_cmd = app.add_subcommand("export-standing-wave", "Standing-wave curves for one or more reflection coefficients");
    exp_cmd->add_option("--gamma", exp.gammas, "mag:phase_deg, repeatable")->capture_default_str();
    exp_cmd->add_option("--k", exp.k_rad_per_m, "Wavenumber in rad/m (2*pi: distances in wavelengths)")
        ->capture_default_str();
    exp_cmd->add_option("--grid", exp.grid, "start:stop:step")->capture_default_str();
    exp_cmd->add_option("--d0", exp.d0_m, "Reference distance")->capture_default_str();
    exp_cmd->add_option("-o,--output", exp.output, "CSV path (default stdout)");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : exit_validation;
    }

    try
    {
        if (*fit_cmd)
            run_fit(fit);
        else if (*predict_cmd)
            run_predict(predict);
        else if (*sim_cmd)
            run_simulate(sim);
        else if (*exp_cmd)
            run_export(exp);
    }
    catch (const swchan::validation_error &e)
    {
        std::cerr << "swchan: " << e.what() << '\n';
        return exit_validation;
    }
    catch (const std::exception &e)
    {
        std::cerr << "swchan: " << e.what() << '\n';
        return exit_data;
    }
    return 0;
}
