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

// Drives the built swchan executable through the shell.

#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "swchan/io.hpp"

#include <sys/wait.h>

#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace swchan;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
namespace fs = std::filesystem;

namespace
{
constexpr double pi = std::numbers::pi;

const fs::path &workdir()
{
    static const fs::path dir = [] {
        auto p = fs::temp_directory_path() / "swchan_cli_test";
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }();
    return dir;
}

std::string path(const std::string &name) { return (workdir() / name).string(); }

// Runs `swchan <args>`; stderr lands in err.txt.
int run(const std::string &args)
{
    const std::string cmd = std::string("\"") + SWCHAN_EXE + "\" " + args + " 2> \"" + path("err.txt") + "\"";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string &file)
{
    std::ifstream in(file);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write(const std::string &file, const std::string &text) { std::ofstream(file) << text; }

// Numeric CSV body (header dropped).
std::vector<std::vector<double>> table(const std::string &file)
{
    std::istringstream in(slurp(file));
    std::string line;
    std::getline(in, line);
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line))
    {
        std::vector<double> row;
        std::istringstream fields(line);
        std::string f;
        while (std::getline(fields, f, ','))
            row.push_back(std::stod(f));
        rows.push_back(row);
    }
    return rows;
}

io::ReportFile report(const std::string &file)
{
    std::ifstream in(file);
    return io::read_report(in);
}
} // namespace

TEST_CASE("simulate writes the measurement grid", "[cli]")
{
    REQUIRE(run("simulate --sigma 0.1 --seed 3 -o " + path("sim.csv")) == 0);
    const auto rows = table(path("sim.csv"));
    REQUIRE(rows.size() == 15);
    CHECK(rows.front()[0] == 140.0);
    CHECK(rows.front()[1] == 0.1016);
    CHECK_THAT(slurp(path("sim.csv")), Catch::Matchers::StartsWith("frequency_ghz,distance_m,path_loss_db\n"));

    REQUIRE(run("simulate --sigma 0.1 --seed 3 -o " + path("sim2.csv")) == 0);
    CHECK(slurp(path("sim.csv")) == slurp(path("sim2.csv")));

    CHECK(run("simulate --sigma 0.1 -o " + path("nos.csv")) == 1);
    CHECK_THAT(slurp(path("err.txt")), ContainsSubstring("seed"));
    CHECK(run("simulate --gamma 1.2:0") == 1);
    CHECK(run("bogus") == 1);
    CHECK(run("") == 1);
}

TEST_CASE("fit reports are reproducible", "[cli]")
{
    REQUIRE(run("simulate --sigma 0.1 --seed 11 --gamma 0.08:45 -o " + path("a.csv")) == 0);
    REQUIRE(run("fit " + path("a.csv") + " -o " + path("r1.json")) == 0);
    REQUIRE(run("fit " + path("a.csv") + " -o " + path("r2.json")) == 0);
    CHECK(slurp(path("r1.json")) == slurp(path("r2.json")));
    const auto r = report(path("r1.json"));
    CHECK(r.frequency_ghz == 140.0);
    CHECK(r.rms_combined_db <= r.rms_sffl_db);

    // stdin input
    REQUIRE(run("fit - < " + path("a.csv") + " > " + path("r3.json")) == 0);
    CHECK(slurp(path("r3.json")) == slurp(path("r1.json")));
}

TEST_CASE("fit exits 2 on bad data", "[cli]")
{
    write(path("two.csv"), "frequency_ghz,distance_m,path_loss_db\n140,0.2,70\n140,0.3,71\n");
    CHECK(run("fit " + path("two.csv")) == 2);
    CHECK_THAT(slurp(path("err.txt")), ContainsSubstring("insufficient samples"));

    CHECK(run("fit " + path("does_not_exist.csv")) == 2);

    write(path("bad.csv"), "frequency_ghz,distance_m,path_loss_db\n140,0.2,70\n140,0.3\n140,0.4,72\n");
    CHECK(run("fit " + path("bad.csv")) == 2);
    CHECK_THAT(slurp(path("err.txt")), ContainsSubstring(":3:"));

    write(path("mixed.csv"), "frequency_ghz,distance_m,path_loss_db\n140,0.2,70\n220,0.3,71\n140,0.4,72\n");
    CHECK(run("fit " + path("mixed.csv")) == 2);
    CHECK_THAT(slurp(path("err.txt")), ContainsSubstring("one frequency per file"));
}

TEST_CASE("received-power campaigns fit like path loss", "[cli]")
{
    REQUIRE(run("simulate --sigma 0.05 --seed 5 --gamma 0.06:30 -o " + path("pl.csv")) == 0);
    const auto rows = table(path("pl.csv"));
    std::ostringstream rx;
    rx << "frequency_ghz,distance_m,received_power_dbm\n";
    for (const auto &r : rows) // 5 dBm + 21 + 21 dBi
        rx << io::format_number(r[0]) << ',' << io::format_number(r[1]) << ',' << io::format_number(47.0 - r[2])
           << '\n';
    write(path("rx.csv"), rx.str());

    REQUIRE(run("fit " + path("pl.csv") + " -o " + path("pl.json")) == 0);
    REQUIRE(run("fit " + path("rx.csv") + " --tx-power-dbm 5 --tx-antenna WR-6.5 --rx-antenna WR-6.5 -o " +
                path("rx.json")) == 0);
    const auto a = report(path("pl.json"));
    const auto b = report(path("rx.json"));
    CHECK_THAT(b.alpha_db, WithinAbs(a.alpha_db, 1e-6));
    CHECK_THAT(b.beta, WithinAbs(a.beta, 1e-6));
    CHECK_THAT(b.gamma_mag, WithinAbs(a.gamma_mag, 1e-6));
    CHECK_THAT(b.k_rad_per_m, WithinAbs(a.k_rad_per_m, 1e-6));

    CHECK(run("fit " + path("rx.csv")) == 1);
    CHECK(run("fit " + path("rx.csv") + " --tx-power-dbm 5 --tx-antenna WR-6.5 --rx-antenna WR-2.2") == 1);
}

TEST_CASE("fit --curves writes dense model and residual tables", "[cli]")
{
    REQUIRE(run("simulate --sigma 0.1 --seed 2 -o " + path("c.csv")) == 0);
    REQUIRE(run("fit " + path("c.csv") + " -o " + path("c.json") + " --curves " + path("curves")) == 0);
    const auto model = table(path("curves_model.csv"));
    const auto resid = table(path("curves_residuals.csv"));
    CHECK(model.size() == 1000);
    REQUIRE(resid.size() == 15);
    CHECK_THAT(slurp(path("curves_model.csv")),
               Catch::Matchers::StartsWith(
                   "distance_m,path_loss_sffl_db,path_loss_combined_db,standing_wave_gain_db\n"));
    const auto r = report(path("c.json"));
    // plain column is the OLS line; combined = refined line - gain
    for (const auto &m : model)
        CHECK_THAT(m[2] + m[3], WithinAbs(r.alpha_db + 10 * r.beta * std::log10(m[0] / r.d0_m), 1e-5));
    double sq_plain = 0, sq = 0;
    for (const auto &p : resid)
    {
        sq_plain += p[2] * p[2];
        sq += p[3] * p[3];
    }
    CHECK_THAT(std::sqrt(sq_plain / resid.size()), WithinAbs(r.rms_sffl_db, 1e-6));
    CHECK_THAT(std::sqrt(sq / resid.size()), WithinAbs(r.rms_combined_db, 1e-6));
}

TEST_CASE("predict", "[cli]")
{
    io::ReportFile flat;
    flat.frequency_ghz = 140;
    flat.alpha_db = 63.4;
    flat.beta = 1.9;
    flat.d0_m = 0.1;
    flat.k_rad_per_m = 31.4;
    write(path("flat.json"), io::report_to_string(flat));

    SECTION("no reflection reduces to the plain law")
    {
        REQUIRE(run("predict --model " + path("flat.json") +
                    " --distances 0.1,0.25,0.4064 --tx-antenna WR-6.5 --rx-antenna WR-6.5 -o " + path("p.csv")) ==
                0);
        const auto rows = table(path("p.csv"));
        REQUIRE(rows.size() == 3);
        for (const auto &r : rows)
        {
            const double pl = 63.4 + 19.0 * std::log10(r[0] / 0.1);
            CHECK_THAT(r[1], WithinAbs(pl, 1e-6));
            CHECK_THAT(r[2], WithinAbs(5.0 + 21.0 + 21.0 - pl, 1e-6));
        }
    }
    SECTION("antenna outside its band")
    {
        CHECK(run("predict --model " + path("flat.json") + " --tx-antenna WR-6.5 --rx-antenna WR-2.2") == 1);
        CHECK_THAT(slurp(path("err.txt")), ContainsSubstring("WR-2.2"));
    }
    SECTION("fitted model matches the library")
    {
        REQUIRE(run("simulate --sigma 0.1 --seed 9 --gamma 0.08:45 -o " + path("s.csv")) == 0);
        REQUIRE(run("fit " + path("s.csv") + " -o " + path("s.json")) == 0);
        REQUIRE(run("predict --model " + path("s.json") +
                    " --grid 0.1:0.9:0.01 --tx-power-dbm 3 --tx-antenna WR-6.5 --rx-antenna WR-6.5 -o " +
                    path("s_pred.csv")) == 0);
        const auto model = io::to_channel_model(report(path("s.json")));
        const auto rows = table(path("s_pred.csv"));
        REQUIRE(rows.size() == 81);
        for (const auto &r : rows)
        {
            const double pl = combined_path_loss(model, r[0]);
            CHECK_THAT(r[1], WithinAbs(pl, 1e-6));
            CHECK_THAT(r[2], WithinAbs(3.0 + 42.0 - pl, 1e-6));
        }
    }
}

TEST_CASE("export-standing-wave", "[cli]")
{
    auto curve = [](const std::vector<std::vector<double>> &rows, double mag) {
        std::vector<std::vector<double>> out;
        for (const auto &r : rows)
            if (std::abs(r[0] - mag) < 1e-12)
                out.push_back(r);
        return out;
    };

    REQUIRE(run("export-standing-wave -o " + path("sw.csv")) == 0);
    CHECK_THAT(slurp(path("sw.csv")),
               Catch::Matchers::StartsWith(
                   "gamma_mag,gamma_phase_deg,distance_m,v_net_magnitude,magnitude_sq,gain_db\n"));
    const auto rows = table(path("sw.csv"));
    CHECK(rows.size() == 3 * 1001);

    const auto g06 = curve(rows, 0.6);
    double hi = 0, lo = 1e9;
    for (const auto &r : g06)
    {
        hi = std::max(hi, r[3]);
        lo = std::min(lo, r[3]);
    }
    CHECK_THAT(hi / lo, WithinAbs(4.0, 1e-6));

    const auto g08 = curve(rows, 0.8);
    int checked = 0;
    for (const auto &r : g08)
        for (int half = 0; half < 2; ++half)
            for (int tenth = 0; tenth <= 4; ++tenth)
                if (std::abs(r[2] - (0.5 * half + 0.1 * tenth)) < 1e-9)
                {
                    const double expected =
                        test::superposition_magnitude_sq(std::polar(0.8, pi / 3), 2 * 2 * pi * r[2]);
                    CHECK_THAT(r[4], WithinRel(expected, 1e-8));
                    ++checked;
                }
    CHECK(checked == 10);

    REQUIRE(run("export-standing-wave --gamma 0:0 --grid 0:2:0.01 -o " + path("flat.csv")) == 0);
    for (const auto &r : table(path("flat.csv")))
    {
        CHECK(r[4] == 1.0);
        CHECK(r[5] == 0.0);
    }
}
