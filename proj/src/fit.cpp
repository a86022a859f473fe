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

#include "swchan/fit.hpp"
#include "swchan/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <tuple>

namespace swchan
{

namespace
{

// Least-squares line y = alpha + beta*x on a fixed abscissa. fit_sffl_ols and
// the refinement objective share this so that |G| = 0 reproduces the plain
// fit bit-for-bit.
class LineSolver
{
  public:
    explicit LineSolver(std::vector<double> x) : x_(std::move(x))
    {
        const double n = static_cast<double>(x_.size());
        x_mean_ = std::accumulate(x_.begin(), x_.end(), 0.0) / n;
        for (double xi : x_)
            sxx_ += (xi - x_mean_) * (xi - x_mean_);
    }

    bool degenerate() const noexcept { return x_.size() < 3 || !(sxx_ > 0.0); }

    std::pair<double, double> fit(std::span<const double> y) const
    {
        const double n = static_cast<double>(y.size());
        const double y_mean = std::accumulate(y.begin(), y.end(), 0.0) / n;
        double sxy = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i)
            sxy += (x_[i] - x_mean_) * (y[i] - y_mean);
        const double beta = sxy / sxx_;
        return {y_mean - beta * x_mean_, beta};
    }

    double rms(std::span<const double> y, double alpha, double beta) const
    {
        double ss = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i)
        {
            const double e = y[i] - (alpha + beta * x_[i]);
            ss += e * e;
        }
        return std::sqrt(ss / static_cast<double>(y.size()));
    }

    const std::vector<double> &x() const noexcept { return x_; }

  private:
    std::vector<double> x_;
    double x_mean_ = 0.0;
    double sxx_ = 0.0;
};

std::vector<double> log_distance_axis(const MeasurementSet &m)
{
    std::vector<double> x;
    x.reserve(m.size());
    for (const auto &s : m.samples())
        x.push_back(10.0 * std::log10(s.distance_m / m.d0_m()));
    return x;
}

std::vector<double> path_loss_values(const MeasurementSet &m)
{
    std::vector<double> y;
    y.reserve(m.size());
    for (const auto &s : m.samples())
        y.push_back(s.path_loss_db);
    return y;
}

double wrap_phase(double phase_rad)
{
    return ComplexReflection(0.0, phase_rad).phase_rad();
}

double gain_db(double mag, double cos_theta)
{
    return 10.0 * std::log10(1.0 + mag * mag + 2.0 * mag * cos_theta);
}

struct Candidate
{
    double rms = std::numeric_limits<double>::infinity();
    double mag = 0.0;
    double phase = 0.0; // referenced to d0
    double k = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
};

// RMS values are compared in buckets of `tie` dB, so values closer than
// that count as equal and the tie goes to smaller |G|, then smaller k, then
// smaller phase. Bucketing keeps this a strict weak order, which the
// threaded grid reduction relies on.
class CandidateOrder
{
  public:
    explicit CandidateOrder(double tie) : tie_(tie) {}

    bool operator()(const Candidate &a, const Candidate &b) const
    {
        const double ka = bucket(a.rms);
        const double kb = bucket(b.rms);
        return std::tie(ka, a.mag, a.k, a.phase) < std::tie(kb, b.mag, b.k, b.phase);
    }

  private:
    double bucket(double rms) const { return tie_ > 0.0 ? std::floor(rms / tie_) : rms; }

    double tie_;
};

// RMS of measured minus combined model for one (|G|, phase, k). With
// profiling, alpha and beta are the least-squares solution for that
// standing-wave term; otherwise they are held at the given values.
class Objective
{
  public:
    Objective(const MeasurementSet &m, const SfflParams &fixed, bool profile)
        : solver_(log_distance_axis(m)), y_(path_loss_values(m)), fixed_(fixed), profile_(profile)
    {
        offsets_.reserve(m.size());
        for (const auto &s : m.samples())
            offsets_.push_back(s.distance_m - m.d0_m());
    }

    std::size_t size() const noexcept { return y_.size(); }
    std::span<const double> offsets() const noexcept { return offsets_; }

    // cos(2k(d - d0) + phase) for every sample
    void cosines(double phase, double k, std::vector<double> &out) const
    {
        out.resize(offsets_.size());
        for (std::size_t i = 0; i < offsets_.size(); ++i)
            out[i] = std::cos(2.0 * k * offsets_[i] + phase);
    }

    Candidate at_cosines(double mag, double phase, double k, std::span<const double> cos_theta,
                         std::vector<double> &scratch) const
    {
        scratch.resize(y_.size());
        for (std::size_t i = 0; i < y_.size(); ++i)
            scratch[i] = y_[i] + gain_db(mag, cos_theta[i]);
        Candidate c;
        c.mag = mag;
        c.phase = phase;
        c.k = k;
        if (profile_)
            std::tie(c.alpha, c.beta) = solver_.fit(scratch);
        else
        {
            c.alpha = fixed_.alpha_db();
            c.beta = fixed_.beta();
        }
        c.rms = solver_.rms(scratch, c.alpha, c.beta);
        return c;
    }

    Candidate at(double mag, double phase, double k) const
    {
        std::vector<double> cos_theta;
        std::vector<double> scratch;
        cosines(phase, k, cos_theta);
        return at_cosines(mag, phase, k, cos_theta, scratch);
    }

    double rms_fixed(const SfflParams &p) const { return solver_.rms(y_, p.alpha_db(), p.beta()); }

  private:
    LineSolver solver_;
    std::vector<double> y_;
    std::vector<double> offsets_;
    SfflParams fixed_;
    bool profile_;
};

double phase_grid_value(std::size_t i, std::size_t steps)
{
    return two_pi * static_cast<double>(i) / static_cast<double>(steps);
}

double mag_grid_value(std::size_t i, const FitConfig &c)
{
    if (c.grid_gamma_steps < 2)
        return 0.0;
    return c.gamma_mag_max * static_cast<double>(i) / static_cast<double>(c.grid_gamma_steps - 1);
}

double k_grid_value(std::size_t j, double k_max, std::size_t steps)
{
    return k_max * static_cast<double>(j) / static_cast<double>(steps);
}

// Best cell over k indices [j_begin, j_end] (1-based, inclusive) and every
// nonzero |G| and phase on the grid.
Candidate grid_chunk(const Objective &obj, const FitConfig &c, double k_max, std::size_t j_begin, std::size_t j_end)
{
    const CandidateOrder precedes(c.rms_tie_db);
    Candidate best;
    std::vector<double> cos_theta;
    std::vector<double> scratch;
    for (std::size_t j = j_begin; j <= j_end; ++j)
    {
        const double k = k_grid_value(j, k_max, c.grid_k_steps);
        for (std::size_t p = 0; p < c.grid_phase_steps; ++p)
        {
            const double phase = phase_grid_value(p, c.grid_phase_steps);
            obj.cosines(phase, k, cos_theta);
            for (std::size_t l = 1; l < c.grid_gamma_steps; ++l)
            {
                const Candidate cand = obj.at_cosines(mag_grid_value(l, c), phase, k, cos_theta, scratch);
                if (precedes(cand, best))
                    best = cand;
            }
        }
    }
    return best;
}

Candidate coarse_grid(const Objective &obj, const FitConfig &c, double k_max)
{
    const CandidateOrder precedes(c.rms_tie_db);
    // |G| = 0 makes phase and k irrelevant; evaluate it once at the smallest k.
    const double k_first = k_grid_value(1, k_max, c.grid_k_steps);
    Candidate best = obj.at(0.0, 0.0, k_first);
    if (c.grid_k_steps == 0 || c.grid_phase_steps == 0)
        return best;

    unsigned workers = c.threads != 0 ? c.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, c.grid_k_steps));

    std::vector<Candidate> partial(workers);
    const std::size_t per = (c.grid_k_steps + workers - 1) / workers;
    auto run = [&](unsigned w) {
        const std::size_t lo = 1 + w * per;
        const std::size_t hi = std::min(c.grid_k_steps, lo + per - 1);
        if (lo <= hi)
            partial[w] = grid_chunk(obj, c, k_max, lo, hi);
    };
    if (workers == 1)
        run(0);
    else
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back(run, w);
    }
    // reduction order is fixed, so the result does not depend on scheduling
    for (const auto &cand : partial)
        if (precedes(cand, best))
            best = cand;
    return best;
}

struct DescentResult
{
    Candidate best;
    std::size_t iterations = 0;
};

// Hooke-Jeeves pattern search over (|G|, phase at the span center, k).
// Referencing the phase to the middle of the measured span decouples it from
// k. An exploratory sweep tries +/- one step per coordinate; after a
// successful sweep the search jumps along the direction just travelled and
// explores again from there. Steps halve whenever a sweep improves the RMS
// by less than min_improvement_db. Ends once every step is below its floor or
// max_iterations sweeps have run. A move is accepted only when it lowers the
// RMS by more than rms_tie_db.
DescentResult coordinate_descent(const Objective &obj, const FitConfig &c, Candidate start, double k_max)
{
    // moves must beat the tie width; tie-breaking belongs to the final choice
    const auto improves = [&](const Candidate &a, const Candidate &b) { return a.rms < b.rms - c.rms_tie_db; };
    const auto offsets = obj.offsets();
    const double center = 0.5 * (offsets.front() + offsets.back());
    const double k_min = k_max * 1e-9;

    using Point = std::array<double, 3>; // |G|, psi, k
    auto clamp_point = [&](Point p) {
        p[0] = std::clamp(p[0], 0.0, c.gamma_mag_max);
        p[2] = std::clamp(p[2], k_min, k_max);
        return p;
    };
    auto evaluate = [&](const Point &p) { return obj.at(p[0], wrap_phase(p[1] - 2.0 * p[2] * center), p[2]); };

    std::array<double, 3> step{
        c.gamma_mag_max / static_cast<double>(std::max<std::size_t>(c.grid_gamma_steps, 2) - 1),
        two_pi / static_cast<double>(std::max<std::size_t>(c.grid_phase_steps, 1)),
        k_max / static_cast<double>(std::max<std::size_t>(c.grid_k_steps, 1))};
    const std::array<double, 3> floor{1e-10, 1e-10, k_max * 1e-12};

    DescentResult out;
    auto explore = [&](Point x, Candidate fx) {
        ++out.iterations;
        for (std::size_t axis = 0; axis < 3; ++axis)
            for (double dir : {1.0, -1.0})
            {
                Point trial = x;
                trial[axis] += dir * step[axis];
                trial = clamp_point(trial);
                if (trial == x)
                    continue;
                const Candidate ft = evaluate(trial);
                if (improves(ft, fx))
                {
                    x = trial;
                    fx = ft;
                    break;
                }
            }
        return std::pair{x, fx};
    };

    Point base{start.mag, start.phase + 2.0 * start.k * center, start.k};
    Candidate f_base = start;
    while (out.iterations < c.max_iterations)
    {
        auto [x, fx] = explore(base, f_base);
        const double gained = f_base.rms - fx.rms;
        if (improves(fx, f_base))
        {
            // pattern moves while they keep paying off
            while (out.iterations < c.max_iterations)
            {
                Point jump;
                for (std::size_t i = 0; i < 3; ++i)
                    jump[i] = 2.0 * x[i] - base[i];
                base = x;
                f_base = fx;
                const Candidate f_jump = evaluate(clamp_point(jump));
                auto [x2, fx2] = explore(clamp_point(jump), f_jump);
                if (!improves(fx2, f_base))
                    break;
                x = x2;
                fx = fx2;
            }
            base = x;
            f_base = fx;
        }
        if (gained < c.min_improvement_db)
            for (double &s : step)
                s *= 0.5;
        if (step[0] < floor[0] && step[1] < floor[1] && step[2] < floor[2])
            break;
    }
    out.best = f_base;
    return out;
}

// On a uniform grid with spacing h, k and pi/h - k produce identical samples
// (with the phase mirrored). Returns the mirrored candidate when it exists.
std::optional<Candidate> alias_mirror(const Objective &obj, const MeasurementSet &m, const Candidate &c, double k_max)
{
    const auto &s = m.samples();
    const double h = s[1].distance_m - s[0].distance_m;
    for (std::size_t i = 1; i < s.size(); ++i)
        if (std::abs((s[i].distance_m - s[i - 1].distance_m) - h) > 1e-9 * h)
            return std::nullopt;
    const double k_mirror = std::numbers::pi / h - c.k;
    if (!(k_mirror > 0.0) || k_mirror > k_max)
        return std::nullopt;
    const double u0 = obj.offsets().front();
    const double phase = wrap_phase(-c.phase - two_pi * u0 / h);
    return obj.at(c.mag, phase, k_mirror);
}

double population_sigma(const MeasurementSet &m, const ChannelModel &model)
{
    std::vector<double> r;
    r.reserve(m.size());
    for (const auto &s : m.samples())
        r.push_back(s.path_loss_db - combined_path_loss(model, s.distance_m));
    const double mean = std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(r.size());
    double ss = 0.0;
    for (double v : r)
        ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(r.size()));
}

} // namespace

MeasurementSet::MeasurementSet(Frequency frequency, std::vector<Sample> samples, double d0_m)
    : frequency_(frequency), samples_(std::move(samples)), d0_m_(d0_m)
{
    if (!std::isfinite(d0_m) || d0_m <= 0.0)
        throw data_error("reference distance must be positive");
    if (samples_.size() < 3)
        throw degenerate_input("insufficient samples: " + std::to_string(samples_.size()) +
                               " given, at least 3 required");
    for (std::size_t i = 0; i < samples_.size(); ++i)
    {
        const auto &s = samples_[i];
        if (!std::isfinite(s.distance_m) || !std::isfinite(s.path_loss_db))
            throw data_error("sample " + std::to_string(i) + " is not finite");
        if (s.distance_m < d0_m)
            throw data_error("sample " + std::to_string(i) + " lies below the reference distance");
        if (i > 0 && !(s.distance_m > samples_[i - 1].distance_m))
            throw data_error("distances must be strictly increasing (sample " + std::to_string(i) + ")");
    }
}

double MeasurementSet::min_step_m() const noexcept
{
    double step = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < samples_.size(); ++i)
        step = std::min(step, samples_[i].distance_m - samples_[i - 1].distance_m);
    return step;
}

SfflParams fit_sffl_ols(const MeasurementSet &m)
{
    const LineSolver solver(log_distance_axis(m));
    if (solver.degenerate())
        throw degenerate_input("least-squares fit needs at least 3 samples at distinct distances");
    const auto y = path_loss_values(m);
    const auto [alpha, beta] = solver.fit(y);

    std::vector<double> r(y.size());
    for (std::size_t i = 0; i < y.size(); ++i)
        r[i] = y[i] - (alpha + beta * solver.x()[i]);
    const double mean = std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(r.size());
    double ss = 0.0;
    for (double v : r)
        ss += (v - mean) * (v - mean);
    return {alpha, beta, std::sqrt(ss / static_cast<double>(r.size())), m.d0_m()};
}

ResidualSeries residuals(const MeasurementSet &m, const SfflParams &p)
{
    ResidualSeries out;
    out.points.reserve(m.size());
    for (const auto &s : m.samples())
        out.points.push_back({s.distance_m, path_loss_sffl(p, s.distance_m) - s.path_loss_db});
    return out;
}

Extrema detect_extrema(const ResidualSeries &r)
{
    const auto &pts = r.points;
    const std::size_t n = pts.size();
    if (n < 3)
        throw degenerate_input("extrema detection needs at least 3 points, got " + std::to_string(n));

    Extrema out;
    std::size_t start = 0;
    while (start < n)
    {
        std::size_t end = start;
        while (end + 1 < n && pts[end + 1].residual_db == pts[start].residual_db)
            ++end;
        if (start > 0 && end + 1 < n)
        {
            const double v = pts[start].residual_db;
            const double left = pts[start - 1].residual_db;
            const double right = pts[end + 1].residual_db;
            if (v > left && v > right)
                out.maxima.push_back({start, pts[start].distance_m, v});
            else if (v < left && v < right)
                out.minima.push_back({start, pts[start].distance_m, v});
        }
        start = end + 1;
    }
    return out;
}

double estimate_k_from_period(std::span<const Extremum> extrema)
{
    if (extrema.size() < 2)
        throw insufficient_extrema("period estimate needs at least two extrema, got " +
                                   std::to_string(extrema.size()));
    // mean of consecutive spacings telescopes to (last - first)/(n - 1)
    const double period = (extrema.back().distance_m - extrema.front().distance_m) /
                          static_cast<double>(extrema.size() - 1);
    if (!(period > 0.0))
        throw insufficient_extrema("extrema must be at increasing distances");
    return std::numbers::pi / period;
}

InitialGamma initial_gamma_estimate(const ResidualSeries &r, double k_rad_per_m, double d0_m, const FitConfig &config)
{
    const InitialGamma fallback{ComplexReflection(config.fallback_gamma_mag, config.fallback_gamma_phase_rad), true};
    if (r.points.size() < 3)
        return fallback;
    const Extrema ex = detect_extrema(r);
    if (ex.maxima.empty() || ex.minima.empty())
        return fallback;

    auto by_value = [](const Extremum &a, const Extremum &b) { return a.value < b.value; };
    const double max_db = std::max_element(ex.maxima.begin(), ex.maxima.end(), by_value)->value;
    const double min_db = std::min_element(ex.minima.begin(), ex.minima.end(), by_value)->value;

    double mag = 0.0;
    try
    {
        mag = gamma_mag_from_extrema(amplitude_from_db(max_db), amplitude_from_db(min_db));
    }
    catch (const invalid_extrema &)
    {
        return fallback;
    }
    mag = std::min(mag, config.gamma_mag_max);

    const std::size_t steps = std::max<std::size_t>(config.initial_phase_steps, 1);
    double best_phase = 0.0;
    double best_ss = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < steps; ++i)
    {
        const double phase = phase_grid_value(i, steps);
        double ss = 0.0;
        for (const auto &pt : r.points)
        {
            const double e = pt.residual_db - gain_db(mag, std::cos(2.0 * k_rad_per_m * (pt.distance_m - d0_m) + phase));
            ss += e * e;
        }
        if (ss < best_ss)
        {
            best_ss = ss;
            best_phase = phase;
        }
    }
    return {ComplexReflection(mag, best_phase), false};
}

double initial_k_by_grid(const ResidualSeries &r, double gamma_mag, double d0_m, double k_max, const FitConfig &config)
{
    const std::size_t k_steps = std::max<std::size_t>(config.grid_k_steps, 1);
    const std::size_t p_steps = std::max<std::size_t>(config.grid_phase_steps, 1);
    double best_k = k_grid_value(1, k_max, k_steps);
    double best_ss = std::numeric_limits<double>::infinity();
    for (std::size_t j = 1; j <= k_steps; ++j)
    {
        const double k = k_grid_value(j, k_max, k_steps);
        for (std::size_t p = 0; p < p_steps; ++p)
        {
            const double phase = phase_grid_value(p, p_steps);
            double ss = 0.0;
            for (const auto &pt : r.points)
            {
                const double e = pt.residual_db - gain_db(gamma_mag, std::cos(2.0 * k * (pt.distance_m - d0_m) + phase));
                ss += e * e;
            }
            if (ss < best_ss)
            {
                best_ss = ss;
                best_k = k;
            }
        }
    }
    return best_k;
}

double k_search_limit(const MeasurementSet &m)
{
    return std::numbers::pi / m.min_step_m();
}

double rms_error(const MeasurementSet &m, const ChannelModel &model)
{
    double ss = 0.0;
    for (const auto &s : m.samples())
    {
        const double e = s.path_loss_db - combined_path_loss(model, s.distance_m);
        ss += e * e;
    }
    return std::sqrt(ss / static_cast<double>(m.size()));
}

FitReport refine_fit(const MeasurementSet &m, const SfflParams &p, const StandingWaveParams &init, const FitConfig &config)
{
    const Objective obj(m, p, config.refine_sffl);
    const double k_max = k_search_limit(m);
    const double rms_sffl = obj.rms_fixed(p);

    const double init_k = std::clamp(init.k_rad_per_m(), k_max * 1e-9, k_max);
    const double init_mag = std::min(init.gamma().magnitude(), config.gamma_mag_max);
    const Candidate from_init = obj.at(init_mag, init.gamma().phase_rad(), init_k);

    const Candidate from_grid = coarse_grid(obj, config, k_max);
    const CandidateOrder precedes(config.rms_tie_db);
    const Candidate start = precedes(from_grid, from_init) ? from_grid : from_init;

    DescentResult descent = coordinate_descent(obj, config, start, k_max);
    Candidate best = descent.best;
    if (auto mirror = alias_mirror(obj, m, best, k_max); mirror && precedes(*mirror, best))
        best = *mirror;

    const bool refined = precedes(best, from_init);
    if (!refined)
        best = from_init;

    const SfflParams sffl(best.alpha, best.beta, 0.0, p.d0_m());
    ChannelModel model{m.frequency(), sffl, StandingWaveParams(ComplexReflection(best.mag, best.phase), best.k)};
    model.sffl = sffl.with_sigma(population_sigma(m, model));

    FitReport report{.model = model,
                     .plain = p,
                     .rms_sffl_db = rms_sffl,
                     .rms_combined_db = best.rms,
                     .initial_estimate = init};
    report.refined = refined;
    report.iterations = descent.iterations;
    return report;
}

FitReport fit_channel(const MeasurementSet &m, const FitConfig &config)
{
    const SfflParams ols = fit_sffl_ols(m);
    const ResidualSeries r = residuals(m, ols);
    const Extrema ex = detect_extrema(r);
    const double k_max = k_search_limit(m);

    double k0 = 0.0;
    bool from_period = true;
    if (ex.maxima.size() >= 2)
        k0 = estimate_k_from_period(ex.maxima);
    else if (ex.minima.size() >= 2)
        k0 = estimate_k_from_period(ex.minima);
    else
    {
        from_period = false;
        const InitialGamma guess = initial_gamma_estimate(r, k_max * 0.5, m.d0_m(), config);
        k0 = initial_k_by_grid(r, guess.gamma.magnitude(), m.d0_m(), k_max, config);
    }
    k0 = std::min(k0, k_max);

    const InitialGamma g0 = initial_gamma_estimate(r, k0, m.d0_m(), config);
    FitReport report = refine_fit(m, ols, StandingWaveParams(g0.gamma, k0), config);
    report.extrema_found = ex.count();
    report.initial_fallback = g0.fallback;
    report.k_from_period = from_period;
    return report;
}

} // namespace swchan
