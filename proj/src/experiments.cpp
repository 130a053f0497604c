/*
   Copyright 2026 The Anytime SMC Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include "anytime/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "anytime/distsim.hpp"
#include "anytime/gamma_study.hpp"
#include "anytime/io.hpp"
#include "anytime/models/lgssm.hpp"
#include "anytime/models/lorenz96.hpp"
#include "anytime/smc.hpp"

namespace anytime::experiments {

namespace fs = std::filesystem;

namespace {

void require(bool ok, const std::string& what)
{
    if (!ok)
        throw ConfigError(what);
}

void check_preset(const std::string& preset)
{
    require(preset == "desk" || preset == "paper", "preset must be desk or paper, got " + preset);
}

std::size_t default_chains(const std::string& preset)
{
    return preset == "paper" ? std::size_t{1} << 18 : std::size_t{1} << 14;
}

void prepare(const fs::path& out, const std::string& command, const json& params)
{
    fs::create_directories(out);
    json config{{"command", command}, {"params", params}};
    io::write_text(out / "config.json", config.dump(2) + "\n");
}

void finish(const fs::path& out, const json& summary) { io::write_text(out / "summary.json", summary.dump(2) + "\n"); }

// Converts library argument errors into configuration errors; numerical
// failures pass through untouched.
template <class F>
auto guarded(F&& f)
{
    try {
        return f();
    } catch (const NumericalError&) {
        throw;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

gamma_study::Config study_config(std::uint64_t seed, const std::vector<int>& degrees, std::size_t chains, int horizon,
                                 double shape, double scale, double rho)
{
    gamma_study::Config c;
    c.seed = seed;
    c.degrees = degrees;
    c.replicates = chains;
    c.horizon = horizon;
    c.shape = shape;
    c.scale = scale;
    c.rho = rho;
    require(!degrees.empty(), "need at least one degree");
    for (int p : degrees)
        require(p >= 0 && p <= 8, "degrees must lie in 0..8");
    require(horizon >= 1, "horizon must be at least 1");
    require(shape > 0 && scale > 0, "shape and scale must be positive");
    require(rho >= 0 && rho <= 1, "rho must lie in [0, 1]");
    return c;
}

std::vector<std::pair<std::size_t, ContentionWindow>> parse_contention(const std::vector<std::string>& specs)
{
    std::vector<std::pair<std::size_t, ContentionWindow>> out;
    for (const auto& s : specs) {
        std::vector<std::string> parts;
        std::stringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ':'))
            parts.push_back(item);
        require(parts.size() == 2 || parts.size() == 4, "contention must be p:factor or p:factor:start:end, got " + s);
        try {
            const auto p = std::stoul(parts[0]);
            ContentionWindow w{0.0, std::numeric_limits<double>::infinity(), std::stod(parts[1])};
            if (parts.size() == 4) {
                w.start = std::stod(parts[2]);
                w.end = std::stod(parts[3]);
            }
            out.emplace_back(p, w);
        } catch (const std::logic_error&) {
            throw ConfigError("cannot parse contention spec " + s);
        }
    }
    return out;
}

std::vector<ProcessorConfig> build_processors(const SmcRun& p)
{
    require(p.processors >= 1 && p.processors <= p.particles, "need 1 <= processors <= particles");
    auto procs = equal_shares(p.particles, p.processors);
    for (const auto& [id, w] : parse_contention(p.contend)) {
        require(id >= 1 && id <= procs.size(), "contention names a processor out of range");
        procs[id - 1].contention.push_back(w);
    }
    for (const auto& s : p.speeds) {
        const auto colon = s.find(':');
        require(colon != std::string::npos, "speed must be p:multiplier, got " + s);
        std::size_t id = 0;
        double v = 0;
        try {
            id = std::stoul(s.substr(0, colon));
            v = std::stod(s.substr(colon + 1));
        } catch (const std::logic_error&) {
            throw ConfigError("cannot parse speed spec " + s);
        }
        require(id >= 1 && id <= procs.size(), "speed names a processor out of range");
        require(v > 0, "speed multipliers must be positive");
        procs[id - 1].speed = v;
    }
    for (const auto& pc : procs)
        guarded([&] { return pc.warp(); });  // validates windows
    return procs;
}

json quantiles(std::vector<double> x)
{
    std::sort(x.begin(), x.end());
    auto q = [&](double u) {
        const double pos = u * static_cast<double>(x.size() - 1);
        const auto i = static_cast<std::size_t>(pos);
        const double f = pos - static_cast<double>(i);
        return i + 1 < x.size() ? x[i] * (1 - f) + x[i + 1] * f : x.back();
    };
    double m = 0.0, v = 0.0;
    for (double a : x)
        m += a;
    m /= static_cast<double>(x.size());
    for (double a : x)
        v += (a - m) * (a - m);
    v /= static_cast<double>(x.size() > 1 ? x.size() - 1 : 1);
    return {{"mean", m}, {"sd", std::sqrt(v)}, {"q05", q(0.05)}, {"q50", q(0.5)}, {"q95", q(0.95)}};
}

lgssm::Spec lgssm_spec(const SmcRun& p)
{
    lgssm::Spec s;
    s.q = p.q;
    s.r = p.r;
    guarded([&] {
        s.validate();
        return 0;
    });
    require(p.steps >= 1, "lgssm needs at least one observation");
    Stream rng = Stream::derive(p.data_seed, "lgssm-data");
    s.y = lgssm::simulate(s, p.a_true, p.steps, rng);
    return s;
}

lorenz96::Spec lorenz_spec(const SmcRun& p)
{
    lorenz96::Spec s;
    s.D = p.dimension;
    s.sigma2 = p.sigma2;
    s.obs_var = p.obs_var;
    s.stride = p.stride;
    s.dt = p.dt;
    guarded([&] {
        s.validate();
        return 0;
    });
    require(p.observations >= 1, "lorenz96 needs at least one observation");
    Stream rng = Stream::derive(p.data_seed, "lorenz-data");
    s.data = lorenz96::simulate_dataset(s, p.F_true, p.stride * static_cast<double>(p.observations), rng);
    require(s.data.size() == p.observations, "observation count does not fit the stride");
    return s;
}

// Fills preset-dependent defaults so the echoed config is self-contained.
void resolve(SmcRun& p)
{
    check_preset(p.preset);
    require(p.model == "lgssm" || p.model == "lorenz96", "unknown model " + p.model);
    guarded([&] {
        parse_move_kind(p.mode);
        parse_budget_mode(p.schedule);
        parse_extra_policy(p.policy);
        parse_resample_scheme(p.scheme);
        return 0;
    });
    const bool lorenz = p.model == "lorenz96";
    if (p.proposal_scale == 0.0)
        p.proposal_scale = 1.0;
    require(p.proposal_scale > 0, "proposal scale must be positive");
    if (p.particles == 0)
        p.particles = lorenz ? 64 : 512;
    if (p.moves == 0)
        p.moves = lorenz ? 3 : 10;
    require(p.particles >= 2, "need at least two particles");
    require(p.c >= 0, "schedule offset c must be non-negative");
    require(p.weight_cost >= 0 && p.resample_cost >= 0 && p.init_cost >= 0, "phase costs must be non-negative");
    require(p.processors >= 1 && p.processors <= p.particles, "need 1 <= processors <= particles");
    // anytime moves run concurrently on every processor, so match one share's work
    const std::size_t share = (p.particles + p.processors - 1) / p.processors;
    const double V = static_cast<double>(p.model == "lgssm" ? p.steps : p.observations);
    const double tri = V * (V + 1) / 2;  // move work grows linearly in v for both models
    if (p.model == "lorenz96") {
        auto [s2, o2] = lorenz_noise(p.preset);
        if (p.sigma2 == 0.0)
            p.sigma2 = s2;
        if (p.obs_var == 0.0)
            p.obs_var = o2;
        if (p.nested == 0)
            p.nested = 256;
        require(p.nested >= 2, "lorenz96 needs a nested filter with at least two particles");
        if (p.budget == 0.0) {
            const double steps_per_obs = 2.0 * static_cast<double>(std::lround(p.stride / p.dt));
            p.budget = static_cast<double>(share * p.moves * p.nested) * steps_per_obs * p.step_cost * tri;
        }
    } else {
        require(p.hold_unit > 0 && p.hold_shape > 0, "hold model parameters must be positive");
        if (p.budget == 0.0)
            p.budget = static_cast<double>(share * p.moves) * p.hold_unit * (1 + p.a_true * p.a_true) * tri;
    }
    require(p.budget > 0, "budget must be positive");
}

SmcConfig smc_config(const SmcRun& p)
{
    SmcConfig c;
    c.particles = p.particles;
    c.move.kind = parse_move_kind(p.mode);
    c.move.moves = p.moves;
    c.move.policy = parse_extra_policy(p.policy);
    const std::size_t V = p.model == "lgssm" ? p.steps : p.observations;
    c.move.schedule = apportion_budget(p.budget, V, parse_budget_mode(p.schedule), p.c);
    c.scheme = parse_resample_scheme(p.scheme);
    c.seed = p.seed;
    c.permute = p.permute;
    c.costs = {p.init_cost, p.weight_cost, p.resample_cost};
    c.exec = p.serial ? Execution::serial : Execution::parallel;
    return c;
}

template <class State, class Param>
json write_run(const fs::path& out, const std::string& name, const ParticleSystem<State>& sys,
               const std::vector<StepLog>& steps, const std::vector<ProfileRecord>& profile, double finish_time,
               Param param)
{
    {
        io::CsvWriter w(out / "steps.csv", {"step", "ess", "log_normalizer", "move_time", "transitions"});
        for (const auto& s : steps)
            w.row({std::to_string(s.step), io::format(s.ess), io::format(s.log_normalizer), io::format(s.move_time),
                   std::to_string(s.transitions)});
    }
    std::vector<double> values;
    {
        io::CsvWriter w(out / "posterior.csv", {"particle", name});
        for (std::size_t k = 0; k < sys.particles.size(); ++k) {
            values.push_back(param(sys.particles[k]));
            w.row({std::to_string(k), io::format(values.back())});
        }
    }
    io::write_profile_csv(out / "profile.csv", profile);
    io::write_text(out / "gantt.svg", io::svg_gantt(profile, "processor activity (virtual time)"));
    const auto ws = wait_statistics(profile);
    json per_proc = json::array();
    for (const auto& p : ws.processors)
        per_proc.push_back({{"processor", p.processor + 1},
                            {"busy", p.busy},
                            {"wait", p.wait},
                            {"wait_fraction", p.wait_fraction()},
                            {"move_wait_fraction", p.move_wait_fraction()}});
    json step_json = json::array();
    for (const auto& s : steps)
        step_json.push_back({{"step", s.step},
                             {"ess", s.ess},
                             {"log_normalizer", s.log_normalizer},
                             {"move_time", s.move_time},
                             {"transitions", s.transitions}});
    return {{"log_normalizer", sys.log_normalizer},
            {"posterior", {{name, quantiles(values)}}},
            {"finish_time", finish_time},
            {"wait", {{"busy", ws.busy},
                      {"wait", ws.wait},
                      {"wait_fraction", ws.wait_fraction()},
                      {"move_wait_fraction", ws.move_wait_fraction()},
                      {"processors", per_proc}}},
            {"steps", step_json}};
}

template <class State, class Param>
json execute(const SmcRun& p, const TargetSequence<State>& targets, bool distributed, const fs::path& out,
             const std::string& name, Param param)
{
    const auto cfg = smc_config(p);
    if (distributed) {
        auto procs = build_processors(p);
        auto r = run_distributed(targets, procs, cfg);
        return write_run(out, name, r.system, r.steps, r.profile, r.finish_time, param);
    }
    auto r = anytime::run_smc(targets, cfg);
    return write_run(out, name, r.system, r.steps, r.profile, r.finish_time, param);
}

json run_model(SmcRun p, const fs::path& out, bool distributed)
{
    resolve(p);
    if (distributed)
        build_processors(p);
    else
        require(p.processors == 1 && p.contend.empty() && p.speeds.empty(),
                "processor options belong to the dist command");
    prepare(out, distributed ? "dist" : "smc", p);
    json summary{{"command", distributed ? "dist" : "smc"}, {"model", p.model}, {"mode", p.mode},
                 {"seed", p.seed}, {"budget", p.budget}};
    if (p.model == "lgssm") {
        auto spec = lgssm_spec(p);
        lgssm::MoveOptions mo;
        mo.scale = p.proposal_scale;
        mo.hold.unit = p.hold_unit;
        mo.hold.shape = p.hold_shape;
        auto a = [](const auto& x) { return x.a; };
        json r = p.nested == 0
                     ? execute(p, lgssm::exact_targets(spec, mo), distributed, out, "a", a)
                     : execute(p, lgssm::pseudomarginal_targets(spec, p.nested, mo), distributed, out, "a", a);
        summary.update(r);
        const auto [m, v] = lgssm::posterior_moments(spec, spec.horizon());
        summary["truth"] = {{"log_evidence", lgssm::log_evidence(spec, spec.horizon())},
                            {"posterior_mean", m},
                            {"posterior_sd", std::sqrt(v)}};
    } else {
        auto spec = lorenz_spec(p);
        lorenz96::MoveOptions mo;
        mo.scale = p.proposal_scale;
        mo.step_cost = p.step_cost;
        summary.update(execute(p, lorenz96::smc2_targets(spec, p.nested, mo), distributed, out, "F",
                               [](const auto& x) { return x.F; }));
        summary["truth"] = {{"F", p.F_true}};
    }
    finish(out, summary);
    return summary;
}

}  // namespace

std::pair<double, double> lorenz_noise(const std::string& preset)
{
    check_preset(preset);
    return preset == "paper" ? std::pair{1e-4, 1e-6} : std::pair{1.0, 1.0};
}

json run_validate_anytime(ValidateAnytime p, const fs::path& out)
{
    check_preset(p.preset);
    if (p.chains == 0)
        p.chains = default_chains(p.preset);
    require(p.chains >= 1024, "need at least 1024 chains");
    require(p.floor_draws >= 1, "need at least one noise-floor draw");
    auto c = study_config(p.seed, p.degrees, p.chains, p.horizon, p.shape, p.scale, p.rho);
    prepare(out, "validate-anytime", p);

    const auto rows = guarded([&] { return gamma_study::run_anytime_validation(c); });
    {
        io::CsvWriter w(out / "anytime.csv", {"p", "t", "n_samples", "w1_alpha"});
        for (const auto& r : rows)
            w.row({std::to_string(r.degree), std::to_string(r.t), std::to_string(r.n_samples), io::format(r.w1_alpha)});
    }
    json per = json::array();
    for (int deg : p.degrees) {
        io::Series s{"W1(empirical, alpha)", {}, {}};
        for (const auto& r : rows)
            if (r.degree == deg) {
                s.x.push_back(r.t);
                s.y.push_back(r.w1_alpha);
            }
        const double floor = gamma_study::iid_w1_floor(gamma_study::anytime_law(c, deg), p.chains, p.floor_draws,
                                                       p.seed * 1000 + static_cast<std::uint64_t>(deg));
        io::Series f{"iid floor", {s.x.front(), s.x.back()}, {floor, floor}};
        io::write_text(out / ("anytime_p" + std::to_string(deg) + ".svg"),
                       io::svg_lines({s, f}, {"anytime distribution, p = " + std::to_string(deg), "t", "W1", true}));
        per.push_back({{"p", deg},
                       {"w1_first", s.y.front()},
                       {"w1_last", s.y.back()},
                       {"noise_floor", floor},
                       {"last_over_floor", s.y.back() / floor},
                       {"last_over_first", s.y.back() / s.y.front()}});
    }
    json summary{{"command", "validate-anytime"}, {"chains", p.chains}, {"horizon", p.horizon}, {"degrees", per}};
    finish(out, summary);
    return summary;
}

json run_validate_multichain(ValidateMultichain p, const fs::path& out)
{
    check_preset(p.preset);
    if (p.chains == 0)
        p.chains = default_chains(p.preset);
    require(!p.ensemble_sizes.empty(), "need at least one ensemble size");
    for (auto k : p.ensemble_sizes) {
        require(k >= 2, "ensemble sizes (K+1) must be at least 2");
        require(p.chains % k == 0, "chain count must be divisible by every ensemble size");
    }
    auto c = study_config(p.seed, p.degrees, p.chains, p.horizon, p.shape, p.scale, p.rho);
    c.ensemble_sizes = p.ensemble_sizes;
    prepare(out, "validate-multichain", p);

    const auto rows = guarded([&] { return gamma_study::run_multichain_validation(c); });
    {
        io::CsvWriter w(out / "multichain.csv", {"p", "K_plus_1", "t", "n_samples", "w1_uncorrected", "w1_corrected"});
        for (const auto& r : rows)
            w.row({std::to_string(r.degree), std::to_string(r.ensemble_size), std::to_string(r.t),
                   std::to_string(r.n_samples), io::format(r.w1_uncorrected), io::format(r.w1_corrected)});
    }
    const auto plateau = gamma_study::plateau_table(c, rows);
    {
        io::CsvWriter w(out / "plateau.csv", {"p", "K_plus_1", "mean_w1_uncorrected", "predicted", "relative_error"});
        for (const auto& r : plateau)
            w.row({std::to_string(r.degree), std::to_string(r.ensemble_size), io::format(r.mean_w1_uncorrected),
                   io::format(r.predicted), io::format(r.relative_error)});
    }
    for (int deg : p.degrees)
        for (bool corrected : {false, true}) {
            std::vector<io::Series> series;
            for (auto k : p.ensemble_sizes) {
                io::Series s{"K+1 = " + std::to_string(k), {}, {}};
                for (const auto& r : rows)
                    if (r.degree == deg && r.ensemble_size == k) {
                        s.x.push_back(r.t);
                        s.y.push_back(corrected ? r.w1_corrected : r.w1_uncorrected);
                    }
                series.push_back(std::move(s));
            }
            const std::string kind = corrected ? "corrected" : "uncorrected";
            io::write_text(out / ("multichain_p" + std::to_string(deg) + "_" + kind + ".svg"),
                           io::svg_lines(series, {kind + " multi-chain, p = " + std::to_string(deg), "t", "W1(pi)",
                                                  true}));
        }
    json table = json::array();
    for (const auto& r : plateau)
        table.push_back({{"p", r.degree},
                         {"K_plus_1", r.ensemble_size},
                         {"mean_w1_uncorrected", r.mean_w1_uncorrected},
                         {"predicted", r.predicted},
                         {"relative_error", r.relative_error}});
    json summary{{"command", "validate-multichain"}, {"chains", p.chains}, {"horizon", p.horizon}, {"plateau", table}};
    finish(out, summary);
    return summary;
}

json run_smc(SmcRun p, const fs::path& out) { return run_model(std::move(p), out, false); }

json run_dist(SmcRun p, const fs::path& out) { return run_model(std::move(p), out, true); }

json run_lorenz_data(LorenzData p, const fs::path& out)
{
    auto [s2, o2] = lorenz_noise(p.preset);
    if (p.sigma2 == 0.0)
        p.sigma2 = s2;
    if (p.obs_var == 0.0)
        p.obs_var = o2;
    lorenz96::Spec s;
    s.D = p.dimension;
    s.sigma2 = p.sigma2;
    s.obs_var = p.obs_var;
    s.observed = p.observed;
    s.stride = p.stride;
    s.dt = p.dt;
    guarded([&] {
        s.validate();
        return 0;
    });
    require(p.horizon >= p.stride, "horizon must cover at least one observation");
    prepare(out, "lorenz-data", p);
    Stream rng = Stream::derive(p.seed, "lorenz-data");
    const auto data = lorenz96::simulate_dataset(s, p.F, p.horizon, rng);
    std::vector<std::string> header{"time"};
    for (std::size_t d = 1; d <= p.observed; ++d)
        header.push_back("y" + std::to_string(d));
    io::CsvWriter w(out / "observations.csv", header);
    std::vector<io::Series> series(p.observed);
    for (const auto& o : data) {
        std::vector<std::string> row{io::format(o.time)};
        for (std::size_t d = 0; d < p.observed; ++d) {
            row.push_back(io::format(o.y[d]));
            series[d].name = "Y" + std::to_string(d + 1);
            series[d].x.push_back(o.time);
            series[d].y.push_back(o.y[d]);
        }
        w.row(row);
    }
    io::write_text(out / "observations.svg",
                   io::svg_lines(series, {"Lorenz '96 observations, F = " + io::format(p.F), "t", "Y", false}));
    json summary{{"command", "lorenz-data"}, {"records", data.size()}, {"values", data.size() * p.observed}};
    finish(out, summary);
    return summary;
}

json replay(const json& config, const fs::path& out)
{
    require(config.contains("command") && config.contains("params"), "config needs command and params");
    const auto cmd = config.at("command").get<std::string>();
    const auto& params = config.at("params");
    try {
        if (cmd == "validate-anytime")
            return run_validate_anytime(params.get<ValidateAnytime>(), out);
        if (cmd == "validate-multichain")
            return run_validate_multichain(params.get<ValidateMultichain>(), out);
        if (cmd == "smc")
            return run_smc(params.get<SmcRun>(), out);
        if (cmd == "dist")
            return run_dist(params.get<SmcRun>(), out);
        if (cmd == "lorenz-data")
            return run_lorenz_data(params.get<LorenzData>(), out);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad config: ") + e.what());
    }
    throw ConfigError("unknown command in config: " + cmd);
}

}  // namespace anytime::experiments
