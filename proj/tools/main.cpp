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

// Command-line front end. Exit codes: 0 ok, 2 configuration error,
// 3 numerical failure.

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "anytime/experiments.hpp"
#include "anytime/resample.hpp"

namespace ex = anytime::experiments;

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;

template <class P>
void common(CLI::App* sub, P& p, std::string& out)
{
    sub->add_option("--seed", p.seed, "random seed");
    sub->add_option("--out", out, "output directory")->required();
    sub->add_option("--preset", p.preset, "desk or paper")->check(CLI::IsMember({"desk", "paper"}));
}

template <class P>
void study(CLI::App* sub, P& p)
{
    sub->add_option("--p,--degrees", p.degrees, "polynomial degrees p")->delimiter(',');
    sub->add_option("--chains", p.chains, "number of chains (0: preset default)");
    sub->add_option("--horizon", p.horizon, "last time point");
    sub->add_option("--shape", p.shape, "gamma shape k of the hold times");
    sub->add_option("--scale", p.scale, "gamma scale theta of the hold times");
    sub->add_option("--rho", p.rho, "autoregression of the target chain");
    sub->add_option("--floor-draws", p.floor_draws, "draws for the iid noise floor");
}

void smc_options(CLI::App* sub, ex::SmcRun& p, bool distributed)
{
    sub->add_option("--data-seed", p.data_seed, "seed for the synthetic data set");
    sub->add_option("--model", p.model)->check(CLI::IsMember({"lgssm", "lorenz96"}));
    sub->add_option("--mode", p.mode, "fixed or anytime moves")->check(CLI::IsMember({"fixed", "anytime"}));
    sub->add_option("--particles", p.particles);
    sub->add_option("--moves", p.moves, "moves per step in fixed mode");
    sub->add_option("--budget", p.budget, "total anytime move budget (0: matched to fixed work)");
    sub->add_option("--schedule", p.schedule)->check(CLI::IsMember({"uniform", "linear"}));
    sub->add_option("--c", p.c, "schedule offset");
    sub->add_option("--policy", p.policy, "extra-chain policy")->check(CLI::IsMember({"fresh", "resume"}));
    sub->add_option("--scheme", p.scheme, "resampling scheme");
    sub->add_flag("--permute", p.permute, "randomly permute particles after resampling");
    sub->add_option("--nested", p.nested, "nested filter size (0: exact weights)");
    sub->add_option("--weight-cost", p.weight_cost);
    sub->add_option("--resample-cost", p.resample_cost);
    sub->add_option("--init-cost", p.init_cost);
    sub->add_flag("--serial", p.serial, "use the serial reference kernels");
    sub->add_option("--steps", p.steps, "lgssm observations");
    sub->add_option("--a-true", p.a_true);
    sub->add_option("--q", p.q);
    sub->add_option("--r", p.r);
    sub->add_option("--hold-unit", p.hold_unit);
    sub->add_option("--hold-shape", p.hold_shape);
    sub->add_option("--proposal-scale", p.proposal_scale, "MH scale relative to the cloud spread (0: default)");
    sub->add_option("--dimension", p.dimension);
    sub->add_option("--sigma2", p.sigma2, "diffusion variance (0: preset default)");
    sub->add_option("--obs-var", p.obs_var, "observation variance (0: preset default)");
    sub->add_option("--F-true", p.F_true);
    sub->add_option("--observations", p.observations);
    sub->add_option("--stride", p.stride);
    sub->add_option("--dt", p.dt);
    sub->add_option("--step-cost", p.step_cost, "virtual seconds per integrator step per particle");
    if (distributed) {
        sub->add_option("--processors", p.processors);
        sub->add_option("--contend", p.contend, "p:factor[:start:end], repeatable");
        sub->add_option("--speed", p.speeds, "p:multiplier, repeatable");
    }
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"anytime Monte Carlo experiments"};
    app.require_subcommand(1);
    std::string out;

    ex::ValidateAnytime va;
    auto* s_va = app.add_subcommand("validate-anytime", "anytime distribution of a gamma-hold chain");
    common(s_va, va, out);
    study(s_va, va);

    ex::ValidateMultichain vm;
    auto* s_vm = app.add_subcommand("validate-multichain", "multi-chain correction study");
    common(s_vm, vm, out);
    study(s_vm, vm);
    s_vm->add_option("--ensemble-sizes", vm.ensemble_sizes, "values of K+1")->delimiter(',');

    ex::SmcRun sr;
    auto* s_smc = app.add_subcommand("smc", "single-processor SMC sampler");
    common(s_smc, sr, out);
    smc_options(s_smc, sr, false);

    ex::SmcRun dr;
    auto* s_dist = app.add_subcommand("dist", "simulated distributed SMC sampler");
    common(s_dist, dr, out);
    smc_options(s_dist, dr, true);

    ex::LorenzData ld;
    auto* s_ld = app.add_subcommand("lorenz-data", "simulate a Lorenz '96 data set");
    common(s_ld, ld, out);
    s_ld->add_option("--F", ld.F);
    s_ld->add_option("--horizon", ld.horizon);
    s_ld->add_option("--dimension", ld.dimension);
    s_ld->add_option("--sigma2", ld.sigma2);
    s_ld->add_option("--obs-var", ld.obs_var);
    s_ld->add_option("--observed", ld.observed);
    s_ld->add_option("--stride", ld.stride);
    s_ld->add_option("--dt", ld.dt);

    std::string config_path;
    auto* s_rp = app.add_subcommand("replay", "rerun from a config.json");
    s_rp->add_option("config", config_path)->required()->check(CLI::ExistingFile);
    s_rp->add_option("--out", out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }

    try {
        ex::json summary;
        if (*s_va)
            summary = ex::run_validate_anytime(va, out);
        else if (*s_vm)
            summary = ex::run_validate_multichain(vm, out);
        else if (*s_smc)
            summary = ex::run_smc(sr, out);
        else if (*s_dist)
            summary = ex::run_dist(dr, out);
        else if (*s_ld)
            summary = ex::run_lorenz_data(ld, out);
        else {
            std::ifstream in(config_path);
            ex::json config;
            try {
                config = ex::json::parse(in);
            } catch (const ex::json::exception& e) {
                throw ex::ConfigError(std::string("cannot parse ") + config_path + ": " + e.what());
            }
            summary = ex::replay(config, out);
        }
        std::cout << summary.dump(2) << "\n";
    } catch (const anytime::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kNumericalError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::domain_error& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kConfigError;
    }
    return 0;
}
