// bmclab: numerical workbench for binary memoryless channels.
//
// Subcommands: capacity, imis, alpha, beta, compound, simulate, verify.
// Every run emits a JSON artifact embedding its own configuration; rerunning
// an embedded configuration reproduces the artifact byte for byte (minus the
// timestamp), regardless of --workers / BMCLAB_WORKERS.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "bmc/cli.hpp"

namespace {

struct Common {
    unsigned workers = 0;
    std::string output;
    std::string format = "json";
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--workers", c.workers, "Worker threads (0 = BMCLAB_WORKERS or hardware)");
    sub->add_option("--output,-o", c.output, "Write the artifact to this path (atomic)");
    sub->add_option("--format", c.format, "Artifact format: json|csv")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->set_config("--config", "", "Read key=value defaults from a file (flags override)");
}

void put(bmc::RunConfig& cfg, const std::string& key, const std::string& value) {
    cfg.parameters[key] = value;
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mismatched-decoding and compound-capacity workbench for binary channels"};
    app.require_subcommand(1);

    bmc::RunConfig cfg;
    Common common;

    // capacity
    double cap_a = 0, cap_b = 0, cap_ptol = 1e-12;
    auto* cap = app.add_subcommand("capacity", "Channel capacity with maximizing input");
    cap->add_option("--a", cap_a, "W(0|0)")->required();
    cap->add_option("--b", cap_b, "W(1|1)")->required();
    cap->add_option("--p-tol", cap_ptol, "Ternary-search tolerance on p0 (default 1e-12)");
    add_common(cap, common);
    cap->callback([&] {
        cfg.subcommand = "capacity";
        put(cfg, "a", num(cap_a));
        put(cfg, "b", num(cap_b));
        put(cfg, "p_tol", num(cap_ptol));
    });

    // imis
    double im_a = 0, im_b = 0, im_p0 = 0.5;
    std::string im_bank;
    long im_oracle = 0;
    auto* imis = app.add_subcommand("imis", "Mismatched mutual information of a metric bank");
    imis->add_option("--a", im_a, "true channel W(0|0)")->required();
    imis->add_option("--b", im_b, "true channel W(1|1)")->required();
    imis->add_option("--p0", im_p0, "input distribution P(0) (default 0.5)");
    imis->add_option("--bank", im_bank,
                     R"(JSON bank: [{"a":..,"b":..},...] for log-likelihood metrics or [{"d":[[..],[..]]},...])")
        ->required();
    imis->add_option("--oracle-points", im_oracle,
                     "Also run the brute-force sweep with this many points (>= 1000)");
    add_common(imis, common);
    imis->callback([&] {
        cfg.subcommand = "imis";
        put(cfg, "a", num(im_a));
        put(cfg, "b", num(im_b));
        put(cfg, "p0", num(im_p0));
        put(cfg, "bank", im_bank);
        if (im_oracle > 0) put(cfg, "oracle_points", std::to_string(im_oracle));
    });

    // alpha
    long al_pgrid = 1025, al_cgrid = 512;
    double al_delta = 1e-3;
    std::string al_gridcsv;
    auto* alpha = app.add_subcommand("alpha", "Worst-case single-input efficiency game");
    alpha->add_option("--p-grid", al_pgrid, "Input grid size (default 1025, min 101)");
    alpha->add_option("--channel-grid", al_cgrid, "Channel grid size per axis (default 512, min 128)");
    alpha->add_option("--delta", al_delta, "Zero-capacity exclusion band (default 1e-3)");
    alpha->add_option("--grid-csv", al_gridcsv, "Also write the (a,b,ratio) grid CSV here");
    add_common(alpha, common);
    alpha->callback([&] {
        cfg.subcommand = "alpha";
        put(cfg, "p_grid", std::to_string(al_pgrid));
        put(cfg, "channel_grid", std::to_string(al_cgrid));
        put(cfg, "delta", num(al_delta));
        if (!al_gridcsv.empty()) put(cfg, "grid_csv", al_gridcsv);
    });

    // beta
    long be_cgrid = 256;
    double be_delta = 1e-2, be_p0 = 0.5;
    std::string be_bank, be_gridcsv;
    auto* beta = app.add_subcommand("beta", "Worst-case mismatched-to-matched ratio of a bank");
    beta->add_option("--channel-grid", be_cgrid, "Channel grid size per axis (default 256)");
    beta->add_option("--delta", be_delta, "Exclusion band (default 1e-2)");
    beta->add_option("--p0", be_p0, "input distribution P(0) (default 0.5)");
    beta->add_option("--bank", be_bank, "JSON bank specification")->required();
    beta->add_option("--grid-csv", be_gridcsv, "Also write the (a,b,ratio) grid CSV here");
    add_common(beta, common);
    beta->callback([&] {
        cfg.subcommand = "beta";
        put(cfg, "channel_grid", std::to_string(be_cgrid));
        put(cfg, "delta", num(be_delta));
        put(cfg, "p0", num(be_p0));
        put(cfg, "bank", be_bank);
        if (!be_gridcsv.empty()) put(cfg, "grid_csv", be_gridcsv);
    });

    // compound
    std::string co_channels;
    double co_ptol = 1e-9;
    auto* compound = app.add_subcommand("compound", "Compound capacity of a finite channel set");
    compound->add_option("--channels", co_channels, R"(JSON list [{"a":..,"b":..},...])")
        ->required();
    compound->add_option("--p-tol", co_ptol, "Ternary-search tolerance on p0 (default 1e-9)");
    add_common(compound, common);
    compound->callback([&] {
        cfg.subcommand = "compound";
        put(cfg, "channels", co_channels);
        put(cfg, "p_tol", num(co_ptol));
    });

    // simulate
    long si_n = 0, si_trials = 10000, si_seed = 1;
    double si_rate = 0, si_a = 0, si_b = 0, si_p0 = 0.5;
    std::string si_decoder = "ml", si_bank, si_channels;
    bool si_fixed = false;
    auto* sim = app.add_subcommand("simulate", "Monte Carlo random-coding block error rate");
    sim->add_option("--n", si_n, "block length (<= 4096)")->required();
    sim->add_option("--rate", si_rate, "rate in bits/symbol; 2^ceil(n*rate) <= 2^20 codewords")
        ->required();
    sim->add_option("--a", si_a, "channel W(0|0)")->required();
    sim->add_option("--b", si_b, "channel W(1|1)")->required();
    sim->add_option("--p0", si_p0, "codebook input distribution P(0) (default 0.5)");
    sim->add_option("--decoder", si_decoder, "ml|gld|glrt|mmi (default ml)")
        ->check(CLI::IsMember({"ml", "gld", "glrt", "mmi"}));
    sim->add_option("--bank", si_bank, "JSON bank for gld");
    sim->add_option("--channels", si_channels, "JSON channel list for glrt");
    sim->add_option("--trials", si_trials, "Monte Carlo trials (default 10000, min 100)");
    sim->add_option("--seed", si_seed, "root seed (default 1)");
    sim->add_flag("--fixed-composition", si_fixed, "constant-weight codewords");
    add_common(sim, common);
    sim->callback([&] {
        cfg.subcommand = "simulate";
        put(cfg, "n", std::to_string(si_n));
        put(cfg, "rate", num(si_rate));
        put(cfg, "a", num(si_a));
        put(cfg, "b", num(si_b));
        put(cfg, "p0", num(si_p0));
        put(cfg, "decoder", si_decoder);
        if (!si_bank.empty()) put(cfg, "bank", si_bank);
        if (!si_channels.empty()) put(cfg, "channels", si_channels);
        put(cfg, "trials", std::to_string(si_trials));
        put(cfg, "seed", std::to_string(si_seed));
        put(cfg, "fixed_composition", si_fixed ? "true" : "false");
    });

    // verify
    long ve_seed = 1, ve_criterion = 0;
    auto* verify = app.add_subcommand("verify", "Run the full verification suite");
    verify->add_option("--seed", ve_seed, "root seed (default 1)");
    verify->add_option("--criterion", ve_criterion, "run a single criterion (1..11; 0 = all)");
    add_common(verify, common);
    verify->callback([&] {
        cfg.subcommand = "verify";
        put(cfg, "seed", std::to_string(ve_seed));
        if (ve_criterion != 0) put(cfg, "criterion", std::to_string(ve_criterion));
    });

    CLI11_PARSE(app, argc, argv);

    cfg.output_path = common.output;
    cfg.format = common.format;
    return bmc::run(cfg, common.workers, std::cout, std::cerr);
}
