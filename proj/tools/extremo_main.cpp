#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "extremo/pipeline.hpp"

namespace {

using extremo::json;

struct CommonArgs {
    std::string config_path;
    std::string out_dir = "extremo_out";
    std::uint64_t seed = 1;
    bool seed_set = false;
};

json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw extremo::FileNotFound("cannot open config file " + path);
    json j;
    in >> j;
    return j;
}

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "JSON config or run manifest to execute");
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--seed", args.seed, "master seed")->each([&args](const std::string&) {
        args.seed_set = true;
    });
}

// Builds the final config: file config (if any) under explicit flag overrides.
json finalize(const std::string& command, const CommonArgs& args, const json& overrides) {
    json cfg;
    if (!args.config_path.empty()) {
        cfg = load_config_file(args.config_path);
        if (cfg.contains("config")) cfg = cfg.at("config");
    }
    cfg["command"] = command;
    if (args.seed_set || !cfg.contains("seed")) cfg["seed"] = args.seed;
    cfg = extremo::merge_config(cfg, overrides);
    return cfg;
}

json input_block(const std::string& path, const std::vector<std::string>& columns) {
    json in;
    in["path"] = path;
    if (!columns.empty()) in["columns"] = columns;
    return in;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"extremo: bivariate GARCH simulation, fitting and extremal-dependence diagnostics"};
    app.set_version_flag("--version", extremo::kToolVersion);
    app.require_subcommand(1);

    // Shared option state per subcommand.
    struct SubState {
        CommonArgs common;
        std::string input;
        std::vector<std::string> columns;
        double quantile = 0.98;
        int lags = 40;
        int n_perm = 100;
        double band_q = 0.96;
        std::string set_a = "upper";
        std::string set_b = "upper";
        std::string dist = "gaussian";
        bool grid_restart = false;
        int n = 50000;
        int burn_in = 1000;
        int max_order = 20;
        std::string criterion = "schwarz";
        std::string mode = "univariate";
        double df = 3.0;
        int period = 78;
        double clock_q = 0.99;
        bool var_enabled = false;
    };

    std::map<std::string, SubState> st;
    // --input is optional at parse time: it may come from --config instead.
    auto add_input = [](CLI::App* cmd, SubState& s) {
        cmd->add_option("--input", s.input, "input CSV path (or set input.path in --config)");
        cmd->add_option("--columns", s.columns, "numeric columns to analyze")->delimiter(',');
    };
    auto add_extremogram_opts = [](CLI::App* cmd, SubState& s) {
        cmd->add_option("--quantile", s.quantile, "threshold quantile level (default 0.98)");
        cmd->add_option("--lags", s.lags, "maximum lag");
        cmd->add_option("--set-a", s.set_a, "conditioning tail set: upper|lower");
        cmd->add_option("--set-b", s.set_b, "target tail set: upper|lower");
    };

    CLI::App* c_sim = app.add_subcommand(
        "simulate", "simulate a GARCH(1,1) path (model parameters come from --config)");
    add_common(c_sim, st["simulate"].common);
    c_sim->add_option("--n", st["simulate"].n, "observations to keep");
    c_sim->add_option("--burn-in", st["simulate"].burn_in, "leading points to discard");

    CLI::App* c_ext = app.add_subcommand("extremogram", "sample extremogram / cross-extremogram");
    add_common(c_ext, st["extremogram"].common);
    add_input(c_ext, st["extremogram"]);
    add_extremogram_opts(c_ext, st["extremogram"]);

    CLI::App* c_bands = app.add_subcommand("bands", "extremogram with permutation confidence bands");
    add_common(c_bands, st["bands"].common);
    add_input(c_bands, st["bands"]);
    add_extremogram_opts(c_bands, st["bands"]);
    c_bands->add_option("--n-perm", st["bands"].n_perm, "number of permutations (default 100)");
    c_bands->add_option("--band-q", st["bands"].band_q, "band quantile (default 0.96)");

    CLI::App* c_fitu = app.add_subcommand("fit-uni", "univariate GARCH(1,1) fit");
    add_common(c_fitu, st["fit-uni"].common);
    add_input(c_fitu, st["fit-uni"]);
    c_fitu->add_option("--dist", st["fit-uni"].dist, "innovation law: gaussian|t");
    c_fitu->add_flag("--grid-restart", st["fit-uni"].grid_restart,
                     "also try starts on a step-0.1 coefficient grid");

    CLI::App* c_fitb = app.add_subcommand("fit-biv", "bivariate CCC-GARCH(1,1) Gaussian QMLE");
    add_common(c_fitb, st["fit-biv"].common);
    add_input(c_fitb, st["fit-biv"]);
    c_fitb->add_flag("--grid-restart", st["fit-biv"].grid_restart,
                     "also try starts on a step-0.1 coefficient grid");

    CLI::App* c_var = app.add_subcommand("var", "VAR pre-whitening with order selection");
    add_common(c_var, st["var"].common);
    add_input(c_var, st["var"]);
    c_var->add_option("--max-order", st["var"].max_order, "maximum order to consider");
    c_var->add_option("--criterion", st["var"].criterion, "schwarz|fpe");

    CLI::App* c_tail = app.add_subcommand("tail-index", "model-implied tail index");
    add_common(c_tail, st["tail-index"].common);
    c_tail->add_option("--mode", st["tail-index"].mode, "univariate|bivariate");

    CLI::App* c_lyap = app.add_subcommand("lyapunov", "top Lyapunov exponent estimate");
    add_common(c_lyap, st["lyapunov"].common);
    c_lyap->add_option("--n", st["lyapunov"].n, "product length");

    CLI::App* c_qq = app.add_subcommand("qq", "QQ points against standardized t quantiles");
    add_common(c_qq, st["qq"].common);
    add_input(c_qq, st["qq"]);
    c_qq->add_option("--df", st["qq"].df, "t degrees of freedom");

    CLI::App* c_acf = app.add_subcommand("acf", "sample auto/cross-correlations");
    add_common(c_acf, st["acf"].common);
    add_input(c_acf, st["acf"]);
    c_acf->add_option("--lags", st["acf"].lags, "maximum lag");

    CLI::App* c_clock = app.add_subcommand("clock-profile", "per-slot exceedance counts");
    add_common(c_clock, st["clock-profile"].common);
    add_input(c_clock, st["clock-profile"]);
    c_clock->add_option("--period", st["clock-profile"].period, "slots per cycle (default 78)");
    c_clock->add_option("--quantile", st["clock-profile"].clock_q,
                        "exceedance quantile (default 0.99)");

    CLI::App* c_pipe = app.add_subcommand(
        "pipeline", "full chain: [VAR] -> QMLE -> residual extremograms -> QQ -> ACF -> profile");
    add_common(c_pipe, st["pipeline"].common);
    add_input(c_pipe, st["pipeline"]);
    add_extremogram_opts(c_pipe, st["pipeline"]);
    c_pipe->add_option("--n-perm", st["pipeline"].n_perm, "number of permutations");
    c_pipe->add_option("--band-q", st["pipeline"].band_q, "band quantile");
    c_pipe->add_flag("--var", st["pipeline"].var_enabled, "enable VAR pre-whitening");
    c_pipe->add_option("--qq-df", st["pipeline"].df, "t df for residual QQ points");
    c_pipe->add_flag("--grid-restart", st["pipeline"].grid_restart,
                     "grid starts for the QMLE stage");

    CLI11_PARSE(app, argc, argv);

    const std::string command = app.get_subcommands().front()->get_name();
    const SubState& s = st[command];

    try {
        json overrides;
        if (!s.input.empty()) overrides["input"] = input_block(s.input, s.columns);

        auto tail_set = [](const std::string& kind) { return json{{"kind", kind}, {"c", 1.0}}; };
        CLI::App* sub = app.get_subcommands().front();
        auto passed = [&](const std::string& name) {
            const CLI::Option* opt = sub->get_option_no_throw(name);
            return opt != nullptr && opt->count() > 0;
        };

        if (command == "simulate") {
            if (passed("--n")) overrides["simulate"]["n"] = s.n;
            if (passed("--burn-in")) overrides["simulate"]["burn_in"] = s.burn_in;
        }
        if (command == "extremogram" || command == "bands" || command == "pipeline") {
            json ex;
            if (passed("--quantile")) ex["quantile"] = s.quantile;
            if (passed("--lags")) ex["max_lag"] = s.lags;
            if (passed("--set-a")) ex["set_a"] = tail_set(s.set_a);
            if (passed("--set-b")) ex["set_b"] = tail_set(s.set_b);
            if (passed("--n-perm")) ex["n_perm"] = s.n_perm;
            if (passed("--band-q")) ex["band_quantile"] = s.band_q;
            if (!ex.empty()) overrides["extremogram"] = ex;
        }
        if (command == "fit-uni") {
            overrides["fit"]["dist"] = s.dist;
            overrides["fit"]["grid_restart"] = s.grid_restart;
        }
        if (command == "fit-biv" || command == "pipeline") {
            if (passed("--grid-restart")) overrides["fit"]["grid_restart"] = s.grid_restart;
        }
        if (command == "var") {
            if (passed("--max-order")) overrides["var"]["max_order"] = s.max_order;
            if (passed("--criterion")) overrides["var"]["criterion"] = s.criterion;
        }
        if (command == "tail-index" && passed("--mode")) overrides["tail"]["mode"] = s.mode;
        if (command == "lyapunov" && passed("--n")) overrides["lyapunov"]["n"] = s.n;
        if (command == "qq" && passed("--df")) overrides["qq"]["df"] = s.df;
        if (command == "acf" && passed("--lags")) overrides["acf"]["max_lag"] = s.lags;
        if (command == "clock-profile") {
            if (passed("--period")) overrides["clock"]["period"] = s.period;
            if (passed("--quantile")) overrides["clock"]["quantile"] = s.clock_q;
        }
        if (command == "pipeline") {
            if (passed("--var")) overrides["var"]["enabled"] = s.var_enabled;
            if (passed("--qq-df")) overrides["qq"]["df"] = s.df;
        }

        const json cfg = finalize(command, s.common, overrides);
        const json manifest = extremo::run_command(cfg, s.common.out_dir);
        std::cout << "wrote " << (s.common.out_dir + "/manifest.json");
        for (const auto& f : manifest.at("outputs")) std::cout << ' ' << f.get<std::string>();
        std::cout << '\n';
    } catch (const std::exception& e) {
        std::cerr << "error [" << command << "]: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
