#include "extremo/pipeline.hpp"

#include <fstream>
#include <limits>

#include "extremo/csv.hpp"

namespace extremo {

namespace {

json model_defaults() {
    return json{{"a0", {1e-6, 1e-6}},
                {"alpha", {{0.1, 0.0}, {0.0, 0.1}}},
                {"beta", {{0.8, 0.0}, {0.0, 0.8}}}};
}

json innovation_defaults() {
    return json{{"family", "gaussian"}, {"df", 10.0}, {"rho", 0.0}};
}

json extremogram_defaults() {
    return json{{"quantile", 0.98},
                {"max_lag", 40},
                {"set_a", {{"kind", "upper"}, {"c", 1.0}}},
                {"set_b", {{"kind", "upper"}, {"c", 1.0}}},
                {"n_perm", 100},
                {"band_quantile", 0.96}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << text;
}

void write_json_file(const std::filesystem::path& path, const json& j) {
    write_text(path, j.dump(2) + "\n");
}

SeriesTable obtain_input(const json& cfg) {
    if (!cfg.contains("input"))
        throw std::invalid_argument(
            "this command needs an input CSV: pass --input or set input.path in the config");
    const json& in = cfg.at("input");
    std::vector<std::string> select;
    if (in.contains("columns"))
        for (const auto& c : in.at("columns")) select.push_back(c.get<std::string>());
    return load_series(in.at("path").get<std::string>(), select);
}

TailSet tail_set_from_json(const json& j) {
    TailSet set;
    const std::string kind = j.value("kind", "upper");
    if (kind == "upper")
        set.kind = TailSet::Kind::UpperRay;
    else if (kind == "lower")
        set.kind = TailSet::Kind::LowerRay;
    else
        throw std::invalid_argument("tail set kind must be 'upper' or 'lower'");
    set.c = j.value("c", 1.0);
    return set;
}

SeriesTable extremogram_table(const ExtremogramResult& res) {
    SeriesTable t;
    t.names = {"lag",    "rho11",  "rho12",  "rho21", "rho22",
               "band11", "band12", "band21", "band22"};
    t.columns.assign(9, {});
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (int h = 0; h <= res.max_lag(); ++h) {
        t.columns[0].push_back(h);
        t.columns[1].push_back(res.rho[static_cast<size_t>(h)](0, 0));
        t.columns[2].push_back(res.rho[static_cast<size_t>(h)](0, 1));
        t.columns[3].push_back(res.rho[static_cast<size_t>(h)](1, 0));
        t.columns[4].push_back(res.rho[static_cast<size_t>(h)](1, 1));
        for (int k = 0; k < 4; ++k)
            t.columns[static_cast<size_t>(5 + k)].push_back(
                res.band ? res.band->v[k / 2][k % 2] : nan);
    }
    return t;
}

json summary_of_series(const SeriesTable& table) {
    json s;
    s["rows"] = table.rows();
    for (size_t i = 0; i < table.columns.size(); ++i) {
        s["mean_" + table.names[i]] = mean_of(table.columns[i]);
        s["sd_" + table.names[i]] = sd_of(table.columns[i]);
    }
    return s;
}

json fit_to_json(const BivariateFit& fit) {
    json j;
    j["params"] = to_json(fit.params);
    j["rho_hat"] = fit.rho_hat;
    j["loglik"] = fit.loglik;
    j["loglik_init"] = fit.loglik_init;
    j["converged"] = fit.converged;
    j["iterations"] = fit.iterations;
    j["evaluations"] = fit.evaluations;
    j["boundary_estimate"] = fit.boundary_estimate;
    j["init"] = to_json(fit.init_params);
    j["rho_init"] = fit.rho_init;
    j["spectral_radius"] = mean_transition(fit.params).perron_root();
    j["reconstruction_repairs"] = fit.reconstruction_repairs;
    j["reconstruction_failures"] = fit.reconstruction_failures;
    return j;
}

json fit_to_json(const UnivariateFit& fit) {
    json j;
    j["params"] = to_json(fit.params);
    if (fit.df_hat) j["df_hat"] = *fit.df_hat;
    j["loglik"] = fit.loglik;
    j["loglik_init"] = fit.loglik_init;
    j["converged"] = fit.converged;
    j["iterations"] = fit.iterations;
    j["evaluations"] = fit.evaluations;
    j["init"] = to_json(fit.init);
    j["reconstruction_repairs"] = fit.reconstruction_repairs;
    j["reconstruction_failures"] = fit.reconstruction_failures;
    return j;
}

json tail_to_json(const TailIndexResult& res) {
    json j;
    j["alpha"] = res.alpha;
    j["bracket_s"] = {res.bracket.first, res.bracket.second};
    j["mc_se"] = res.mc_se;
    j["n_mc"] = res.n_mc;
    json curve = json::array();
    for (const auto& [s, v] : res.moment_curve) curve.push_back({s, v});
    j["moment_curve"] = curve;
    if (res.n_len > 0) {
        j["n_len"] = res.n_len;
        j["bias_drift_s"] = res.bias_drift;
        j["bias_warning"] = res.bias_warning;
        j["positivity_warning"] = res.positivity_warning;
    }
    return j;
}

struct CommandContext {
    json config;
    std::filesystem::path out_dir;
    std::vector<std::string> outputs;
    json summary;

    void write_table(const std::string& name, const SeriesTable& table) {
        write_csv(out_dir / name, table);
        outputs.push_back(name);
    }
    void write_result(const std::string& name, const json& j) {
        write_json_file(out_dir / name, j);
        outputs.push_back(name);
    }
};

SeriesTable series_from_path(const CommandContext& ctx) { return obtain_input(ctx.config); }

SeriesTable simulate_series(const json& cfg, std::uint64_t seed) {
    const json& sim = cfg.at("simulate");
    const int n = sim.at("n").get<int>();
    const int burn_in = sim.value("burn_in", 1000);
    SeriesTable table;
    if (sim.contains("uni_model")) {
        const UnivariateGarchParams p = univariate_params_from_json(sim.at("uni_model"));
        std::optional<double> df;
        if (sim.contains("innovation_df") && !sim.at("innovation_df").is_null())
            df = sim.at("innovation_df").get<double>();
        const SimulatedPath path = simulate_univariate(p, df, n, burn_in, seed);
        table.names = {"x", "sigma"};
        table.columns = {path.x[0], path.sigma[0]};
    } else {
        const BivariateGarchParams p = bivariate_params_from_json(sim.at("model"));
        const Innovation innov = innovation_from_json(sim.at("innovation"));
        const SimulatedPath path = simulate_bivariate(p, innov, n, burn_in, seed);
        table.names = {"x1", "x2", "sigma1", "sigma2"};
        table.columns = {path.x[0], path.x[1], path.sigma[0], path.sigma[1]};
    }
    return table;
}

void require_two_columns(const SeriesTable& t, const char* who) {
    if (t.columns.size() < 2)
        throw std::invalid_argument(std::string(who) + ": needs a bivariate input (two columns)");
}

double quantile_to_m(double q) {
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("quantile must lie in (0, 1)");
    return 1.0 / (1.0 - q);
}

// ----- command implementations --------------------------------------------

void cmd_simulate(CommandContext& ctx) {
    const SeriesTable table = simulate_series(ctx.config, ctx.config.at("seed").get<std::uint64_t>());
    ctx.write_table("series.csv", table);
    ctx.summary = summary_of_series(table);
}

ExtremogramResult compute_extremogram(const SeriesTable& table, const json& cfg, bool with_bands,
                                      std::uint64_t seed) {
    const ExtremogramConfig ecfg = extremogram_config_from_json(cfg.at("extremogram"));
    ExtremogramResult res = sample_extremogram(table.columns[0], table.columns[1], ecfg);
    if (with_bands) {
        const int n_perm = cfg.at("extremogram").value("n_perm", 100);
        const double band_q = cfg.at("extremogram").value("band_quantile", 0.96);
        res.band = permutation_bands(table.columns[0], table.columns[1], ecfg, n_perm, band_q, seed);
        res.band_meta = ExtremogramResult::BandMeta{n_perm, band_q, seed};
    }
    return res;
}

void cmd_extremogram(CommandContext& ctx, bool with_bands) {
    const SeriesTable table = series_from_path(ctx);
    require_two_columns(table, "extremogram");
    const ExtremogramResult res =
        compute_extremogram(table, ctx.config, with_bands, ctx.config.at("seed").get<std::uint64_t>());
    ctx.write_table("extremogram.csv", extremogram_table(res));
    ctx.summary["exceed_counts"] = res.exceed_counts;
    ctx.summary["scale_a"] = res.scale_a;
    ctx.summary["scale_b"] = res.scale_b;
    ctx.summary["low_count_warning"] = res.low_count_warning;
}

void cmd_fit_uni(CommandContext& ctx) {
    const SeriesTable table = series_from_path(ctx);
    const json& fcfg = ctx.config.at("fit");
    const std::string dist = fcfg.value("dist", "gaussian");
    const bool grid = fcfg.value("grid_restart", false);
    const std::vector<double>& x = table.columns.at(0);
    const UnivariateFit fit = dist == "t" ? fit_univariate_t_mle(x, std::nullopt, std::nullopt, grid)
                                          : fit_univariate_qmle(x, std::nullopt, grid);
    ctx.write_result("fit.json", fit_to_json(fit));
    SeriesTable res;
    res.names = {"sigma", "z"};
    res.columns = {fit.sigma, fit.residuals};
    ctx.write_table("residuals.csv", res);
    ctx.summary["loglik"] = fit.loglik;
    ctx.summary["converged"] = fit.converged;
}

void cmd_fit_biv(CommandContext& ctx) {
    const SeriesTable table = series_from_path(ctx);
    require_two_columns(table, "fit-biv");
    const bool grid = ctx.config.at("fit").value("grid_restart", false);
    const BivariateFit fit = fit_bivariate_qmle(table.columns[0], table.columns[1], std::nullopt, grid);
    ctx.write_result("fit.json", fit_to_json(fit));
    SeriesTable res;
    res.names = {"sigma1", "sigma2", "z1", "z2"};
    res.columns = {fit.sigma[0], fit.sigma[1], fit.residuals[0], fit.residuals[1]};
    ctx.write_table("residuals.csv", res);
    ctx.summary["loglik"] = fit.loglik;
    ctx.summary["converged"] = fit.converged;
    ctx.summary["boundary_estimate"] = fit.boundary_estimate;
}

void cmd_var(CommandContext& ctx) {
    const SeriesTable table = series_from_path(ctx);
    require_two_columns(table, "var");
    const json& vcfg = ctx.config.at("var");
    const VarCriterion crit =
        vcfg.value("criterion", "schwarz") == std::string("fpe") ? VarCriterion::FPE
                                                                 : VarCriterion::Schwarz;
    const VarFit fit = fit_var(table.columns[0], table.columns[1], vcfg.value("max_order", 20), crit);
    json j;
    j["order"] = fit.order;
    j["intercept"] = {fit.intercept[0], fit.intercept[1]};
    json coefs = json::array();
    for (const Mat2& c : fit.coefficients)
        coefs.push_back({{c(0, 0), c(0, 1)}, {c(1, 0), c(1, 1)}});
    j["coefficients"] = coefs;
    j["criterion"] = vcfg.value("criterion", "schwarz");
    j["criterion_values"] = fit.criterion_values;
    ctx.write_result("var.json", j);
    SeriesTable res;
    res.names = {"e1", "e2"};
    res.columns = {fit.residuals[0], fit.residuals[1]};
    ctx.write_table("var_residuals.csv", res);
    ctx.summary["order"] = fit.order;
}

void cmd_tail_index(CommandContext& ctx) {
    const json& tcfg = ctx.config.at("tail");
    const std::uint64_t seed = ctx.config.at("seed").get<std::uint64_t>();
    TailIndexResult res;
    if (tcfg.value("mode", "univariate") == std::string("bivariate")) {
        res = tail_index_bivariate(bivariate_params_from_json(ctx.config.at("model")),
                                   innovation_from_json(ctx.config.at("innovation")),
                                   tcfg.value("n_len", 100), tcfg.value("replicates", 16000),
                                   tcfg.value("tol", 0.01), seed);
    } else {
        std::optional<double> df;
        if (ctx.config.contains("innovation_df") && !ctx.config.at("innovation_df").is_null())
            df = ctx.config.at("innovation_df").get<double>();
        res = tail_index_univariate(univariate_params_from_json(ctx.config.at("uni_model")), df,
                                    tcfg.value("n_mc", 1000000L), tcfg.value("tol", 1e-4), seed);
    }
    ctx.write_result("tail_index.json", tail_to_json(res));
    ctx.summary["alpha"] = res.alpha;
}

void cmd_lyapunov(CommandContext& ctx) {
    const BivariateGarchParams p = bivariate_params_from_json(ctx.config.at("model"));
    const Innovation innov = innovation_from_json(ctx.config.at("innovation"));
    const json& lcfg = ctx.config.at("lyapunov");
    const LyapunovEstimate est =
        lyapunov_exponent(p, innov, lcfg.value("n", 10000), lcfg.value("replicates", 20),
                          ctx.config.at("seed").get<std::uint64_t>());
    const StationarityReport stat = spectral_radius_check(p);
    json j;
    j["estimate"] = est.estimate;
    j["standard_error"] = est.standard_error;
    j["n"] = est.n;
    j["replicates"] = est.replicates;
    j["spectral_radius"] = stat.spectral_radius;
    j["sufficient_condition_met"] = stat.sufficient_condition_met;
    ctx.write_result("lyapunov.json", j);
    ctx.summary["estimate"] = est.estimate;
    ctx.summary["spectral_radius"] = stat.spectral_radius;
}

void cmd_qq(CommandContext& ctx) {
    const SeriesTable table = series_from_path(ctx);
    const double df = ctx.config.at("qq").value("df", 3.0);
    const auto pts = qq_points(table.columns.at(0), df);
    SeriesTable t;
    t.names = {"theoretical", "empirical"};
    t.columns.assign(2, {});
    for (const auto& [th, emp] : pts) {
        t.columns[0].push_back(th);
        t.columns[1].push_back(emp);
    }
    ctx.write_table("qq.csv", t);
}

void cmd_acf(CommandContext& ctx) {
    const SeriesTable table = series_from_path(ctx);
    require_two_columns(table, "acf");
    const int max_lag = ctx.config.at("acf").value("max_lag", 40);
    const auto panels = sample_ccf(table.columns[0], table.columns[1], max_lag);
    SeriesTable t;
    t.names = {"lag", "r11", "r12", "r21", "r22"};
    t.columns.assign(5, {});
    for (size_t h = 0; h < panels.size(); ++h) {
        t.columns[0].push_back(static_cast<double>(h));
        t.columns[1].push_back(panels[h](0, 0));
        t.columns[2].push_back(panels[h](0, 1));
        t.columns[3].push_back(panels[h](1, 0));
        t.columns[4].push_back(panels[h](1, 1));
    }
    ctx.write_table("acf.csv", t);
}

void cmd_clock_profile(CommandContext& ctx) {
    const SeriesTable table = series_from_path(ctx);
    const json& ccfg = ctx.config.at("clock");
    const auto profiles =
        exceedance_clock_profile(table.columns, ccfg.value("period", 78), ccfg.value("quantile", 0.99));
    SeriesTable t;
    t.names.push_back("slot");
    for (const auto& name : table.names) t.names.push_back("count_" + name);
    t.columns.assign(t.names.size(), {});
    for (size_t s = 0; s < profiles[0].size(); ++s) {
        t.columns[0].push_back(static_cast<double>(s));
        for (size_t c = 0; c < profiles.size(); ++c)
            t.columns[c + 1].push_back(static_cast<double>(profiles[c][s]));
    }
    ctx.write_table("clock_profile.csv", t);
}

// Rethrows stage errors labeled with the pipeline stage that raised them.
template <typename Fn>
auto pipeline_stage(const char* stage, Fn&& fn) {
    try {
        return fn();
    } catch (const std::exception& e) {
        throw std::runtime_error("pipeline stage [" + std::string(stage) + "]: " + e.what());
    }
}

void cmd_pipeline(CommandContext& ctx) {
    const std::uint64_t seed = ctx.config.at("seed").get<std::uint64_t>();

    SeriesTable table = pipeline_stage("load", [&] {
        return ctx.config.contains("input") ? series_from_path(ctx)
                                            : simulate_series(ctx.config, seed);
    });
    require_two_columns(table, "pipeline");
    SeriesTable raw;
    raw.names = {table.names[0], table.names[1]};
    raw.columns = {table.columns[0], table.columns[1]};
    raw.timestamp_name = table.timestamp_name;
    raw.timestamps = table.timestamps;
    ctx.write_table("series.csv", raw);

    // Stage: optional VAR pre-whitening.
    std::vector<double> g1 = raw.columns[0], g2 = raw.columns[1];
    if (ctx.config.at("var").value("enabled", false)) {
        const json& vcfg = ctx.config.at("var");
        const VarCriterion crit =
            vcfg.value("criterion", "schwarz") == std::string("fpe") ? VarCriterion::FPE
                                                                     : VarCriterion::Schwarz;
        const VarFit var =
            pipeline_stage("var", [&] { return fit_var(g1, g2, vcfg.value("max_order", 20), crit); });
        json vj;
        vj["order"] = var.order;
        vj["criterion_values"] = var.criterion_values;
        vj["intercept"] = {var.intercept[0], var.intercept[1]};
        ctx.write_result("var.json", vj);
        SeriesTable vres;
        vres.names = {"e1", "e2"};
        vres.columns = {var.residuals[0], var.residuals[1]};
        ctx.write_table("var_residuals.csv", vres);
        g1 = var.residuals[0];
        g2 = var.residuals[1];
        ctx.summary["var_order"] = var.order;
    }

    // Stage: bivariate QMLE and residual extraction.
    const bool grid = ctx.config.at("fit").value("grid_restart", false);
    const BivariateFit fit =
        pipeline_stage("fit", [&] { return fit_bivariate_qmle(g1, g2, std::nullopt, grid); });
    ctx.write_result("fit.json", fit_to_json(fit));
    SeriesTable rtab;
    rtab.names = {"sigma1", "sigma2", "z1", "z2"};
    rtab.columns = {fit.sigma[0], fit.sigma[1], fit.residuals[0], fit.residuals[1]};
    ctx.write_table("residuals.csv", rtab);

    // Stage: extremograms with permutation bands, raw and residual.
    SeriesTable raw_view;
    raw_view.names = raw.names;
    raw_view.columns = raw.columns;
    const ExtremogramResult ex_raw = pipeline_stage("extremogram", [&] {
        return compute_extremogram(raw_view, ctx.config, true, Rng::derive(seed, 101));
    });
    ctx.write_table("extremogram_raw.csv", extremogram_table(ex_raw));

    SeriesTable res_view;
    res_view.names = {"z1", "z2"};
    res_view.columns = {fit.residuals[0], fit.residuals[1]};
    const ExtremogramResult ex_res = pipeline_stage("residual extremogram", [&] {
        return compute_extremogram(res_view, ctx.config, true, Rng::derive(seed, 202));
    });
    ctx.write_table("extremogram_residuals.csv", extremogram_table(ex_res));

    // Stage: QQ points of the residuals.
    const double qq_df = ctx.config.at("qq").value("df", 3.0);
    for (int i = 0; i < 2; ++i) {
        const auto pts = qq_points(fit.residuals[i], qq_df);
        SeriesTable t;
        t.names = {"theoretical", "empirical"};
        t.columns.assign(2, {});
        for (const auto& [th, emp] : pts) {
            t.columns[0].push_back(th);
            t.columns[1].push_back(emp);
        }
        ctx.write_table("qq_" + std::to_string(i + 1) + ".csv", t);
    }

    // Stage: ACF/CCF and the seasonal exceedance profile of the raw series.
    {
        const int max_lag = ctx.config.at("acf").value("max_lag", 40);
        const auto panels = sample_ccf(raw.columns[0], raw.columns[1], max_lag);
        SeriesTable t;
        t.names = {"lag", "r11", "r12", "r21", "r22"};
        t.columns.assign(5, {});
        for (size_t h = 0; h < panels.size(); ++h) {
            t.columns[0].push_back(static_cast<double>(h));
            t.columns[1].push_back(panels[h](0, 0));
            t.columns[2].push_back(panels[h](0, 1));
            t.columns[3].push_back(panels[h](1, 0));
            t.columns[4].push_back(panels[h](1, 1));
        }
        ctx.write_table("acf.csv", t);
    }
    {
        const json& ccfg = ctx.config.at("clock");
        const auto profiles = exceedance_clock_profile(raw.columns, ccfg.value("period", 78),
                                                       ccfg.value("quantile", 0.99));
        SeriesTable t;
        t.names = {"slot", "count_1", "count_2"};
        t.columns.assign(3, {});
        for (size_t s = 0; s < profiles[0].size(); ++s) {
            t.columns[0].push_back(static_cast<double>(s));
            t.columns[1].push_back(static_cast<double>(profiles[0][s]));
            t.columns[2].push_back(static_cast<double>(profiles[1][s]));
        }
        ctx.write_table("clock_profile.csv", t);
    }

    ctx.summary["n"] = raw.rows();
    ctx.summary["loglik"] = fit.loglik;
    ctx.summary["converged"] = fit.converged;
    ctx.summary["boundary_estimate"] = fit.boundary_estimate;
    ctx.summary["rho_hat"] = fit.rho_hat;
    ctx.summary["spectral_radius"] = mean_transition(fit.params).perron_root();
    ctx.summary["raw_exceed_counts"] = ex_raw.exceed_counts;
}

}  // namespace

json default_config(const std::string& command) {
    json cfg;
    cfg["command"] = command;
    cfg["seed"] = 1;
    if (command == "simulate" || command == "pipeline")
        cfg["simulate"] = {{"n", 50000},
                           {"burn_in", 1000},
                           {"model", model_defaults()},
                           {"innovation", innovation_defaults()}};
    if (command == "extremogram" || command == "bands" || command == "pipeline")
        cfg["extremogram"] = extremogram_defaults();
    if (command == "fit-uni" || command == "fit-biv" || command == "pipeline")
        cfg["fit"] = {{"dist", "gaussian"}, {"grid_restart", false}};
    if (command == "var" || command == "pipeline")
        cfg["var"] = {{"enabled", command == "var"}, {"max_order", 20}, {"criterion", "schwarz"}};
    if (command == "tail-index")
        cfg["tail"] = {{"mode", "univariate"}, {"n_mc", 1000000},      {"tol", 1e-4},
                       {"n_len", 100},         {"replicates", 16000}};
    if (command == "lyapunov") cfg["lyapunov"] = {{"n", 10000}, {"replicates", 20}};
    if (command == "qq" || command == "pipeline") cfg["qq"] = {{"df", 3.0}};
    if (command == "acf" || command == "pipeline") cfg["acf"] = {{"max_lag", 40}};
    if (command == "clock-profile" || command == "pipeline")
        cfg["clock"] = {{"period", 78}, {"quantile", 0.99}};
    if (command == "tail-index" || command == "lyapunov") {
        cfg["model"] = model_defaults();
        cfg["innovation"] = innovation_defaults();
        cfg["uni_model"] = {{"a0", 1e-6}, {"a1", 0.1}, {"b1", 0.8}};
        cfg["innovation_df"] = nullptr;
    }
    return cfg;
}

json merge_config(json defaults, const json& user) {
    if (user.is_null()) return defaults;
    if (!user.is_object() || !defaults.is_object()) return user;
    for (const auto& [key, value] : user.items()) {
        if (defaults.contains(key) && defaults[key].is_object() && value.is_object())
            defaults[key] = merge_config(defaults[key], value);
        else
            defaults[key] = value;
    }
    return defaults;
}

BivariateGarchParams bivariate_params_from_json(const json& j) {
    BivariateGarchParams p;
    p.a0 = {j.at("a0").at(0).get<double>(), j.at("a0").at(1).get<double>()};
    for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k) {
            p.alpha(i, k) = j.at("alpha").at(i).at(k).get<double>();
            p.beta(i, k) = j.at("beta").at(i).at(k).get<double>();
        }
    p.validate();
    return p;
}

UnivariateGarchParams univariate_params_from_json(const json& j) {
    UnivariateGarchParams p{j.at("a0").get<double>(), j.at("a1").get<double>(),
                            j.at("b1").get<double>()};
    p.validate();
    return p;
}

Innovation innovation_from_json(const json& j) {
    Innovation innov;
    const std::string family = j.value("family", "gaussian");
    if (family == "gaussian") {
        innov.family = Innovation::Family::Gaussian;
    } else if (family == "student_t") {
        innov.family = Innovation::Family::StudentT;
        innov.df = j.at("df").get<double>();
    } else {
        throw std::invalid_argument("innovation family must be 'gaussian' or 'student_t'");
    }
    innov.rho = j.value("rho", 0.0);
    innov.validate();
    return innov;
}

json to_json(const BivariateGarchParams& p) {
    return json{{"a0", {p.a0[0], p.a0[1]}},
                {"alpha", {{p.alpha(0, 0), p.alpha(0, 1)}, {p.alpha(1, 0), p.alpha(1, 1)}}},
                {"beta", {{p.beta(0, 0), p.beta(0, 1)}, {p.beta(1, 0), p.beta(1, 1)}}}};
}

json to_json(const UnivariateGarchParams& p) {
    return json{{"a0", p.a0}, {"a1", p.a1}, {"b1", p.b1}};
}

json to_json(const Innovation& innov) {
    json j;
    j["family"] = innov.family == Innovation::Family::Gaussian ? "gaussian" : "student_t";
    if (innov.family == Innovation::Family::StudentT) j["df"] = innov.df;
    j["rho"] = innov.rho;
    return j;
}

ExtremogramConfig extremogram_config_from_json(const json& j) {
    ExtremogramConfig cfg;
    cfg.m = quantile_to_m(j.value("quantile", 0.98));
    cfg.max_lag = j.value("max_lag", 40);
    if (j.contains("set_a")) cfg.set_a = tail_set_from_json(j.at("set_a"));
    if (j.contains("set_b")) cfg.set_b = tail_set_from_json(j.at("set_b"));
    cfg.validate();
    return cfg;
}

json run_command(json config, const std::filesystem::path& out_dir) {
    if (config.contains("config")) config = config.at("config");  // manifest reuse
    if (!config.contains("command"))
        throw std::invalid_argument("run_command: config needs a 'command'");
    const std::string command = config.at("command").get<std::string>();
    config = merge_config(default_config(command), config);

    std::filesystem::create_directories(out_dir);
    CommandContext ctx{config, out_dir, {}, json::object()};

    if (command == "simulate")
        cmd_simulate(ctx);
    else if (command == "extremogram")
        cmd_extremogram(ctx, false);
    else if (command == "bands")
        cmd_extremogram(ctx, true);
    else if (command == "fit-uni")
        cmd_fit_uni(ctx);
    else if (command == "fit-biv")
        cmd_fit_biv(ctx);
    else if (command == "var")
        cmd_var(ctx);
    else if (command == "tail-index")
        cmd_tail_index(ctx);
    else if (command == "lyapunov")
        cmd_lyapunov(ctx);
    else if (command == "qq")
        cmd_qq(ctx);
    else if (command == "acf")
        cmd_acf(ctx);
    else if (command == "clock-profile")
        cmd_clock_profile(ctx);
    else if (command == "pipeline")
        cmd_pipeline(ctx);
    else
        throw std::invalid_argument("run_command: unknown command '" + command + "'");

    json manifest;
    manifest["tool"] = "extremo";
    manifest["version"] = kToolVersion;
    manifest["versions"] = {{"tool", kToolVersion}, {"manifest_format", 1}};
    manifest["command"] = command;
    manifest["seed"] = config.at("seed");
    manifest["config"] = config;
    manifest["outputs"] = ctx.outputs;
    manifest["summary"] = ctx.summary;
    write_json_file(out_dir / "manifest.json", manifest);
    return manifest;
}

}  // namespace extremo
