#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <qrobust/qrobust.hpp>

namespace {

using nlohmann::json;
using namespace qrobust;

// Master-seed fan-out: one named stream per random consumer so runs stay
// reproducible when stages are toggled on and off.
constexpr std::uint64_t stream_scenarios = 1;
constexpr std::uint64_t stream_sampler = 2;
constexpr std::uint64_t stream_qaoa = 3;

struct CommonOpts {
    std::string instance_path;
    std::string scenario_path;
    std::vector<double> gen_mu;
    std::vector<double> gen_sigma;
    std::uint64_t gen_count = 0;
    std::string measure = "regret";
    double lambda_demand = 1.0;
    double lambda_total = 0.0; // 0 = model default
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::string out_dir;
};

struct SamplerOpts {
    std::string kind = "sa";
    std::uint64_t shots = 2000;
    int sweeps = 1000;
    double beta_start = 0.1;
    double beta_end = 10.0;
    std::string beta_schedule = "geometric";
    double temperature = 0.1;
};

struct QaoaOpts {
    std::size_t beta_points = 32;
    std::size_t gamma_points = 64;
    std::uint64_t shots_per_scenario = 100;
    std::uint64_t total_shots = 0; // 0 = shots_per_scenario * scenario count
    std::string allocation = "uniform";
    bool normalize = false;
};

void add_common_options(CLI::App* cmd, CommonOpts& o, bool needs_instance) {
    if (needs_instance)
        cmd->add_option("--instance", o.instance_path, "instance JSON file")->required();
    cmd->add_option("--scenarios", o.scenario_path, "scenario set JSON file");
    cmd->add_option("--mu", o.gen_mu, "per-step means for generated scenarios")->delimiter(',');
    cmd->add_option("--sigma", o.gen_sigma, "per-step standard deviations")->delimiter(',');
    cmd->add_option("--count", o.gen_count, "number of scenarios to generate");
    cmd->add_option("--measure", o.measure, "robustness measure: worst_case | regret")
        ->check(CLI::IsMember({"worst_case", "worst-case", "regret"}));
    cmd->add_option("--lambda-demand", o.lambda_demand, "demand mismatch weight (unit commitment)");
    cmd->add_option("--lambda-total", o.lambda_total,
                    "total-energy window weight (EV charging, 0 = auto)");
    cmd->add_option("--seed", o.seed, "master seed");
    cmd->add_option("--threads", o.threads, "worker threads (0 = hardware)");
    cmd->add_option("--out-dir", o.out_dir, "output directory")->required();
}

Measure parse_measure(const std::string& name) {
    return name == "regret" ? Measure::regret : Measure::worst_case;
}

std::string measure_name(Measure m) {
    return m == Measure::regret ? "regret" : "worst_case";
}

// Everything the pipelines share: the instance (one of the two models), the
// scenario set, objective, expected-scenario QUBO, and layout info.
struct Pipeline {
    bool is_ucp = false;
    UcpInstance ucp;
    std::optional<UcpEncoding> ucp_enc;
    EvInstance ev;
    std::optional<EvLayout> ev_layout;
    ScenarioSet scenarios;
    json scenario_source;
    ScenarioObjective objective;
    QuboProblem expected_qubo{1};
    std::vector<double> expected;
};

ScenarioSet load_scenarios(const CommonOpts& o, json& source_out) {
    if (!o.scenario_path.empty()) {
        const ScenarioSet s = scenarios_from_json(json::parse(read_text_file(o.scenario_path)));
        source_out = {{"path", o.scenario_path}};
        return s;
    }
    if (o.gen_mu.empty() || o.gen_count == 0)
        throw std::invalid_argument(
            "provide --scenarios FILE or --mu/--sigma/--count for generation");
    std::vector<double> sigma = o.gen_sigma;
    if (sigma.empty()) sigma.assign(o.gen_mu.size(), 0.0);
    const std::uint64_t gen_seed = derive_seed(o.seed, stream_scenarios);
    source_out = {{"mu", o.gen_mu},
                  {"sigma", sigma},
                  {"count", o.gen_count},
                  {"derived_seed", gen_seed}};
    return generate_gaussian_scenarios(o.gen_mu, sigma, o.gen_count, gen_seed);
}

Pipeline build_pipeline(const CommonOpts& o) {
    Pipeline p;
    const json inst_json = json::parse(read_text_file(o.instance_path));
    p.scenarios = load_scenarios(o, p.scenario_source);
    p.expected = expected_scenario(p.scenarios);

    if (inst_json.contains("units")) {
        p.is_ucp = true;
        p.ucp = ucp_from_json(inst_json);
        UcpWeights weights;
        weights.demand = o.lambda_demand;
        UcpQubo built = encode_ucp(p.ucp, p.expected, weights);
        p.ucp_enc = built.encoding;
        p.expected_qubo = std::move(built.qubo);
        p.objective = make_ucp_objective(p.ucp, *p.ucp_enc, p.scenarios, o.lambda_demand);
    } else {
        p.is_ucp = false;
        p.ev = ev_from_json(inst_json);
        const std::optional<double> lam =
            o.lambda_total > 0.0 ? std::optional<double>(o.lambda_total) : std::nullopt;
        EvQubo built = encode_ev(p.ev, p.expected, lam);
        p.ev_layout = built.layout;
        p.expected_qubo = std::move(built.qubo);
        p.objective = make_ev_objective(p.ev, *p.ev_layout, p.scenarios);
    }
    return p;
}

std::vector<QuboProblem> scenario_qubos(const Pipeline& p, const CommonOpts& o) {
    std::vector<QuboProblem> out;
    out.reserve(p.scenarios.size());
    for (std::size_t k = 0; k < p.scenarios.size(); ++k) {
        if (p.is_ucp) {
            UcpWeights weights;
            weights.demand = o.lambda_demand;
            out.push_back(encode_ucp(p.ucp, p.scenarios.scenarios[k], weights).qubo);
        } else {
            const std::optional<double> lam =
                o.lambda_total > 0.0 ? std::optional<double>(o.lambda_total) : std::nullopt;
            out.push_back(encode_ev(p.ev, p.scenarios.scenarios[k], lam).qubo);
        }
    }
    return out;
}

json schedule_json(const Pipeline& p, const Bitstring& bits) {
    if (p.is_ucp) {
        const UcpSchedule s = decode_ucp(p.ucp, *p.ucp_enc, bits);
        json rows = json::array();
        for (std::size_t t = 0; t < s.on.size(); ++t)
            for (std::size_t i = 0; i < s.on[t].size(); ++i)
                rows.push_back({{"t", t},
                                {"unit", i},
                                {"on", static_cast<int>(s.on[t][i])},
                                {"start", static_cast<int>(s.start[t][i])},
                                {"power", s.power[t][i]}});
        return rows;
    }
    const EvSchedule s = decode_ev(*p.ev_layout, bits);
    return json{{"j", s.j}};
}

void write_outputs(const std::string& dir, const std::map<std::string, std::string>& files) {
    std::filesystem::create_directories(dir);
    for (const auto& [name, content] : files)
        write_text_file((std::filesystem::path(dir) / name).string(), content);
}

json common_manifest(const std::string& command, const CommonOpts& o, const Pipeline& p) {
    return {{"command", command},
            {"version", version},
            {"instance", o.instance_path},
            {"model", p.is_ucp ? "ucp" : "ev"},
            {"scenario_source", p.scenario_source},
            {"scenario_count", p.scenarios.size()},
            {"measure", o.measure == "worst-case" ? "worst_case" : o.measure},
            {"lambda_demand", o.lambda_demand},
            {"lambda_total", o.lambda_total},
            {"master_seed", o.seed},
            {"threads", o.threads}};
}

json solution_json(const Pipeline& p, const RobustnessReport& report) {
    const CandidateReport& c = report.best();
    return {{"selected", to_string(c.bits)},
            {"measure", measure_name(report.measure)},
            {"value", report.measure_of(c)},
            {"worst_case", c.worst_case},
            {"regret", c.regret},
            {"det_cost", c.det_cost},
            {"mismatch_regret", c.mismatch_regret},
            {"f_star", report.f_star},
            {"schedule", schedule_json(p, c.bits)}};
}

int run_oracle(const CommonOpts& o) {
    const Pipeline p = build_pipeline(o);
    const Measure measure = parse_measure(o.measure == "worst-case" ? "worst_case" : o.measure);
    const std::vector<double> f_star = scenario_optima(p.objective, p.scenarios);
    const RobustOptimum opt = robust_optimum(p.objective, p.scenarios, measure, f_star);

    json argmins = json::array();
    for (const auto& x : opt.argmins) argmins.push_back(to_string(x));
    const json solution = {{"optimum", to_string(opt.argmins.front())},
                           {"measure", measure_name(measure)},
                           {"value", opt.value},
                           {"argmins", argmins},
                           {"f_star", f_star},
                           {"schedule", schedule_json(p, opt.argmins.front())}};
    json manifest = common_manifest("oracle", o, p);
    manifest["outputs"] = {"solution.json", "manifest.json"};
    write_outputs(o.out_dir,
                  {{"solution.json", solution.dump(2) + "\n"},
                   {"manifest.json", manifest.dump(2) + "\n"}});
    return 0;
}

int run_harvest(const CommonOpts& o, const SamplerOpts& so) {
    const Pipeline p = build_pipeline(o);
    const Measure measure = parse_measure(o.measure == "worst-case" ? "worst_case" : o.measure);
    const std::vector<double> f_star = scenario_optima(p.objective, p.scenarios);
    const std::uint64_t sampler_seed = derive_seed(o.seed, stream_sampler);

    SamplerFn sampler;
    if (so.kind == "boltzmann") {
        sampler = make_boltzmann_sampler(so.temperature);
    } else {
        SaConfig cfg;
        cfg.num_sweeps = so.sweeps;
        cfg.beta_start = so.beta_start;
        cfg.beta_end = so.beta_end;
        cfg.schedule =
            so.beta_schedule == "linear" ? BetaSchedule::linear : BetaSchedule::geometric;
        cfg.threads = o.threads;
        sampler = make_sa_sampler(cfg);
    }

    const HarvestResult result = harvest(p.expected_qubo, sampler, so.shots, sampler_seed,
                                         p.objective, p.scenarios, measure, f_star, o.threads);

    json manifest = common_manifest("harvest", o, p);
    manifest["sampler"] = {{"kind", so.kind},          {"shots", so.shots},
                           {"sweeps", so.sweeps},      {"beta_start", so.beta_start},
                           {"beta_end", so.beta_end},  {"beta_schedule", so.beta_schedule},
                           {"temperature", so.temperature},
                           {"derived_seed", sampler_seed}};
    manifest["outputs"] = {"report.csv", "solution.json", "manifest.json"};

    std::map<std::string, std::string> files;
    files["report.csv"] = report_to_csv(result.report);
    files["manifest.json"] = manifest.dump(2) + "\n";
    if (result.report.selected)
        files["solution.json"] = solution_json(p, result.report).dump(2) + "\n";
    write_outputs(o.out_dir, files);

    if (!result.report.selected) {
        std::cerr << "harvest: no feasible candidate among " << result.report.candidates.size()
                  << " sampled bitstrings (report.csv written)\n";
        return 3;
    }
    return 0;
}

int run_qaoa_robust(const CommonOpts& o, const QaoaOpts& qo) {
    const Pipeline p = build_pipeline(o);
    const Measure measure = parse_measure(o.measure == "worst-case" ? "worst_case" : o.measure);
    const std::vector<double> f_star = scenario_optima(p.objective, p.scenarios);

    TwoStepConfig cfg;
    cfg.beta_grid = default_beta_grid(qo.beta_points);
    cfg.gamma_grid = default_gamma_grid(qo.gamma_points);
    cfg.total_shots = qo.total_shots != 0 ? qo.total_shots
                                          : qo.shots_per_scenario * p.scenarios.size();
    cfg.allocation =
        qo.allocation == "probability" ? Allocation::probability : Allocation::uniform;
    cfg.seed = derive_seed(o.seed, stream_qaoa);
    cfg.threads = o.threads;

    QuboProblem expected = p.expected_qubo;
    std::vector<QuboProblem> per_scenario = scenario_qubos(p, o);
    double scale = 1.0;
    if (qo.normalize) {
        // One shared scale (from the expected-value QUBO) keeps the scenario
        // Hamiltonians comparable under the tuned angles.
        scale = normalize_coefficients(expected).second;
        if (scale != 1.0) {
            auto rescale = [scale](QuboProblem& q) {
                QuboProblem scaled(q.num_vars());
                scaled.add_offset(q.offset() / scale);
                for (const auto& [i, v] : q.linear()) scaled.add_linear(i, v / scale);
                for (const auto& [ij, v] : q.quadratic())
                    scaled.add_quadratic(ij.first, ij.second, v / scale);
                for (const auto& [name, idx] : q.labels()) scaled.set_label(name, idx);
                q = std::move(scaled);
            };
            rescale(expected);
            for (auto& q : per_scenario) rescale(q);
        }
    }

    const TwoStepResult result =
        two_step_qaoa(expected, per_scenario, cfg, p.objective, p.scenarios, measure, f_star);

    json manifest = common_manifest("qaoa-robust", o, p);
    manifest["qaoa"] = {{"beta_points", qo.beta_points},
                        {"gamma_points", qo.gamma_points},
                        {"total_shots", cfg.total_shots},
                        {"shots_per_scenario", result.shots},
                        {"allocation", qo.allocation},
                        {"normalize", qo.normalize},
                        {"scale", scale},
                        {"derived_seed", cfg.seed},
                        {"best_beta", result.params.betas.front()},
                        {"best_gamma", result.params.gammas.front()}};
    manifest["outputs"] = {"report.csv", "landscape.csv", "solution.json", "manifest.json"};

    std::map<std::string, std::string> files;
    files["report.csv"] = report_to_csv(result.report);
    files["landscape.csv"] = landscape_to_csv(result.search);
    files["manifest.json"] = manifest.dump(2) + "\n";
    if (result.report.selected)
        files["solution.json"] = solution_json(p, result.report).dump(2) + "\n";
    write_outputs(o.out_dir, files);

    if (!result.report.selected) {
        std::cerr << "qaoa-robust: no feasible candidate among "
                  << result.report.candidates.size() << " pooled bitstrings (report.csv written)\n";
        return 3;
    }
    return 0;
}

int run_scenarios(const CommonOpts& o, std::size_t bins) {
    json source;
    const ScenarioSet s = load_scenarios(o, source);

    json manifest = {{"command", "scenarios"},
                     {"version", version},
                     {"scenario_source", source},
                     {"scenario_count", s.size()},
                     {"bins", bins},
                     {"master_seed", o.seed}};
    std::map<std::string, std::string> files;
    files["scenarios.json"] = scenarios_to_json(s).dump(2) + "\n";
    if (s.dim() == 2) {
        files["histogram.csv"] = histogram_to_csv(scenario_histogram(s, bins));
        manifest["outputs"] = {"scenarios.json", "histogram.csv", "manifest.json"};
    } else {
        manifest["outputs"] = {"scenarios.json", "manifest.json"};
    }
    files["manifest.json"] = manifest.dump(2) + "\n";
    write_outputs(o.out_dir, files);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"robust QUBO optimization workbench (annealing harvest + scenario QAOA)"};
    app.require_subcommand(1);

    CommonOpts oracle_opts, harvest_opts, qaoa_opts_common, scen_opts;
    SamplerOpts sampler_opts;
    QaoaOpts qaoa_opts;
    std::size_t bins = 5;

    CLI::App* cmd_oracle = app.add_subcommand("oracle", "exact robust optimum by enumeration");
    add_common_options(cmd_oracle, oracle_opts, true);

    CLI::App* cmd_harvest =
        app.add_subcommand("harvest", "sample the expected-value QUBO and rank by robustness");
    add_common_options(cmd_harvest, harvest_opts, true);
    cmd_harvest->add_option("--sampler", sampler_opts.kind, "sa | boltzmann")
        ->check(CLI::IsMember({"sa", "boltzmann"}));
    cmd_harvest->add_option("--shots", sampler_opts.shots, "shot budget");
    cmd_harvest->add_option("--sweeps", sampler_opts.sweeps, "annealing sweeps per shot");
    cmd_harvest->add_option("--beta-start", sampler_opts.beta_start, "initial inverse temperature");
    cmd_harvest->add_option("--beta-end", sampler_opts.beta_end, "final inverse temperature");
    cmd_harvest->add_option("--beta-schedule", sampler_opts.beta_schedule, "geometric | linear")
        ->check(CLI::IsMember({"geometric", "linear"}));
    cmd_harvest->add_option("--temperature", sampler_opts.temperature,
                            "Gibbs temperature (boltzmann sampler)");

    CLI::App* cmd_qaoa = app.add_subcommand(
        "qaoa-robust", "tune angles on the expected QUBO, sample every scenario circuit");
    add_common_options(cmd_qaoa, qaoa_opts_common, true);
    cmd_qaoa->add_option("--beta-points", qaoa_opts.beta_points, "beta grid resolution");
    cmd_qaoa->add_option("--gamma-points", qaoa_opts.gamma_points, "gamma grid resolution");
    cmd_qaoa->add_option("--shots-per-scenario", qaoa_opts.shots_per_scenario,
                         "shots for each scenario circuit");
    cmd_qaoa->add_option("--total-shots", qaoa_opts.total_shots,
                         "overall shot budget (overrides --shots-per-scenario)");
    cmd_qaoa->add_option("--allocation", qaoa_opts.allocation, "uniform | probability")
        ->check(CLI::IsMember({"uniform", "probability"}));
    cmd_qaoa->add_flag("--normalize", qaoa_opts.normalize,
                       "rescale coefficients by the expected QUBO's largest magnitude");

    CLI::App* cmd_scen =
        app.add_subcommand("scenarios", "generate or re-export a scenario set with histogram");
    cmd_scen->add_option("--scenarios", scen_opts.scenario_path, "scenario set JSON file");
    cmd_scen->add_option("--mu", scen_opts.gen_mu, "per-step means")->delimiter(',');
    cmd_scen->add_option("--sigma", scen_opts.gen_sigma, "per-step standard deviations")
        ->delimiter(',');
    cmd_scen->add_option("--count", scen_opts.gen_count, "number of scenarios");
    cmd_scen->add_option("--seed", scen_opts.seed, "master seed");
    cmd_scen->add_option("--bins", bins, "histogram bins per axis (two-step sets only)");
    cmd_scen->add_option("--out-dir", scen_opts.out_dir, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (cmd_oracle->parsed()) return run_oracle(oracle_opts);
        if (cmd_harvest->parsed()) return run_harvest(harvest_opts, sampler_opts);
        if (cmd_qaoa->parsed()) return run_qaoa_robust(qaoa_opts_common, qaoa_opts);
        if (cmd_scen->parsed()) return run_scenarios(scen_opts, bins);
    } catch (const SizeCapError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const InfeasibleError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const EmptyHarvestError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
