#include "ghsnet/benchmark.hpp"
#include "ghsnet/bootstrap.hpp"
#include "ghsnet/ecm.hpp"
#include "ghsnet/io.hpp"
#include "ghsnet/joint.hpp"
#include "ghsnet/log.hpp"
#include "ghsnet/metrics.hpp"
#include "ghsnet/model.hpp"
#include "ghsnet/parallel.hpp"
#include "ghsnet/simulate.hpp"
#include "ghsnet/tau_select.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using namespace ghs;

namespace {

struct FitFlags {
    std::vector<double> tau_sq;
    std::string tau_mode = "fixed";
    std::string moment_mode = "paper";
    double tol = 1e-3;
    int max_iter = 10000;
    double aic_epsilon = 0.1;
    double edge_threshold = kDefaultEdgeThreshold;
    int threads = 1;
};

void add_fit_flags(CLI::App* cmd, FitFlags& f, bool joint) {
    cmd->add_option("--tau-sq", f.tau_sq,
                    joint ? "Fixed tau^2, one value or one per network; skips AIC selection"
                          : "Fixed tau^2 (skips AIC selection), or the starting value with --tau-mode updated")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--tol", f.tol, "Convergence tolerance on max |Theta change|")->check(CLI::PositiveNumber);
    cmd->add_option("--max-iter", f.max_iter, "Iteration cap per fit")->check(CLI::PositiveNumber);
    cmd->add_option("--aic-epsilon", f.aic_epsilon, "AIC stabilisation tolerance")->check(CLI::PositiveNumber);
    cmd->add_option("--edge-threshold", f.edge_threshold, "Edge threshold on |partial correlation|")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--threads", f.threads, "Worker threads")->check(CLI::PositiveNumber);
    if (joint) {
        cmd->add_option("--moment-mode", f.moment_mode, "E[1/nu] form of the joint E-step")
            ->check(CLI::IsMember({"paper", "invgamma"}));
    } else {
        cmd->add_option("--tau-mode", f.tau_mode, "Hold tau^2 fixed or re-estimate it every iteration")
            ->check(CLI::IsMember({"fixed", "updated"}));
    }
}

EcmConfig ecm_config(const FitFlags& f) {
    EcmConfig c;
    c.tol = f.tol;
    c.max_iter = f.max_iter;
    return c;
}

MomentMode moment_mode(const std::string& s) {
    return s == "invgamma" ? MomentMode::InvGammaMoment : MomentMode::PaperPrinted;
}

Json aic_trace_json(const TauSelection& sel) {
    Json trace = Json::array();
    for (const auto& [tau, aic] : sel.aic_trace) trace.push_back({{"tau_sq", tau}, {"aic", aic}});
    return trace;
}

Json metrics_json(const EcmFit& fit, const TrueModel& truth, double threshold) {
    const GraphEstimate g = extract_graph(fit.theta, threshold);
    if (truth.p() != g.p()) throw ContractError("truth has p=" + std::to_string(truth.p()) + " but the data has p=" +
                                                std::to_string(g.p()));
    const PrecisionRecall pr = precision_recall(g, truth.adjacency);
    return Json{{"precision", pr.precision}, {"recall", pr.recall}, {"sparsity", g.sparsity},
                {"true_sparsity", sparsity_of(truth.adjacency)}};
}

// ---------------------------------------------------------------- simulate

struct SimulateFlags {
    Index p = 50;
    std::vector<int> n{100};
    int k = 1;
    double disagreement = 0.0;
    int replicates = 1;
    std::uint64_t seed = 1;
    double partial_low = 0.1;
    double partial_high = 0.2;
    std::string out_dir;
};

std::string rep_dir_name(int r) {
    std::ostringstream s;
    s << "rep_" << std::setw(3) << std::setfill('0') << r + 1;
    return s.str();
}

int cmd_simulate(const SimulateFlags& f) {
    if (f.p < 3) throw ContractError("--p must be >= 3");
    if (f.k < 1) throw ContractError("--k must be >= 1");
    if (f.replicates < 1) throw ContractError("--replicates must be >= 1");
    if (!(f.disagreement >= 0.0 && f.disagreement <= 1.0)) throw ContractError("--disagreement must be in [0, 1]");
    for (int n : f.n)
        if (n < 2) throw ContractError("--n values must be >= 2");
    const PartialRange range{f.partial_low, f.partial_high};
    const fs::path root(f.out_dir);

    Json replicates = Json::array();
    for (int r = 0; r < f.replicates; ++r) {
        const std::uint64_t seed = f.seed + static_cast<std::uint64_t>(r);
        std::vector<TrueModel> truths{make_true_model(f.p, range, seed)};
        for (int k = 1; k < f.k; ++k)
            truths.push_back(perturb_graph(truths.front(), f.disagreement, network_seed(seed, static_cast<std::size_t>(k))));
        Json networks = Json::array();
        for (int k = 0; k < f.k; ++k) {
            const int n = f.n[std::min(static_cast<std::size_t>(k), f.n.size() - 1)];
            const Dataset data = sample_gaussian(truths[static_cast<std::size_t>(k)], n,
                                                 network_seed(seed, static_cast<std::size_t>(k)));
            const std::string stem = rep_dir_name(r) + "/network_" + std::to_string(k + 1);
            write_csv(root / (stem + ".csv"), data.observations(), data.names());
            write_json(root / (stem + "_truth.json"), true_model_to_json(truths[static_cast<std::size_t>(k)]));
            networks.push_back({{"data", stem + ".csv"},
                                {"truth", stem + "_truth.json"},
                                {"n", n},
                                {"edges", count_edges(truths[static_cast<std::size_t>(k)].adjacency)},
                                {"disagreement_with_network_1",
                                 edge_disagreement(truths.front().adjacency, truths[static_cast<std::size_t>(k)].adjacency)}});
        }
        replicates.push_back({{"replicate", r + 1}, {"seed", seed}, {"networks", std::move(networks)}});
    }
    const Json manifest{{"p", f.p},
                        {"k", f.k},
                        {"n", f.n},
                        {"disagreement", f.disagreement},
                        {"partial_range", {f.partial_low, f.partial_high}},
                        {"base_seed", f.seed},
                        {"replicates", std::move(replicates)}};
    write_json(root / "manifest.json", manifest);
    std::cout << "wrote " << f.replicates << " replicate(s) x " << f.k << " network(s) to " << root.string() << '\n';
    return 0;
}

// ---------------------------------------------------------------- fit

struct FitCommand {
    std::string input;
    std::string truth;
    std::string out_dir = ".";
    FitFlags flags;
};

int cmd_fit(const FitCommand& c) {
    const Dataset data = read_csv(fs::path(c.input));
    const FitFlags& f = c.flags;
    if (f.tau_sq.size() > 1) throw ContractError("fit takes a single --tau-sq value");
    EcmConfig config = ecm_config(f);

    Json out;
    std::optional<EcmFit> fit;
    if (f.tau_mode == "updated") {
        config.tau_mode = TauMode::Updated;
        config.tau_sq = f.tau_sq.empty() ? 1.0 : f.tau_sq.front();
        fit = fit_single(data, config);
        out["tau_source"] = "updated";
        out["tau_sq_initial"] = config.tau_sq;
    } else if (!f.tau_sq.empty()) {
        config.tau_sq = f.tau_sq.front();
        fit = fit_single(data, config);
        out["tau_source"] = "fixed";
    } else {
        TauSelectOptions options;
        options.edge_threshold = f.edge_threshold;
        TauSelection sel = select_tau(data, TauGrid::standard(f.aic_epsilon), config, options);
        out["tau_source"] = "aic";
        out["aic_trace"] = aic_trace_json(sel);
        out["aic_stabilized"] = sel.stabilized;
        fit = std::move(sel.fit);
    }
    out.update(fit_to_json(*fit, f.edge_threshold, data.names()));
    out["n"] = data.n();
    out["input"] = c.input;
    if (!c.truth.empty()) out["metrics"] = metrics_json(*fit, true_model_from_json(read_json(c.truth)), f.edge_threshold);

    const fs::path path = fs::path(c.out_dir) / "fit.json";
    write_json(path, out);
    std::cout << "tau^2 = " << fit->tau_sq.value() << " (" << out["tau_source"].get<std::string>() << "), "
              << out["edges"].size() << " edges, sparsity " << out["sparsity"].get<double>() << ", "
              << fit->iterations << " iterations" << (fit->converged ? "" : " (not converged)") << '\n';
    if (out.contains("metrics")) {
        std::cout << "precision " << out["metrics"]["precision"].get<double>() << ", recall "
                  << out["metrics"]["recall"].get<double>() << '\n';
    }
    std::cout << "wrote " << path.string() << '\n';
    return 0;
}

// ---------------------------------------------------------------- fit-joint

struct FitJointCommand {
    std::vector<std::string> inputs;
    std::vector<std::string> truths;
    std::string out_dir = ".";
    bool bootstrap = false;
    int bootstrap_samples = 100;
    std::uint64_t seed = 1;
    FitFlags flags;
};

int cmd_fit_joint(const FitJointCommand& c) {
    const FitFlags& f = c.flags;
    const std::size_t K = c.inputs.size();
    if (!c.truths.empty() && c.truths.size() != K) throw ContractError("give one --truth per input file");
    if (f.tau_sq.size() > 1 && f.tau_sq.size() != K) throw ContractError("give one --tau-sq value or one per network");

    std::vector<Dataset> data;
    for (const std::string& in : c.inputs) {
        data.push_back(read_csv(fs::path(in)));
        if (data.back().names() != data.front().names()) {
            throw ContractError("header mismatch: '" + in + "' does not match '" + c.inputs.front() + "'");
        }
    }

    const EcmConfig config = ecm_config(f);
    std::vector<double> taus(K);
    std::vector<std::optional<TauSelection>> selections(K);
    if (!f.tau_sq.empty()) {
        for (std::size_t k = 0; k < K; ++k) taus[k] = f.tau_sq[f.tau_sq.size() == 1 ? 0 : k];
    } else {
        TauSelectOptions options;
        options.edge_threshold = f.edge_threshold;
        parallel_for(K, f.threads, [&](std::size_t k) {
            try {
                selections[k] = select_tau(data[k], TauGrid::standard(f.aic_epsilon), config, options);
            } catch (const std::exception& e) {
                throw DomainError("network " + std::to_string(k + 1) + ": " + e.what());
            }
            taus[k] = selections[k]->chosen_tau_sq;
        });
    }

    JointOptions joint_options;
    joint_options.moment_mode = moment_mode(f.moment_mode);
    const JointFit joint = fit_joint(JointProblem(data, taus), config, joint_options);

    Json networks = Json::array();
    for (std::size_t k = 0; k < K; ++k) {
        Json net = fit_to_json(joint.fits[k], f.edge_threshold, data[k].names());
        net["input"] = c.inputs[k];
        net["n"] = data[k].n();
        net["tau_source"] = selections[k] ? "aic" : "fixed";
        if (selections[k]) {
            net["aic_trace"] = aic_trace_json(*selections[k]);
            net["aic_stabilized"] = selections[k]->stabilized;
        }
        if (!c.truths.empty())
            net["metrics"] = metrics_json(joint.fits[k], true_model_from_json(read_json(c.truths[k])), f.edge_threshold);

        if (c.bootstrap) {
            const std::vector<Edge> edges = extract_graph(joint.fits[k].theta, f.edge_threshold).edges();
            if (edges.empty()) {
                log_message(LogLevel::Warn, "network " + std::to_string(k + 1) + ": no joint edges to check");
                net["bootstrap"] = nullptr;
            } else {
                BootstrapOptions options;
                options.samples = c.bootstrap_samples;
                options.threads = f.threads;
                options.seed = mix_seed(c.seed + k);
                EcmConfig boot_config = config;
                boot_config.tau_sq = taus[k];
                const BootstrapReport report =
                    bootstrap_edge_check(data[k], joint.fits[k].theta, edges, boot_config, options);
                net["bootstrap"] = bootstrap_report_to_json(report, data[k].names());
                std::cout << "network " << k + 1 << " (" << c.inputs[k] << ")\n";
                print_report(std::cout, report, data[k].names());
            }
        }
        networks.push_back(std::move(net));
    }

    const Json out{{"k", K},
                   {"moment_mode", f.moment_mode},
                   {"iterations", joint.iterations},
                   {"converged", joint.converged},
                   {"objective_trace", joint.objective_trace},
                   {"shared_inv_nu", matrix_to_json(joint.shared_inv_nu)},
                   {"networks", std::move(networks)}};
    const fs::path path = fs::path(c.out_dir) / "joint_fit.json";
    write_json(path, out);
    for (std::size_t k = 0; k < K; ++k) {
        std::cout << "network " << k + 1 << ": tau^2 = " << taus[k] << ", "
                  << out["networks"][k]["edges"].size() << " edges, sparsity "
                  << out["networks"][k]["sparsity"].get<double>() << '\n';
    }
    std::cout << joint.iterations << " joint iterations" << (joint.converged ? "" : " (not converged)") << '\n';
    std::cout << "wrote " << path.string() << '\n';
    return 0;
}

// ---------------------------------------------------------------- benchmark

struct BenchmarkCommand {
    std::string scenario;
    std::optional<Index> p;
    std::vector<int> n;
    std::vector<int> k;
    std::vector<double> disagreement;
    std::optional<int> replicates;
    std::uint64_t seed = 1;
    std::string out_dir;
    FitFlags flags;
};

int cmd_benchmark(const BenchmarkCommand& c) {
    const Scenario scenario = parse_scenario(c.scenario);
    ScenarioSettings s = ScenarioSettings::defaults(scenario);
    if (c.p) s.p = *c.p;
    if (!c.n.empty()) s.n = c.n;
    if (!c.k.empty()) s.ks = c.k;
    if (!c.disagreement.empty()) s.disagreements = c.disagreement;
    if (c.replicates) s.replicates = *c.replicates;
    for (double d : s.disagreements)
        if (!(d >= 0.0 && d <= 1.0)) throw ContractError("--disagreement values must be in [0, 1]");
    s.seed = c.seed;
    s.threads = c.flags.threads;
    s.ecm = ecm_config(c.flags);
    s.grid = TauGrid::standard(c.flags.aic_epsilon);
    s.select.edge_threshold = c.flags.edge_threshold;
    s.moment_mode = moment_mode(c.flags.moment_mode);

    CurveSink sink;
    if (!c.out_dir.empty() && scenario == Scenario::Auprc) {
        sink = [&](const std::string& setting, int r, const PrCurve& curve) {
            const fs::path path = fs::path(c.out_dir) / "curves" / (setting + "_" + rep_dir_name(r) + ".csv");
            fs::create_directories(path.parent_path());
            std::ofstream out(path);
            write_pr_curve_csv(out, curve);
        };
    }
    const std::vector<FitRecord> records = run_scenario(scenario, s, sink);
    write_report_csv(std::cout, scenario, records);
    if (!c.out_dir.empty()) {
        fs::create_directories(c.out_dir);
        std::ofstream report(fs::path(c.out_dir) / (scenario_name(scenario) + "_report.csv"));
        write_report_csv(report, scenario, records);
        std::ofstream raw(fs::path(c.out_dir) / (scenario_name(scenario) + "_replicates.csv"));
        raw << "setting,replicate,method,network,sparsity,precision,recall,est_disagreement,auprc_0.3,seconds\n";
        raw << std::setprecision(10);
        for (const FitRecord& r : records) {
            raw << '"' << r.setting << "\"," << r.replicate + 1 << ',' << r.method << ',' << r.network << ','
                << r.sparsity << ',' << r.precision << ',' << r.recall << ',';
            if (!std::isnan(r.estimated_disagreement)) raw << r.estimated_disagreement;
            raw << ',';
            if (!std::isnan(r.auprc)) raw << r.auprc;
            raw << ',' << r.seconds << '\n';
        }
    }
    return 0;
}

void print_error(const char* type, const std::string& message) {
    std::cerr << Json{{"error", {{"type", type}, {"message", message}}}}.dump() << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Graphical horseshoe network estimation (single and joint ECM)"};
    app.require_subcommand(1);

    SimulateFlags sim;
    auto* simulate = app.add_subcommand("simulate", "Simulate scale-free networks and Gaussian data");
    simulate->add_option("--p", sim.p, "Number of variables");
    simulate->add_option("--n", sim.n, "Sample size, or one per network");
    simulate->add_option("--k", sim.k, "Number of networks");
    simulate->add_option("--disagreement", sim.disagreement, "Fraction of network-1 edges moved in networks 2..K");
    simulate->add_option("--replicates", sim.replicates, "Number of replicates");
    simulate->add_option("--seed", sim.seed, "Base seed; replicate r uses seed + r");
    simulate->add_option("--partial-low", sim.partial_low, "Smallest simulated partial correlation");
    simulate->add_option("--partial-high", sim.partial_high, "Largest simulated partial correlation");
    simulate->add_option("--out-dir", sim.out_dir, "Run directory")->required();

    FitCommand fit;
    auto* fit_cmd = app.add_subcommand("fit", "Fit one network");
    fit_cmd->add_option("input", fit.input, "CSV with a header row, one sample per row")->required();
    fit_cmd->add_option("--truth", fit.truth, "Truth JSON written by simulate, for precision and recall");
    fit_cmd->add_option("--out-dir", fit.out_dir, "Directory for fit.json");
    add_fit_flags(fit_cmd, fit.flags, false);

    FitJointCommand joint;
    auto* joint_cmd = app.add_subcommand("fit-joint", "Fit K networks jointly");
    joint_cmd->add_option("inputs", joint.inputs, "One CSV per network, all with the same header")->required();
    joint_cmd->add_option("--truth", joint.truths, "Truth JSON per network");
    joint_cmd->add_option("--out-dir", joint.out_dir, "Directory for joint_fit.json");
    joint_cmd->add_flag("--bootstrap-check", joint.bootstrap, "Run the Bayesian bootstrap check on every network");
    joint_cmd->add_option("--bootstrap-samples", joint.bootstrap_samples, "Bootstrap samples B (>= 50)");
    joint_cmd->add_option("--seed", joint.seed, "Bootstrap seed");
    add_fit_flags(joint_cmd, joint.flags, true);

    BenchmarkCommand bench;
    auto* bench_cmd = app.add_subcommand("benchmark", "Run a simulation study and print a CSV report");
    bench_cmd->add_option("--scenario", bench.scenario, "table1, table2, joint_vs_single or auprc")->required();
    bench_cmd->add_option("--p", bench.p, "Number of variables");
    bench_cmd->add_option("--n", bench.n, "Sample size per network");
    bench_cmd->add_option("--k", bench.k, "Numbers of networks (joint_vs_single)");
    bench_cmd->add_option("--disagreement", bench.disagreement, "Simulated disagreement levels");
    bench_cmd->add_option("--replicates", bench.replicates, "Replicates per setting");
    bench_cmd->add_option("--seed", bench.seed, "Base seed; replicate r uses seed + r");
    bench_cmd->add_option("--out-dir", bench.out_dir, "Directory for report, per-replicate rows and PR curves");
    add_fit_flags(bench_cmd, bench.flags, true);
    bench_cmd->remove_option(bench_cmd->get_option("--tau-sq"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        print_error("contract", e.what());
        return 2;
    }

    try {
        if (*simulate) return cmd_simulate(sim);
        if (*fit_cmd) return cmd_fit(fit);
        if (*joint_cmd) return cmd_fit_joint(joint);
        if (*bench_cmd) return cmd_benchmark(bench);
    } catch (const ContractError& e) {
        print_error("contract", e.what());
        return 2;
    } catch (const FormatError& e) {
        print_error("format", e.what());
        return 2;
    } catch (const DomainError& e) {
        print_error("domain", e.what());
        return 3;
    } catch (const std::exception& e) {
        print_error("internal", e.what());
        return 1;
    }
    return 0;
}
