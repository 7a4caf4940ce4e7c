#include "ghsnet/benchmark.hpp"

#include "ghsnet/log.hpp"
#include "ghsnet/model.hpp"
#include "ghsnet/parallel.hpp"
#include "ghsnet/rng.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <tuple>

namespace ghs {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string format_setting(const char* key, double v) {
    std::ostringstream s;
    s << key << '=' << v;
    return s.str();
}

int sample_size(const ScenarioSettings& s, std::size_t k) {
    if (s.n.empty()) throw ContractError("scenario needs at least one sample size");
    return s.n[std::min(k, s.n.size() - 1)];
}

FitRecord score(const EcmFit& fit, const BoolMatrix& truth, double threshold) {
    const GraphEstimate g = extract_graph(fit.theta, threshold);
    const PrecisionRecall pr = precision_recall(g, truth);
    FitRecord r;
    r.sparsity = g.sparsity;
    r.precision = pr.precision;
    r.recall = pr.recall;
    return r;
}

// K truths sharing network 1's structure up to `disagreement`, with one dataset each.
struct Replicate {
    std::vector<TrueModel> truths;
    std::vector<Dataset> data;
};

Replicate simulate_replicate(const ScenarioSettings& s, std::size_t k_count, double disagreement,
                             std::uint64_t replicate_seed) {
    Replicate rep;
    rep.truths.push_back(make_true_model(s.p, s.range, replicate_seed));
    for (std::size_t k = 1; k < k_count; ++k)
        rep.truths.push_back(perturb_graph(rep.truths.front(), disagreement, network_seed(replicate_seed, k)));
    for (std::size_t k = 0; k < k_count; ++k)
        rep.data.push_back(sample_gaussian(rep.truths[k], sample_size(s, k), network_seed(replicate_seed, k)));
    return rep;
}

struct JointRun {
    std::vector<TauSelection> selections;
    std::vector<double> select_seconds;
    JointFit joint;
    double joint_seconds = 0.0;
};

JointRun run_joint(const ScenarioSettings& s, const Replicate& rep) {
    JointRun out;
    std::vector<double> taus;
    for (const Dataset& d : rep.data) {
        const auto start = Clock::now();
        out.selections.push_back(select_tau(d, s.grid, s.ecm, s.select));
        out.select_seconds.push_back(seconds_since(start));
        taus.push_back(out.selections.back().chosen_tau_sq);
    }
    JointOptions options;
    options.moment_mode = s.moment_mode;
    const auto start = Clock::now();
    out.joint = fit_joint(JointProblem(rep.data, taus), s.ecm, options);
    out.joint_seconds = seconds_since(start);
    return out;
}

std::vector<FitRecord> table1_replicate(const ScenarioSettings& s, int r) {
    const std::uint64_t seed = s.seed + static_cast<std::uint64_t>(r);
    const Replicate rep = simulate_replicate(s, 1, 0.0, seed);
    const auto start = Clock::now();
    const TauSelection sel = select_tau(rep.data.front(), s.grid, s.ecm, s.select);
    FitRecord rec = score(sel.fit, rep.truths.front().adjacency, s.select.edge_threshold);
    rec.seconds = seconds_since(start);
    rec.setting = "p=" + std::to_string(s.p) + ",n=" + std::to_string(sample_size(s, 0));
    rec.setting_value = static_cast<double>(s.p);
    rec.replicate = r;
    rec.method = "fastGHS";
    rec.network = 1;
    return {rec};
}

std::vector<FitRecord> table2_replicate(const ScenarioSettings& s, double d, int r) {
    const std::uint64_t seed = s.seed + static_cast<std::uint64_t>(r);
    const Replicate rep = simulate_replicate(s, 2, d, seed);
    const JointRun run = run_joint(s, rep);
    const double thr = s.select.edge_threshold;
    const GraphEstimate g1 = extract_graph(run.joint.fits[0].theta, thr);
    const GraphEstimate g2 = extract_graph(run.joint.fits[1].theta, thr);
    const double est = edge_disagreement(g1, g2);
    const double single_est = edge_disagreement(extract_graph(run.selections[0].fit.theta, thr),
                                                extract_graph(run.selections[1].fit.theta, thr));
    std::vector<FitRecord> out;
    for (std::size_t k = 0; k < 2; ++k) {
        FitRecord joint = score(run.joint.fits[k], rep.truths[k].adjacency, thr);
        joint.method = "jointGHS";
        joint.seconds = run.select_seconds[k] + run.joint_seconds / 2.0;
        joint.estimated_disagreement = est;
        FitRecord single = score(run.selections[k].fit, rep.truths[k].adjacency, thr);
        single.method = "fastGHS";
        single.seconds = run.select_seconds[k];
        single.estimated_disagreement = single_est;
        for (FitRecord* rec : {&single, &joint}) {
            rec->setting = format_setting("d", d);
            rec->setting_value = d;
            rec->replicate = r;
            rec->network = static_cast<int>(k) + 1;
            out.push_back(*rec);
        }
    }
    return out;
}

std::vector<FitRecord> joint_vs_single_replicate(const ScenarioSettings& s, int k_count, int r) {
    const std::uint64_t seed = s.seed + static_cast<std::uint64_t>(r);
    const double d = s.disagreements.empty() ? 0.0 : s.disagreements.front();
    const Replicate rep = simulate_replicate(s, static_cast<std::size_t>(k_count), d, seed);
    const JointRun run = run_joint(s, rep);
    const double thr = s.select.edge_threshold;
    std::vector<FitRecord> out;
    for (std::size_t k = 0; k < rep.data.size(); ++k) {
        FitRecord joint = score(run.joint.fits[k], rep.truths[k].adjacency, thr);
        joint.method = "jointGHS";
        joint.seconds = run.select_seconds[k] + run.joint_seconds / static_cast<double>(rep.data.size());

        const auto start = Clock::now();
        const EcmFit matched = fit_matched_sparsity(rep.data[k].stats(), joint.sparsity, s.ecm, s.grid, thr);
        FitRecord single = score(matched, rep.truths[k].adjacency, thr);
        single.method = "fastGHS-matched";
        single.seconds = seconds_since(start);
        for (FitRecord* rec : {&single, &joint}) {
            rec->setting = format_setting("K", k_count);
            rec->setting_value = k_count;
            rec->replicate = r;
            rec->network = static_cast<int>(k) + 1;
            out.push_back(*rec);
        }
    }
    return out;
}

std::vector<FitRecord> auprc_replicate(const ScenarioSettings& s, double d, int r, const CurveSink& curves) {
    const std::uint64_t seed = s.seed + static_cast<std::uint64_t>(r);
    const Replicate rep = simulate_replicate(s, 2, d, seed);
    const JointRun run = run_joint(s, rep);
    const EcmFit& fit = run.joint.fits.front();
    const PrCurve curve =
        cutoff_pr_curve(partial_correlations(fit.theta).cwiseAbs(), rep.truths.front().adjacency, 0.3);
    FitRecord rec = score(fit, rep.truths.front().adjacency, s.select.edge_threshold);
    rec.setting = format_setting("d", d);
    rec.setting_value = d;
    rec.replicate = r;
    rec.method = "jointGHS";
    rec.network = 1;
    rec.seconds = run.select_seconds.front() + run.joint_seconds / 2.0;
    rec.auprc = curve.auprc;
    if (curves) curves(rec.setting, r, curve);
    return {rec};
}

struct MeanSd {
    double mean = 0.0;
    double sd = 0.0;
};

MeanSd mean_sd(const std::vector<double>& v) {
    MeanSd out;
    if (v.empty()) return out;
    for (double x : v) out.mean += x;
    out.mean /= static_cast<double>(v.size());
    if (v.size() > 1) {
        for (double x : v) out.sd += (x - out.mean) * (x - out.mean);
        out.sd = std::sqrt(out.sd / static_cast<double>(v.size() - 1));
    }
    return out;
}

std::string cell(const std::vector<double>& v) {
    const MeanSd m = mean_sd(v);
    std::ostringstream s;
    s << std::fixed << std::setprecision(4) << m.mean << " (" << m.sd << ")";
    return s.str();
}

} // namespace

Scenario parse_scenario(const std::string& name) {
    if (name == "table1") return Scenario::Table1;
    if (name == "table2") return Scenario::Table2;
    if (name == "joint_vs_single") return Scenario::JointVsSingle;
    if (name == "auprc") return Scenario::Auprc;
    throw ContractError("unknown scenario '" + name + "' (expected table1, table2, joint_vs_single or auprc)");
}

std::string scenario_name(Scenario s) {
    switch (s) {
    case Scenario::Table1: return "table1";
    case Scenario::Table2: return "table2";
    case Scenario::JointVsSingle: return "joint_vs_single";
    case Scenario::Auprc: return "auprc";
    }
    return "?";
}

ScenarioSettings ScenarioSettings::defaults(Scenario s) {
    ScenarioSettings out;
    switch (s) {
    case Scenario::Table1:
        out.n = {200};
        out.replicates = 20;
        break;
    case Scenario::Table2:
        out.n = {50, 80};
        out.replicates = 25;
        out.disagreements = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
        break;
    case Scenario::JointVsSingle:
        out.n = {80};
        out.replicates = 20;
        out.disagreements = {0.0};
        out.ks = {2, 4};
        break;
    case Scenario::Auprc:
        out.n = {80, 50};
        out.replicates = 25;
        out.disagreements = {0.0};
        break;
    }
    return out;
}

std::uint64_t network_seed(std::uint64_t replicate_seed, std::size_t k) {
    return mix_seed(replicate_seed * 1000003ULL + static_cast<std::uint64_t>(k));
}

EcmFit fit_matched_sparsity(const ScatterStats& stats, double target, const EcmConfig& config, const TauGrid& grid,
                            double edge_threshold) {
    grid.validate();
    const double high = grid.values.back();
    const double low = grid.values.front();
    const double step = std::pow(10.0, 1.0 / 8.0);
    std::optional<EcmFit> best;
    double best_gap = std::numeric_limits<double>::infinity();
    std::optional<WarmStart> warm;
    for (double tau = high; tau >= low * (1.0 - 1e-12); tau /= step) {
        EcmConfig c = config;
        c.tau_mode = TauMode::Fixed;
        c.tau_sq = tau;
        FitOptions options;
        options.warm_start = warm;
        EcmFit fit = fit_single(stats, c, options);
        const double sparsity = extract_graph(fit.theta, edge_threshold).sparsity;
        const double gap = std::abs(sparsity - target);
        warm = WarmStart{fit.theta.matrix(), Matrix::Ones(stats.p(), stats.p())};
        if (gap < best_gap) {
            best_gap = gap;
            best = std::move(fit);
        }
        if (sparsity <= target) break;
    }
    return std::move(*best);
}

std::vector<FitRecord> run_scenario(Scenario s, const ScenarioSettings& settings, const CurveSink& curves) {
    if (settings.replicates < 1) throw ContractError("replicates must be >= 1");
    if (settings.p < 3) throw ContractError("p must be >= 3");
    settings.ecm.validate();
    settings.grid.validate();

    // One task per (setting, replicate); results land in fixed slots so the order is deterministic.
    std::vector<std::pair<double, int>> tasks;
    std::vector<double> levels{0.0};
    if (s == Scenario::Table2 || s == Scenario::Auprc) levels = settings.disagreements;
    if (s == Scenario::JointVsSingle) {
        levels.clear();
        for (int k : settings.ks) {
            if (k < 1) throw ContractError("K must be >= 1");
            levels.push_back(k);
        }
    }
    if (levels.empty()) throw ContractError("scenario has no settings to run");
    for (double level : levels)
        for (int r = 0; r < settings.replicates; ++r) tasks.emplace_back(level, r);

    std::vector<std::vector<FitRecord>> slots(tasks.size());
    std::mutex curve_mutex;
    const CurveSink locked = [&](const std::string& setting, int r, const PrCurve& c) {
        std::lock_guard lock(curve_mutex);
        curves(setting, r, c);
    };
    parallel_for(tasks.size(), settings.threads, [&](std::size_t t) {
        const auto [level, r] = tasks[t];
        switch (s) {
        case Scenario::Table1: slots[t] = table1_replicate(settings, r); break;
        case Scenario::Table2: slots[t] = table2_replicate(settings, level, r); break;
        case Scenario::JointVsSingle:
            slots[t] = joint_vs_single_replicate(settings, static_cast<int>(level), r);
            break;
        case Scenario::Auprc: slots[t] = auprc_replicate(settings, level, r, curves ? locked : CurveSink{}); break;
        }
        if (log_enabled(LogLevel::Info)) {
            log_message(LogLevel::Info, scenario_name(s) + ": finished " + slots[t].front().setting + " replicate " +
                                            std::to_string(r));
        }
    });

    std::vector<FitRecord> out;
    for (auto& slot : slots)
        for (auto& rec : slot) out.push_back(std::move(rec));
    return out;
}

void write_report_csv(std::ostream& out, Scenario s, const std::vector<FitRecord>& records) {
    using Key = std::tuple<double, std::string, std::string, int>;
    struct Group {
        std::vector<double> sparsity, precision, recall, seconds, disagreement, auprc;
    };
    std::map<Key, Group> groups;
    std::vector<Key> order;
    for (const FitRecord& r : records) {
        const Key key{r.setting_value, r.setting, r.method, r.network};
        auto [it, inserted] = groups.try_emplace(key);
        if (inserted) order.push_back(key);
        Group& g = it->second;
        g.sparsity.push_back(r.sparsity);
        g.precision.push_back(r.precision);
        g.recall.push_back(r.recall);
        g.seconds.push_back(r.seconds);
        if (!std::isnan(r.estimated_disagreement)) g.disagreement.push_back(r.estimated_disagreement);
        if (!std::isnan(r.auprc)) g.auprc.push_back(r.auprc);
    }
    out << "scenario,setting,method,network,replicates,sparsity,precision,recall,est_disagreement,auprc_0.3,"
           "seconds_per_fit\n";
    for (const Key& key : order) {
        const Group& g = groups.at(key);
        out << scenario_name(s) << ",\"" << std::get<1>(key) << "\"," << std::get<2>(key) << ',' << std::get<3>(key)
            << ',' << g.sparsity.size() << ',' << cell(g.sparsity) << ',' << cell(g.precision) << ','
            << cell(g.recall) << ',' << (g.disagreement.empty() ? "" : cell(g.disagreement)) << ','
            << (g.auprc.empty() ? "" : cell(g.auprc)) << ',' << std::fixed << std::setprecision(3)
            << mean_sd(g.seconds).mean << '\n';
        out.unsetf(std::ios::fixed);
    }
}

} // namespace ghs
