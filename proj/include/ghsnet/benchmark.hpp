#pragma once

#include "ghsnet/ecm.hpp"
#include "ghsnet/joint.hpp"
#include "ghsnet/metrics.hpp"
#include "ghsnet/simulate.hpp"
#include "ghsnet/tau_select.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace ghs {

enum class Scenario { Table1, Table2, JointVsSingle, Auprc };

Scenario parse_scenario(const std::string& name);
std::string scenario_name(Scenario s);

struct ScenarioSettings {
    Index p = 50;
    /// Sample size per network; the last entry is reused for the remaining networks.
    std::vector<int> n;
    int replicates = 20;
    std::uint64_t seed = 1;
    int threads = 1;
    PartialRange range;
    EcmConfig ecm;
    TauGrid grid = TauGrid::standard();
    TauSelectOptions select;
    MomentMode moment_mode = MomentMode::PaperPrinted;
    /// Simulated disagreement levels (table2, auprc) or the single level used by joint_vs_single.
    std::vector<double> disagreements;
    /// Numbers of networks compared by joint_vs_single.
    std::vector<int> ks;

    /// Defaults of each scenario at desk scale.
    static ScenarioSettings defaults(Scenario s);
};

/// One method applied to one network of one replicate.
struct FitRecord {
    std::string setting; ///< "d=0.4" or "K=4"
    double setting_value = 0.0;
    int replicate = 0;
    std::string method;
    int network = 0; ///< 1-based
    double sparsity = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double seconds = 0.0; ///< wall clock of the method on this network, selection included
    double estimated_disagreement = std::numeric_limits<double>::quiet_NaN();
    double auprc = std::numeric_limits<double>::quiet_NaN();
};

/// Called once per replicate with network 1's cut-off PR curve (auprc scenario only).
using CurveSink = std::function<void(const std::string& setting, int replicate, const PrCurve& curve)>;

/// Seed of network k (0-based) in replicate seed r.
std::uint64_t network_seed(std::uint64_t replicate_seed, std::size_t k);

/**
 * Single fit whose sparsity is as close as possible to `target`: tau^2 is
 * walked down a fine log grid from the top of `grid` until the sparsity no
 * longer exceeds the target, and the closest point seen is returned.
 */
EcmFit fit_matched_sparsity(const ScatterStats& stats, double target, const EcmConfig& config, const TauGrid& grid,
                            double edge_threshold);

/// Records ordered by setting, replicate, method and network; deterministic for a given seed.
std::vector<FitRecord> run_scenario(Scenario s, const ScenarioSettings& settings, const CurveSink& curves = {});

/// Mean (sd) per setting, method and network.
void write_report_csv(std::ostream& out, Scenario s, const std::vector<FitRecord>& records);

} // namespace ghs
