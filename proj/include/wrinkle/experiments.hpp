#pragma once

#include "wrinkle/serialization.hpp"
#include "wrinkle/solver.hpp"

#include <map>
#include <string>
#include <vector>

namespace wrinkle {

struct GridConfig {
  int n = 1024;   // graded cells; 1024 puts the solver in its clean regime
  double gamma = 2.0;
  int modes = 0;  // 0 = default cap per L, raised if the grid out-resolves it
};

struct ExperimentConfig {
  std::string experiment = "scan";
  std::vector<double> L_list = {1, 2, 4, 8};
  GridConfig grid;
  SolveOptions solver;
  std::string eta_policy = "default";
  std::string out_dir = "out";
  double L0 = 4.0;            // scaling-law base period
  double cascade_scale = 0.9; // repair-test input scaling
  int nx = 512;               // tensor grid for assembled deformations
};

ExperimentConfig config_from_json(const json& j);
json config_to_json(const ExperimentConfig& c);

/// Runs solves with transported warm starts between L values: periodic
/// extension for integer ratios, anisotropic rescaling for rational ones.
/// Guarantees sigma(L2) <= sigma(L1) for integer L2/L1 and
/// sigma(aL) <= a^2 sigma(L) across the solved set, by descent from the
/// transported minimizers.
class SigmaLab {
public:
  explicit SigmaLab(const ExperimentConfig& cfg);

  /// Solves at L, first warming the cache along the dyadic chains from 1 and
  /// 1.5 so that large-L solves descend from transported minimizers instead
  /// of a cold cascade basin.
  const SolveResult& solve(double L);
  const SolveResult& solve_isolated(double L);  // no chain warm-up
  bool has(double L) const { return cache_.count(L) > 0; }
  void adopt(double L, SolveResult result);  // e.g. loaded from disk

  const XGrid& grid() const { return grid_; }
  FrequencyGrid freq_for(double L) const;
  const std::map<double, SolveResult>& cache() const { return cache_; }
  const ExperimentConfig& config() const { return cfg_; }

private:
  ExperimentConfig cfg_;
  XGrid grid_;
  std::map<double, SolveResult> cache_;
};

struct ScanRecord {
  double L = 0.0;
  double sigma = 0.0;
  int iterations = 0;
  bool converged = false;
  bool checks_pass = false;
  std::string init_source;
  std::string config_digest;
};

struct ScanVerdict {
  std::string name;
  double lhs = 0.0, rhs = 0.0;
  bool pass = false;
};

struct ScanOutput {
  std::vector<ScanRecord> records;
  std::vector<ScanVerdict> verdicts;
};

/// sigma(L) over the configured list; writes scan.csv/scan.json plus per-L
/// result, check, multiplier, mu-trajectory, spectrum and regularity series
/// under out_dir. Resumable through the append-only records file.
ScanOutput sigma_scan(const ExperimentConfig& cfg);

struct ScalingRow {
  double L = 0.0, h = 0.0, delta = 0.0;
  double el_total = 0.0;
  double excess_rescaled = 0.0;  // L^2 (E_L - E_0)
  double sigma_L = 0.0;
  double certificate = 0.0;
};

struct ScalingOutput {
  double L0 = 0.0;
  double sigma_L0 = 0.0;
  std::vector<ScalingRow> rows;
};

/// Assembles the upper-bound deformation from the L0 minimizer for each L in
/// the list (integer multiples of L0, delta = 1/L) and brackets the
/// normalized excess between the repair certificate and sigma(L0).
ScalingOutput scaling_law(const ExperimentConfig& cfg);

struct RepairTrendRow {
  double L = 0.0;
  RepairBudget budget;
};

/// Repairs the scaled cascade at each L with eta = min(L^-1/2, pi^-6/2).
std::vector<RepairTrendRow> repair_trend(const ExperimentConfig& cfg);

/// Regenerates report.md from the persisted JSON artifacts in out_dir;
/// byte-identical on unchanged inputs.
void write_report(const std::string& out_dir);

std::string csv_double(double v);

}  // namespace wrinkle
