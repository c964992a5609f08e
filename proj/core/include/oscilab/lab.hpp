#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "oscilab/families.hpp"
#include "oscilab/maximal.hpp"
#include "oscilab/oscillation.hpp"
#include "oscilab/sampled.hpp"
#include "oscilab/weights.hpp"

namespace oscilab {

/// Flat experiment configuration; unset JSON fields keep the experiment's
/// defaults. The config hash covers every effective field.
struct ExperimentConfig {
  std::string experiment = "blowup-step";
  int weight_k = 1;
  double r = 1.0;               // maximal power
  double bmo_delta = 1e-2;      // |Q| < delta cutoff (physical units)
  int density = 16;             // bmo search density
  int grid_per_decade = 32;
  std::uint64_t seed = 20240901;

  // step / gradient sweeps (delta_n = 1/n, n in [n_lo, n_hi])
  int n_lo = 2;
  int n_hi = 8;
  double neg_log_s = 100.0;  // |ln s| in scaled-unit mode
  double eps_hat = 0.01;     // ramp width, units of s
  double C = 2.0;            // background

  // cascade
  double alpha = 0.5;
  double beta = 2.0;
  int cascade_levels = 4;
  double gamma_step = 2.0;  // gamma_i = gamma_step * i

  // time-blow-up family
  double eps1 = 0.5;
  double eps2 = 0.5;
  double T = 1.0;
  std::vector<double> time_ladder = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};

  // multiplier corpus
  int corpus_pairs = 50;

  static ExperimentConfig from_json_text(const std::string& text);
  static ExperimentConfig from_json_file(const std::string& path);
  std::string to_json() const;   // canonical (sorted keys)
  std::uint64_t hash() const;    // FNV-1a over the canonical JSON
};

struct Verdict {
  std::string check;
  double value = 0.0;
  double threshold = 0.0;
  std::string relation;  // "<=", ">=", "in[1/4,4]", ...
  bool pass = false;
};

struct SweepRow {
  double key = 0.0;
  std::map<std::string, double> cols;
};

struct SweepResult {
  std::string experiment;
  std::string config_hash;          // hex
  std::vector<std::string> columns;  // CSV order (after the key column)
  std::string key_name = "key";
  std::vector<SweepRow> rows;
  std::vector<Verdict> verdicts;
  std::map<std::string, std::string> metadata;
  double runtime_seconds = 0.0;  // informational; never serialized

  bool all_pass() const;
  std::string to_csv() const;
  std::string verdicts_json() const;
};

/// Blow-up sweeps. cfg.experiment selects the family kind:
/// "blowup-step", "blowup-cascade", "blowup-tail", "blowup-gradient".
SweepResult run_blowup_sweep(const ExperimentConfig& cfg);

/// Same step sweep with k = 0: the sup part of ||ln M f_n||_bmo must stay
/// bounded (max/min <= 2); the k = 1 growth ratio is re-run for contrast.
SweepResult run_coifman_rochberg_contrast(const ExperimentConfig& cfg);

/// Uniform-in-time bound: || phi_*(M_r f_t) ||_{bmo_phi} over the time ladder;
/// the sup part is searched over the locality ball [-1/2, 1/2] where the
/// family's lower bound keeps M_r f_t away from 1 (the L1 part is global).
SweepResult run_uniform_bound_check(const ExperimentConfig& cfg);

/// Seeded multiplier corpus; reports the ratio distribution, the doubled
/// corpus, and exact-homogeneity rows.
SweepResult run_multiplier_check(const ExperimentConfig& cfg);

/// Derivative <-> oscillation checks for the designated log-type functions
/// plus the maximal-gradient decay fit.
SweepResult run_lemma_checks(const ExperimentConfig& cfg);

/// Registered experiment ids with one-line descriptions.
std::vector<std::pair<std::string, std::string>> experiment_list();

/// Runs the experiment named in cfg.experiment.
SweepResult run_experiment(const ExperimentConfig& cfg);

/// Writes <out_dir>/<experiment>.csv and <out_dir>/<experiment>.verdicts.json.
void write_outputs(const SweepResult& result, const std::string& out_dir);

/// phi_*(M f) composed nodewise.
SampledFunction compose_phi_star(const LogWeight& w, const SampledFunction& mf);

/// Blow-up driver statistic |J| inf_J |h'| / phi(|J|^{-1}) maximized over
/// subintervals of the widest monotone-convex run of h inside
/// [region_lo, region_hi] (finite-difference sign checks).
struct DriverStat {
  double value = 0.0;
  double j_a = 0.0, j_b = 0.0;  // chosen subinterval (grid units)
  double inf_abs_dh = 0.0;
  bool found = false;
};
DriverStat driver_statistic(const SampledFunction& h, double region_lo, double region_hi,
                            const LogWeight& w, double log_scale);

}  // namespace oscilab
