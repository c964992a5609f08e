#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "oscilab/families.hpp"
#include "oscilab/lab.hpp"
#include "oscilab/maximal.hpp"
#include "oscilab/oscillation.hpp"
#include "oscilab/sampled.hpp"
#include "oscilab/weights.hpp"

namespace {

using namespace oscilab;

int cmd_generate(const std::string& kind, double s, double delta, double eps, double C,
                 double t, double ell, double alpha, double beta, int N, double gamma_step,
                 double eps1, double eps2, double T, double time, const std::string& out) {
  FamilySpec spec;
  spec.kind = kind;
  spec.params = {{"s", s},     {"delta", delta},           {"eps", eps},   {"C", C},
                 {"t", t},     {"ell", ell},               {"alpha", alpha},
                 {"beta", beta}, {"N", static_cast<double>(N)},
                 {"gamma_step", gamma_step},               {"eps1", eps1}, {"eps2", eps2},
                 {"T", T},     {"time", time}};
  const FamilyBuild build = build_family(spec);
  build.f.write_csv_file(out);
  std::printf("wrote %s (%zu nodes, log_scale=%.17g)\n", out.c_str(), build.f.size(),
              build.log_scale);
  for (const auto& [key, value] : build.notes)
    std::printf("  %s = %.17g\n", key.c_str(), value);
  return 0;
}

int cmd_maximal(const std::string& input, double r, double trunc, const std::string& algo,
                int density, const std::string& out) {
  const SampledFunction f = SampledFunction::read_csv_file(input);
  MaximalOptions opts;
  opts.r = r;
  if (trunc > 0.0) opts.delta_trunc = trunc;
  opts.candidate_density = density;
  opts.algorithm = (algo == "brute") ? MaximalAlgorithm::brute : MaximalAlgorithm::fast;
  maximal_function(f, opts).write_csv_file(out);
  std::printf("wrote %s\n", out.c_str());
  return 0;
}

int cmd_bmo_norm(const std::string& input, int weight_k, double delta, int density,
                 const std::string& out) {
  const SampledFunction f = SampledFunction::read_csv_file(input);
  const LogWeight w(weight_k);
  SearchParams sp;
  sp.density = density;
  const OscillationReport rep = weighted_bmo_norm(f, w, delta, sp);

  nlohmann::json j;
  j["l1_part"] = rep.l1_part;
  j["sup_part"] = rep.sup_part;
  j["norm_value"] = rep.norm_value;
  j["argmax_a"] = rep.argmax_a;
  j["argmax_b"] = rep.argmax_b;
  j["delta"] = rep.delta;
  j["weight_k"] = weight_k;
  j["per_scale"] = nlohmann::json::array();
  for (const auto& [len, value] : rep.per_scale)
    j["per_scale"].push_back({{"length", len}, {"value", value}});
  std::ofstream os(out, std::ios::binary);
  os << j.dump(2) << "\n";
  std::printf("wrote %s (norm=%.17g)\n", out.c_str(), rep.norm_value);
  return 0;
}

int cmd_experiment_run(const std::string& id, const std::string& config_path,
                       const std::string& out_dir) {
  ExperimentConfig cfg;
  if (!config_path.empty()) {
    cfg = ExperimentConfig::from_json_file(config_path);
    if (cfg.experiment != id && !id.empty()) cfg.experiment = id;
  } else {
    cfg = ExperimentConfig::from_json_text("{\"experiment\":\"" + id + "\"}");
  }
  const SweepResult result = run_experiment(cfg);
  write_outputs(result, out_dir);
  std::printf("experiment %s  config %s  runtime %.2fs\n", result.experiment.c_str(),
              result.config_hash.c_str(), result.runtime_seconds);
  for (const auto& v : result.verdicts)
    std::printf("  [%s] %s: value=%.6g threshold=%.6g (%s)\n", v.pass ? "PASS" : "FAIL",
                v.check.c_str(), v.value, v.threshold, v.relation.c_str());
  return result.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"oscilab: weighted local BMO spaces, maximal operators, and blow-up experiments"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "generate a family member as CSV");
  std::string kind = "step_plateau", gen_out = "f.csv";
  double s = 1e-3, delta = 0.5, eps = 1e-5, C = 2.0, t = 0.25, ell = 2.0;
  double alpha = 0.5, beta = 2.0, gamma_step = 2.0, eps1 = 0.5, eps2 = 0.5, T = 1.0,
         time = 0.9;
  int N = 3;
  gen->add_option("--kind", kind,
                  "step_plateau | tail | gradient_bounded | plateau_cascade | time_blowup");
  gen->add_option("--s", s, "plateau half-width");
  gen->add_option("--delta", delta, "height exponent");
  gen->add_option("--eps", eps, "ramp width");
  gen->add_option("--C", C, "background constant");
  gen->add_option("--t", t, "tail family t (or time for time_blowup via --time)");
  gen->add_option("--ell", ell, "tail/gradient decay exponent");
  gen->add_option("--alpha", alpha, "cascade background exponent");
  gen->add_option("--beta", beta, "cascade plateau exponent");
  gen->add_option("--N", N, "cascade levels");
  gen->add_option("--gamma-step", gamma_step, "cascade gamma_i = gamma_step * i");
  gen->add_option("--eps1", eps1, "blow-up profile space exponent");
  gen->add_option("--eps2", eps2, "blow-up profile time exponent");
  gen->add_option("--T", T, "blow-up time");
  gen->add_option("--time", time, "evaluation time t < T");
  gen->add_option("--out", gen_out, "output CSV path");

  // maximal
  auto* mx = app.add_subcommand("maximal", "apply the maximal operator to a CSV function");
  std::string mx_in, mx_out = "Mf.csv", algo = "fast";
  double r = 1.0, trunc = 0.0;
  int density = 0;
  mx->add_option("--input", mx_in, "input CSV")->required();
  mx->add_option("--r", r, "power r in (0,1]");
  mx->add_option("--trunc", trunc, "interval-length cap (M_delta); 0 = none");
  mx->add_option("--algo", algo, "brute | fast");
  mx->add_option("--density", density, "extra candidate endpoints per decade");
  mx->add_option("--out", mx_out, "output CSV path");

  // bmo-norm
  auto* bn = app.add_subcommand("bmo-norm", "weighted local bmo norm of a CSV function");
  std::string bn_in, bn_out = "report.json";
  int weight_k = 1, bn_density = 16;
  double bn_delta = 1e-3;
  bn->add_option("--input", bn_in, "input CSV")->required();
  bn->add_option("--weight-k", weight_k, "iterated-log depth (0 = Coifman-Rochberg regime)");
  bn->add_option("--delta", bn_delta, "|Q| < delta cutoff");
  bn->add_option("--density", bn_density, "search density per decade");
  bn->add_option("--out", bn_out, "output JSON path");

  // experiment
  auto* ex = app.add_subcommand("experiment", "run or list experiments");
  auto* ex_run = ex->add_subcommand("run", "run one experiment");
  std::string ex_id, ex_cfg, ex_out = "results";
  ex_run->add_option("id", ex_id, "experiment id")->required();
  ex_run->add_option("--config", ex_cfg, "JSON config path");
  ex_run->add_option("--out-dir", ex_out, "output directory");
  auto* ex_list = ex->add_subcommand("list", "list experiment ids");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;  // usage error
  }

  try {
    if (gen->parsed())
      return cmd_generate(kind, s, delta, eps, C, t, ell, alpha, beta, N, gamma_step, eps1,
                          eps2, T, time, gen_out);
    if (mx->parsed()) return cmd_maximal(mx_in, r, trunc, algo, density, mx_out);
    if (bn->parsed()) return cmd_bmo_norm(bn_in, weight_k, bn_delta, bn_density, bn_out);
    if (ex->parsed()) {
      if (ex_list->parsed()) {
        for (const auto& [id, desc] : experiment_list())
          std::printf("%-18s %s\n", id.c_str(), desc.c_str());
        return 0;
      }
      if (ex_run->parsed()) return cmd_experiment_run(ex_id, ex_cfg, ex_out);
      std::fprintf(stderr, "experiment: expected 'run <id>' or 'list'\n");
      return 2;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
