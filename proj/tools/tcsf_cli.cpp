// Command-line harness: benchmark tables, verification suites, distribution
// constants, and single-trajectory dumps.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tcsf/analysis.hpp"
#include "tcsf/bench.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace tcsf;

int default_jobs() {
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

TableFormat parse_format(const std::string& f) {
  if (f == "text") return TableFormat::Text;
  if (f == "csv") return TableFormat::Csv;
  if (f == "json") return TableFormat::Json;
  throw CLI::ValidationError("--format", "expected text|csv|json");
}

PerturbationKind parse_sampler(const std::string& s) {
  if (s == "exact") return PerturbationKind::truncated_cauchy_exact();
  if (s == "sphere") return PerturbationKind::t_projected_sphere();
  throw CLI::ValidationError("--sampler", "expected exact|sphere");
}

NoiseCoupling parse_coupling(const std::string& s) {
  if (s == "shared") return NoiseCoupling::Shared;
  if (s == "fresh") return NoiseCoupling::Fresh;
  throw CLI::ValidationError("--noise-coupling", "expected shared|fresh");
}

NoiseModel parse_noise(const std::string& s, double sigma) {
  if (s == "none") return NoiseModel::none();
  if (s == "type1") return NoiseModel::type1(sigma);
  if (s == "type2") return NoiseModel::type2();
  if (s == "type3") return NoiseModel::type3();
  if (s == "additive") return NoiseModel::additive(sigma);
  throw CLI::ValidationError("--noise", "expected none|type1|type2|type3|additive");
}

EstimatorKind parse_estimator(const std::string& s, const PerturbationKind& sampler,
                              NoiseCoupling coupling, double rdsa_eta, bool rescale) {
  EstimatorKind k;
  if (s == "tcsf") k = EstimatorKind::tcsf();
  else if (s == "b-tcsf") k = EstimatorKind::tcsf_balanced();
  else if (s == "tcsf-crn") k = EstimatorKind::tcsf_crn();
  else if (s == "gsf") k = EstimatorKind::gsf();
  else if (s == "spsa") k = EstimatorKind::spsa();
  else if (s == "rdsa") k = EstimatorKind::rdsa(rdsa_eta);
  else throw CLI::ValidationError("estimator", "unknown estimator '" + s + "'");
  if (k.is_tcsf_family()) {
    k.perturbation = sampler;
    k.rescale_by_c2 = rescale;
    if (k.variant != EstimatorKind::Variant::TcsfCrn) k.coupling = coupling;
  } else {
    k.coupling = coupling;
  }
  return k;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << content;
}

// ---- bench configuration -------------------------------------------------

struct BenchConfig {
  std::string setting = "both";  // diminishing | constant | both
  std::vector<std::string> objectives = {"rastrigin", "quadratic", "rosenbrock"};
  std::vector<std::string> noises = {"type1", "type2", "type3"};
  std::vector<std::string> estimators = {"gsf", "tcsf", "b-tcsf", "spsa", "rdsa"};
  std::map<std::string, long> horizons = {
      {"rastrigin", 1000}, {"quadratic", 3000}, {"rosenbrock", 10000}};
  int n_runs = 100;
  std::uint64_t master_seed = 12345;
  int jobs = 0;  // 0 = auto
  std::string sampler = "exact";
  std::string noise_coupling = "shared";
  double rdsa_eta = 5.0;
  bool rescale_by_c2 = false;
  double epsilon_stop = 1e-4;
  double constant_gamma = 1e-4;
  double constant_delta = 1e-3;
  double type1_sigma = 5.0;

  json to_json() const {
    json j;
    j["setting"] = setting;
    j["objectives"] = objectives;
    j["noises"] = noises;
    j["estimators"] = estimators;
    json h;
    for (const auto& [k, v] : horizons) h[k] = v;
    j["horizons"] = h;
    j["n_runs"] = n_runs;
    j["master_seed"] = master_seed;
    j["jobs"] = jobs;
    j["sampler"] = sampler;
    j["noise_coupling"] = noise_coupling;
    j["rdsa_eta"] = rdsa_eta;
    j["rescale_by_c2"] = rescale_by_c2;
    j["epsilon_stop"] = epsilon_stop;
    j["constant_gamma"] = constant_gamma;
    j["constant_delta"] = constant_delta;
    j["type1_sigma"] = type1_sigma;
    return j;
  }
};

template <typename T>
void load_key(const json& j, const std::string& key, T& into, const char* type_name) {
  if (!j.contains(key)) return;
  try {
    into = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw std::runtime_error("config." + key + ": expected " + type_name);
  }
}

BenchConfig load_bench_config(const std::string& path) {
  BenchConfig cfg;
  if (path.empty()) return cfg;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error("config: parse error: " + std::string(e.what()));
  }
  if (!j.is_object()) throw std::runtime_error("config: top level must be an object");

  static const std::set<std::string> known = {
      "setting",       "objectives",    "noises",         "estimators",
      "horizons",      "n_runs",        "master_seed",    "jobs",
      "sampler",       "noise_coupling", "rdsa_eta",      "rescale_by_c2",
      "epsilon_stop",  "constant_gamma", "constant_delta", "type1_sigma"};
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!known.count(key)) throw std::runtime_error("config." + key + ": unknown key");
  }

  load_key(j, "setting", cfg.setting, "string");
  load_key(j, "objectives", cfg.objectives, "array of strings");
  load_key(j, "noises", cfg.noises, "array of strings");
  load_key(j, "estimators", cfg.estimators, "array of strings");
  load_key(j, "n_runs", cfg.n_runs, "integer");
  load_key(j, "master_seed", cfg.master_seed, "integer");
  load_key(j, "jobs", cfg.jobs, "integer");
  load_key(j, "sampler", cfg.sampler, "string");
  load_key(j, "noise_coupling", cfg.noise_coupling, "string");
  load_key(j, "rdsa_eta", cfg.rdsa_eta, "number");
  load_key(j, "rescale_by_c2", cfg.rescale_by_c2, "boolean");
  load_key(j, "epsilon_stop", cfg.epsilon_stop, "number");
  load_key(j, "constant_gamma", cfg.constant_gamma, "number");
  load_key(j, "constant_delta", cfg.constant_delta, "number");
  load_key(j, "type1_sigma", cfg.type1_sigma, "number");
  if (j.contains("horizons")) {
    if (!j["horizons"].is_object()) throw std::runtime_error("config.horizons: expected object");
    for (const auto& [key, value] : j["horizons"].items()) {
      if (!cfg.horizons.count(key))
        throw std::runtime_error("config.horizons." + key + ": unknown objective");
      if (!value.is_number_integer())
        throw std::runtime_error("config.horizons." + key + ": expected integer");
      cfg.horizons[key] = value.get<long>();
    }
  }
  return cfg;
}

void validate_bench_config(const BenchConfig& cfg) {
  if (cfg.setting != "diminishing" && cfg.setting != "constant" && cfg.setting != "both")
    throw std::runtime_error("config.setting: expected diminishing|constant|both");
  if (cfg.n_runs < 1) throw std::runtime_error("config.n_runs: must be >= 1");
  if (cfg.objectives.empty()) throw std::runtime_error("config.objectives: must be non-empty");
  if (cfg.estimators.empty()) throw std::runtime_error("config.estimators: must be non-empty");
  for (const auto& o : cfg.objectives)
    if (!cfg.horizons.count(o)) throw std::runtime_error("config.objectives: unknown '" + o + "'");
  for (const auto& n : cfg.noises)
    if (n != "none" && n != "type1" && n != "type2" && n != "type3" && n != "additive")
      throw std::runtime_error("config.noises: unknown '" + n + "'");
  if (cfg.sampler != "exact" && cfg.sampler != "sphere")
    throw std::runtime_error("config.sampler: expected exact|sphere");
  if (cfg.noise_coupling != "shared" && cfg.noise_coupling != "fresh")
    throw std::runtime_error("config.noise_coupling: expected shared|fresh");
  if (cfg.epsilon_stop < 0) throw std::runtime_error("config.epsilon_stop: must be >= 0");
  if (cfg.constant_gamma <= 0) throw std::runtime_error("config.constant_gamma: must be > 0");
  if (cfg.constant_delta <= 0) throw std::runtime_error("config.constant_delta: must be > 0");
  if (cfg.rdsa_eta <= 0) throw std::runtime_error("config.rdsa_eta: must be > 0");
}

int run_bench(const BenchConfig& cfg, const std::string& out_dir, TableFormat format,
              bool print_config_only) {
  validate_bench_config(cfg);
  if (print_config_only) {
    std::cout << cfg.to_json().dump(2) << "\n";
    return 0;
  }

  const int jobs = cfg.jobs > 0 ? cfg.jobs : default_jobs();
  const PerturbationKind sampler = parse_sampler(cfg.sampler);
  const NoiseCoupling coupling = parse_coupling(cfg.noise_coupling);

  std::vector<std::string> settings;
  if (cfg.setting == "both") settings = {"diminishing", "constant"};
  else settings = {cfg.setting};

  std::vector<ExperimentReport> reports;
  int row = 0;
  for (const auto& setting : settings) {
    for (const auto& objective : cfg.objectives) {
      const long horizon = cfg.horizons.at(objective);
      for (const auto& noise : cfg.noises) {
        ExperimentConfig ec;
        ec.objective = objective;
        ec.noise = parse_noise(noise, cfg.type1_sigma);
        for (const auto& e : cfg.estimators)
          ec.estimators.push_back(
              parse_estimator(e, sampler, coupling, cfg.rdsa_eta, cfg.rescale_by_c2));
        ec.schedule = setting == "diminishing"
                          ? ScheduleConfig::diminishing(horizon)
                          : ScheduleConfig::constant(horizon, cfg.constant_gamma,
                                                     cfg.constant_delta);
        ec.schedule.epsilon_stop = cfg.epsilon_stop;
        ec.schedule_label = setting;
        ec.n_runs = cfg.n_runs;
        ec.master_seed = mix_seed(cfg.master_seed, 0xBE7C, row);
        ec.jobs = jobs;
        reports.push_back(run_experiment(ec));
        ++row;
      }
    }
  }

  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  write_file(dir / "report.csv", emit_tables(reports, TableFormat::Csv));
  write_file(dir / "report.json", emit_tables(reports, TableFormat::Json));
  write_file(dir / "runs.jsonl", emit_runs_jsonl(reports));
  write_file(dir / "resolved-config.json", cfg.to_json().dump(2) + "\n");

  std::cout << emit_tables(reports, format);
  return 0;
}

// ---- constants subcommand -------------------------------------------------

int run_constants(const std::vector<int>& dims, long samples, const std::string& kind_name,
                  std::uint64_t seed, TableFormat format) {
  PerturbationKind kind = PerturbationKind::truncated_cauchy_exact();
  if (kind_name == "exact") kind = PerturbationKind::truncated_cauchy_exact();
  else if (kind_name == "sphere") kind = PerturbationKind::t_projected_sphere();
  else if (kind_name == "gaussian") kind = PerturbationKind::gaussian();
  else if (kind_name == "rademacher") kind = PerturbationKind::rademacher();
  else throw CLI::ValidationError("--kind", "expected exact|sphere|gaussian|rademacher");

  json rows = json::array();
  for (int d : dims) {
    RandomStream rng(mix_seed(seed, 0xC0457, d));
    const DistributionConstants mc = estimate_constants(kind, d, samples, rng);
    json row;
    row["dim"] = d;
    row["kind"] = kind.name();
    row["samples"] = samples;
    row["c2_mc"] = mc.c2;
    row["c2_se"] = mc.c2_se;
    row["c_bar_mc"] = mc.c_bar;
    row["c_bar_se"] = mc.c_bar_se;
    if (kind.tag == PerturbationKind::Tag::TruncatedCauchyExact) {
      const DistributionConstants exact = exact_constants(d);
      row["c1"] = exact.c1;
      row["c11"] = exact.c11;
      row["c2_quadrature"] = exact.c2;
      row["c_bar_quadrature"] = exact.c_bar;
    }
    rows.push_back(std::move(row));
  }

  if (format == TableFormat::Json) {
    json root;
    root["schema_version"] = 1;
    root["constants"] = rows;
    std::cout << root.dump(2) << "\n";
  } else if (format == TableFormat::Csv) {
    std::cout << "dim,kind,samples,c1,c11,c2_quadrature,c2_mc,c2_se,c_bar_quadrature,c_bar_mc,"
                 "c_bar_se\n";
    for (const auto& row : rows) {
      auto num = [&](const char* key) {
        return row.contains(key) ? std::to_string(row[key].get<double>()) : std::string("");
      };
      std::cout << row["dim"].get<int>() << "," << row["kind"].get<std::string>() << ","
                << row["samples"].get<long>() << "," << num("c1") << "," << num("c11") << ","
                << num("c2_quadrature") << "," << num("c2_mc") << "," << num("c2_se") << ","
                << num("c_bar_quadrature") << "," << num("c_bar_mc") << "," << num("c_bar_se")
                << "\n";
    }
  } else {
    for (const auto& row : rows) {
      std::cout << "dim " << row["dim"].get<int>() << " (" << row["kind"].get<std::string>()
                << ", " << row["samples"].get<long>() << " samples)\n";
      if (row.contains("c1")) {
        std::cout << "  c1  = " << row["c1"].get<double>()
                  << "   c11 = " << row["c11"].get<double>() << "\n";
        std::cout << "  c2    quadrature " << row["c2_quadrature"].get<double>() << ", MC "
                  << row["c2_mc"].get<double>() << " (SE " << row["c2_se"].get<double>() << ")\n";
        std::cout << "  c_bar quadrature " << row["c_bar_quadrature"].get<double>() << ", MC "
                  << row["c_bar_mc"].get<double>() << " (SE " << row["c_bar_se"].get<double>()
                  << ")\n";
      } else {
        std::cout << "  c2    MC " << row["c2_mc"].get<double>() << " (SE "
                  << row["c2_se"].get<double>() << ")\n";
        std::cout << "  c_bar MC " << row["c_bar_mc"].get<double>() << " (SE "
                  << row["c_bar_se"].get<double>() << ")\n";
      }
    }
  }
  return 0;
}

// ---- run subcommand --------------------------------------------------------

int run_single(const std::string& objective, const std::string& noise_name,
               const std::string& estimator_name, const std::string& setting, long horizon,
               double eps, std::uint64_t seed, const std::string& sampler_name,
               const std::string& coupling_name, double sigma, const std::string& out_dir) {
  const ObjectiveSpec spec = make_objective(objective);
  const NoisyObjective obj(spec, parse_noise(noise_name, sigma));
  const EstimatorKind kind = parse_estimator(estimator_name, parse_sampler(sampler_name),
                                             parse_coupling(coupling_name), 5.0, false);
  ScheduleConfig sched = setting == "constant" ? ScheduleConfig::constant(horizon)
                                               : ScheduleConfig::diminishing(horizon);
  sched.epsilon_stop = eps;

  RandomStream init_rng(mix_seed(seed, 0xA11C, 0));
  Vec x1(spec.dim);
  for (int j = 0; j < spec.dim; ++j) x1(j) = init_rng.uniform(spec.box_lo(j), spec.box_hi(j));

  const RunRecord rec = run(obj, kind, x1, sched, mix_seed(seed, 1, 1));

  std::filesystem::create_directories(out_dir);
  std::string traj;
  for (const auto& p : rec.trajectory) {
    json j;
    j["k"] = p.k;
    j["x"] = std::vector<double>(p.x.data(), p.x.data() + p.x.size());
    j["f_true"] = p.f_true;
    j["g_norm"] = p.g_norm;
    traj += j.dump();
    traj += "\n";
  }
  write_file(std::filesystem::path(out_dir) / "trajectory.jsonl", traj);

  json summary;
  summary["objective"] = objective;
  summary["noise"] = noise_name;
  summary["estimator"] = kind.name();
  summary["setting"] = setting;
  summary["seed"] = seed;
  summary["iterations_used"] = rec.iterations_used;
  summary["stop_reason"] = stop_reason_name(rec.stop_reason);
  summary["final_f_true"] = rec.final_f_true;
  summary["final_x"] = std::vector<double>(rec.final_x.data(), rec.final_x.data() + rec.final_x.size());
  summary["thin_factor"] = rec.thin_factor;
  summary["trajectory_file"] = (std::filesystem::path(out_dir) / "trajectory.jsonl").string();
  std::cout << summary.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zeroth-order stochastic optimization benchmark harness"};
  app.require_subcommand(1);

  // bench
  auto* bench = app.add_subcommand("bench", "Run the benchmark grid and emit tables");
  std::string bench_config_path, bench_setting, bench_out = "out", bench_format = "text";
  std::string bench_sampler, bench_coupling, bench_objectives, bench_noises;
  std::uint64_t bench_seed = 0;
  bool bench_seed_set = false, bench_print_config = false;
  int bench_jobs = -1, bench_runs = -1;
  bench->add_option("--config", bench_config_path, "JSON config file");
  bench->add_option("--setting", bench_setting, "diminishing|constant|both");
  bench->add_option("--seed", bench_seed, "master seed")->each([&](const std::string&) {
    bench_seed_set = true;
  });
  bench->add_option("--out-dir", bench_out, "output directory (default ./out)");
  bench->add_option("--format", bench_format, "stdout format: text|csv|json");
  bench->add_option("--jobs", bench_jobs, "worker threads (default: hardware)");
  bench->add_option("--runs", bench_runs, "runs per cell (default 100)");
  bench->add_option("--sampler", bench_sampler, "exact|sphere perturbation sampler");
  bench->add_option("--noise-coupling", bench_coupling, "shared|fresh per-estimate noise");
  bench->add_option("--objectives", bench_objectives, "comma list (default all)");
  bench->add_option("--noises", bench_noises, "comma list (default type1,type2,type3)");
  bench->add_flag("--print-config", bench_print_config, "print resolved config and exit");

  // verify
  auto* verify = app.add_subcommand("verify", "Run statistical verification suites");
  std::string verify_suite_name = "all", verify_out = "out", verify_format = "text";
  std::uint64_t verify_seed = 20240901;
  int verify_jobs = -1;
  verify->add_option("--suite", verify_suite_name, "moments|bias|amse|trap|rates|all");
  verify->add_option("--seed", verify_seed, "suite seed");
  verify->add_option("--out-dir", verify_out, "output directory");
  verify->add_option("--format", verify_format, "stdout format: text|csv|json");
  verify->add_option("--jobs", verify_jobs, "worker threads");

  // constants
  auto* constants = app.add_subcommand("constants", "Estimate distribution constants");
  std::vector<int> const_dims = {4};
  long const_samples = 1000000;
  std::string const_kind = "exact", const_format = "text";
  std::uint64_t const_seed = 7;
  constants->add_option("--dim", const_dims, "dimensions (repeatable)");
  constants->add_option("--samples", const_samples, "Monte Carlo samples (>= 1e4)");
  constants->add_option("--kind", const_kind, "exact|sphere|gaussian|rademacher");
  constants->add_option("--seed", const_seed, "sampling seed");
  constants->add_option("--format", const_format, "text|csv|json");

  // run
  auto* single = app.add_subcommand("run", "Run one trajectory and dump it");
  std::string run_objective = "quadratic", run_noise = "type1", run_estimator = "tcsf";
  std::string run_setting = "diminishing", run_sampler = "exact", run_coupling = "shared";
  std::string run_out = "out";
  long run_horizon = 3000;
  double run_eps = 1e-4, run_sigma = 5.0;
  std::uint64_t run_seed = 1;
  single->add_option("--objective", run_objective, "rastrigin|quadratic|rosenbrock|double-well");
  single->add_option("--noise", run_noise, "none|type1|type2|type3|additive");
  single->add_option("--estimator", run_estimator, "tcsf|b-tcsf|tcsf-crn|gsf|spsa|rdsa");
  single->add_option("--setting", run_setting, "diminishing|constant");
  single->add_option("--n", run_horizon, "iteration horizon");
  single->add_option("--eps", run_eps, "epsilon stop threshold");
  single->add_option("--seed", run_seed, "run seed");
  single->add_option("--sampler", run_sampler, "exact|sphere");
  single->add_option("--noise-coupling", run_coupling, "shared|fresh");
  single->add_option("--sigma", run_sigma, "noise sigma (type1/additive)");
  single->add_option("--out-dir", run_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (bench->parsed()) {
      BenchConfig cfg = load_bench_config(bench_config_path);
      if (!bench_setting.empty()) cfg.setting = bench_setting;
      if (bench_seed_set) cfg.master_seed = bench_seed;
      if (bench_jobs >= 0) cfg.jobs = bench_jobs;
      if (bench_runs >= 0) cfg.n_runs = bench_runs;
      if (!bench_sampler.empty()) cfg.sampler = bench_sampler;
      if (!bench_coupling.empty()) cfg.noise_coupling = bench_coupling;
      auto split_list = [](const std::string& s) {
        std::vector<std::string> out;
        std::stringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ',')) {
          if (!item.empty()) out.push_back(item);
        }
        return out;
      };
      if (!bench_objectives.empty()) cfg.objectives = split_list(bench_objectives);
      if (!bench_noises.empty()) cfg.noises = split_list(bench_noises);
      return run_bench(cfg, bench_out, parse_format(bench_format), bench_print_config);
    }
    if (verify->parsed()) {
      const int jobs = verify_jobs > 0 ? verify_jobs : default_jobs();
      const VerifySuiteReport report = verify_suite(verify_suite_name, verify_seed, jobs);
      std::filesystem::create_directories(verify_out);
      write_file(std::filesystem::path(verify_out) / "verify-report.csv",
                 render_verify(report, TableFormat::Csv));
      write_file(std::filesystem::path(verify_out) / "verify-report.json",
                 render_verify(report, TableFormat::Json));
      std::cout << render_verify(report, parse_format(verify_format));
      return report.all_pass ? 0 : 1;
    }
    if (constants->parsed())
      return run_constants(const_dims, const_samples, const_kind, const_seed,
                           parse_format(const_format));
    if (single->parsed())
      return run_single(run_objective, run_noise, run_estimator, run_setting, run_horizon,
                        run_eps, run_seed, run_sampler, run_coupling, run_sigma, run_out);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
