// linkrl - seeded, manifest-logged pipeline for RL link adaptation and
// policy distillation.
//
// Subcommands:
//   train-teacher     DQN training over domain-randomized scenarios
//   gen-distill-data  (state, teacher Q-vector) dataset generation
//   distill           student training against a dataset (KL objective)
//   evaluate          benchmark policies and emit reports
//   reproduce-paper   full desk-scale pipeline end to end
//
// Every run writes a manifest.json with the seeds, parameters and output
// hashes needed to reproduce it; --deterministic makes reruns bit-identical.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "linkrl/common.hpp"
#include "linkrl/distill.hpp"
#include "linkrl/evalkit.hpp"
#include "linkrl/mcs.hpp"
#include "linkrl/net.hpp"
#include "linkrl/rl.hpp"
#include "linkrl/svg.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace linkrl;

namespace {

// ---------------------------------------------------------------------------
// config file handling

struct RunConfig {
  dqn::TrainerConfig trainer;
  linksim::RandomizationRanges ranges;
  linksim::BlerModel bler;
  env::RewardConfig reward;
  distill::DistillConfig distiller;
  long eval_episodes = 5000;
  long pdf_steps = 20000;
  // reproduce-paper knobs
  size_t dataset_samples = 200000;
  size_t specialist_dataset_samples = 70000;
  long specialist_env_steps = 100000;
  std::vector<std::string> student_sizes{"4x64", "4x32", "3x32"};
};

json trainer_to_json(const dqn::TrainerConfig& t) {
  json j;
  j["hidden"] = t.hidden;
  j["gamma"] = t.gamma;
  j["epsilon_start"] = t.epsilon_start;
  j["epsilon_end"] = t.epsilon_end;
  j["epsilon_fraction"] = t.epsilon_fraction;
  j["learning_rate"] = t.learning_rate;
  j["batch_size"] = t.batch_size;
  j["target_update_period"] = t.target_update_period;
  j["replay_capacity"] = t.replay_capacity;
  j["total_env_steps"] = t.total_env_steps;
  j["n_actors"] = t.n_actors;
  j["learn_every"] = t.learn_every;
  j["publish_period"] = t.publish_period;
  j["episodes_per_scenario"] = t.episodes_per_scenario;
  j["warmup_env_steps"] = t.warmup_env_steps;
  j["checkpoint_env_steps"] = t.checkpoint_env_steps;
  j["log_period"] = t.log_period;
  j["eval_episodes"] = t.eval_episodes;
  j["alpha"] = t.alpha;
  j["seed"] = t.seed;
  return j;
}

void trainer_from_json(const json& j, dqn::TrainerConfig& t) {
  auto load = [&j](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  load("hidden", t.hidden);
  load("gamma", t.gamma);
  load("epsilon_start", t.epsilon_start);
  load("epsilon_end", t.epsilon_end);
  load("epsilon_fraction", t.epsilon_fraction);
  load("learning_rate", t.learning_rate);
  load("batch_size", t.batch_size);
  load("target_update_period", t.target_update_period);
  load("replay_capacity", t.replay_capacity);
  load("total_env_steps", t.total_env_steps);
  load("n_actors", t.n_actors);
  load("learn_every", t.learn_every);
  load("publish_period", t.publish_period);
  load("episodes_per_scenario", t.episodes_per_scenario);
  load("warmup_env_steps", t.warmup_env_steps);
  load("checkpoint_env_steps", t.checkpoint_env_steps);
  load("log_period", t.log_period);
  load("eval_episodes", t.eval_episodes);
  load("alpha", t.alpha);
  load("seed", t.seed);
}

json config_to_json(const RunConfig& c) {
  json j;
  j["trainer"] = trainer_to_json(c.trainer);
  j["ranges"] = c.ranges.to_json();
  j["bler"] = {{"slope_per_db", c.bler.slope_per_db}, {"gap_db", c.bler.gap_db}};
  j["reward"] = {{"alpha", c.reward.alpha}, {"max_tx", c.reward.max_tx}};
  j["distill"] = {{"hidden", c.distiller.hidden},
                  {"tau", c.distiller.tau},
                  {"epochs", c.distiller.epochs},
                  {"learning_rate", c.distiller.learning_rate},
                  {"batch_size", c.distiller.batch_size},
                  {"holdout_fraction", c.distiller.holdout_fraction},
                  {"seed", c.distiller.seed}};
  j["eval"] = {{"n_episodes", c.eval_episodes}, {"pdf_steps", c.pdf_steps}};
  j["reproduce"] = {{"dataset_samples", c.dataset_samples},
                    {"specialist_dataset_samples", c.specialist_dataset_samples},
                    {"specialist_env_steps", c.specialist_env_steps},
                    {"student_sizes", c.student_sizes}};
  return j;
}

RunConfig config_from_json(const json& j) {
  RunConfig c;
  if (j.contains("trainer")) trainer_from_json(j.at("trainer"), c.trainer);
  if (j.contains("ranges")) c.ranges = linksim::RandomizationRanges::from_json(j.at("ranges"));
  if (j.contains("bler")) {
    c.bler.slope_per_db = j.at("bler").value("slope_per_db", c.bler.slope_per_db);
    c.bler.gap_db = j.at("bler").value("gap_db", c.bler.gap_db);
  }
  if (j.contains("reward")) {
    c.reward.alpha = j.at("reward").value("alpha", c.reward.alpha);
    c.reward.max_tx = j.at("reward").value("max_tx", c.reward.max_tx);
  }
  if (j.contains("distill")) {
    const auto& d = j.at("distill");
    if (d.contains("hidden")) c.distiller.hidden = d.at("hidden").get<std::vector<int>>();
    c.distiller.tau = d.value("tau", c.distiller.tau);
    c.distiller.epochs = d.value("epochs", c.distiller.epochs);
    c.distiller.learning_rate = d.value("learning_rate", c.distiller.learning_rate);
    c.distiller.batch_size = d.value("batch_size", c.distiller.batch_size);
    c.distiller.holdout_fraction = d.value("holdout_fraction", c.distiller.holdout_fraction);
    c.distiller.seed = d.value("seed", c.distiller.seed);
  }
  if (j.contains("eval")) {
    c.eval_episodes = j.at("eval").value("n_episodes", c.eval_episodes);
    c.pdf_steps = j.at("eval").value("pdf_steps", c.pdf_steps);
  }
  if (j.contains("reproduce")) {
    const auto& r = j.at("reproduce");
    c.dataset_samples = r.value("dataset_samples", c.dataset_samples);
    c.specialist_dataset_samples =
        r.value("specialist_dataset_samples", c.specialist_dataset_samples);
    c.specialist_env_steps = r.value("specialist_env_steps", c.specialist_env_steps);
    if (r.contains("student_sizes")) {
      c.student_sizes = r.at("student_sizes").get<std::vector<std::string>>();
    }
  }
  return c;
}

RunConfig load_config_or_exit(const std::string& path) {
  if (path.empty()) return RunConfig{};
  std::ifstream f(path);
  if (!f) {
    std::fprintf(stderr, "error: cannot open config file: %s\n", path.c_str());
    std::exit(2);
  }
  try {
    json j;
    f >> j;
    return config_from_json(j);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: invalid config file %s: %s\n", path.c_str(), e.what());
    std::exit(2);
  }
}

// "3x32" -> {32,32,32}; "64,64" -> {64,64}
std::vector<int> parse_hidden(const std::string& spec) {
  std::vector<int> hidden;
  const auto x = spec.find_first_of("xX");
  if (x != std::string::npos) {
    const int layers = std::stoi(spec.substr(0, x));
    const int width = std::stoi(spec.substr(x + 1));
    if (layers < 1 || width < 1) throw std::invalid_argument("bad student size: " + spec);
    hidden.assign(static_cast<size_t>(layers), width);
    return hidden;
  }
  size_t start = 0;
  while (start < spec.size()) {
    const auto comma = spec.find(',', start);
    const auto stop = comma == std::string::npos ? spec.size() : comma;
    hidden.push_back(std::stoi(spec.substr(start, stop - start)));
    start = stop + 1;
  }
  if (hidden.empty()) throw std::invalid_argument("bad student size: " + spec);
  return hidden;
}

uint64_t file_hash(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot hash missing file: " + path);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                             std::istreambuf_iterator<char>());
  return fnv1a64(bytes);
}

void write_text(const std::string& path, const std::string& content) {
  svg::write_file(path, content);
}

// Manifests are intentionally time-free so deterministic reruns match.
void write_manifest(const fs::path& dir, json manifest, const std::vector<std::string>& outputs) {
  json hashes;
  for (const auto& p : outputs) {
    hashes[fs::path(p).filename().string()] = hex64(file_hash(p));
  }
  manifest["outputs"] = hashes;
  std::ofstream f(dir / "manifest.json", std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write manifest in " + dir.string());
  f << manifest.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// shared command state

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "out";
  uint64_t seed = 0;  // 0 = keep config value
  bool deterministic = false;
  int jobs = 0;  // 0 = keep config value
  bool svg = false;
  bool trace = false;
  bool dump_scenario = false;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--config", a.config_path, "JSON config file (see --init-config)");
  cmd->add_option("--out", a.out_dir, "output directory");
  cmd->add_option("--seed", a.seed, "global run seed (overrides config)");
  cmd->add_flag("--deterministic", a.deterministic,
                "single-actor serialized mode; reruns are bit-identical");
  cmd->add_option("--jobs", a.jobs, "worker cap (overrides config)");
  cmd->add_flag("--svg", a.svg, "emit SVG charts alongside CSV reports");
  cmd->add_flag("--trace", a.trace, "write per-step episode traces during evaluation");
  cmd->add_flag("--dump-scenario", a.dump_scenario, "write sampled scenario configs");
}

json common_manifest(const std::string& command, const CommonArgs& a, const RunConfig& cfg) {
  json m;
  m["command"] = command;
  m["seed"] = cfg.trainer.seed;
  m["deterministic"] = a.deterministic;
  m["config"] = config_to_json(cfg);
  return m;
}

void apply_overrides(const CommonArgs& a, RunConfig& cfg) {
  if (a.seed != 0) {
    cfg.trainer.seed = a.seed;
    cfg.distiller.seed = a.seed;
  }
  if (a.jobs > 0) cfg.trainer.n_actors = a.jobs;
}

// ---------------------------------------------------------------------------
// policy specs for `evaluate`: "olla", "fixed:K", or a model path

struct PolicySpec {
  std::string name;
  std::string spec;
};

std::unique_ptr<evalkit::Policy> make_policy(const std::string& spec,
                                             std::vector<net::DenseNet>& model_store,
                                             const linksim::BlerModel& bler) {
  if (spec == "olla") {
    return std::make_unique<evalkit::OllaPolicy>(baseline::OllaState::make(), bler);
  }
  if (spec.rfind("fixed:", 0) == 0) {
    return std::make_unique<evalkit::FixedActionPolicy>(std::stoi(spec.substr(6)));
  }
  model_store.push_back(net::DenseNet::load(spec));
  return std::make_unique<evalkit::GreedyNetPolicy>(model_store.back());
}

// ---------------------------------------------------------------------------
// subcommand bodies

int cmd_train_teacher(const CommonArgs& args, const std::string& hidden_spec, long env_steps) {
  RunConfig cfg = load_config_or_exit(args.config_path);
  apply_overrides(args, cfg);
  if (!hidden_spec.empty()) cfg.trainer.hidden = parse_hidden(hidden_spec);
  if (env_steps >= 0) cfg.trainer.total_env_steps = env_steps;

  fs::create_directories(args.out_dir);
  const fs::path dir(args.out_dir);

  auto result = dqn::train_teacher(cfg.trainer, cfg.ranges, args.deterministic,
                                   (dir / "checkpoints").string(), {}, cfg.bler);

  const auto model_path = (dir / "teacher.model").string();
  const auto replay_path = (dir / "replay.bin").string();
  const auto log_path = (dir / "train_log.csv").string();
  result.net.save(model_path);
  dqn::save_replay(result.replay, replay_path);
  write_text(log_path, dqn::train_log_csv(result.log));
  if (args.dump_scenario) {
    write_text((dir / "ranges.json").string(), cfg.ranges.to_json().dump(2) + "\n");
  }

  json manifest = common_manifest("train-teacher", args, cfg);
  manifest["model_params"] = result.net.param_count();
  manifest["replay_size"] = result.replay.size();
  write_manifest(dir, manifest, {model_path, replay_path, log_path});

  std::printf("teacher trained: %zu params, replay %zu, model %s\n", result.net.param_count(),
              result.replay.size(), model_path.c_str());
  return 0;
}

int cmd_gen_distill_data(const CommonArgs& args, const std::string& teacher_path,
                         const std::string& mode, const std::string& replay_path, size_t n,
                         const std::string& out_file, const std::string& tag) {
  RunConfig cfg = load_config_or_exit(args.config_path);
  apply_overrides(args, cfg);
  const auto teacher = net::DenseNet::load(teacher_path);

  distill::DistillDataset dataset;
  if (mode == "fresh") {
    const int jobs = args.jobs > 0 ? args.jobs : 1;
    dataset = distill::gen_dataset(teacher, cfg.ranges, n, cfg.trainer.seed, jobs, tag,
                                   cfg.reward.alpha, cfg.bler);
  } else if (mode == "replay") {
    if (replay_path.empty()) {
      std::fprintf(stderr, "error: --mode replay requires --replay\n");
      return 1;
    }
    const auto replay = dqn::load_replay(replay_path);
    dataset = distill::from_replay(teacher, replay);
  } else {
    std::fprintf(stderr, "error: unknown mode '%s' (fresh|replay)\n", mode.c_str());
    return 1;
  }

  fs::create_directories(fs::path(out_file).parent_path().empty()
                             ? "."
                             : fs::path(out_file).parent_path().string());
  dataset.save(out_file);

  const fs::path dir = fs::path(out_file).parent_path().empty()
                           ? fs::path(".")
                           : fs::path(out_file).parent_path();
  json manifest = common_manifest("gen-distill-data", args, cfg);
  manifest["teacher"] = teacher_path;
  manifest["mode"] = mode;
  manifest["samples"] = dataset.samples.size();
  manifest["content_hash"] = hex64(dataset.content_hash());
  write_manifest(dir, manifest, {out_file});

  std::printf("dataset: %zu samples (%s) -> %s\n", dataset.samples.size(), mode.c_str(),
              out_file.c_str());
  return 0;
}

int cmd_distill(const CommonArgs& args, const std::vector<std::string>& data_paths,
                const std::string& student_spec, double tau, int epochs, double lr,
                const std::string& out_file) {
  RunConfig cfg = load_config_or_exit(args.config_path);
  apply_overrides(args, cfg);
  if (!student_spec.empty()) cfg.distiller.hidden = parse_hidden(student_spec);
  if (tau > 0) cfg.distiller.tau = tau;
  if (epochs >= 0) cfg.distiller.epochs = epochs;
  if (lr > 0) cfg.distiller.learning_rate = lr;

  std::vector<distill::DistillDataset> datasets;
  datasets.reserve(data_paths.size());
  for (const auto& p : data_paths) datasets.push_back(distill::DistillDataset::load(p));
  distill::DistillDataset dataset =
      datasets.size() == 1 ? std::move(datasets.front())
                           : distill::aggregate_shuffle(datasets, cfg.distiller.seed);
  const char* mode = data_paths.size() == 1 ? "single-policy" : "multi-policy";
  std::printf("distilling %s from %zu samples (%zu dataset(s))\n", mode, dataset.samples.size(),
              data_paths.size());

  auto result = distill::distill(dataset, cfg.distiller);
  result.student.save(out_file);
  const auto log_path = out_file + ".log.csv";
  write_text(log_path, distill::distill_log_csv(result.log));

  const fs::path dir = fs::path(out_file).parent_path().empty()
                           ? fs::path(".")
                           : fs::path(out_file).parent_path();
  json manifest = common_manifest("distill", args, cfg);
  manifest["datasets"] = data_paths;
  manifest["mode"] = mode;
  manifest["aggregated_samples"] = dataset.samples.size();
  manifest["best_val_kl"] = result.best_val_kl;
  manifest["student_params"] = result.student.param_count();
  write_manifest(dir, manifest, {out_file, log_path});

  std::printf("student: %zu params, best val KL %.6f -> %s\n", result.student.param_count(),
              result.best_val_kl, out_file.c_str());
  return 0;
}

int cmd_evaluate(const CommonArgs& args, const std::vector<std::string>& policy_args,
                 const std::string& reference, const std::string& scenario_list, long episodes,
                 long pdf_steps) {
  RunConfig cfg = load_config_or_exit(args.config_path);
  apply_overrides(args, cfg);
  if (episodes > 0) cfg.eval_episodes = episodes;
  if (pdf_steps > 0) cfg.pdf_steps = pdf_steps;

  std::vector<PolicySpec> specs;
  for (const auto& p : policy_args) {
    const auto eq = p.find('=');
    if (eq == std::string::npos) {
      specs.push_back({p, p});
    } else {
      specs.push_back({p.substr(0, eq), p.substr(eq + 1)});
    }
  }
  if (specs.empty()) {
    std::fprintf(stderr, "error: at least one --policy required\n");
    return 1;
  }
  std::string ref_name = reference.empty() ? specs.front().name : reference;

  auto suite = evalkit::ScenarioSuite::standard();
  std::vector<evalkit::BenchmarkScenario> scenarios;
  if (scenario_list.empty()) {
    scenarios = suite.scenarios;
  } else {
    size_t start = 0;
    while (start < scenario_list.size()) {
      const auto comma = scenario_list.find(',', start);
      const auto stop = comma == std::string::npos ? scenario_list.size() : comma;
      scenarios.push_back(suite.by_name(scenario_list.substr(start, stop - start)));
      start = stop + 1;
    }
  }

  fs::create_directories(args.out_dir);
  const fs::path dir(args.out_dir);

  std::vector<net::DenseNet> model_store;
  model_store.reserve(specs.size());
  std::vector<std::unique_ptr<evalkit::Policy>> policies;
  for (const auto& s : specs) policies.push_back(make_policy(s.spec, model_store, cfg.bler));

  std::vector<evalkit::ScenarioReports> reports;
  std::vector<evalkit::ComparisonRow> rows;
  std::vector<std::string> outputs;
  for (size_t si = 0; si < scenarios.size(); ++si) {
    const auto& bs = scenarios[si];
    const uint64_t eval_seed = args.seed != 0 ? derive_seed(args.seed, si) : bs.eval_seed;
    evalkit::ScenarioReports sr;
    sr.scenario = bs.name;
    std::optional<evalkit::MetricsReport> ref_report;
    for (size_t pi = 0; pi < specs.size(); ++pi) {
      evalkit::EvalOptions opts;
      opts.reward = cfg.reward;
      opts.bler_model = cfg.bler;
      if (args.trace) {
        opts.trace_csv_path =
            (dir / ("trace_" + bs.name + "_" + specs[pi].name + ".csv")).string();
      }
      evalkit::PolicyEval pe;
      pe.policy_name = specs[pi].name;
      pe.report = evalkit::evaluate(*policies[pi], bs, cfg.eval_episodes, eval_seed, opts);
      pe.pdf = evalkit::action_pdf(*policies[pi], bs, cfg.pdf_steps, derive_seed(eval_seed, 1),
                                   {cfg.reward, cfg.bler, ""});
      if (specs[pi].name == ref_name) ref_report = pe.report;
      sr.evals.push_back(std::move(pe));
      if (!opts.trace_csv_path.empty()) outputs.push_back(opts.trace_csv_path);
    }
    if (ref_report) {
      for (const auto& pe : sr.evals) {
        if (pe.policy_name == ref_name) continue;
        rows.push_back({"evaluate", pe.policy_name, bs.name,
                        evalkit::relative_gain(pe.report, *ref_report)});
      }
    }
    if (args.dump_scenario) {
      const auto p = (dir / ("scenario_" + bs.name + ".json")).string();
      linksim::ScenarioConfig dumped = bs.config;
      dumped.seed = eval_seed;
      write_text(p, dumped.to_json().dump(2) + "\n");
      outputs.push_back(p);
    }
    // report per-policy absolute metrics on stdout
    for (const auto& pe : sr.evals) {
      std::printf("%-6s %-12s T=%.4f BLER=%.4f r=%.4f\n", bs.name.c_str(),
                  pe.policy_name.c_str(), pe.report.mean_ue_throughput, pe.report.bler,
                  pe.report.mean_episodic_reward);
    }
    reports.push_back(std::move(sr));
  }

  json manifest = common_manifest("evaluate", args, cfg);
  manifest["reference"] = ref_name;
  manifest["episodes"] = cfg.eval_episodes;
  json seeds = json::object();
  for (size_t si = 0; si < scenarios.size(); ++si) {
    seeds[scenarios[si].name] =
        args.seed != 0 ? derive_seed(args.seed, si) : scenarios[si].eval_seed;
  }
  manifest["eval_seeds"] = seeds;
  evalkit::report_write(reports, rows, manifest, args.out_dir, args.svg);

  outputs.push_back((dir / "table2.csv").string());
  write_manifest(dir, manifest, outputs);
  return 0;
}

int cmd_reproduce_paper(const CommonArgs& args, long teacher_steps, long specialist_steps,
                        long dataset_samples) {
  RunConfig cfg = load_config_or_exit(args.config_path);
  apply_overrides(args, cfg);
  if (teacher_steps >= 0) cfg.trainer.total_env_steps = teacher_steps;
  if (specialist_steps >= 0) cfg.specialist_env_steps = specialist_steps;
  if (dataset_samples >= 0) {
    cfg.dataset_samples = static_cast<size_t>(dataset_samples);
    cfg.specialist_dataset_samples = static_cast<size_t>((dataset_samples + 2) / 3);
  }
  const int jobs = args.jobs > 0 ? args.jobs : cfg.trainer.n_actors;

  fs::create_directories(args.out_dir);
  const fs::path dir(args.out_dir);
  std::vector<std::string> outputs;
  const auto started = std::chrono::steady_clock::now();
  auto elapsed_min = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count() /
           60.0;
  };

  // 1. generalist teacher
  std::printf("[1/6] training generalist teacher (7x128, %ld env steps)...\n",
              cfg.trainer.total_env_steps);
  auto teacher_result =
      dqn::train_teacher(cfg.trainer, cfg.ranges, args.deterministic, "", {}, cfg.bler);
  const auto teacher_path = (dir / "teacher.model").string();
  teacher_result.net.save(teacher_path);
  write_text((dir / "teacher_train_log.csv").string(), dqn::train_log_csv(teacher_result.log));
  outputs.push_back(teacher_path);
  std::printf("      done at %.1f min\n", elapsed_min());

  // 2. specialist teachers on fixed scenario families
  const std::vector<std::string> families = {"SCSU", "MIMO", "mMIMO"};
  std::vector<net::DenseNet> specialists;
  for (size_t i = 0; i < families.size(); ++i) {
    std::printf("[2/6] training %s specialist (%ld env steps)...\n", families[i].c_str(),
                cfg.specialist_env_steps);
    dqn::TrainerConfig scfg = cfg.trainer;
    scfg.total_env_steps = cfg.specialist_env_steps;
    scfg.seed = derive_seed(cfg.trainer.seed, 31 + i);
    auto sres = dqn::train_teacher(scfg, evalkit::specialist_ranges(families[i]),
                                   args.deterministic, "", {}, cfg.bler);
    const auto path = (dir / ("specialist_" + families[i] + ".model")).string();
    sres.net.save(path);
    outputs.push_back(path);
    specialists.push_back(std::move(sres.net));
  }
  std::printf("      done at %.1f min\n", elapsed_min());

  // 3. distillation datasets
  std::printf("[3/6] generating distillation datasets (%zu + 3 x %zu samples)...\n",
              cfg.dataset_samples, cfg.specialist_dataset_samples);
  auto single_data = distill::gen_dataset(teacher_result.net, cfg.ranges, cfg.dataset_samples,
                                          derive_seed(cfg.trainer.seed, 41), jobs, "randomized",
                                          cfg.reward.alpha, cfg.bler);
  const auto single_data_path = (dir / "dataset_single.ds").string();
  single_data.save(single_data_path);
  outputs.push_back(single_data_path);

  std::vector<distill::DistillDataset> specialist_data;
  for (size_t i = 0; i < families.size(); ++i) {
    auto d = distill::gen_dataset(specialists[i], evalkit::specialist_ranges(families[i]),
                                  cfg.specialist_dataset_samples,
                                  derive_seed(cfg.trainer.seed, 51 + i), jobs, families[i],
                                  cfg.reward.alpha, cfg.bler);
    const auto path = (dir / ("dataset_" + families[i] + ".ds")).string();
    d.save(path);
    outputs.push_back(path);
    specialist_data.push_back(std::move(d));
  }
  auto multi_data = distill::aggregate_shuffle(specialist_data, derive_seed(cfg.trainer.seed, 61));
  // every source family must be covered by the benchmark evaluation below
  for (const auto& tag : multi_data.meta.scenario_tags) {
    evalkit::ScenarioSuite::standard().by_name(tag);
  }
  std::printf("      done at %.1f min\n", elapsed_min());

  // 4. students, both modes
  std::printf("[4/6] distilling students (%zu sizes x 2 modes)...\n", cfg.student_sizes.size());
  struct Student {
    std::string mode;
    std::string size;
    net::DenseNet net;
  };
  std::vector<Student> students;
  for (const auto& size : cfg.student_sizes) {
    for (const auto& [mode, data] :
         {std::pair{std::string("single-policy"), &single_data},
          std::pair{std::string("multi-policy"), &multi_data}}) {
      distill::DistillConfig dc = cfg.distiller;
      dc.hidden = parse_hidden(size);
      dc.seed = derive_seed(cfg.distiller.seed, fnv1a64(mode + size));
      auto res = distill::distill(*data, dc);
      const auto tagname = (mode == "single-policy" ? "single_" : "multi_") + size;
      const auto path = (dir / ("student_" + tagname + ".model")).string();
      res.student.save(path);
      write_text(path + ".log.csv", distill::distill_log_csv(res.log));
      outputs.push_back(path);
      students.push_back({mode, size, std::move(res.student)});
    }
  }
  std::printf("      done at %.1f min\n", elapsed_min());

  // 5. scratch control: same architecture as the smallest student, trained
  // directly with the teacher's env-step budget
  const std::string control_size = cfg.student_sizes.back();
  std::printf("[5/6] training scratch control (%s, %ld env steps)...\n", control_size.c_str(),
              cfg.trainer.total_env_steps);
  dqn::TrainerConfig ccfg = cfg.trainer;
  ccfg.hidden = parse_hidden(control_size);
  ccfg.seed = derive_seed(cfg.trainer.seed, 71);
  auto control_result =
      dqn::train_teacher(ccfg, cfg.ranges, args.deterministic, "", {}, cfg.bler);
  const auto control_path = (dir / ("scratch_" + control_size + ".model")).string();
  control_result.net.save(control_path);
  outputs.push_back(control_path);
  std::printf("      done at %.1f min\n", elapsed_min());

  // 6. evaluation and reports
  std::printf("[6/6] evaluating on the benchmark suite (%ld episodes/scenario)...\n",
              cfg.eval_episodes);
  const auto suite = evalkit::ScenarioSuite::standard();
  evalkit::EvalOptions opts;
  opts.reward = cfg.reward;
  opts.bler_model = cfg.bler;

  std::vector<evalkit::ScenarioReports> reports;
  std::vector<evalkit::ComparisonRow> rows;
  json summary = json::object();
  for (size_t si = 0; si < suite.scenarios.size(); ++si) {
    const auto& bs = suite.scenarios[si];
    evalkit::ScenarioReports sr;
    sr.scenario = bs.name;

    auto run = [&](const std::string& name, evalkit::Policy& p) {
      evalkit::PolicyEval pe;
      pe.policy_name = name;
      pe.report = evalkit::evaluate(p, bs, cfg.eval_episodes, bs.eval_seed, opts);
      pe.pdf = evalkit::action_pdf(p, bs, cfg.pdf_steps, derive_seed(bs.eval_seed, 1), opts);
      sr.evals.push_back(pe);
      return pe.report;
    };

    evalkit::OllaPolicy olla(baseline::OllaState::make(), cfg.bler);
    evalkit::GreedyNetPolicy teacher_policy(teacher_result.net);
    const auto olla_report = run("olla", olla);
    const auto teacher_report = run("teacher", teacher_policy);
    evalkit::GreedyNetPolicy specialist_policy(specialists[si]);
    const auto specialist_report = run("specialist", specialist_policy);

    const auto teacher_vs_olla = evalkit::relative_gain(teacher_report, olla_report);
    summary["teacher_vs_olla"][bs.name] = {
        {"delta_T_pct", teacher_vs_olla.delta_throughput_pct.value_or(0.0)},
        {"delta_r_pct", teacher_vs_olla.delta_reward_pct.value_or(0.0)}};

    for (const auto& st : students) {
      evalkit::GreedyNetPolicy sp(st.net);
      const auto sr_report = run(st.mode + " " + st.size, sp);
      const auto& reference =
          st.mode == "multi-policy" ? specialist_report : teacher_report;
      rows.push_back({st.mode, st.size, bs.name, evalkit::relative_gain(sr_report, reference)});
    }

    evalkit::GreedyNetPolicy cp(control_result.net);
    const auto control_report = run("scratch " + control_size, cp);
    rows.push_back({"scratch-control", control_size, bs.name,
                    evalkit::relative_gain(control_report, teacher_report)});

    reports.push_back(std::move(sr));
  }

  json manifest = common_manifest("reproduce-paper", args, cfg);
  manifest["summary"] = summary;
  json seeds = json::object();
  for (const auto& bs : suite.scenarios) seeds[bs.name] = bs.eval_seed;
  manifest["eval_seeds"] = seeds;
  evalkit::report_write(reports, rows, manifest, args.out_dir, args.svg);
  outputs.push_back((dir / "table2.csv").string());
  write_manifest(dir, manifest, outputs);

  std::printf("done in %.1f min; %zu comparison rows -> %s\n", elapsed_min(), rows.size(),
              (dir / "table2.csv").string().c_str());
  for (const auto& row : rows) {
    std::printf("  %-15s %-5s %-6s dT=%+7.2f%% dBLER=%+7.2f%% dr=%+7.2f%%\n",
                row.distillation.c_str(), row.student.c_str(), row.scenario.c_str(),
                row.comparison.delta_throughput_pct.value_or(0.0),
                row.comparison.delta_bler_pct.value_or(0.0),
                row.comparison.delta_reward_pct.value_or(0.0));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RL link adaptation + policy distillation toolkit"};
  app.require_subcommand(0, 1);

  std::string init_config_path;
  app.add_option("--init-config", init_config_path,
                 "write a config file with all defaults and exit");

  CommonArgs train_args, gen_args, distill_args, eval_args, repro_args;

  auto* train = app.add_subcommand("train-teacher", "train a DQN teacher");
  add_common(train, train_args);
  std::string train_hidden;
  long train_steps = -1;
  train->add_option("--hidden", train_hidden, "architecture, e.g. 7x128 or 128,128");
  train->add_option("--env-steps", train_steps, "env-step budget (overrides config)");

  auto* gen = app.add_subcommand("gen-distill-data", "generate a distillation dataset");
  add_common(gen, gen_args);
  std::string gen_teacher, gen_mode = "fresh", gen_replay, gen_out = "dataset.ds",
                           gen_tag = "randomized";
  size_t gen_n = 200000;
  gen->add_option("--teacher", gen_teacher, "teacher model file")->required();
  gen->add_option("--mode", gen_mode, "fresh | replay");
  gen->add_option("--replay", gen_replay, "replay dump (for --mode replay)");
  gen->add_option("--n", gen_n, "sample count (fresh mode)");
  gen->add_option("--out-file", gen_out, "dataset output path");
  gen->add_option("--tag", gen_tag, "scenario tag stored in the metadata");

  auto* dist = app.add_subcommand("distill", "train a student against dataset(s)");
  add_common(dist, distill_args);
  std::vector<std::string> dist_data;
  std::string dist_student, dist_out = "student.model";
  double dist_tau = -1, dist_lr = -1;
  int dist_epochs = -1;
  dist->add_option("--data", dist_data, "dataset file(s); several = aggregate+shuffle")
      ->required();
  dist->add_option("--student", dist_student, "student size, e.g. 3x32");
  dist->add_option("--tau", dist_tau, "distillation temperature");
  dist->add_option("--epochs", dist_epochs, "training epochs");
  dist->add_option("--lr", dist_lr, "learning rate");
  dist->add_option("--out-file", dist_out, "student model output path");

  auto* ev = app.add_subcommand("evaluate", "evaluate policies on the benchmark suite");
  add_common(ev, eval_args);
  std::vector<std::string> ev_policies;
  std::string ev_reference, ev_scenarios;
  long ev_episodes = -1, ev_pdf_steps = -1;
  ev->add_option("--policy", ev_policies,
                 "NAME=SPEC with SPEC one of: model path, olla, fixed:K")
      ->required();
  ev->add_option("--reference", ev_reference, "reference policy for relative gains");
  ev->add_option("--scenarios", ev_scenarios, "comma list (default SCSU,MIMO,mMIMO)");
  ev->add_option("--episodes", ev_episodes, "episodes per scenario");
  ev->add_option("--pdf-steps", ev_pdf_steps, "steps for the action PDF");

  auto* repro = app.add_subcommand("reproduce-paper", "run the full desk-scale pipeline");
  add_common(repro, repro_args);
  long rp_teacher_steps = -1, rp_specialist_steps = -1, rp_dataset_samples = -1;
  repro->add_option("--teacher-steps", rp_teacher_steps, "teacher env-step budget");
  repro->add_option("--specialist-steps", rp_specialist_steps, "specialist env-step budget");
  repro->add_option("--dataset-samples", rp_dataset_samples, "single-policy dataset size");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!init_config_path.empty()) {
      write_text(init_config_path, config_to_json(RunConfig{}).dump(2) + "\n");
      std::printf("wrote default config to %s\n", init_config_path.c_str());
      return 0;
    }
    if (train->parsed()) return cmd_train_teacher(train_args, train_hidden, train_steps);
    if (gen->parsed()) {
      return cmd_gen_distill_data(gen_args, gen_teacher, gen_mode, gen_replay, gen_n, gen_out,
                                  gen_tag);
    }
    if (dist->parsed()) {
      return cmd_distill(distill_args, dist_data, dist_student, dist_tau, dist_epochs, dist_lr,
                         dist_out);
    }
    if (ev->parsed()) {
      return cmd_evaluate(eval_args, ev_policies, ev_reference, ev_scenarios, ev_episodes,
                          ev_pdf_steps);
    }
    if (repro->parsed()) {
      return cmd_reproduce_paper(repro_args, rp_teacher_steps, rp_specialist_steps,
                                 rp_dataset_samples);
    }
    std::printf("%s\n", app.help().c_str());
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
