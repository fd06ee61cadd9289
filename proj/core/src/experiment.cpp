#include "llv/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "llv/control.hpp"
#include "llv/format.hpp"
#include "llv/matrix_io.hpp"
#include "llv/rng.hpp"

namespace llv {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

template <class F>
auto in_stage(const char* name, F&& f) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

json number(double x) { return std::isfinite(x) ? json(x) : json(format_double(x)); }

json vector_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number(v(i)));
  return out;
}

json spec_json(const PlantSpec& s) {
  return {{"kind", std::string(to_string(s.kind))},
          {"depth", s.depth},
          {"hidden_width", s.hidden_width},
          {"seq_len", s.seq_len},
          {"seed", s.seed},
          {"blend_gamma", s.blend_gamma},
          {"label", s.label()},
          {"spec_hash", s.hash()}};
}

// Output directory is left out so that runs into different trees compare equal.
json config_json(const ExperimentConfig& c) {
  json j = json::object();
  std::istringstream ini(to_ini(c));
  std::string line, section;
  while (std::getline(ini, line)) {
    if (line.empty()) continue;
    if (line.front() == '[') {
      section = line.substr(1, line.size() - 2);
      continue;
    }
    const auto eq = line.find('=');
    const std::string key = line.substr(0, eq);
    if (section == "output") continue;
    j[section][key] = line.substr(eq + 1);
  }
  return j;
}

void merge_summary(const fs::path& dir, const std::string& section, json value) {
  const fs::path path = dir / "summary.json";
  json root = json::object();
  if (fs::exists(path)) {
    std::ifstream in(path);
    root = json::parse(in, nullptr, /*allow_exceptions=*/false);
    if (root.is_discarded() || !root.is_object()) root = json::object();
  }
  root[section] = std::move(value);
  io::write_text_file(path, root.dump(2) + "\n");
}

void remove_files(const fs::path& dir, std::initializer_list<const char*> names) {
  for (const char* n : names) fs::remove(dir / n);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

// Reads a CSV with a header row into maps keyed by column name.
std::vector<std::map<std::string, std::string>> read_csv(const fs::path& path) {
  std::ifstream in(path);
  std::vector<std::map<std::string, std::string>> rows;
  std::string line;
  if (!std::getline(in, line)) return rows;
  const auto header = split_csv_line(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    std::map<std::string, std::string> row;
    for (std::size_t i = 0; i < header.size() && i < fields.size(); ++i) row[header[i]] = fields[i];
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string topk_column(const ExperimentConfig& c) { return "top" + std::to_string(c.topk); }

// Runs gains for every task of one (plant, seed) cell and writes its files.
// Returns the main-epsilon agreement rows.
std::vector<ScalingRow> run_gains_cell(const ExperimentConfig& c, const PlantSpec& spec) {
  const fs::path dir = cell_dir(c, spec);
  fs::create_directories(dir);
  std::vector<ScalingRow> rows;
  try {
    const Plant plant = in_stage("build plant", [&] { return build_plant(spec); });
    std::ostringstream gains_csv, agreement_csv;
    gains_csv << "task,epsilon,layer,g_pred,g_emp\n";
    agreement_csv << "plant_size,seed,task,epsilon,d,basis,spearman,pearson," << topk_column(c) << '\n';
    json tasks = json::array();
    const std::size_t ks[] = {c.topk};

    for (std::size_t t = 0; t < c.tasks; ++t) {
      TaskRun run = identify_task(plant, c, spec.seed, t);
      in_stage("empirical gains", [&] { measure_empirical(plant, c, run); });
      json task_json = {{"task", t},
                        {"bundle_seed", run.bundle.seed},
                        {"predicted", vector_json(run.profile.predicted)},
                        {"empirical", json::object()},
                        {"agreement", json::object()}};
      const Eigen::VectorXd& pred = run.profile.predicted;
      for (const auto& [eps, emp] : run.empirical) {
        for (Eigen::Index k = 0; k < pred.size(); ++k)
          gains_csv << t << ',' << format_double(eps) << ',' << k << ',' << format_double(pred(k)) << ','
                    << format_double(emp(k)) << '\n';
        const auto a = in_stage("agreement", [&] {
          return agreement({pred.data(), static_cast<std::size_t>(pred.size())},
                           {emp.data(), static_cast<std::size_t>(emp.size())}, ks);
        });
        const auto topk = a.topk_overlap.count(c.topk) ? a.topk_overlap.at(c.topk) : std::nan("");
        agreement_csv << spec.label() << ',' << spec.seed << ',' << t << ',' << format_double(eps) << ','
                      << c.reduced_dim << ',' << to_string(c.complement) << ',' << format_double(a.spearman)
                      << ',' << format_double(a.pearson) << ',' << format_double(topk) << '\n';
        const std::string key = format_double(eps);
        task_json["empirical"][key] = vector_json(emp);
        task_json["agreement"][key] = {{"spearman", number(a.spearman)},
                                       {"pearson", number(a.pearson)},
                                       {topk_column(c), number(topk)}};
        if (eps == c.main_epsilon)
          rows.push_back({spec.label(), spec.seed, "task" + std::to_string(t), a.spearman, a.pearson});
      }
      if (c.export_matrices) {
        in_stage("export matrices", [&] {
          const std::string stem = "task" + std::to_string(t);
          io::write_matrix_file(dir / (stem + "_directions.txt"), run.dirs.as_matrix());
          for (std::size_t l = 0; l < run.basis.mats.size(); ++l)
            io::write_matrix_file(dir / (stem + "_basis_depth" + std::to_string(l) + ".txt"), run.basis.mats[l]);
          return 0;
        });
      }
      tasks.push_back(std::move(task_json));
    }

    io::write_text_file(dir / "gains.csv", gains_csv.str());
    io::write_text_file(dir / "agreement.csv", agreement_csv.str());
    merge_summary(dir, "gains",
                  {{"status", "complete"}, {"plant", spec_json(spec)}, {"config", config_json(c)}, {"tasks", tasks}});
  } catch (const StageError& e) {
    remove_files(dir, {"gains.csv", "agreement.csv"});
    merge_summary(dir, "gains",
                  {{"status", "incomplete"}, {"failed_stage", e.stage()}, {"error", e.what()}, {"plant", spec_json(spec)}});
    throw;
  }
  return rows;
}

}  // namespace

std::uint64_t task_seed(std::uint64_t seed, std::size_t task) { return rng::derive(seed, rng::Tag::Task, task); }

fs::path cell_dir(const ExperimentConfig& config, const PlantSpec& spec) {
  return config.output_dir / spec.label() / std::to_string(spec.seed);
}

TaskRun identify_task(const Plant& plant, const ExperimentConfig& c, std::uint64_t seed, std::size_t task) {
  TaskRun run;
  run.task = task;
  const std::uint64_t tseed = task_seed(seed, task);
  run.bundle = in_stage("generate bundle",
                        [&] { return generate_bundle(plant.spec(), c.sizes, c.signal_strength, tseed); });
  run.dirs = in_stage("concept directions", [&] { return estimate_directions(plant, run.bundle.concept_split); });
  const auto operating_prompts = embeddings(run.bundle.operating_split);
  const auto operating = in_stage("operating trajectories", [&] { return run_trajectories(plant, operating_prompts); });
  const FdConfig fd{c.fd_step};
  run.basis = in_stage("reduced basis", [&] {
    return c.complement == ComplementKind::Krylov
               ? build_krylov_basis(plant, operating, run.dirs, c.reduced_dim, c.n_basis_prompts, fd, tseed)
               : build_random_basis(run.dirs, c.reduced_dim, tseed);
  });
  const auto surrogate =
      in_stage("identification", [&] { return identify_surrogate(plant, operating, run.basis, run.dirs, fd); });
  run.profile = in_stage("predicted gains", [&] { return predict_gains(surrogate); });
  return run;
}

void measure_empirical(const Plant& plant, const ExperimentConfig& c, TaskRun& run) {
  const auto eval = embeddings(run.bundle.eval_split);
  run.empirical.clear();
  for (double eps : c.epsilons) run.empirical.emplace_back(eps, empirical_gain_curve(plant, eval, run.dirs, eps));
  run.profile.empirical = Eigen::VectorXd();
  for (const auto& [eps, curve] : run.empirical)
    if (eps == c.main_epsilon) run.profile.empirical = curve;
}

ControlOutcome run_control(const Plant& plant, const ExperimentConfig& c, std::uint64_t seed, std::size_t task,
                           const PromptBundle& bundle, const ConceptDirections& dirs, const Eigen::VectorXd& gains) {
  const auto eval = embeddings(bundle.eval_split);
  const ShiftEvaluator evaluator(plant, eval, dirs);
  const AmplitudeSearch search{1e-3, c.max_amplitude, c.bisection_tol, c.max_iter};

  struct Method {
    std::string name;
    std::optional<InjectionSchedule> direction;
    std::string failure;
  };
  std::vector<Method> methods;
  ControlOutcome out;

  Method llv{"llv-optimal", std::nullopt, ""};
  try {
    llv.direction = control_direction(gains, evaluator);
    out.llv_direction = llv.direction->coeffs;
  } catch (const UncontrollableConcept& e) {
    llv.failure = "uncontrollable";
    out.llv_error = e.what();
  } catch (const FlatResponse& e) {
    llv.failure = "flat-response";
    out.llv_error = e.what();
  }
  methods.push_back(std::move(llv));
  for (auto& b : baseline_schedules(plant.depth(), seed)) {
    Method m{b.name, std::nullopt, ""};
    try {
      m.direction = orient(b.schedule, evaluator);
    } catch (const FlatResponse&) {
      m.failure = "flat-response";
    }
    methods.push_back(std::move(m));
  }

  for (double target : c.targets) {
    const std::size_t first = out.rows.size();
    for (const auto& m : methods) {
      ControlRow row;
      row.task = task;
      row.method = m.name;
      row.target = target;
      if (!m.direction) {
        row.status = m.failure;
        row.result.alpha = row.result.energy = row.result.realized_shift = std::nan("");
      } else {
        try {
          row.result = min_amplitude(evaluator, *m.direction, target, search);
          row.status = row.result.reachable ? "ok" : "unreachable";
        } catch (const OrientationFailure&) {
          row.status = "orientation-failure";
          row.result.alpha = row.result.energy = row.result.realized_shift = std::nan("");
        }
      }
      out.rows.push_back(std::move(row));
    }
    const ControlRow& ref = out.rows[first];
    for (std::size_t i = first; i < out.rows.size(); ++i) {
      ControlRow& row = out.rows[i];
      if (ref.status != "ok") row.energy_ratio = std::nan("");
      else if (row.status == "unreachable") row.energy_ratio = HUGE_VAL;
      else if (row.status != "ok") row.energy_ratio = std::nan("");
      else row.energy_ratio = row.result.energy / ref.result.energy;
    }
  }
  return out;
}

void cmd_gen_data(const ExperimentConfig& c) {
  c.validate();
  for (std::uint64_t seed : c.seeds) {
    const PlantSpec spec = c.plant_for(seed);
    const fs::path dir = cell_dir(c, spec);
    json files = json::array();
    for (std::size_t t = 0; t < c.tasks; ++t) {
      const PromptBundle b = in_stage("generate bundle", [&] {
        return generate_bundle(spec, c.sizes, c.signal_strength, task_seed(seed, t));
      });
      const std::pair<const char*, const PromptSet*> splits[] = {
          {"concept", &b.concept_split}, {"operating", &b.operating_split}, {"eval", &b.eval_split}};
      for (const auto& [name, set] : splits) {
        const std::string file = "bundle_task" + std::to_string(t) + "_" + name + ".txt";
        std::ostringstream out;
        io::write_prompts(out, *set, b.seed, spec.hash());
        in_stage("write bundle", [&] {
          io::write_text_file(dir / file, out.str());
          return 0;
        });
        files.push_back(file);
      }
    }
    merge_summary(dir, "gen-data", {{"status", "complete"}, {"plant", spec_json(spec)}, {"files", files}});
  }
}

void cmd_gains(const ExperimentConfig& c) {
  c.validate();
  for (std::uint64_t seed : c.seeds) run_gains_cell(c, c.plant_for(seed));
}

void cmd_control(const ExperimentConfig& c) {
  c.validate();
  for (std::uint64_t seed : c.seeds) {
    const PlantSpec spec = c.plant_for(seed);
    const fs::path dir = cell_dir(c, spec);
    fs::create_directories(dir);
    try {
      const Plant plant = in_stage("build plant", [&] { return build_plant(spec); });
      std::ostringstream control_csv, ratio_csv;
      control_csv << "task,method,dy_target,amplitude,energy,realized_shift,reachable,monotone,status\n";
      ratio_csv << "task,method,dy_target,energy_ratio\n";
      json tasks = json::array();
      for (std::size_t t = 0; t < c.tasks; ++t) {
        const TaskRun run = identify_task(plant, c, seed, t);
        const ControlOutcome outcome = in_stage("control", [&] {
          return run_control(plant, c, seed, t, run.bundle, run.dirs, run.profile.predicted);
        });
        for (const auto& row : outcome.rows) {
          control_csv << row.task << ',' << row.method << ',' << format_double(row.target) << ','
                      << format_double(row.result.alpha) << ',' << format_double(row.result.energy) << ','
                      << format_double(row.result.realized_shift) << ',' << (row.status == "ok" ? 1 : 0) << ','
                      << (row.result.monotone_verified ? 1 : 0) << ',' << row.status << '\n';
          ratio_csv << row.task << ',' << row.method << ',' << format_double(row.target) << ','
                    << format_double(row.energy_ratio) << '\n';
        }
        json task_json = {{"task", t}, {"predicted_gains", vector_json(run.profile.predicted)}};
        if (outcome.llv_direction.size() > 0) {
          task_json["llv_direction"] = vector_json(outcome.llv_direction);
          json ustar = json::object();
          for (double target : c.targets)
            ustar[format_double(target)] = vector_json(min_energy_schedule(run.profile.predicted, target).coeffs);
          task_json["min_energy_schedules"] = ustar;
        } else {
          task_json["llv_error"] = outcome.llv_error;
        }
        json baselines = json::array();
        for (const auto& b : baseline_schedules(plant.depth(), seed))
          baselines.push_back({{"name", b.name}, {"coeffs", vector_json(b.schedule.coeffs)}});
        task_json["baselines"] = baselines;
        tasks.push_back(std::move(task_json));
      }
      io::write_text_file(dir / "control.csv", control_csv.str());
      io::write_text_file(dir / "energy_ratio.csv", ratio_csv.str());
      merge_summary(dir, "control",
                    {{"status", "complete"}, {"plant", spec_json(spec)}, {"config", config_json(c)}, {"tasks", tasks}});
    } catch (const StageError& e) {
      remove_files(dir, {"control.csv", "energy_ratio.csv"});
      merge_summary(dir, "control",
                    {{"status", "incomplete"}, {"failed_stage", e.stage()}, {"error", e.what()}, {"plant", spec_json(spec)}});
      throw;
    }
  }
}

ScalingSummary cmd_scaling(const ExperimentConfig& c) {
  c.validate();
  const std::vector<std::size_t> ladder =
      c.width_ladder.empty() ? std::vector<std::size_t>{c.plant.hidden_width} : c.width_ladder;

  std::vector<ScalingRow> rows;
  json failures = json::array();
  std::vector<std::string> labels;
  for (std::size_t width : ladder) {
    labels.push_back(c.plant_for(0, width).label());
    for (std::uint64_t seed : c.seeds) {
      const PlantSpec spec = c.plant_for(seed, width);
      try {
        const auto cell = run_gains_cell(c, spec);
        rows.insert(rows.end(), cell.begin(), cell.end());
      } catch (const StageError& e) {
        failures.push_back({{"plant_size", spec.label()}, {"seed", seed}, {"stage", e.stage()}, {"error", e.what()}});
      }
    }
  }
  if (rows.empty()) throw StageError("aggregate", "every scaling cell failed");
  const ScalingSummary summary = aggregate_scaling(rows);

  const fs::path dir = c.output_dir / "scaling";
  std::ostringstream per_size, per_seed, by_task;
  per_size << "plant_size,seeds,mean_spearman,median_spearman,mean_pearson,median_pearson\n";
  json sizes = json::array();
  // Ladder order, so the monotonicity report follows the configured sizes.
  std::vector<double> ladder_means;
  for (const auto& label : labels) {
    auto it = std::find_if(summary.per_size.begin(), summary.per_size.end(),
                           [&](const SizeSummary& s) { return s.size == label; });
    if (it == summary.per_size.end()) continue;
    per_size << it->size << ',' << it->seeds << ',' << format_double(it->mean_spearman) << ','
             << format_double(it->median_spearman) << ',' << format_double(it->mean_pearson) << ','
             << format_double(it->median_pearson) << '\n';
    sizes.push_back({{"plant_size", it->size},
                     {"seeds", it->seeds},
                     {"mean_spearman", number(it->mean_spearman)},
                     {"median_spearman", number(it->median_spearman)},
                     {"mean_pearson", number(it->mean_pearson)},
                     {"median_pearson", number(it->median_pearson)}});
    ladder_means.push_back(it->mean_spearman);
  }
  per_seed << "plant_size,seed,tasks,mean_spearman,mean_pearson\n";
  for (const auto& s : summary.per_seed)
    per_seed << s.size << ',' << s.seed << ',' << s.tasks << ',' << format_double(s.mean_spearman) << ','
             << format_double(s.mean_pearson) << '\n';
  by_task << "plant_size,seed,task,spearman,pearson\n";
  for (const auto& r : summary.by_task)
    by_task << r.size << ',' << r.seed << ',' << r.task << ',' << format_double(r.spearman) << ','
            << format_double(r.pearson) << '\n';

  bool monotone = true;
  for (std::size_t i = 1; i < ladder_means.size(); ++i)
    if (!(ladder_means[i] >= ladder_means[i - 1])) monotone = false;

  io::write_text_file(dir / "summary.csv", per_size.str());
  io::write_text_file(dir / "per_seed.csv", per_seed.str());
  io::write_text_file(dir / "by_task.csv", by_task.str());
  const json report = {{"complete", failures.empty()},
                       {"failures", failures},
                       {"epsilon", c.main_epsilon},
                       {"sizes", sizes},
                       {"mean_spearman_monotone_in_size", monotone},
                       {"config", config_json(c)}};
  io::write_text_file(dir / "summary.json", report.dump(2) + "\n");
  return summary;
}

std::string cmd_report(const ExperimentConfig& c) {
  if (!fs::is_directory(c.output_dir)) throw StageError("report", "no output tree at " + c.output_dir.string());
  std::vector<fs::path> size_dirs;
  for (const auto& e : fs::directory_iterator(c.output_dir))
    if (e.is_directory() && e.path().filename() != "scaling") size_dirs.push_back(e.path());
  std::sort(size_dirs.begin(), size_dirs.end());

  std::vector<ScalingRow> rows;
  // (size, method, target) -> energy ratios of ok rows
  std::map<std::tuple<std::string, std::string, double>, std::vector<double>> ratios;
  // (size, method, status) -> count of control rows that did not finish ok
  std::map<std::tuple<std::string, std::string, std::string>, std::size_t> issues;
  for (const auto& sd : size_dirs) {
    std::vector<fs::path> seed_dirs;
    for (const auto& e : fs::directory_iterator(sd))
      if (e.is_directory()) seed_dirs.push_back(e.path());
    std::sort(seed_dirs.begin(), seed_dirs.end());
    for (const auto& dir : seed_dirs) {
      const std::string size = sd.filename().string();
      for (const auto& r : read_csv(dir / "agreement.csv")) {
        if (parse_double(r.at("epsilon")) != c.main_epsilon) continue;
        rows.push_back({r.at("plant_size"), std::stoull(r.at("seed")), "task" + r.at("task"),
                        parse_double(r.at("spearman")), parse_double(r.at("pearson"))});
      }
      for (const auto& r : read_csv(dir / "energy_ratio.csv")) {
        const double ratio = parse_double(r.at("energy_ratio"));
        if (std::isnan(ratio)) continue;
        ratios[{size, r.at("method"), parse_double(r.at("dy_target"))}].push_back(ratio);
      }
      for (const auto& r : read_csv(dir / "control.csv"))
        if (r.at("status") != "ok") ++issues[{size, r.at("method"), r.at("status")}];
    }
  }

  json report = {{"epsilon", c.main_epsilon},
                 {"agreement", json::array()},
                 {"energy_ratio", json::array()},
                 {"control_issues", json::array()}};
  std::ostringstream text;
  if (!rows.empty()) {
    const auto summary = aggregate_scaling(rows);
    text << "agreement at epsilon " << format_double(c.main_epsilon) << "\n";
    text << "  plant_size  seeds  mean_spearman  median_spearman  mean_pearson  median_pearson\n";
    for (const auto& s : summary.per_size) {
      text << "  " << s.size << "  " << s.seeds << "  " << format_double(s.mean_spearman) << "  "
           << format_double(s.median_spearman) << "  " << format_double(s.mean_pearson) << "  "
           << format_double(s.median_pearson) << '\n';
      report["agreement"].push_back({{"plant_size", s.size},
                                     {"seeds", s.seeds},
                                     {"mean_spearman", number(s.mean_spearman)},
                                     {"median_spearman", number(s.median_spearman)},
                                     {"mean_pearson", number(s.mean_pearson)},
                                     {"median_pearson", number(s.median_pearson)}});
    }
  }
  if (!ratios.empty()) {
    text << "energy ratio vs llv-optimal (mean over seeds and tasks)\n";
    for (const auto& [key, values] : ratios) {
      const auto& [size, method, target] = key;
      double sum = 0.0;
      for (double v : values) sum += v;
      const double mean = sum / static_cast<double>(values.size());
      text << "  " << size << "  " << method << "  dy=" << format_double(target) << "  " << format_double(mean)
           << "  (n=" << values.size() << ")\n";
      report["energy_ratio"].push_back({{"plant_size", size},
                                        {"method", method},
                                        {"dy_target", target},
                                        {"mean_ratio", number(mean)},
                                        {"count", values.size()}});
    }
  }
  if (!issues.empty()) {
    text << "control rows not reaching ok\n";
    for (const auto& [key, count] : issues) {
      const auto& [size, method, status] = key;
      text << "  " << size << "  " << method << "  " << status << "  (n=" << count << ")\n";
      report["control_issues"].push_back({{"plant_size", size}, {"method", method}, {"status", status}, {"count", count}});
    }
  }
  if (rows.empty() && ratios.empty() && issues.empty()) text << "no completed cells under " << c.output_dir.string() << '\n';
  io::write_text_file(c.output_dir / "report.json", report.dump(2) + "\n");
  return text.str();
}

}  // namespace llv
