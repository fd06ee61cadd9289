#include "llv/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "llv/error.hpp"
#include "llv/format.hpp"

namespace llv {

namespace pt = boost::property_tree;

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto piece = trim(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start));
    if (!piece.empty()) out.push_back(piece);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& text) {
  try {
    std::size_t pos = 0;
    if (!text.empty() && text.front() == '-') throw std::invalid_argument("negative");
    const auto v = std::stoull(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw InvalidArgument("config key '" + key + "': expected a nonnegative integer, got '" + text + "'");
  }
}

double parse_real(const std::string& key, const std::string& text) {
  try {
    return parse_double(text);
  } catch (const Error&) {
    throw InvalidArgument("config key '" + key + "': expected a number, got '" + text + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw InvalidArgument("config key '" + key + "': expected a boolean, got '" + text + "'");
}

template <class T, class F>
std::string join(const std::vector<T>& xs, F&& fmt) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    out += fmt(xs[i]);
  }
  return out;
}

std::string fmt_u64(std::uint64_t v) { return std::to_string(v); }

// Sets one key from its text form. Unknown keys are errors.
void assign(ExperimentConfig& c, const std::string& key, const std::string& value) {
  auto reals = [&] {
    std::vector<double> out;
    for (const auto& s : split_list(value)) out.push_back(parse_real(key, s));
    return out;
  };
  auto size = [&] { return static_cast<std::size_t>(parse_u64(key, value)); };

  if (key == "plant.kind") c.plant.kind = parse_plant_kind(value);
  else if (key == "plant.depth") c.plant.depth = size();
  else if (key == "plant.hidden_width") c.plant.hidden_width = size();
  else if (key == "plant.seq_len") c.plant.seq_len = size();
  else if (key == "plant.blend_gamma") c.plant.blend_gamma = parse_real(key, value);
  else if (key == "plant.seeds") {
    c.seeds.clear();
    for (const auto& s : split_list(value)) c.seeds.push_back(parse_u64(key, s));
  } else if (key == "plant.width_ladder") {
    c.width_ladder.clear();
    for (const auto& s : split_list(value)) c.width_ladder.push_back(static_cast<std::size_t>(parse_u64(key, s)));
  } else if (key == "bundle.n_concept") c.sizes.n_concept = size();
  else if (key == "bundle.n_operating") c.sizes.n_operating = size();
  else if (key == "bundle.n_eval") c.sizes.n_eval = size();
  else if (key == "bundle.signal_strength") c.signal_strength = parse_real(key, value);
  else if (key == "bundle.tasks") c.tasks = size();
  else if (key == "identification.reduced_dim") c.reduced_dim = size();
  else if (key == "identification.complement") c.complement = parse_complement_kind(value);
  else if (key == "identification.n_basis_prompts") c.n_basis_prompts = size();
  else if (key == "identification.fd_step") c.fd_step = parse_real(key, value);
  else if (key == "identification.export_matrices") c.export_matrices = parse_bool(key, value);
  else if (key == "evaluation.epsilons") c.epsilons = reals();
  else if (key == "evaluation.main_epsilon") c.main_epsilon = parse_real(key, value);
  else if (key == "evaluation.eval_batch") c.eval_batch = size();
  else if (key == "evaluation.topk") c.topk = size();
  else if (key == "control.targets") c.targets = reals();
  else if (key == "control.tol") c.bisection_tol = parse_real(key, value);
  else if (key == "control.max_iter") c.max_iter = static_cast<int>(parse_u64(key, value));
  else if (key == "control.max_amplitude") c.max_amplitude = parse_real(key, value);
  else if (key == "output.dir") c.output_dir = value;
  else throw InvalidArgument("unknown config key '" + key + "'");
}

}  // namespace

void ExperimentConfig::validate() const {
  plant.validate();
  if (seeds.empty()) throw InvalidArgument("plant.seeds: at least one seed is required");
  for (auto w : width_ladder)
    if (w < 4) throw InvalidArgument("plant.width_ladder: widths must be >= 4");
  if (sizes.n_concept < 4 || sizes.n_operating < 4 || sizes.n_eval < 4)
    throw InvalidArgument("bundle: each split needs at least 4 prompts per class");
  if (!(signal_strength > 0.0)) throw InvalidArgument("bundle.signal_strength must be positive");
  if (tasks < 1) throw InvalidArgument("bundle.tasks must be >= 1");
  if (reduced_dim < 1) throw InvalidArgument("identification.reduced_dim must be >= 1");
  if (reduced_dim > plant.hidden_width)
    throw InvalidArgument("identification.reduced_dim exceeds plant.hidden_width");
  for (auto w : width_ladder)
    if (reduced_dim > w) throw InvalidArgument("identification.reduced_dim exceeds a plant.width_ladder entry");
  if (n_basis_prompts < 1 || n_basis_prompts > 2 * sizes.n_operating)
    throw InvalidArgument("identification.n_basis_prompts must lie in [1, 2 * bundle.n_operating]");
  if (!(fd_step > 0.0)) throw InvalidArgument("identification.fd_step must be positive");
  if (epsilons.empty()) throw InvalidArgument("evaluation.epsilons must not be empty");
  for (double e : epsilons)
    if (!(e > 0.0)) throw InvalidArgument("evaluation.epsilons must be positive");
  if (std::find(epsilons.begin(), epsilons.end(), main_epsilon) == epsilons.end())
    throw InvalidArgument("evaluation.main_epsilon must be one of evaluation.epsilons");
  if (eval_batch < 1) throw InvalidArgument("evaluation.eval_batch must be >= 1");
  if (topk < 1) throw InvalidArgument("evaluation.topk must be >= 1");
  if (targets.empty()) throw InvalidArgument("control.targets must not be empty");
  for (double t : targets)
    if (!(t > 0.0)) throw InvalidArgument("control.targets must be positive");
  if (!(bisection_tol > 0.0)) throw InvalidArgument("control.tol must be positive");
  if (max_iter < 1) throw InvalidArgument("control.max_iter must be >= 1");
  if (!(max_amplitude > 1e-3)) throw InvalidArgument("control.max_amplitude must exceed 1e-3");
}

PlantSpec ExperimentConfig::plant_for(std::uint64_t seed) const {
  PlantSpec s = plant;
  s.seed = seed;
  return s;
}

PlantSpec ExperimentConfig::plant_for(std::uint64_t seed, std::size_t hidden_width) const {
  PlantSpec s = plant_for(seed);
  s.hidden_width = hidden_width;
  return s;
}

ExperimentConfig parse_config(std::string_view ini_text) {
  pt::ptree tree;
  std::istringstream in{std::string(ini_text)};
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw InvalidArgument(std::string("config parse error: ") + e.what());
  }
  ExperimentConfig c;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) throw InvalidArgument("config key '" + section + "' must live in a section");
    for (const auto& [key, value] : body) assign(c, section + "." + key, trim(value.data()));
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string to_ini(const ExperimentConfig& c) {
  pt::ptree tree;
  tree.put("plant.kind", std::string(to_string(c.plant.kind)));
  tree.put("plant.depth", std::to_string(c.plant.depth));
  tree.put("plant.hidden_width", std::to_string(c.plant.hidden_width));
  tree.put("plant.seq_len", std::to_string(c.plant.seq_len));
  tree.put("plant.blend_gamma", format_double(c.plant.blend_gamma));
  tree.put("plant.seeds", join(c.seeds, fmt_u64));
  tree.put("plant.width_ladder", join(c.width_ladder, [](std::size_t w) { return std::to_string(w); }));
  tree.put("bundle.n_concept", std::to_string(c.sizes.n_concept));
  tree.put("bundle.n_operating", std::to_string(c.sizes.n_operating));
  tree.put("bundle.n_eval", std::to_string(c.sizes.n_eval));
  tree.put("bundle.signal_strength", format_double(c.signal_strength));
  tree.put("bundle.tasks", std::to_string(c.tasks));
  tree.put("identification.reduced_dim", std::to_string(c.reduced_dim));
  tree.put("identification.complement", std::string(to_string(c.complement)));
  tree.put("identification.n_basis_prompts", std::to_string(c.n_basis_prompts));
  tree.put("identification.fd_step", format_double(c.fd_step));
  tree.put("identification.export_matrices", c.export_matrices ? "true" : "false");
  tree.put("evaluation.epsilons", join(c.epsilons, format_double));
  tree.put("evaluation.main_epsilon", format_double(c.main_epsilon));
  tree.put("evaluation.eval_batch", std::to_string(c.eval_batch));
  tree.put("evaluation.topk", std::to_string(c.topk));
  tree.put("control.targets", join(c.targets, format_double));
  tree.put("control.tol", format_double(c.bisection_tol));
  tree.put("control.max_iter", std::to_string(c.max_iter));
  tree.put("control.max_amplitude", format_double(c.max_amplitude));
  tree.put("output.dir", c.output_dir.string());
  std::ostringstream out;
  pt::write_ini(out, tree);
  return out.str();
}

void apply_override(ExperimentConfig& config, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos)
    throw InvalidArgument("override '" + std::string(assignment) + "' is not of the form section.key=value");
  assign(config, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

}  // namespace llv
