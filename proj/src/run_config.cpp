#include "dga/run_config.hpp"

#include <fstream>
#include <functional>
#include <type_traits>
#include <unordered_map>

#include "dga/errors.hpp"

namespace dga {

namespace {

std::string strip(const std::string& s) {
  const std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw FormatError("config: bad boolean for " + key + ": '" + v + "'");
}

template <class T>
T parse_num(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    if constexpr (std::is_floating_point_v<T>) {
      const double d = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return static_cast<T>(d);
    } else {
      const unsigned long long u = std::stoull(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return static_cast<T>(u);
    }
  } catch (const std::exception&) {
    throw FormatError("config: bad value for " + key + ": '" + v + "'");
  }
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::unordered_map<std::string, Setter>& setters() {
  static const std::unordered_map<std::string, Setter> table = {
      {"window-size", [](RunConfig& c, const std::string& v, const std::string& k) { c.window = parse_num<real>(v, k); }},
      {"attention-length", [](RunConfig& c, const std::string& v, const std::string& k) { c.steps = parse_num<std::size_t>(v, k); }},
      {"attention-size", [](RunConfig& c, const std::string& v, const std::string& k) { c.attn = parse_num<std::size_t>(v, k); }},
      {"hidden", [](RunConfig& c, const std::string& v, const std::string& k) { c.dim = parse_num<std::size_t>(v, k); }},
      {"layers", [](RunConfig& c, const std::string& v, const std::string& k) { c.layers = parse_num<std::size_t>(v, k); }},
      {"max-len", [](RunConfig& c, const std::string& v, const std::string& k) { c.max_len = parse_num<std::size_t>(v, k); }},
      {"learning-rate", [](RunConfig& c, const std::string& v, const std::string& k) { c.lr = parse_num<real>(v, k); }},
      {"beta1", [](RunConfig& c, const std::string& v, const std::string& k) { c.beta1 = parse_num<real>(v, k); }},
      {"beta2", [](RunConfig& c, const std::string& v, const std::string& k) { c.beta2 = parse_num<real>(v, k); }},
      {"weight-decay", [](RunConfig& c, const std::string& v, const std::string& k) { c.weight_decay = parse_num<real>(v, k); }},
      {"batch-size", [](RunConfig& c, const std::string& v, const std::string& k) { c.batch_size = parse_num<std::size_t>(v, k); }},
      {"max-epochs", [](RunConfig& c, const std::string& v, const std::string& k) { c.max_epochs = parse_num<std::size_t>(v, k); }},
      {"patience", [](RunConfig& c, const std::string& v, const std::string& k) { c.patience = parse_num<std::size_t>(v, k); }},
      {"seed", [](RunConfig& c, const std::string& v, const std::string& k) { c.seed = parse_num<std::uint64_t>(v, k); }},
      {"no-global", [](RunConfig& c, const std::string& v, const std::string& k) { c.no_global = parse_bool(v, k); }},
      {"no-detail", [](RunConfig& c, const std::string& v, const std::string& k) { c.no_detail = parse_bool(v, k); }},
      {"no-gaussian", [](RunConfig& c, const std::string& v, const std::string& k) { c.no_gaussian = parse_bool(v, k); }},
      {"mean-pool-position", [](RunConfig& c, const std::string& v, const std::string& k) { c.mean_pool_position = parse_bool(v, k); }},
      {"log-mask", [](RunConfig& c, const std::string& v, const std::string& k) { c.log_mask = parse_bool(v, k); }},
      {"single-cls", [](RunConfig& c, const std::string& v, const std::string& k) { c.single_cls = parse_bool(v, k); }},
      {"l2-norm-exact", [](RunConfig& c, const std::string& v, const std::string& k) { c.l2_norm_exact = parse_bool(v, k); }},
      {"train", [](RunConfig& c, const std::string& v, const std::string&) { c.train_path = v; }},
      {"valid", [](RunConfig& c, const std::string& v, const std::string&) { c.valid_path = v; }},
      {"test", [](RunConfig& c, const std::string& v, const std::string&) { c.test_path = v; }},
      {"labels", [](RunConfig& c, const std::string& v, const std::string&) { c.labels_path = v; }},
      {"vocab", [](RunConfig& c, const std::string& v, const std::string&) { c.vocab_path = v; }},
      {"checkpoint-in", [](RunConfig& c, const std::string& v, const std::string&) { c.checkpoint_in = v; }},
      {"checkpoint-out", [](RunConfig& c, const std::string& v, const std::string&) { c.checkpoint_out = v; }},
      {"report", [](RunConfig& c, const std::string& v, const std::string&) { c.report_path = v; }},
      {"embeddings-file", [](RunConfig& c, const std::string& v, const std::string&) { c.embeddings_path = v; }},
  };
  return table;
}

}  // namespace

void apply_config_file(const std::string& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open config file: " + path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = strip(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw FormatError("config: line " + std::to_string(lineno) + " is not key=value: " + line);
    const std::string key = strip(line.substr(0, eq));
    const std::string value = strip(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end())
      throw FormatError("config: unknown key '" + key + "' at line " + std::to_string(lineno));
    it->second(cfg, value, key);
  }
}

void validate(const RunConfig& cfg) {
  if (cfg.window <= real(0)) throw FormatError("window size must be positive");
  if (cfg.steps == 0) throw FormatError("attention length must be >= 1");
  if (cfg.attn == 0 || cfg.dim == 0 || cfg.layers == 0)
    throw FormatError("attention size, hidden size and layer count must be >= 1");
  if (cfg.max_len < 5) throw FormatError("max-len must be >= 5 to fit both sentences");
  if (cfg.batch_size == 0) throw FormatError("batch size must be >= 1");
  if (cfg.max_epochs == 0) throw FormatError("max epochs must be >= 1");
  if (cfg.lr <= real(0)) throw FormatError("learning rate must be positive");
  if (cfg.weight_decay < real(0)) throw FormatError("weight decay must be >= 0");
  if (cfg.no_global && cfg.no_detail)
    throw FormatError("no-global and no-detail cannot both be set");
}

ModelConfig to_model_config(const RunConfig& cfg, std::size_t vocab_size, std::size_t classes) {
  ModelConfig m;
  m.vocab_size = vocab_size;
  m.dim = cfg.dim;
  m.layers = cfg.layers;
  m.attn = cfg.attn;
  m.classes = classes;
  m.steps = cfg.steps;
  m.window = cfg.window;
  m.no_global = cfg.no_global;
  m.no_detail = cfg.no_detail;
  m.no_gaussian = cfg.no_gaussian;
  m.log_mask = cfg.log_mask;
  m.mean_pool_position = cfg.mean_pool_position;
  return m;
}

TrainOptions to_train_options(const RunConfig& cfg) {
  TrainOptions o;
  o.lr = cfg.lr;
  o.beta1 = cfg.beta1;
  o.beta2 = cfg.beta2;
  o.weight_decay = cfg.weight_decay;
  o.exact_norm = cfg.l2_norm_exact;
  o.batch_size = cfg.batch_size;
  o.max_epochs = cfg.max_epochs;
  o.patience = cfg.patience;
  o.seed = cfg.seed;
  return o;
}

}  // namespace dga
