#include "cloudseg/pipeline_config.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <string>

namespace cloudseg::config {

namespace {

std::string trim(const std::string& text) {
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
  return text.substr(begin, end - begin);
}

std::string strip_quotes(const std::string& text) {
  if (text.size() >= 2 && text.front() == '"' && text.back() == '"')
    return text.substr(1, text.size() - 2);
  return text;
}

// All "<section>.<key>" entries from the file, each consumed at most once so
// leftovers can be reported as unknown keys.
struct KeyTable {
  fs::path source;
  fs::path base_dir;
  std::map<std::string, std::string> entries;

  const std::string* take(const std::string& key) {
    const auto it = entries.find(key);
    if (it == entries.end()) return nullptr;
    taken_.push_back(it->first);
    return &it->second;
  }

  void finish() {
    for (const std::string& key : taken_) entries.erase(key);
    if (!entries.empty())
      throw ConfigError(source.string() + ": unknown key '" + entries.begin()->first + "'");
  }

 private:
  std::vector<std::string> taken_;
};

KeyTable parse_file(const fs::path& path) {
  std::ifstream file(path);
  if (!file) throw IoError("cannot open config " + path.string());
  KeyTable table;
  table.source = path;
  table.base_dir = path.has_parent_path() ? path.parent_path() : fs::path(".");

  std::string line;
  std::string section;
  std::size_t line_no = 0;
  while (std::getline(file, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string text = trim(line);
    if (text.empty()) continue;

    if (text.front() == '[') {
      if (text.back() != ']' || text.size() < 3)
        throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                          ": malformed section header");
      section = trim(text.substr(1, text.size() - 2));
      if (section.empty())
        throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                          ": empty section name");
      continue;
    }

    const std::size_t eq = text.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                        ": expected key = value");
    const std::string key = trim(text.substr(0, eq));
    const std::string value = strip_quotes(trim(text.substr(eq + 1)));
    if (key.empty())
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": empty key");
    const std::string full = section.empty() ? key : section + "." + key;
    if (!table.entries.emplace(full, value).second)
      throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                        ": duplicate key '" + full + "'");
  }
  return table;
}

long long parse_int(const std::string& text, const std::string& key) {
  try {
    std::size_t used = 0;
    // Base 0 accepts 0x... for the QA bit fields.
    const long long value = std::stoll(text, &used, 0);
    if (used != text.size()) throw std::invalid_argument("trailing");
    return value;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': '" + text + "' is not an integer");
  }
}

double parse_double(const std::string& text, const std::string& key) {
  try {
    std::size_t used = 0;
    const double value = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing");
    return value;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': '" + text + "' is not a number");
  }
}

bool parse_bool(const std::string& text, const std::string& key) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw ConfigError("config key '" + key + "': '" + text + "' is not a boolean");
}

struct Loader {
  KeyTable& table;

  void get_int(const std::string& key, int& out) {
    if (const std::string* v = table.take(key)) {
      const long long value = parse_int(*v, key);
      if (value < INT32_MIN || value > INT32_MAX)
        throw ConfigError("config key '" + key + "': value out of range");
      out = static_cast<int>(value);
    }
  }
  void get_u16(const std::string& key, std::uint16_t& out) {
    if (const std::string* v = table.take(key)) {
      const long long value = parse_int(*v, key);
      if (value < 0 || value > 0xFFFF)
        throw ConfigError("config key '" + key + "': value out of range for 16 bits");
      out = static_cast<std::uint16_t>(value);
    }
  }
  void get_u64(const std::string& key, std::uint64_t& out) {
    if (const std::string* v = table.take(key)) {
      const long long value = parse_int(*v, key);
      if (value < 0) throw ConfigError("config key '" + key + "': value must be >= 0");
      out = static_cast<std::uint64_t>(value);
    }
  }
  void get_double(const std::string& key, double& out) {
    if (const std::string* v = table.take(key)) out = parse_double(*v, key);
  }
  void get_bool(const std::string& key, bool& out) {
    if (const std::string* v = table.take(key)) out = parse_bool(*v, key);
  }
  void get_path(const std::string& key, fs::path& out) {
    if (const std::string* v = table.take(key)) {
      fs::path p(*v);
      out = p.is_absolute() ? p : table.base_dir / p;
    }
  }
};

}  // namespace

PipelineConfig PipelineConfig::load(const fs::path& path) {
  KeyTable table = parse_file(path);
  Loader get{table};
  PipelineConfig cfg;

  get.get_u64("seed", cfg.seed);

  get.get_path("paths.scene_root", cfg.paths.scene_root);
  get.get_path("paths.correction_dir", cfg.paths.correction_dir);
  get.get_path("paths.patch_dir", cfg.paths.patch_dir);
  get.get_path("paths.model_path", cfg.paths.model_path);
  get.get_path("paths.loss_log", cfg.paths.loss_log);
  get.get_path("paths.pred_dir", cfg.paths.pred_dir);
  get.get_path("paths.truth_dir", cfg.paths.truth_dir);
  get.get_path("paths.report_path", cfg.paths.report_path);

  get.get_u16("qa.cloud_mask", cfg.qa.cloud_mask);
  get.get_u16("qa.cloud_value", cfg.qa.cloud_value);
  get.get_u16("qa.snow_mask", cfg.qa.snow_mask);
  get.get_u16("qa.snow_value", cfg.qa.snow_value);

  get.get_int("correction.band", cfg.correction.band);
  if (const std::string* v = table.take("correction.threshold_mode")) {
    if (*v == "percentile")
      cfg.correction.threshold.mode = correction::ThresholdSettings::Mode::percentile;
    else if (*v == "fixed")
      cfg.correction.threshold.mode = correction::ThresholdSettings::Mode::fixed;
    else
      throw ConfigError("correction.threshold_mode: expected 'percentile' or 'fixed', got '" +
                        *v + "'");
  }
  get.get_double("correction.percentile_rank", cfg.correction.threshold.percentile_rank);
  get.get_double("correction.fixed_threshold", cfg.correction.threshold.fixed_value);

  get.get_int("network.input_size", cfg.network.input_size);
  get.get_int("network.base_channels", cfg.network.base_channels);
  get.get_int("network.channel_cap", cfg.network.channel_cap);
  if (const std::string* v = table.take("network.encode_blocks")) {
    const long long value = parse_int(*v, "network.encode_blocks");
    if (value < 1 || value > 16)
      throw ConfigError("network.encode_blocks: value out of range");
    cfg.network.encode_blocks = static_cast<int>(value);
    cfg.network.decode_blocks = cfg.network.encode_blocks - 1;
  }

  get.get_int("train.epochs", cfg.train.epochs);
  get.get_int("train.batch_size", cfg.train.batch_size);
  get.get_double("train.learning_rate", cfg.train.adam.learning_rate);
  get.get_double("train.beta1", cfg.train.adam.beta1);
  get.get_double("train.beta2", cfg.train.adam.beta2);
  get.get_double("train.adam_eps", cfg.train.adam.eps);
  get.get_double("train.loss_eps", cfg.train.loss_eps);
  get.get_bool("train.per_sample_loss", cfg.train.per_sample_loss);
  if (const std::string* v = table.take("train.stop_loss"))
    cfg.train.stop_loss = parse_double(*v, "train.stop_loss");
  get.get_int("train.checkpoint_every", cfg.train.checkpoint_every);
  get.get_bool("train.hflip", cfg.train.augment.hflip);
  get.get_bool("train.rotate90", cfg.train.augment.rotate90);
  get.get_bool("train.zoom", cfg.train.augment.zoom);
  get.get_double("train.zoom_min", cfg.train.augment.zoom_min);
  get.get_double("train.zoom_max", cfg.train.augment.zoom_max);
  if (const std::string* v = table.take("train.init_mode")) {
    if (*v == "fan_in")
      cfg.train.init.mode = unet::InitMode::fan_in;
    else if (*v == "uniform")
      cfg.train.init.mode = unet::InitMode::uniform;
    else
      throw ConfigError("train.init_mode: expected 'fan_in' or 'uniform', got '" + *v + "'");
  }
  get.get_double("train.init_scale", cfg.train.init.scale);

  if (const std::string* v = table.take("prepare.gt_source")) {
    if (*v == "corrected")
      cfg.prepare.gt = PrepareSettings::GtSource::corrected;
    else if (*v == "default")
      cfg.prepare.gt = PrepareSettings::GtSource::defaulted;
    else
      throw ConfigError("prepare.gt_source: expected 'corrected' or 'default', got '" + *v +
                        "'");
  }

  get.get_int("patches.native_size", cfg.patches.native_size);
  get.get_double("predict.threshold", cfg.predict.threshold);

  table.finish();
  cfg.train.seed = cfg.seed;
  return cfg;
}

void PipelineConfig::validate() const {
  qa.validate();
  network.validate();
  train.validate();
  if (paths.scene_root.empty()) throw ConfigError("paths.scene_root must be set");
  if (correction.band < 1 || correction.band > 11)
    throw ConfigError("correction.band must name a spectral band (1-11)");
  const auto& th = correction.threshold;
  if (!(th.percentile_rank >= 0.0 && th.percentile_rank <= 100.0))
    throw ConfigError("correction.percentile_rank must lie in [0, 100]");
  if (!(th.fixed_value >= 0.0))
    throw ConfigError("correction.fixed_threshold must be non-negative");
  if (patches.native_size < 1) throw ConfigError("patches.native_size must be >= 1");
  if (!(predict.threshold >= 0.0 && predict.threshold <= 1.0))
    throw ConfigError("predict.threshold must lie in [0, 1]");
}

}  // namespace cloudseg::config
