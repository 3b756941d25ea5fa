#include "foqa/training.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace foqa {

std::string TrainConfig::describe() const {
  std::ostringstream os;
  os << (bidirectional ? "bi" : "") << (cell == nn::CellKind::gru ? "gru" : "lstm") << depth
     << " h" << hidden << " d" << embedding_dim << " do" << dropout << " lr" << learning_rate
     << " ep" << epochs;
  return os.str();
}

std::vector<nn::LayerSpec> TrainConfig::layer_specs() const {
  std::vector<nn::LayerSpec> specs(depth);
  for (auto& spec : specs) spec = nn::LayerSpec{cell, hidden, bidirectional, dropout};
  return specs;
}

void TrainConfig::validate() const {
  if (depth < 1 || depth > 3) throw std::invalid_argument("config: depth must be 1..3");
  if (dropout < 0.0 || dropout > 0.5) {
    throw std::invalid_argument("config: dropout must be within [0, 0.5]");
  }
  if (hidden <= 0) throw std::invalid_argument("config: hidden size must be positive");
  if (embedding_dim <= 0) throw std::invalid_argument("config: embedding dim must be positive");
  if (epochs <= 0) throw std::invalid_argument("config: epochs must be positive");
  if (learning_rate <= 0.0) throw std::invalid_argument("config: learning rate must be positive");
}

namespace {

TrainConfig apply_json(const nlohmann::json& j, TrainConfig cfg) {
  if (j.contains("cell")) {
    const std::string cell = j.at("cell").get<std::string>();
    if (cell == "gru") cfg.cell = nn::CellKind::gru;
    else if (cell == "lstm") cfg.cell = nn::CellKind::lstm;
    else throw std::invalid_argument("grid: unknown cell '" + cell + "'");
  }
  if (j.contains("bidirectional")) cfg.bidirectional = j.at("bidirectional").get<bool>();
  if (j.contains("depth")) cfg.depth = j.at("depth").get<int>();
  if (j.contains("hidden")) cfg.hidden = j.at("hidden").get<int>();
  if (j.contains("dropout")) cfg.dropout = j.at("dropout").get<double>();
  if (j.contains("embedding_dim")) cfg.embedding_dim = j.at("embedding_dim").get<int>();
  if (j.contains("learning_rate")) cfg.learning_rate = j.at("learning_rate").get<double>();
  if (j.contains("epochs")) cfg.epochs = j.at("epochs").get<int>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("train_embedding")) cfg.train_embedding = j.at("train_embedding").get<bool>();
  return cfg;
}

}  // namespace

std::vector<TrainConfig> parse_grid(const std::string& json_text, const TrainConfig& base) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  TrainConfig defaults = base;
  const nlohmann::json* configs = nullptr;
  if (j.is_array()) {
    configs = &j;
  } else if (j.is_object()) {
    if (j.contains("defaults")) defaults = apply_json(j.at("defaults"), defaults);
    if (!j.contains("configs")) throw std::invalid_argument("grid: missing 'configs' array");
    configs = &j.at("configs");
  } else {
    throw std::invalid_argument("grid: expected array or object");
  }
  if (!configs->is_array() || configs->empty()) {
    throw std::invalid_argument("grid: 'configs' must be a non-empty array");
  }
  std::vector<TrainConfig> grid;
  for (const auto& entry : *configs) grid.push_back(apply_json(entry, defaults));
  for (const auto& cfg : grid) cfg.validate();
  return grid;
}

std::vector<TrainConfig> load_grid(const std::string& path, const TrainConfig& base) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open grid file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_grid(buf.str(), base);
}

}  // namespace foqa
