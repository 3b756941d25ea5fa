#include "foqa/engine_io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "foqa/text.hpp"

namespace foqa {

namespace fs = std::filesystem;
using nlohmann::json;

std::string label_space_hash(const std::vector<std::string>& labels) {
  std::uint64_t h = 14695981039346656037ull;
  for (const auto& label : labels) {
    h = fnv1a64(label, h);
    h = fnv1a64("\n", h);
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

namespace {

json read_manifest(const std::string& dir, bool required) {
  const fs::path path = fs::path(dir) / "engine.json";
  std::ifstream in(path);
  if (!in) {
    if (required) throw std::runtime_error("missing engine manifest: " + path.string());
    return json::object();
  }
  json j;
  in >> j;
  return j;
}

void write_manifest(const std::string& dir, const json& j) {
  const fs::path path = fs::path(dir) / "engine.json";
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write engine manifest: " + path.string());
  out << j.dump(2) << "\n";
}

}  // namespace

void write_index_manifest(const std::string& dir) {
  json j = read_manifest(dir, false);
  j["format"] = "FOQA-ENGINE v1";
  j["entity_index"] = {{"file", "entity.idx"}, {"format", "FOQA-EIDX v1"}};
  j["reach_index"] = {{"file", "reach.idx"}, {"format", "FOQA-RIDX v1"}};
  write_manifest(dir, j);
}

void update_model_manifest(const std::string& dir, const std::string& task,
                           const std::string& file, int input_length,
                           const std::vector<std::string>& labels) {
  json j = read_manifest(dir, false);
  if (!j.contains("format")) j["format"] = "FOQA-ENGINE v1";
  json entry = {{"file", file}, {"format", "FOQA-MODEL v1"}, {"input_length", input_length}};
  if (task == "classifier") {
    entry["labels"] = labels.size();
    entry["label_space_hash"] = label_space_hash(labels);
  }
  j[task] = entry;
  write_manifest(dir, j);
}

Engine load_engine(const std::string& dir) {
  if (!fs::is_directory(dir)) throw std::runtime_error("engine directory not found: " + dir);
  json manifest = read_manifest(dir, true);
  if (!manifest.contains("format") || manifest["format"] != "FOQA-ENGINE v1") {
    throw std::runtime_error("engine manifest: version mismatch (want FOQA-ENGINE v1)");
  }
  for (const char* section : {"entity_index", "reach_index", "tagger", "classifier"}) {
    if (!manifest.contains(section)) {
      throw std::runtime_error(std::string("engine manifest incomplete: missing '") + section +
                               "' (build-index and train must both run against this directory)");
    }
  }

  const auto file_of = [&](const char* section) {
    return (fs::path(dir) / manifest[section]["file"].get<std::string>()).string();
  };
  for (const char* section : {"entity_index", "reach_index", "tagger", "classifier"}) {
    if (!fs::exists(file_of(section))) {
      throw std::runtime_error("missing engine artifact: " + file_of(section));
    }
  }

  Engine engine;
  engine.entity_index = EntityIndex::load_file(file_of("entity_index"));
  engine.reach_index = ReachIndex::load_file(file_of("reach_index"));
  engine.tagger = TaggerModel::load(file_of("tagger"));
  engine.classifier = ClassifierModel::load(file_of("classifier"));

  if (engine.entity_index.entity_ids() != engine.reach_index.entity_ids()) {
    throw std::runtime_error("engine: entity tables of entity.idx and reach.idx disagree");
  }
  const std::string want_hash = manifest["classifier"].value("label_space_hash", "");
  if (!want_hash.empty() && want_hash != label_space_hash(engine.classifier.labels)) {
    throw std::runtime_error("engine: classifier label space does not match manifest hash");
  }
  const int want_n = manifest["tagger"].value("input_length", 0);
  if (want_n > 0 && want_n != engine.tagger.input_length) {
    throw std::runtime_error("engine: tagger input length does not match manifest");
  }
  engine.finalize();
  return engine;
}

}  // namespace foqa
