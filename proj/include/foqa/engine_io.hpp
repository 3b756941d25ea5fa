#pragma once

#include <string>

#include "foqa/pipeline.hpp"

namespace foqa {

// Engine directory layout:
//   entity.idx        FOQA-EIDX v1
//   reach.idx         FOQA-RIDX v1
//   tagger.model      FOQA-MODEL v1
//   classifier.model  FOQA-MODEL v1
//   engine.json       versions + N + label-space hash
//
// `build-index` creates engine.json with the index entries; `train` fills
// in the model entries as each model lands. Loading demands a complete
// manifest and cross-checks it against the artifacts.

std::string label_space_hash(const std::vector<std::string>& labels);

void write_index_manifest(const std::string& dir);
void update_model_manifest(const std::string& dir, const std::string& task,
                           const std::string& file, int input_length,
                           const std::vector<std::string>& labels);

Engine load_engine(const std::string& dir);

}  // namespace foqa
