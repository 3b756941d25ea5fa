#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "foqa/engine_io.hpp"
#include "foqa/eval.hpp"
#include "foqa/synth.hpp"

namespace fs = std::filesystem;
using namespace foqa;

namespace {

int cmd_gen_data(const std::string& spec_path, const std::string& out_dir, std::uint64_t seed,
                 bool seed_given) {
  GeneratorSpec spec;
  if (!spec_path.empty()) {
    std::ifstream in(spec_path);
    if (!in) throw std::runtime_error("cannot open spec file: " + spec_path);
    nlohmann::json j;
    in >> j;
    spec.seed = j.value("seed", spec.seed);
    spec.num_entities = j.value("num_entities", spec.num_entities);
    spec.num_relations = j.value("num_relations", spec.num_relations);
    spec.alias_len_min = j.value("alias_len_min", spec.alias_len_min);
    spec.alias_len_max = j.value("alias_len_max", spec.alias_len_max);
    spec.templates_per_relation = j.value("templates_per_relation", spec.templates_per_relation);
    spec.questions_count = j.value("questions_count", spec.questions_count);
    if (j.contains("ratios")) {
      spec.train_ratio = j["ratios"].at(0).get<double>();
      spec.valid_ratio = j["ratios"].at(1).get<double>();
      spec.test_ratio = j["ratios"].at(2).get<double>();
    }
    spec.noise_rate = j.value("noise_rate", spec.noise_rate);
    spec.overlap_fraction = j.value("overlap_fraction", spec.overlap_fraction);
  }
  if (seed_given) spec.seed = seed;
  GeneratedData data = generate(spec);
  write_generated(data, out_dir);
  std::cout << "generated " << data.fact_lines.size() << " facts, " << data.alias_lines.size()
            << " aliases, " << data.train.annotated.size() << "/" << data.valid.annotated.size()
            << "/" << data.test.annotated.size() << " train/valid/test questions -> " << out_dir
            << "\n";
  return 0;
}

int cmd_build_index(const std::string& facts, const std::string& aliases,
                    const std::string& out_dir) {
  KnowledgeBase kb = load_kb_files(facts, aliases);
  const KbStats stats = kb.stats();
  std::cout << "kb: " << stats.num_entities << " entities, " << stats.num_facts << " facts, K="
            << stats.k << "\n";
  EntityIndex eidx = EntityIndex::build(kb);
  ReachIndex ridx = ReachIndex::build(kb);
  fs::create_directories(out_dir);
  eidx.save_file((fs::path(out_dir) / "entity.idx").string());
  ridx.save_file((fs::path(out_dir) / "reach.idx").string());
  write_index_manifest(out_dir);
  std::cout << "entity index: " << eidx.key_count() << " keys ("
            << eidx.skipped_empty_aliases() << " empty aliases skipped)\n";
  std::cout << "reach index: " << ridx.total_entries() << " entries\n";
  std::cout << "wrote " << out_dir << "/entity.idx, reach.idx, engine.json\n";
  return 0;
}

void print_report(const std::string& task, const std::vector<ConfigReport>& report,
                  int best_config) {
  std::printf("%-34s %10s %6s %12s\n", (task + " config").c_str(), "metric", "epoch", "train loss");
  for (std::size_t i = 0; i < report.size(); ++i) {
    std::printf("%-34s %10.4f %6d %12.4f%s\n", report[i].config.describe().c_str(),
                report[i].best_metric, report[i].best_epoch, report[i].final_train_loss,
                static_cast<int>(i) == best_config ? "  <- selected" : "");
  }
}

int cmd_train(const std::string& task, const std::string& train_path, const std::string& valid_path,
              const std::string& grid_path, const std::string& out_path,
              const std::string& embeddings_path, std::uint64_t seed, bool seed_given, int n,
              bool verbose) {
  TrainConfig base;
  if (seed_given) base.seed = seed;
  if (!embeddings_path.empty()) base.train_embedding = false;
  std::vector<TrainConfig> grid =
      grid_path.empty() ? std::vector<TrainConfig>{base} : load_grid(grid_path, base);
  if (seed_given) {
    for (auto& cfg : grid) cfg.seed = seed;
  }

  const fs::path out(out_path);
  const std::string dir = out.has_parent_path() ? out.parent_path().string() : ".";
  if (task == "tagger") {
    auto train_rows = read_tagged_file(train_path);
    auto valid_rows = read_tagged_file(valid_path);
    TaggerTrainResult result = train_tagger(train_rows, valid_rows, grid, n, verbose);
    result.best.save(out_path);
    update_model_manifest(dir, "tagger", out.filename().string(), result.best.input_length, {});
    print_report("tagger", result.report, result.best_config);
    std::cout << "wrote " << out_path << " (N=" << result.best.input_length << ")\n";
  } else if (task == "classifier") {
    auto train_rows = read_labeled_file(train_path);
    auto valid_rows = read_labeled_file(valid_path);
    ClassifierTrainResult result = train_classifier(train_rows, valid_rows, grid, n, verbose);
    result.best.save(out_path);
    update_model_manifest(dir, "classifier", out.filename().string(), result.best.input_length,
                          result.best.labels);
    print_report("classifier", result.report, result.best_config);
    std::cout << "wrote " << out_path << " (K=" << result.best.labels.size() << ")\n";
  } else {
    throw CLI::ValidationError("--task must be tagger or classifier");
  }
  return 0;
}

int cmd_eval(const std::string& engine_dir, const std::string& test_path, bool ablate, bool blame,
             const std::string& train_path, const std::string& jsonl_path, int jobs,
             double min_p1) {
  Engine engine = load_engine(engine_dir);
  auto test = read_annotated_file(test_path);
  EvalSummary summary =
      evaluate_p_at_1(engine_answerer(engine), test, engine.classifier.labels, jobs);
  std::printf("P@1: %.4f (%zu/%zu correct)\n", summary.p_at_1, summary.correct, summary.total);
  std::printf("mean candidate relations per question: %.2f\n", summary.mean_allowed_relations);
  if (summary.gold_relation_outside_label_space > 0) {
    std::printf("gold relation outside label space: %zu rows\n",
                summary.gold_relation_outside_label_space);
  }

  if (ablate) {
    if (train_path.empty()) {
      throw CLI::ValidationError("--ablate needs --train to compute the naive relation prior");
    }
    auto train = read_annotated_file(train_path);
    std::printf("\n%-18s %8s %14s\n", "config", "P@1", "correct/total");
    for (const AblationRow& row : run_ablations(engine, train, test, jobs)) {
      std::printf("%-18s %8.4f %8zu/%zu\n", row.name.c_str(), row.p_at_1, row.correct, row.total);
    }
  }

  if (blame) {
    BlameReport report = blame_analysis(summary.records);
    if (report.no_errors) {
      std::printf("\nblame analysis: no errors\n");
    } else {
      std::printf("\nblame analysis (%zu errors)\n", report.errors);
      std::printf("%-20s %6.1f%% (%zu)\n", "entity detection", report.entity_pct,
                  report.entity_blame);
      std::printf("%-20s %6.1f%% (%zu)\n", "relation prediction", report.relation_pct,
                  report.relation_blame);
      std::printf("%-20s %6.1f%% (%zu)\n", "both", report.both_pct, report.both_blame);
    }
  }

  if (!jsonl_path.empty()) {
    std::ofstream out(jsonl_path);
    if (!out) throw std::runtime_error("cannot write " + jsonl_path);
    for (const EvalRecord& record : summary.records) {
      nlohmann::json j;
      j["question"] = record.question;
      j["gold_entity"] = record.gold_entity;
      j["gold_relation"] = record.gold_relation;
      j["predicted_entity"] = record.predicted_entity;
      j["predicted_relation"] = record.predicted_relation;
      j["correct"] = record.correct;
      j["gold_relation_in_label_space"] = record.gold_relation_in_label_space;
      j["allowed_relations"] = record.allowed_relation_count;
      out << j.dump() << "\n";
    }
  }

  if (min_p1 >= 0.0 && summary.p_at_1 < min_p1) {
    std::fprintf(stderr, "P@1 %.4f below required threshold %.4f\n", summary.p_at_1, min_p1);
    return 1;
  }
  return 0;
}

int cmd_ask(const std::string& engine_dir) {
  Engine engine = load_engine(engine_dir);
  std::cout << "engine loaded (" << engine.reach_index.num_entities() << " entities, K="
            << engine.classifier.labels.size() << "). one question per line, Ctrl-D to exit.\n";
  std::string line;
  while (std::cout << "> " << std::flush, std::getline(std::cin, line)) {
    if (line.empty()) continue;
    try {
      QaResult result = answer_question(engine, line);
      if (result.answer) {
        std::cout << result.answer->text << "\n";
        std::cout << "  entity " << result.answer->source_entity_id << ", relation "
                  << engine.reach_index.relation_id(result.answer->relation) << ", score "
                  << result.answer->score << "\n";
      } else {
        std::cout << "(no answer)\n";
      }
      std::cout << "  query: spans=[";
      for (std::size_t i = 0; i < result.query.spans.size(); ++i) {
        std::cout << (i ? ", " : "") << '"' << result.query.spans[i] << '"';
      }
      std::cout << "] relation=" << result.query.relation
                << " constrained=" << result.constrained_relation << " candidates="
                << result.candidates.candidates.size() << "\n";
      std::printf("  timing: tag %.2f ms | relation %.2f ms | link %.2f ms | select %.2f ms | total %.2f ms\n",
                  result.timings.tag_ms, result.timings.predict_ms, result.timings.link_ms,
                  result.timings.select_ms, result.timings.total_ms);
    } catch (const std::exception& e) {
      std::cout << "error: " << e.what() << "\n";
    }
  }
  return 0;
}

int cmd_bench(const std::string& engine_dir, const std::string& questions_path, int reps,
              const std::string& jsonl_path) {
  Engine engine = load_engine(engine_dir);
  std::ifstream in(questions_path);
  if (!in) throw std::runtime_error("cannot open questions file: " + questions_path);
  std::vector<std::string> questions;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    // Accept plain questions or annotated rows (question in the 4th column).
    const std::size_t tabs = static_cast<std::size_t>(std::count(line.begin(), line.end(), '\t'));
    questions.push_back(tabs >= 3 ? line.substr(line.rfind('\t') + 1) : line);
  }
  LatencyStats stats = latency_bench(engine, questions, reps);
  std::cout << "total latency: " << stats.formatted() << " over " << stats.samples
            << " calls (" << questions.size() << " questions x " << reps << " reps)\n";
  std::printf("per stage: tag %.3f ms | relation %.3f ms | link %.3f ms | select %.3f ms\n",
              stats.stage_means.tag_ms, stats.stage_means.predict_ms, stats.stage_means.link_ms,
              stats.stage_means.select_ms);
  if (!jsonl_path.empty()) {
    std::ofstream out(jsonl_path);
    nlohmann::json j;
    j["mean_ms"] = stats.mean_ms;
    j["stdev_ms"] = stats.stdev_ms;
    j["samples"] = stats.samples;
    j["stages"] = {{"tag", stats.stage_means.tag_ms},
                   {"relation", stats.stage_means.predict_ms},
                   {"link", stats.stage_means.link_ms},
                   {"select", stats.stage_means.select_ms}};
    out << j.dump() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"first-order factoid QA over a triple KB"};
  app.require_subcommand(1);

  // gen-data
  std::string spec_path, out_dir;
  std::uint64_t seed = 1;
  auto* gen = app.add_subcommand("gen-data", "generate a synthetic KB and question datasets");
  gen->add_option("--spec", spec_path, "generator spec JSON");
  gen->add_option("--out", out_dir, "output directory")->required();
  auto* gen_seed = gen->add_option("--seed", seed, "override the spec seed");

  // build-index
  std::string facts_path, aliases_path, index_out;
  auto* build = app.add_subcommand("build-index", "build entity + reach indexes from a KB");
  build->add_option("--kb", facts_path, "facts file")->required()->check(CLI::ExistingFile);
  build->add_option("--aliases", aliases_path, "aliases file")->required()->check(CLI::ExistingFile);
  build->add_option("--out", index_out, "engine directory")->required();

  // train
  std::string task, train_path, valid_path, grid_path, model_out, embeddings_path;
  std::uint64_t train_seed = 1;
  int input_length = 0;
  bool verbose = false;
  auto* train = app.add_subcommand("train", "grid-train the tagger or the relation classifier");
  train->add_option("--task", task, "tagger|classifier")->required();
  train->add_option("--train", train_path, "training file")->required()->check(CLI::ExistingFile);
  train->add_option("--valid", valid_path, "validation file")->required()->check(CLI::ExistingFile);
  train->add_option("--grid", grid_path, "grid JSON file")->check(CLI::ExistingFile);
  train->add_option("--out", model_out, "output model file")->required();
  train->add_option("--embeddings", embeddings_path, "pretrained word2vec text embeddings (fixed)")
      ->check(CLI::ExistingFile);
  auto* train_seed_opt = train->add_option("--seed", train_seed, "override config seeds");
  train->add_option("--input-length", input_length, "fixed N (default: longest train/valid question)");
  train->add_flag("--verbose", verbose, "per-epoch progress on stderr");

  // eval
  std::string engine_dir, test_path, eval_train_path, jsonl_path;
  bool ablate = false, blame = false;
  int jobs = 1;
  double min_p1 = -1.0;
  auto* eval = app.add_subcommand("eval", "P@1 evaluation, ablations, blame analysis");
  eval->add_option("--engine", engine_dir, "engine directory")->required();
  eval->add_option("--test", test_path, "annotated test file")->required()->check(CLI::ExistingFile);
  eval->add_flag("--ablate", ablate, "run the four-config ablation table");
  eval->add_flag("--blame", blame, "attribute errors to ED / RP / both");
  eval->add_option("--train", eval_train_path, "annotated training file (for --ablate)")
      ->check(CLI::ExistingFile);
  eval->add_option("--jsonl", jsonl_path, "write per-question records as JSON lines");
  eval->add_option("--jobs", jobs, "question-level parallelism")->check(CLI::PositiveNumber);
  eval->add_option("--min-p1", min_p1, "exit nonzero when P@1 falls below this threshold");

  // ask
  std::string ask_engine;
  auto* ask = app.add_subcommand("ask", "interactive question REPL");
  ask->add_option("--engine", ask_engine, "engine directory")->required();

  // bench
  std::string bench_engine, questions_path, bench_jsonl;
  int reps = 1;
  auto* bench = app.add_subcommand("bench", "latency benchmark");
  bench->add_option("--engine", bench_engine, "engine directory")->required();
  bench->add_option("--questions", questions_path, "questions file (plain or annotated)")
      ->required()
      ->check(CLI::ExistingFile);
  bench->add_option("--reps", reps, "repetitions")->check(CLI::PositiveNumber);
  bench->add_option("--jsonl", bench_jsonl, "write the stats as JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen_data(spec_path, out_dir, seed, gen_seed->count() > 0);
    if (build->parsed()) return cmd_build_index(facts_path, aliases_path, index_out);
    if (train->parsed()) {
      return cmd_train(task, train_path, valid_path, grid_path, model_out, embeddings_path,
                       train_seed, train_seed_opt->count() > 0, input_length, verbose);
    }
    if (eval->parsed()) {
      return cmd_eval(engine_dir, test_path, ablate, blame, eval_train_path, jsonl_path, jobs,
                      min_p1);
    }
    if (ask->parsed()) return cmd_ask(ask_engine);
    if (bench->parsed()) return cmd_bench(bench_engine, questions_path, reps, bench_jsonl);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const parse_error& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
