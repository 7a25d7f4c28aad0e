// fuzzwrap command line: label validation, training, extraction,
// evaluation, corpus generation and the HTTP service.
//
// Exit status: 0 success, 1 domain error, 2 usage error. Failures print one
// JSON line on stderr.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "fuzzwrap/service.hpp"

namespace fs = std::filesystem;
using namespace fuzzwrap;

namespace {

void print_error(std::string_view name, const std::string& message,
                 std::optional<std::size_t> offset = std::nullopt) {
  Json j = {{"error", name}, {"message", message}, {"offset", nullptr}};
  if (offset) j["offset"] = *offset;
  std::cerr << j.dump() << '\n';
}

void emit(const Json& j, const std::string& out) {
  const std::string text = j.dump(2) + "\n";
  if (out.empty() || out == "-")
    std::cout << text;
  else
    detail::write_file(out, text);
}

// A preset name, a JSON file, or "key=value,..." over the profile fields.
AnomalyProfile parse_profile(const std::string& text) {
  static const std::map<std::string, AnomalyProfile> presets = {
      {"regular", {}},
      {"missing", {0.2, 0, 0, 0}},
      {"permutation", {0, 0.2, 0, 0}},
      {"robustness", {0.2, 0.2, 0, 0}},
      {"multi", {0, 0, 0.2, 0}},
      {"typo", {0, 0, 0, 0.2}},
      {"mixed", {0.1, 0.1, 0.1, 0.1}},
  };
  if (auto it = presets.find(text); it != presets.end()) return it->second;
  if (fs::exists(text)) return profile_from_json(detail::parse(detail::read_file(text), "profile"));
  Json j = Json::object();
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::InvalidProfile, "unknown profile '" + text + "'");
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    try {
      if (key == "min_records" || key == "max_records")
        j[key] = std::stoul(value);
      else
        j[key] = std::stod(value);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidProfile, "bad value for " + key);
    }
  }
  return profile_from_json(j);
}

std::vector<LabelledPage> select_pages(std::vector<LabelledPage> all,
                                       const std::vector<std::string>& ids) {
  if (ids.empty()) return all;
  std::vector<LabelledPage> out;
  for (const auto& id : ids) {
    auto it = std::find_if(all.begin(), all.end(),
                           [&](const LabelledPage& p) { return p.labels.page_id == id; });
    if (it == all.end()) throw Error(ErrorCode::NotFound, "no labelled page '" + id + "'");
    out.push_back(*it);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trainable fuzzy wrapper for listing pages"};
  app.require_subcommand(1);
  std::string log_level = "warn";
  app.add_option("--log-level", log_level, "trace|debug|info|warn|error|off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "critical", "off"}));

  // label validate
  auto* label = app.add_subcommand("label", "Label file tools");
  label->require_subcommand(1);
  auto* validate = label->add_subcommand("validate", "Check a labels file against its pages");
  std::string validate_labels_path;
  validate->add_option("--labels", validate_labels_path, "labels file")
      ->required()
      ->check(CLI::ExistingFile);

  // train
  auto* train_cmd = app.add_subcommand("train", "Learn a wrapper from labelled pages");
  std::string labels_path, model_out;
  std::vector<std::string> train_pages;
  WrapperConfig cfg;
  std::string mode = "fuzzy";
  train_cmd->add_option("--labels", labels_path, "labels file")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--pages", train_pages, "page ids to train on (default: all)");
  train_cmd->add_option("--out", model_out, "model file")->required();
  train_cmd->add_option("--tau", cfg.tau, "acceptance threshold on |ErrorTot|");
  train_cmd->add_option("--width", cfg.width, "position-truth width")->check(CLI::PositiveNumber);
  train_cmd->add_option("--mode", mode, "fuzzy|sum")->check(CLI::IsMember({"fuzzy", "sum"}));

  // extract
  auto* extract_cmd = app.add_subcommand("extract", "Extract tuples from a page");
  std::string model_path, page_path, result_out, page_id;
  extract_cmd->add_option("--model", model_path, "model file")->required()->check(CLI::ExistingFile);
  extract_cmd->add_option("--page", page_path, "HTML page")->required()->check(CLI::ExistingFile);
  extract_cmd->add_option("--out", result_out, "result file (default: stdout)");
  extract_cmd->add_option("--page-id", page_id, "id recorded in the result");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a model on a labelled corpus");
  std::string eval_model, corpus_dir, eval_out;
  bool table = false;
  eval_cmd->add_option("--model", eval_model, "model file")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--corpus", corpus_dir, "corpus directory")->required()->check(CLI::ExistingDirectory);
  eval_cmd->add_option("--out", eval_out, "report file (default: stdout)");
  eval_cmd->add_flag("--table", table, "print the plain-text table instead of JSON");

  // corpus gen
  auto* corpus = app.add_subcommand("corpus", "Synthetic corpora");
  corpus->require_subcommand(1);
  auto* gen = corpus->add_subcommand("gen", "Generate a labelled corpus");
  std::string profile_arg = "regular", corpus_out;
  std::uint64_t seed = 1;
  std::size_t n_pages = 10;
  gen->add_option("--profile", profile_arg, "preset, JSON file, or key=value list");
  gen->add_option("--seed", seed, "generator seed")->required();
  gen->add_option("--pages", n_pages, "number of pages")->check(CLI::PositiveNumber);
  gen->add_option("--out", corpus_out, "output directory")->required();

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  int port = 8080;
  std::string host = "127.0.0.1", store_dir = "fuzzwrap-store";
  serve->add_option("--port", port, "listen port")->check(CLI::Range(0, 65535));
  serve->add_option("--host", host, "listen address");
  serve->add_option("--store", store_dir, "store directory (FUZZWRAP_STORE overrides)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("UsageError", e.what());
    return 2;
  }

  auto logger = spdlog::stderr_color_mt("fuzzwrap");
  logger->set_level(spdlog::level::from_str(log_level));

  try {
    if (validate->parsed()) {
      auto pages = load_labelled_pages(validate_labels_path);
      emit({{"pages", pages.size()}, {"valid", true}}, "");
    } else if (train_cmd->parsed()) {
      cfg.mode = mode == "sum" ? CombineMode::Sum : CombineMode::Fuzzy;
      auto pages = select_pages(load_labelled_pages(labels_path), train_pages);
      logger->info("training on {} pages", pages.size());
      WrapperModel m = train(pages, cfg);
      save_model(model_out, m);
      emit({{"model_id", model_id(m)}, {"moyL", m.moyL.value}, {"out", model_out}}, "");
    } else if (extract_cmd->parsed()) {
      WrapperModel m = load_model(model_path);
      if (page_id.empty()) page_id = fs::path(page_path).stem().string();
      ExtractionResult r = extract(detail::read_file(page_path), m, page_id);
      logger->info("{}: {} tuples", page_id, r.tuples.size());
      emit(to_json(r), result_out);
    } else if (eval_cmd->parsed()) {
      WrapperModel m = load_model(eval_model);
      EvalReport rep = evaluate(read_corpus(corpus_dir), m,
                                fs::path(corpus_dir).filename().string());
      if (table) {
        std::cout << format_table({rep});
      } else {
        emit(to_json(rep), eval_out);
      }
    } else if (gen->parsed()) {
      GoldCorpus c = generate_corpus(parse_profile(profile_arg), n_pages, seed);
      write_corpus(corpus_out, c);
      std::size_t records = 0;
      for (const auto& p : c.pages) records += p.labels.records.size();
      emit({{"out", corpus_out}, {"pages", c.pages.size()}, {"records", records}}, "");
    } else if (serve->parsed()) {
      ProjectStore store(store_root(store_dir));
      Service service(store, [&](const std::string& msg) { logger->info("{}", msg); });
      service.server().set_logger([&](const httplib::Request& req, const httplib::Response& res) {
        logger->info("{} {} -> {}", req.method, req.path, res.status);
      });
      logger->info("serving {} on {}:{}", store.root().string(), host, port);
      if (!service.server().listen(host, port)) {
        print_error("ListenFailed", "cannot listen on " + host + ":" + std::to_string(port));
        return 1;
      }
    }
  } catch (const Error& e) {
    print_error(e.name(), e.what(), e.offset());
    return 1;
  } catch (const fs::filesystem_error& e) {
    print_error("IoError", e.what());
    return 1;
  }
  return 0;
}
