#pragma once

// File-backed project store used by the HTTP service:
//
//   <root>/index.json          id -> relative file, per kind
//   <root>/pages/<id>.html
//   <root>/labels/<id>.json    one labels document per page
//   <root>/models/<id>.json    id is the content hash of the file
//   <root>/results/<model>/<page>.json
//   <root>/corpora/<name>/     directories written by write_corpus
//
// Writes are serialized by one mutex; the index is replaced atomically.

#include <cstdlib>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "fuzzwrap/serialization.hpp"

namespace fuzzwrap {

// FUZZWRAP_STORE if set, else `fallback`.
inline std::filesystem::path store_root(const std::filesystem::path& fallback) {
  if (const char* env = std::getenv("FUZZWRAP_STORE"); env && *env) return env;
  return fallback;
}

class ProjectStore {
 public:
  explicit ProjectStore(std::filesystem::path root) : root_(std::move(root)) {
    for (const char* d : {"pages", "labels", "models", "results", "corpora"})
      std::filesystem::create_directories(root_ / d);
    if (std::filesystem::exists(index_path())) load_index();
  }

  const std::filesystem::path& root() const { return root_; }

  // Stores a page; without an explicit id the id is derived from content.
  std::string add_page(const std::string& html, std::string id = {}) {
    if (id.empty()) id = "page-" + fnv1a_hex(html);
    check_id(id);
    std::lock_guard lock(mu_);
    const std::string rel = "pages/" + id + ".html";
    detail::write_file(root_ / rel, html);
    index_["pages"][id] = rel;
    save_index();
    return id;
  }

  std::string page(const std::string& id) const {
    return detail::read_file(root_ / lookup("pages", id));
  }

  bool has_page(const std::string& id) const { return has("pages", id); }

  // Validates against the stored page before writing; the page id in the
  // path wins over any id inside the labels.
  void put_labels(const std::string& id, ZoneLabels labels) {
    const std::string html = page(id);
    labels.page_id = id;
    validate_labels(html, labels);
    std::lock_guard lock(mu_);
    const std::string rel = "labels/" + id + ".json";
    const std::string html_path = "../" + index_["pages"][id].get<std::string>();
    detail::write_file(root_ / rel, to_json(labels, html_path).dump(2) + "\n");
    index_["labels"][id] = rel;
    save_index();
  }

  std::optional<ZoneLabels> labels(const std::string& id) const {
    if (!has("labels", id)) return std::nullopt;
    return labels_from_json(
        detail::parse(detail::read_file(root_ / lookup("labels", id)), "labels"));
  }

  LabelledPage labelled_page(const std::string& id) const {
    auto l = labels(id);
    if (!l) throw Error(ErrorCode::NotFound, "page '" + id + "' has no labels");
    return {page(id), std::move(*l)};
  }

  // Models are immutable: saving an identical model is a no-op.
  std::string add_model(const WrapperModel& m) {
    const std::string text = dump_model(m);
    const std::string id = model_id(m);
    std::lock_guard lock(mu_);
    const std::string rel = "models/" + id + ".json";
    if (!std::filesystem::exists(root_ / rel)) detail::write_file(root_ / rel, text);
    index_["models"][id] = rel;
    save_index();
    return id;
  }

  WrapperModel model(const std::string& id) const {
    return load_model(root_ / lookup("models", id));
  }

  bool has_model(const std::string& id) const { return has("models", id); }

  void add_result(const std::string& model, const ExtractionResult& r) {
    check_id(r.page_id);
    std::lock_guard lock(mu_);
    const std::string rel = "results/" + model + "/" + r.page_id + ".json";
    detail::write_file(root_ / rel, to_json(r).dump(2) + "\n");
    index_["results"][model + "/" + r.page_id] = rel;
    save_index();
  }

  GoldCorpus corpus(const std::string& name) const {
    check_id(name);
    const auto dir = root_ / "corpora" / name;
    if (!std::filesystem::exists(dir / "labels.json"))
      throw Error(ErrorCode::NotFound, "unknown corpus '" + name + "'");
    return read_corpus(dir);
  }

  std::vector<std::string> ids(const std::string& kind) const {
    std::lock_guard lock(mu_);
    std::vector<std::string> out;
    if (index_.contains(kind))
      for (const auto& [k, v] : index_[kind].items()) out.push_back(k);
    return out;
  }

 private:
  std::filesystem::path index_path() const { return root_ / "index.json"; }

  static void check_id(const std::string& id) {
    if (id.empty() || id.find_first_of("/\\") != std::string::npos || id == "." ||
        id == "..")
      throw Error(ErrorCode::FormatError, "invalid id '" + id + "'");
  }

  bool has(const std::string& kind, const std::string& id) const {
    std::lock_guard lock(mu_);
    return index_.contains(kind) && index_[kind].contains(id);
  }

  std::string lookup(const std::string& kind, const std::string& id) const {
    std::lock_guard lock(mu_);
    if (!index_.contains(kind) || !index_[kind].contains(id))
      throw Error(ErrorCode::NotFound, "unknown " + kind + " id '" + id + "'");
    return index_[kind][id].get<std::string>();
  }

  void load_index() {
    index_ = detail::parse(detail::read_file(index_path()), "index");
  }

  void save_index() {
    const auto tmp = root_ / "index.json.tmp";
    detail::write_file(tmp, index_.dump(2) + "\n");
    std::filesystem::rename(tmp, index_path());
  }

  std::filesystem::path root_;
  mutable std::mutex mu_;
  Json index_ = Json::object();
};

}  // namespace fuzzwrap
