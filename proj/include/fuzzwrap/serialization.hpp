#pragma once

// JSON documents for wrapper models, label files, extraction results,
// evaluation reports and on-disk corpora. Field order is fixed
// (ordered_json) so a model re-serializes byte-identically.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fuzzwrap/corpus.hpp"
#include "fuzzwrap/error.hpp"
#include "fuzzwrap/evaluator.hpp"
#include "fuzzwrap/extractor.hpp"
#include "fuzzwrap/induction.hpp"
#include "fuzzwrap/page_model.hpp"

namespace fuzzwrap {

using Json = nlohmann::ordered_json;

inline constexpr int kLabelsVersion = 1;

namespace detail {

[[noreturn]] inline void format_error(const std::string& what) {
  throw Error(ErrorCode::FormatError, what);
}

// Runs `f`, turning json access errors into FormatError.
template <typename F>
auto guarded(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    format_error(std::string(what) + ": " + e.what());
  }
}

inline Json span_json(const Span& s) { return Json::array({s.start, s.end}); }

inline Span span_from(const Json& j) {
  if (!j.is_array() || j.size() != 2) format_error("span must be [start, end]");
  Span s{j.at(0).get<std::size_t>(), j.at(1).get<std::size_t>()};
  if (s.end < s.start) format_error("span end precedes start");
  return s;
}

inline std::string_view level_name(ZoneLevel l) {
  switch (l) {
    case ZoneLevel::Global: return "global";
    case ZoneLevel::Record: return "record";
    case ZoneLevel::Attribute: return "attribute";
  }
  return "?";
}

inline ZoneLevel level_from(const std::string& s) {
  if (s == "global") return ZoneLevel::Global;
  if (s == "record") return ZoneLevel::Record;
  if (s == "attribute") return ZoneLevel::Attribute;
  format_error("unknown zone level '" + s + "'");
}

inline Edge edge_from(const std::string& s) {
  if (s == "begin") return Edge::Begin;
  if (s == "end") return Edge::End;
  format_error("unknown edge '" + s + "'");
}

inline CombineMode mode_from(const std::string& s) {
  if (s == "fuzzy") return CombineMode::Fuzzy;
  if (s == "sum") return CombineMode::Sum;
  format_error("unknown combine mode '" + s + "'");
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::NotFound, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& p, std::string_view text) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::NotFound, "cannot write " + p.string());
  out << text;
}

inline Json parse(std::string_view text, const char* what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    format_error(std::string(what) + ": " + e.what());
  }
}

}  // namespace detail

// ---- model ---------------------------------------------------------------

inline Json to_json(const WrapperConfig& c) {
  Json terms = Json::array();
  for (std::size_t i = 0; i < kNumTerms; ++i) {
    const Triangle& t = c.partition.terms[i];
    terms.push_back({{"term", term_name(static_cast<Term>(i))},
                     {"left", t.left},
                     {"peak", t.peak},
                     {"right", t.right}});
  }
  return {{"w", c.width},
          {"tau", c.tau},
          {"error_gain", c.error_gain},
          {"detector_gate", c.detector_gate},
          {"scale_floor", c.scale_floor},
          {"lone_gate", c.lone_gate},
          {"mode", mode_name(c.mode)},
          {"partition",
           {{"terms", terms},
            {"domain", Json::array({c.partition.domain_min, c.partition.domain_max})},
            {"samples", c.partition.samples}}}};
}

inline WrapperConfig config_from_json(const Json& j) {
  return detail::guarded("config", [&] {
    WrapperConfig c;
    c.width = j.at("w").get<int>();
    c.tau = j.at("tau").get<double>();
    c.error_gain = j.at("error_gain").get<double>();
    c.detector_gate = j.at("detector_gate").get<double>();
    c.scale_floor = j.at("scale_floor").get<double>();
    c.lone_gate = j.at("lone_gate").get<double>();
    c.mode = detail::mode_from(j.at("mode").get<std::string>());
    const Json& p = j.at("partition");
    const Json& terms = p.at("terms");
    if (terms.size() != kNumTerms) detail::format_error("partition needs 5 terms");
    for (std::size_t i = 0; i < kNumTerms; ++i)
      c.partition.terms[i] = {terms[i].at("left").get<double>(),
                              terms[i].at("peak").get<double>(),
                              terms[i].at("right").get<double>()};
    c.partition.domain_min = p.at("domain").at(0).get<double>();
    c.partition.domain_max = p.at("domain").at(1).get<double>();
    c.partition.samples = p.at("samples").get<std::size_t>();
    if (c.width < 1 || c.partition.samples < 2 ||
        !(c.partition.domain_min < c.partition.domain_max))
      detail::format_error("config values out of range");
    return c;
  });
}

inline Json to_json(const DetectorModel& d) {
  Json rows = Json::array();
  for (const auto& row : d.matrix.rows()) rows.push_back(row);
  return {{"side", side_name(d.side)},
          {"n_instances", d.matrix.n_instances()},
          {"matrix", rows},
          {"calibration",
           {{"c_min", d.calibration.c_min},
            {"c_max", d.calibration.c_max},
            {"c_moy", d.calibration.c_moy}}}};
}

inline DetectorModel detector_from_json(const Json& j, Side side,
                                        std::size_t moyL) {
  DetectorModel d;
  d.side = side;
  std::vector<FrequencyMatrix::Row> rows;
  for (const auto& r : j.at("matrix")) {
    if (r.size() != kNumClasses) detail::format_error("matrix row needs 12 columns");
    rows.push_back(r.get<FrequencyMatrix::Row>());
  }
  if (rows.size() != moyL + 1) detail::format_error("matrix needs moyL + 1 rows");
  d.matrix = FrequencyMatrix::from_rows(std::move(rows),
                                        j.at("n_instances").get<std::uint32_t>());
  const Json& c = j.at("calibration");
  d.calibration = {c.at("c_min").get<double>(), c.at("c_max").get<double>(),
                   c.at("c_moy").get<double>()};
  return d;
}

inline Json to_json(const WrapperModel& m) {
  Json classes = Json::array();
  for (TokenClass c : kAllClasses) classes.push_back(class_name(c));
  Json seps = Json::array();
  for (const auto& [key, sep] : m.separators)
    seps.push_back({{"level", detail::level_name(key.zone.level)},
                    {"name", key.zone.name},
                    {"edge", edge_name(key.edge)},
                    {"left", to_json(sep.left)},
                    {"right", to_json(sep.right)}});
  return {{"version", m.version},
          {"moyL", m.moyL.value},
          {"config", to_json(m.config)},
          {"classes", classes},
          {"separators", seps}};
}

inline WrapperModel model_from_json(const Json& j) {
  return detail::guarded("model", [&] {
    WrapperModel m;
    m.version = j.at("version").get<std::string>();
    if (m.version != kModelVersion)
      detail::format_error("unsupported model version '" + m.version + "'");
    m.moyL.value = j.at("moyL").get<std::size_t>();
    if (m.moyL.value == 0) detail::format_error("moyL must be positive");
    m.config = config_from_json(j.at("config"));
    for (const auto& s : j.at("separators")) {
      SeparatorModel sep;
      sep.zone = {detail::level_from(s.at("level").get<std::string>()),
                  s.at("name").get<std::string>()};
      sep.edge = detail::edge_from(s.at("edge").get<std::string>());
      sep.left = detector_from_json(s.at("left"), Side::Left, m.moyL.value);
      sep.right = detector_from_json(s.at("right"), Side::Right, m.moyL.value);
      m.separators.emplace(SeparatorKey{sep.zone, sep.edge}, std::move(sep));
    }
    return m;
  });
}

inline std::string dump_model(const WrapperModel& m) { return to_json(m).dump(2) + "\n"; }

inline WrapperModel parse_model(std::string_view text) {
  return model_from_json(detail::parse(text, "model"));
}

// 64-bit FNV-1a, as 16 hex digits.
inline std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

// Content hash of the serialized model.
inline std::string model_id(const WrapperModel& m) { return fnv1a_hex(dump_model(m)); }

inline void save_model(const std::filesystem::path& p, const WrapperModel& m) {
  detail::write_file(p, dump_model(m));
}

inline WrapperModel load_model(const std::filesystem::path& p) {
  return parse_model(detail::read_file(p));
}

// ---- labels --------------------------------------------------------------

inline Json to_json(const ZoneLabels& l, const std::string& html_path = {}) {
  Json records = Json::array();
  for (const auto& r : l.records) records.push_back(detail::span_json(r));
  Json attrs = Json::array();
  for (const auto& rec : l.attributes) {
    Json a = Json::array();
    for (const auto& v : rec)
      a.push_back({{"name", v.name}, {"span", detail::span_json(v.span)}});
    attrs.push_back(a);
  }
  return {{"page_id", l.page_id},
          {"html_path", html_path},
          {"global", detail::span_json(l.global)},
          {"records", records},
          {"attributes", attrs}};
}

inline ZoneLabels labels_from_json(const Json& j) {
  return detail::guarded("labels", [&] {
    ZoneLabels l;
    l.page_id = j.at("page_id").get<std::string>();
    l.global = detail::span_from(j.at("global"));
    for (const auto& r : j.at("records")) l.records.push_back(detail::span_from(r));
    for (const auto& rec : j.at("attributes")) {
      std::vector<AttributeLabel> vs;
      for (const auto& v : rec)
        vs.push_back({v.at("name").get<std::string>(), detail::span_from(v.at("span"))});
      l.attributes.push_back(std::move(vs));
    }
    return l;
  });
}

struct LabelEntry {
  ZoneLabels labels;
  std::string html_path;
};

inline Json labels_file_json(const std::vector<LabelEntry>& entries) {
  Json pages = Json::array();
  for (const auto& e : entries) pages.push_back(to_json(e.labels, e.html_path));
  return {{"version", kLabelsVersion}, {"pages", pages}};
}

inline std::vector<LabelEntry> parse_labels_file(std::string_view text) {
  Json j = detail::parse(text, "labels");
  return detail::guarded("labels", [&] {
    if (j.at("version").get<int>() != kLabelsVersion)
      detail::format_error("unsupported labels version");
    std::vector<LabelEntry> out;
    for (const auto& p : j.at("pages"))
      out.push_back({labels_from_json(p), p.value("html_path", std::string{})});
    return out;
  });
}

// Reads a labels file and the pages it names; html_path is resolved
// relative to the labels file. Labels are validated against their page.
inline std::vector<LabelledPage> load_labelled_pages(
    const std::filesystem::path& labels_path) {
  const auto base = labels_path.parent_path();
  std::vector<LabelledPage> pages;
  for (auto& e : parse_labels_file(detail::read_file(labels_path))) {
    if (e.html_path.empty())
      detail::format_error("page '" + e.labels.page_id + "' has no html_path");
    LabelledPage p{detail::read_file(base / e.html_path), std::move(e.labels)};
    validate_labels(p.html, p.labels);
    pages.push_back(std::move(p));
  }
  return pages;
}

// ---- extraction results --------------------------------------------------

inline Json to_json(const ExtractionResult& r) {
  Json tuples = Json::array();
  for (const auto& t : r.tuples) {
    Json attrs = Json::object();
    for (const auto& [name, values] : t.attributes) {
      Json vs = Json::array();
      for (const auto& v : values)
        vs.push_back({{"text", v.text},
                      {"span", detail::span_json(v.span)},
                      {"begin_error", v.begin_error},
                      {"end_error", v.end_error}});
      attrs[name] = vs;
    }
    tuples.push_back({{"span", detail::span_json(t.span)},
                      {"begin_error", t.begin_error},
                      {"end_error", t.end_error},
                      {"attributes", attrs}});
  }
  return {{"page_id", r.page_id},
          {"global", detail::span_json(r.global)},
          {"global_begin_error", r.global_begin_error},
          {"global_end_error", r.global_end_error},
          {"tuples", tuples}};
}

inline ExtractionResult result_from_json(const Json& j) {
  return detail::guarded("result", [&] {
    ExtractionResult r;
    r.page_id = j.at("page_id").get<std::string>();
    r.global = detail::span_from(j.at("global"));
    r.global_begin_error = j.at("global_begin_error").get<double>();
    r.global_end_error = j.at("global_end_error").get<double>();
    for (const auto& t : j.at("tuples")) {
      ExtractedTuple tuple;
      tuple.span = detail::span_from(t.at("span"));
      tuple.begin_error = t.at("begin_error").get<double>();
      tuple.end_error = t.at("end_error").get<double>();
      for (const auto& [name, vs] : t.at("attributes").items())
        for (const auto& v : vs)
          tuple.attributes[name].push_back(
              {v.at("text").get<std::string>(), detail::span_from(v.at("span")),
               v.at("begin_error").get<double>(), v.at("end_error").get<double>()});
      r.tuples.push_back(std::move(tuple));
    }
    return r;
  });
}

// ---- evaluation ----------------------------------------------------------

inline Json to_json(const EvalReport& r) {
  return {{"name", r.name},
          {"pages", r.pages},
          {"failed_pages", r.failed_pages},
          {"total", r.counts.total},
          {"extracted", r.counts.extracted},
          {"pertinent", r.counts.pertinent},
          {"recall", r.recall()},
          {"precision", r.precision()},
          {"standard_precision", r.standard_precision()}};
}

inline Json to_json(const AnomalyProfile& p) {
  return {{"missing", p.missing},
          {"permutation", p.permutation},
          {"multi_value", p.multi_value},
          {"typo", p.typo},
          {"min_records", p.min_records},
          {"max_records", p.max_records}};
}

inline AnomalyProfile profile_from_json(const Json& j) {
  return detail::guarded("profile", [&] {
    AnomalyProfile p;
    p.missing = j.value("missing", 0.0);
    p.permutation = j.value("permutation", 0.0);
    p.multi_value = j.value("multi_value", 0.0);
    p.typo = j.value("typo", 0.0);
    p.min_records = j.value("min_records", p.min_records);
    p.max_records = j.value("max_records", p.max_records);
    p.validate();
    return p;
  });
}

// ---- corpora on disk -----------------------------------------------------
//
// <dir>/<page_id>.html for every page, <dir>/labels.json, and
// <dir>/corpus.json with the generating profile and seed.

inline void write_corpus(const std::filesystem::path& dir, const GoldCorpus& c) {
  std::vector<LabelEntry> entries;
  for (const auto& p : c.pages) {
    const std::string file = p.labels.page_id + ".html";
    detail::write_file(dir / file, p.html);
    entries.push_back({p.labels, file});
  }
  detail::write_file(dir / "labels.json", labels_file_json(entries).dump(2) + "\n");
  Json meta = {{"profile", to_json(c.profile)},
               {"seed", c.seed},
               {"pages", c.pages.size()}};
  detail::write_file(dir / "corpus.json", meta.dump(2) + "\n");
}

inline GoldCorpus read_corpus(const std::filesystem::path& dir) {
  GoldCorpus c;
  const auto meta_path = dir / "corpus.json";
  if (std::filesystem::exists(meta_path)) {
    Json meta = detail::parse(detail::read_file(meta_path), "corpus");
    c.profile = profile_from_json(meta.at("profile"));
    c.seed = detail::guarded("corpus", [&] { return meta.at("seed").get<std::uint64_t>(); });
  }
  c.pages = load_labelled_pages(dir / "labels.json");
  return c;
}

}  // namespace fuzzwrap
