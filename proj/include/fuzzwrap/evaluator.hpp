#pragma once

// Tuple counting against gold labels and the recall / precision ratios.
//
//   recall    = extracted tuples / total gold tuples
//   precision = pertinent extracted tuples / total gold tuples
//
// Both use the total gold tuple count as denominator; the conventional
// pertinent / extracted ratio is reported as `standard_precision`.
// Recall is not clamped: over-extraction can push it above 1.

#include <cstddef>
#include <functional>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fuzzwrap/corpus.hpp"
#include "fuzzwrap/error.hpp"
#include "fuzzwrap/extractor.hpp"
#include "fuzzwrap/page_model.hpp"

namespace fuzzwrap {

inline double recall(std::size_t extracted, std::size_t total) {
  if (total == 0) throw Error(ErrorCode::ZeroTotal, "no gold tuples");
  return static_cast<double>(extracted) / static_cast<double>(total);
}

inline double precision(std::size_t pertinent, std::size_t total) {
  if (total == 0) throw Error(ErrorCode::ZeroTotal, "no gold tuples");
  return static_cast<double>(pertinent) / static_cast<double>(total);
}

inline double standard_precision(std::size_t pertinent, std::size_t extracted) {
  return extracted == 0 ? 0.0
                        : static_cast<double>(pertinent) /
                              static_cast<double>(extracted);
}

struct TupleCounts {
  std::size_t extracted = 0;
  std::size_t pertinent = 0;
  std::size_t total = 0;

  TupleCounts& operator+=(const TupleCounts& o) {
    extracted += o.extracted;
    pertinent += o.pertinent;
    total += o.total;
    return *this;
  }
  friend bool operator==(const TupleCounts&, const TupleCounts&) = default;
};

// A tuple is pertinent when it is non-empty and every value it carries
// matches, by exact span and name, an attribute of one gold record. Each
// gold record vouches for at most one tuple.
inline TupleCounts match_tuples(const ExtractionResult& result,
                                const ZoneLabels& gold) {
  TupleCounts c;
  c.total = gold.records.size();
  c.extracted = result.tuples.size();
  std::vector<bool> used(gold.records.size(), false);

  auto matches = [&](const ExtractedTuple& t, std::size_t g) {
    if (g >= gold.attributes.size()) return false;
    for (const auto& [name, values] : t.attributes)
      for (const auto& v : values) {
        bool found = false;
        for (const auto& a : gold.attributes[g])
          found = found || (a.name == name && a.span == v.span);
        if (!found) return false;
      }
    return true;
  };

  for (const auto& t : result.tuples) {
    if (t.attributes.empty()) continue;
    for (std::size_t g = 0; g < gold.records.size(); ++g) {
      if (!used[g] && matches(t, g)) {
        used[g] = true;
        ++c.pertinent;
        break;
      }
    }
  }
  return c;
}

struct EvalReport {
  std::string name;
  std::size_t pages = 0;
  std::size_t failed_pages = 0;
  TupleCounts counts;

  double recall() const { return fuzzwrap::recall(counts.extracted, counts.total); }
  double precision() const {
    return fuzzwrap::precision(counts.pertinent, counts.total);
  }
  double standard_precision() const {
    return fuzzwrap::standard_precision(counts.pertinent, counts.extracted);
  }
};

// Any page -> result function; lets baselines share the counting path.
using PageExtractor = std::function<ExtractionResult(const LabelledPage&)>;

inline EvalReport evaluate(const std::vector<LabelledPage>& pages,
                           const PageExtractor& run, std::string name = {}) {
  EvalReport report;
  report.name = std::move(name);
  for (const auto& page : pages) {
    ++report.pages;
    TupleCounts c;
    try {
      c = match_tuples(run(page), page.labels);
    } catch (const Error&) {
      ++report.failed_pages;
      c = TupleCounts{0, 0, page.labels.records.size()};
    }
    report.counts += c;
  }
  if (report.counts.total == 0)
    throw Error(ErrorCode::ZeroTotal, "corpus holds no gold tuples");
  return report;
}

inline EvalReport evaluate(const std::vector<LabelledPage>& pages,
                           const WrapperModel& model, std::string name = {}) {
  return evaluate(
      pages,
      [&](const LabelledPage& p) {
        return extract(p.html, model, p.labels.page_id);
      },
      std::move(name));
}

inline EvalReport evaluate(const GoldCorpus& corpus, const WrapperModel& model,
                           std::string name = {}) {
  return evaluate(corpus.pages, model, std::move(name));
}

// Plain-text table with one column per report.
inline std::string format_table(const std::vector<EvalReport>& reports) {
  std::ostringstream os;
  auto row = [&](const std::string& label, auto&& cell) {
    os << std::left << std::setw(34) << label;
    for (const auto& r : reports) os << std::right << std::setw(14) << cell(r);
    os << '\n';
  };
  auto fixed3 = [](double v) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(3) << v;
    return s.str();
  };
  row("Set of Web pages", [](const EvalReport& r) {
    return r.name + " (" + std::to_string(r.pages) + ")";
  });
  row("Total number of tuples",
      [](const EvalReport& r) { return std::to_string(r.counts.total); });
  row("Number of extracted tuples",
      [](const EvalReport& r) { return std::to_string(r.counts.extracted); });
  row("Number of pertinent tuples",
      [](const EvalReport& r) { return std::to_string(r.counts.pertinent); });
  row("Recall", [&](const EvalReport& r) { return fixed3(r.recall()); });
  row("Precision", [&](const EvalReport& r) { return fixed3(r.precision()); });
  row("Precision (pertinent/extracted)",
      [&](const EvalReport& r) { return fixed3(r.standard_precision()); });
  return os.str();
}

}  // namespace fuzzwrap
