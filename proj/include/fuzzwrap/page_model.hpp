#pragma once

// Zone architecture of a labelled page and the detector windows cut
// around each zone edge.
//
// A page holds one global zone; the global zone holds records; each record
// holds named attribute zones. A zone edge is a token boundary, indexed
// 0..n for a page of n tokens (boundary p sits between token p-1 and p).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "fuzzwrap/error.hpp"
#include "fuzzwrap/tokenizer.hpp"

namespace fuzzwrap {

enum class ZoneLevel { Global, Record, Attribute };

struct ZoneKind {
  ZoneLevel level = ZoneLevel::Global;
  std::string name;  // attribute name; empty for Global and Record

  static ZoneKind global() { return {ZoneLevel::Global, {}}; }
  static ZoneKind record() { return {ZoneLevel::Record, {}}; }
  static ZoneKind attribute(std::string n) {
    return {ZoneLevel::Attribute, std::move(n)};
  }

  std::string label() const {
    switch (level) {
      case ZoneLevel::Global: return "global";
      case ZoneLevel::Record: return "record";
      case ZoneLevel::Attribute: return "attr:" + name;
    }
    return "?";
  }

  friend bool operator==(const ZoneKind&, const ZoneKind&) = default;
  friend bool operator<(const ZoneKind& a, const ZoneKind& b) {
    return std::tie(a.level, a.name) < std::tie(b.level, b.name);
  }
};

enum class Edge { Begin, End };
enum class Side { Left, Right };

inline std::string_view edge_name(Edge e) {
  return e == Edge::Begin ? "begin" : "end";
}
inline std::string_view side_name(Side s) {
  return s == Side::Left ? "left" : "right";
}

struct AttributeLabel {
  std::string name;
  Span span;
  friend bool operator==(const AttributeLabel&, const AttributeLabel&) = default;
};

// User annotations for one page, as half-open byte spans.
struct ZoneLabels {
  std::string page_id;
  Span global;
  std::vector<Span> records;
  std::vector<std::vector<AttributeLabel>> attributes;  // parallel to records

  friend bool operator==(const ZoneLabels&, const ZoneLabels&) = default;
};

struct MoyL {
  std::size_t value = 1;
  friend bool operator==(const MoyL&, const MoyL&) = default;
};

// Token classes flanking one separator point. classes[0] is always the
// token at distance 1, so left and right windows index the same way.
struct DetectorWindow {
  Side side = Side::Left;
  ZoneKind zone;
  Edge edge = Edge::Begin;
  std::vector<TokenClass> classes;

  TokenClass at(std::size_t distance) const { return classes[distance - 1]; }
  std::size_t length() const { return classes.size(); }
};

// Token boundary index of each character offset that lies on a boundary.
class BoundaryIndex {
 public:
  explicit BoundaryIndex(const std::vector<Token>& tokens) {
    offsets_.reserve(tokens.size() + 1);
    for (const auto& t : tokens) offsets_.push_back(t.span.start);
    offsets_.push_back(tokens.empty() ? 0 : tokens.back().span.end);
  }

  std::optional<std::size_t> find(std::size_t offset) const {
    auto it = std::lower_bound(offsets_.begin(), offsets_.end(), offset);
    if (it == offsets_.end() || *it != offset) return std::nullopt;
    return static_cast<std::size_t>(it - offsets_.begin());
  }

  std::size_t at(std::size_t offset) const {
    if (auto b = find(offset)) return *b;
    throw Error(ErrorCode::BoundaryInsideToken,
                "offset " + std::to_string(offset) +
                    " does not fall on a token boundary",
                offset);
  }

  std::size_t offset_of(std::size_t boundary) const { return offsets_[boundary]; }
  std::size_t boundaries() const { return offsets_.size(); }

 private:
  std::vector<std::size_t> offsets_;
};

namespace detail {

inline void check_span(const Span& s, std::size_t page_size) {
  if (s.start > s.end || s.end > page_size)
    throw Error(ErrorCode::InvalidSpan,
                "span [" + std::to_string(s.start) + "," +
                    std::to_string(s.end) + ") outside page of size " +
                    std::to_string(page_size),
                s.start > s.end ? s.start : s.end);
}

inline void check_disjoint_ordered(const std::vector<Span>& spans) {
  for (std::size_t i = 1; i < spans.size(); ++i) {
    if (spans[i].start < spans[i - 1].end)
      throw Error(ErrorCode::OverlappingSpans,
                  "span starting at " + std::to_string(spans[i].start) +
                      " overlaps or precedes its predecessor",
                  spans[i].start);
  }
}

inline void check_inside(const Span& parent, const Span& child) {
  if (!parent.contains(child))
    throw Error(ErrorCode::SpanOutsideParent,
                "span [" + std::to_string(child.start) + "," +
                    std::to_string(child.end) + ") is not inside [" +
                    std::to_string(parent.start) + "," +
                    std::to_string(parent.end) + ")",
                child.start < parent.start ? child.start : child.end);
}

}  // namespace detail

// Checks nesting, ordering and token alignment of `labels`. Spans are never
// moved; the first violation is thrown with the offending offset.
inline const ZoneLabels& validate_labels(std::string_view page,
                                         const std::vector<Token>& tokens,
                                         const ZoneLabels& labels) {
  using namespace detail;
  if (labels.attributes.size() != labels.records.size() &&
      !labels.attributes.empty())
    throw Error(ErrorCode::FormatError,
                "attribute lists must parallel the record list");

  check_span(labels.global, page.size());
  for (const auto& r : labels.records) check_span(r, page.size());
  for (const auto& attrs : labels.attributes)
    for (const auto& a : attrs) check_span(a.span, page.size());

  check_disjoint_ordered(labels.records);
  for (const auto& r : labels.records) check_inside(labels.global, r);

  for (std::size_t i = 0; i < labels.attributes.size(); ++i) {
    const auto& attrs = labels.attributes[i];
    std::vector<Span> spans;
    for (const auto& a : attrs) {
      if (a.name.empty())
        throw Error(ErrorCode::FormatError, "attribute name must be non-empty",
                    a.span.start);
      spans.push_back(a.span);
    }
    check_disjoint_ordered(spans);
    for (const auto& s : spans) check_inside(labels.records[i], s);
  }

  BoundaryIndex index(tokens);
  auto check_boundary = [&](std::size_t off) { (void)index.at(off); };
  check_boundary(labels.global.start);
  check_boundary(labels.global.end);
  for (const auto& r : labels.records) {
    check_boundary(r.start);
    check_boundary(r.end);
  }
  for (const auto& attrs : labels.attributes)
    for (const auto& a : attrs) {
      check_boundary(a.span.start);
      check_boundary(a.span.end);
    }
  return labels;
}

inline const ZoneLabels& validate_labels(std::string_view page,
                                         const ZoneLabels& labels) {
  return validate_labels(page, tokenize(page), labels);
}

// Mean record length in tokens over every labelled record, rounded half up.
inline MoyL compute_moyL(const std::vector<ZoneLabels>& labels,
                         const std::vector<std::vector<Token>>& tokens) {
  std::size_t total = 0;
  std::size_t count = 0;
  for (std::size_t p = 0; p < labels.size(); ++p) {
    BoundaryIndex index(tokens[p]);
    for (const auto& r : labels[p].records) {
      total += index.at(r.end) - index.at(r.start);
      ++count;
    }
  }
  if (count == 0) throw Error(ErrorCode::NoRecords, "no labelled records");
  // round half up on total/count in integer arithmetic
  std::size_t rounded = (2 * total + count) / (2 * count);
  return MoyL{std::max<std::size_t>(1, rounded)};
}

// Window of `length` classes on `side` of boundary `point`, Pad-filled past
// the page edges.
inline std::vector<TokenClass> window_classes(
    const std::vector<TokenClass>& classes, std::size_t point, Side side,
    std::size_t length) {
  std::vector<TokenClass> out(length, TokenClass::Pad);
  for (std::size_t d = 1; d <= length; ++d) {
    if (side == Side::Left) {
      if (d <= point) out[d - 1] = classes[point - d];
    } else {
      std::size_t idx = point + d - 1;
      if (idx < classes.size()) out[d - 1] = classes[idx];
    }
  }
  return out;
}

// One labelled zone edge: the zone, which edge, and its token boundary.
struct ZoneEdge {
  ZoneKind zone;
  Edge edge;
  std::size_t boundary;
};

inline std::vector<ZoneEdge> zone_edges(const std::vector<Token>& tokens,
                                        const ZoneLabels& labels) {
  BoundaryIndex index(tokens);
  std::vector<ZoneEdge> edges;
  auto push = [&](const ZoneKind& z, const Span& s) {
    edges.push_back({z, Edge::Begin, index.at(s.start)});
    edges.push_back({z, Edge::End, index.at(s.end)});
  };
  push(ZoneKind::global(), labels.global);
  for (const auto& r : labels.records) push(ZoneKind::record(), r);
  for (const auto& attrs : labels.attributes)
    for (const auto& a : attrs) push(ZoneKind::attribute(a.name), a.span);
  return edges;
}

// Left and right windows for every labelled zone edge, in the order
// global, records, attributes (begin before end, left before right).
inline std::vector<DetectorWindow> extract_windows(
    const std::vector<Token>& tokens, const ZoneLabels& labels, MoyL moyL) {
  auto classes = classes_of(tokens);
  std::vector<DetectorWindow> windows;
  for (const auto& e : zone_edges(tokens, labels)) {
    for (Side side : {Side::Left, Side::Right})
      windows.push_back(DetectorWindow{
          side, e.zone, e.edge,
          window_classes(classes, e.boundary, side, moyL.value)});
  }
  return windows;
}

}  // namespace fuzzwrap
