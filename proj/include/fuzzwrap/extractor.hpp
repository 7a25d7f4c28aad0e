#pragma once

// Hierarchical extraction: the global zone first, then the records inside
// it, then the attributes inside each record. Every zone is delimited by a
// Begin and an End separator located by scanning token boundaries.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fuzzwrap/error.hpp"
#include "fuzzwrap/induction.hpp"
#include "fuzzwrap/page_model.hpp"
#include "fuzzwrap/scoring.hpp"
#include "fuzzwrap/tokenizer.hpp"

namespace fuzzwrap {

struct SeparatorHit {
  std::size_t position = 0;  // token boundary
  double error = 0;          // crisp ErrorTot
  ZoneKind zone;
  Edge edge = Edge::Begin;
  bool inner_fit = false;    // the detector facing the zone content fits
};

struct ExtractedValue {
  std::string text;
  Span span;
  double begin_error = 0;
  double end_error = 0;
  friend bool operator==(const ExtractedValue&, const ExtractedValue&) = default;
};

struct ExtractedTuple {
  Span span;
  double begin_error = 0;
  double end_error = 0;
  std::map<std::string, std::vector<ExtractedValue>> attributes;
  friend bool operator==(const ExtractedTuple&, const ExtractedTuple&) = default;
};

struct ExtractionResult {
  std::string page_id;
  Span global;
  double global_begin_error = 0;
  double global_end_error = 0;
  std::vector<ExtractedTuple> tuples;
  friend bool operator==(const ExtractionResult&, const ExtractionResult&) = default;
};

// Accepted hits of `sep` at boundaries first..last (inclusive), by position.
inline std::vector<SeparatorHit> scan_separator(
    const std::vector<TokenClass>& classes, const SeparatorModel& sep,
    std::size_t first, std::size_t last, std::size_t moyL,
    const WrapperConfig& cfg, bool cover = false) {
  std::vector<SeparatorHit> hits;
  last = std::min(last, classes.size());
  for (std::size_t p = first; p <= last; ++p) {
    SeparatorScore s = score_separator(classes, sep, p, moyL, cfg);
    if (s.accepted(cfg))
      hits.push_back({p, s.error_tot, sep.zone, sep.edge, s.inner_fit(sep.edge, cfg, cover)});
  }
  return hits;
}

inline std::vector<SeparatorHit> scan_separator(
    const std::vector<Token>& tokens, const WrapperModel& model,
    const ZoneKind& zone, Edge edge) {
  auto classes = classes_of(tokens);
  return scan_separator(classes, model.separator(zone, edge), 0, classes.size(),
                        model.moyL.value, model.config);
}

// Weak hits in [lo, hi]: boundaries the fuzzy test rejects but where one
// detector alone fits like the best training window. Anomalies such as a
// missing attribute shift one side of the neighbouring separators; these
// hits let the extractor close the gaps such anomalies leave.
inline std::vector<SeparatorHit> lone_hits(const std::vector<TokenClass>& classes,
                                           const SeparatorModel& sep,
                                           std::size_t lo, std::size_t hi,
                                           std::size_t moyL,
                                           const WrapperConfig& cfg,
                                           bool cover = false) {
  std::vector<SeparatorHit> out;
  hi = std::min(hi, classes.size());
  for (std::size_t p = lo; p <= hi; ++p) {
    SeparatorScore s = score_separator(classes, sep, p, moyL, cfg);
    if (!s.accepted(cfg) && s.lone_fit(cfg, cover))
      out.push_back({p, s.error_tot, sep.zone, sep.edge, s.inner_fit(sep.edge, cfg, cover)});
  }
  return out;
}

namespace detail {

// Lower is better. Accepted hits already satisfy |error| <= tau; among
// them a higher ErrorTot means a more typical context.
inline double rank_key(double error) { return -error; }

// Lowest rank key; ties go to the earliest hit, or the latest if `latest`.
inline std::optional<SeparatorHit> best_hit(const std::vector<SeparatorHit>& hits,
                                            std::size_t after = 0,
                                            bool strict = false,
                                            bool latest = false) {
  std::optional<SeparatorHit> best;
  for (const auto& h : hits) {
    if (h.position < after || (strict && h.position == after)) continue;
    if (!best || rank_key(h.error) < rank_key(best->error) ||
        (latest && rank_key(h.error) == rank_key(best->error)))
      best = h;
  }
  return best;
}

// Keeps a hit only if no hit closer than `radius` boundaries ranks better
// (an equal rank keeps the earlier one).
inline std::vector<SeparatorHit> suppress_neighbors(
    const std::vector<SeparatorHit>& hits, std::size_t radius) {
  std::vector<SeparatorHit> out;
  for (std::size_t i = 0; i < hits.size(); ++i) {
    bool keep = true;
    for (std::size_t j = 0; j < hits.size() && keep; ++j) {
      if (i == j) continue;
      std::size_t a = hits[i].position, b = hits[j].position;
      if ((a > b ? a - b : b - a) >= radius) continue;
      double ei = rank_key(hits[i].error), ej = rank_key(hits[j].error);
      keep = !(ej < ei || (ej == ei && b < a));
    }
    if (keep) out.push_back(hits[i]);
  }
  return out;
}

struct Pairing {
  SeparatorHit begin;
  SeparatorHit end;
};

// Weight of a weak hit in a candidate zone: enough to be kept where nothing
// stronger competes, too little to displace an accepted pair.
inline constexpr double kWeakMargin = 1e-3;

struct Hits {
  std::vector<SeparatorHit> strong;  // accepted by the fuzzy test
  std::vector<SeparatorHit> weak;    // see lone_hits
};

// First hit with position in [lo, hi], if any.
inline const SeparatorHit* first_in(const std::vector<SeparatorHit>& hits,
                                    std::size_t lo, std::size_t hi) {
  for (const auto& h : hits)
    if (h.position >= lo) return h.position <= hi ? &h : nullptr;
  return nullptr;
}

struct Candidate {
  std::string name;
  Pairing pair;
  double margin = 0;  // summed weight of both hits
};

// Candidate zones for one name. Every strong Begin pairs with every strong
// End up to the next strong Begin (or `hi`). Weak hits add nearest-End
// pairs: weak with weak, or weak with a strong hit of non-negative error
// (any strong End once the weak Begin's inner side fits).
// The last Begin may run to `close`, the parent's end, when nothing closes
// it; likewise the first End may start at `open`, the parent's begin, when
// no Begin precedes it. A strong hit weighs its distance inside tau, a weak
// one kWeakMargin.
inline void pair_candidates(const std::string& name, const Hits& begins,
                            const Hits& ends, std::size_t hi, double tau,
                            std::vector<Candidate>& out,
                            std::optional<SeparatorHit> close = std::nullopt,
                            std::optional<SeparatorHit> open = std::nullopt) {
  auto strong_weight = [&](const SeparatorHit& h) { return tau - rank_key(h.error); };
  auto limit_after = [&](std::size_t p) {
    for (const auto& b : begins.strong)
      if (b.position > p) return b.position;
    return hi;
  };
  auto push = [&](const SeparatorHit& b, double wb, const SeparatorHit* e, double we) {
    if (e) out.push_back({name, {b, *e}, wb + we});
  };
  auto close_last = [&](const SeparatorHit& b, double wb) {
    if (!close || b.position >= hi || limit_after(b.position) != hi) return;
    if (first_in(ends.strong, b.position + 1, hi) || first_in(ends.weak, b.position + 1, hi))
      return;
    push(b, wb, &*close, kWeakMargin);
  };
  for (const auto& b : begins.strong) {
    const std::size_t limit = limit_after(b.position);
    for (const auto& e : ends.strong)
      if (e.position > b.position && e.position <= limit)
        push(b, strong_weight(b), &e, strong_weight(e));
    if (b.error >= 0)
      push(b, strong_weight(b), first_in(ends.weak, b.position + 1, limit), kWeakMargin);
    close_last(b, strong_weight(b));
  }
  for (const auto& b : begins.weak) {
    const std::size_t limit = limit_after(b.position);
    if (auto e = first_in(ends.strong, b.position + 1, limit); e && (e->error >= 0 || b.inner_fit))
      push(b, kWeakMargin, e, strong_weight(*e));
    push(b, kWeakMargin, first_in(ends.weak, b.position + 1, limit), kWeakMargin);
    close_last(b, kWeakMargin);
  }
  if (open && open->position < hi) {
    const SeparatorHit* s = first_in(ends.strong, open->position + 1, hi);
    const SeparatorHit* w = first_in(ends.weak, open->position + 1, hi);
    const SeparatorHit* e = s && (!w || s->position <= w->position) ? s : w;
    if (e && !first_in(begins.strong, open->position, e->position - 1) &&
        !first_in(begins.weak, open->position, e->position - 1))
      push(*open, kWeakMargin, e, e == s ? strong_weight(*e) : kWeakMargin);
  }
}

// Weighted interval scheduling: the set of pairwise disjoint candidates with
// the largest total margin, returned in page order.
inline std::vector<Candidate> select_disjoint(std::vector<Candidate> cands) {
  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    if (a.pair.end.position != b.pair.end.position)
      return a.pair.end.position < b.pair.end.position;
    if (a.pair.begin.position != b.pair.begin.position)
      return a.pair.begin.position < b.pair.begin.position;
    return a.name < b.name;
  });
  const std::size_t m = cands.size();
  std::vector<double> best(m + 1, 0.0);
  std::vector<std::size_t> prev(m, 0);  // best[] index compatible with i
  std::vector<bool> take(m + 1, false);
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t k = 0;
    while (k < i && cands[k].pair.end.position <= cands[i].pair.begin.position) ++k;
    prev[i] = k;
    const double with = cands[i].margin + best[k];
    take[i + 1] = with > best[i];
    best[i + 1] = take[i + 1] ? with : best[i];
  }
  std::vector<Candidate> out;
  for (std::size_t i = m; i > 0;) {
    if (take[i]) {
      out.push_back(cands[i - 1]);
      i = prev[i - 1];
    } else {
      --i;
    }
  }
  std::reverse(out.begin(), out.end());
  return out;
}

}  // namespace detail

inline ExtractionResult extract(std::string_view page,
                                const std::vector<Token>& tokens,
                                const WrapperModel& model,
                                std::string page_id = {}) {
  const auto classes = classes_of(tokens);
  const BoundaryIndex index(tokens);
  const std::size_t n = classes.size();
  const std::size_t moyL = model.moyL.value;
  const auto& cfg = model.config;

  const std::size_t radius = std::max<std::size_t>(1, (moyL + 1) / 2);
  auto scan = [&](const ZoneKind& z, Edge e, std::size_t from, std::size_t to) {
    return detail::suppress_neighbors(
        scan_separator(classes, model.separator(z, e), from, to, moyL, cfg),
        radius);
  };
  auto to_span = [&](std::size_t b, std::size_t e) {
    return Span{index.offset_of(b), index.offset_of(e)};
  };

  ExtractionResult result;
  result.page_id = std::move(page_id);

  // Step 1: global zone.
  auto g_begin = detail::best_hit(scan(ZoneKind::global(), Edge::Begin, 0, n));
  if (!g_begin)
    throw Error(ErrorCode::GlobalZoneNotFound, "no global begin separator");
  // The End needs a strong hit somewhere after the Begin, but a weak one
  // further on wins when the strong ones sit right at tau: a last record
  // missing its final attribute shifts the true End's left side.
  auto g_end = detail::best_hit(
      scan(ZoneKind::global(), Edge::End, g_begin->position, n),
      g_begin->position, true, /*latest=*/true);
  if (!g_end)
    throw Error(ErrorCode::GlobalZoneNotFound, "no global end separator");
  if (cfg.tau - detail::rank_key(g_end->error) < detail::kWeakMargin)
    for (const auto& w : lone_hits(classes, model.separator(ZoneKind::global(), Edge::End),
                                   g_end->position + 1, n, moyL, cfg))
      g_end = w;
  const std::size_t gb = g_begin->position;
  const std::size_t ge = g_end->position;
  result.global = to_span(gb, ge);
  result.global_begin_error = g_begin->error;
  result.global_end_error = g_end->error;

  // Attribute hits also accept windows the training windows cover token by
  // token; a record boundary bounds how far such hits can reach.
  auto hits = [&](const ZoneKind& z, Edge e, std::size_t from, std::size_t to) {
    const bool cover = z.level == ZoneLevel::Attribute;
    const auto& sep = model.separator(z, e);
    return detail::Hits{detail::suppress_neighbors(
                            scan_separator(classes, sep, from, to, moyL, cfg, cover), radius),
                        lone_hits(classes, sep, from, to, moyL, cfg, cover)};
  };

  // Step 2: records inside the global zone.
  std::vector<detail::Candidate> record_cands;
  detail::pair_candidates({}, hits(ZoneKind::record(), Edge::Begin, gb, ge),
                          hits(ZoneKind::record(), Edge::End, gb, ge), ge, cfg.tau,
                          record_cands,
                          SeparatorHit{ge, g_end->error, ZoneKind::record(), Edge::End},
                          SeparatorHit{gb, g_begin->error, ZoneKind::record(), Edge::Begin});
  std::vector<detail::Pairing> records;
  for (const auto& c : detail::select_disjoint(std::move(record_cands)))
    records.push_back(c.pair);

  // Step 3: attributes inside each record.
  const auto names = model.attribute_names();
  for (const auto& rec : records) {
    const std::size_t rb = rec.begin.position;
    const std::size_t re = rec.end.position;
    ExtractedTuple tuple;
    tuple.span = to_span(rb, re);
    tuple.begin_error = rec.begin.error;
    tuple.end_error = rec.end.error;

    std::vector<detail::Candidate> candidates;
    for (const auto& name : names) {
      auto zone = ZoneKind::attribute(name);
      detail::pair_candidates(name, hits(zone, Edge::Begin, rb, re),
                              hits(zone, Edge::End, rb, re), re, cfg.tau, candidates);
    }
    const auto kept = detail::select_disjoint(std::move(candidates));
    for (const auto& k : kept) {
      Span s = to_span(k.pair.begin.position, k.pair.end.position);
      tuple.attributes[k.name].push_back(
          {std::string(page.substr(s.start, s.size())), s, k.pair.begin.error,
           k.pair.end.error});
    }
    result.tuples.push_back(std::move(tuple));
  }
  return result;
}

inline ExtractionResult extract(std::string_view page, const WrapperModel& model,
                                std::string page_id = {}) {
  return extract(page, tokenize(page), model, std::move(page_id));
}

}  // namespace fuzzwrap
