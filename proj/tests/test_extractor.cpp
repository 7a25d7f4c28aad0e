#include <set>
#include <string>
#include <utility>

#include <gtest/gtest.h>

#include "fuzzwrap/evaluator.hpp"
#include "fuzzwrap/extractor.hpp"
#include "support/fixtures.hpp"

using namespace fuzzwrap;

namespace {

std::size_t boundary_of(const std::string& html, std::size_t offset) {
  return BoundaryIndex(tokenize(html)).at(offset);
}

std::string text_of(const LabelledPage& p, const Span& s) {
  return p.html.substr(s.start, s.size());
}

// The page with attribute `name` of record `rec` cut out, together with the
// separator character before it.
std::string drop_attribute(const LabelledPage& p, std::size_t rec, const std::string& name) {
  for (const auto& a : p.labels.attributes[rec])
    if (a.name == name)
      return p.html.substr(0, a.span.start - 1) + p.html.substr(a.span.end);
  ADD_FAILURE() << "no attribute " << name;
  return p.html;
}

using Pairs = std::set<std::pair<std::string, std::string>>;

Pairs value_pairs(const ExtractionResult& r) {
  Pairs out;
  for (const auto& t : r.tuples)
    for (const auto& [name, values] : t.attributes)
      for (const auto& v : values) out.insert({name, v.text});
  return out;
}

// Same records with every record's two values swapped.
std::string swap_values(const LabelledPage& p) {
  std::string out;
  std::size_t last = 0;
  for (std::size_t k = 0; k < p.labels.records.size(); ++k) {
    const auto& at = p.labels.attributes[k];
    if (at.size() != 2) continue;
    out += p.html.substr(last, at[0].span.start - last);
    out += text_of(p, at[1].span);
    out += p.html.substr(at[0].span.end, at[1].span.start - at[0].span.end);
    out += text_of(p, at[0].span);
    last = at[1].span.end;
  }
  return out + p.html.substr(last);
}

SeparatorHit hit(std::size_t pos, double error, Edge edge = Edge::Begin) {
  return {pos, error, ZoneKind::record(), edge};
}

}  // namespace

TEST(Scan, OwnSeparatorHitsWithZeroError) {
  const auto page = fixtures::listing_pages()[0];
  const auto model = train({page});
  const auto hits = scan_separator(tokenize(page.html), model, ZoneKind::global(), Edge::Begin);
  const std::size_t at = boundary_of(page.html, page.labels.global.start);
  bool found = false;
  for (const auto& h : hits)
    if (h.position == at) {
      found = true;
      EXPECT_EQ(h.error, 0.0);
    }
  EXPECT_TRUE(found);
}

TEST(Scan, AllAnyPageHasNoHits) {
  auto model = train(fixtures::listing_pages());
  model.config.tau = 0.25;
  std::string page;
  for (int i = 0; i < 40; ++i) page += "&amp;";
  const auto classes = classes_of(tokenize(page));
  for (const auto& [key, sep] : model.separators)
    EXPECT_TRUE(scan_separator(classes, sep, 0, classes.size(), model.moyL.value,
                               model.config)
                    .empty());
}

TEST(Scan, OneRecordBeginHitPerRecord) {
  AnomalyProfile profile;
  profile.min_records = profile.max_records = 3;
  const auto corpus = generate_corpus(profile, 5, 9);
  const auto model = train(fixtures::head(corpus.pages, 3));
  for (const auto& page : corpus.pages) {
    const auto tokens = tokenize(page.html);
    const auto classes = classes_of(tokens);
    const auto& sep = model.separator(ZoneKind::record(), Edge::Begin);
    // Brute force: score every boundary directly.
    std::set<std::size_t> accepted;
    for (std::size_t p = 0; p <= classes.size(); ++p)
      if (score_separator(classes, sep, p, model.moyL.value, model.config)
              .accepted(model.config))
        accepted.insert(p);
    std::set<std::size_t> gold;
    for (const auto& r : page.labels.records) gold.insert(boundary_of(page.html, r.start));
    EXPECT_EQ(accepted, gold) << page.labels.page_id;
    std::set<std::size_t> scanned;
    for (const auto& h : scan_separator(tokens, model, ZoneKind::record(), Edge::Begin))
      scanned.insert(h.position);
    EXPECT_EQ(scanned, gold);
  }
}

TEST(Extract, ListingSelfExtraction) {
  const auto pages = fixtures::listing_pages();
  const auto model = train(pages);
  for (const auto& p : pages) {
    const auto c = match_tuples(extract(p.html, model), p.labels);
    EXPECT_EQ(c.extracted, p.labels.records.size());
    EXPECT_EQ(c.pertinent, p.labels.records.size());
  }
}

TEST(Extract, RegularCorpusReproducesGold) {
  const auto corpus = fixtures::regular_corpus();
  const auto model = train(fixtures::head(corpus.pages, 3));
  for (const auto& p : corpus.pages) {
    const auto r = extract(p.html, model, p.labels.page_id);
    EXPECT_EQ(r.global, p.labels.global);
    ASSERT_EQ(r.tuples.size(), p.labels.records.size());
    for (std::size_t k = 0; k < r.tuples.size(); ++k) {
      EXPECT_EQ(r.tuples[k].span, p.labels.records[k]);
      std::size_t n = 0;
      for (const auto& [name, values] : r.tuples[k].attributes) n += values.size();
      EXPECT_EQ(n, p.labels.attributes[k].size());
      for (const auto& gold : p.labels.attributes[k]) {
        ASSERT_EQ(r.tuples[k].attributes.count(gold.name), 1u);
        const auto& v = r.tuples[k].attributes.at(gold.name).front();
        EXPECT_EQ(v.span, gold.span);
        EXPECT_EQ(v.text, text_of(p, gold.span));
      }
    }
  }
}

TEST(Extract, MissingCodeKeepsCountry) {
  const auto corpus = fixtures::regular_corpus();
  const auto model = train(fixtures::head(corpus.pages, 3));
  for (std::size_t i = 3; i < corpus.pages.size(); ++i) {
    const auto& p = corpus.pages[i];
    const std::size_t n = p.labels.records.size();
    for (std::size_t rec : {std::size_t{0}, n / 2, n - 1}) {
      SCOPED_TRACE(p.labels.page_id + " record " + std::to_string(rec));
      const std::string html = drop_attribute(p, rec, "code");
      std::string country;
      for (const auto& a : p.labels.attributes[rec])
        if (a.name == "country") country = text_of(p, a.span);
      const auto r = extract(html, model);
      ASSERT_EQ(r.tuples.size(), n);
      const auto& t = r.tuples[rec].attributes;
      ASSERT_EQ(t.size(), 1u);
      ASSERT_EQ(t.count("country"), 1u);
      EXPECT_EQ(t.at("country").front().text, country);
      // Every other record stays complete.
      for (std::size_t k = 0; k < n; ++k)
        if (k != rec) EXPECT_EQ(r.tuples[k].attributes.size(), 2u) << k;
    }
  }
}

TEST(Extract, EmptyPageHasNoGlobalZone) {
  const auto model = train(fixtures::listing_pages());
  try {
    extract("", model);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::GlobalZoneNotFound);
  }
}

TEST(Extract, SpansNestAndDoNotOverlap) {
  for (double rate : {0.0, 0.3}) {
    AnomalyProfile profile{rate, rate, rate, rate};
    const auto corpus = generate_corpus(profile, 12, 3);
    const auto model = train(fixtures::head(corpus.pages, 4));
    for (const auto& p : corpus.pages) {
      ExtractionResult r;
      try {
        r = extract(p.html, model);
      } catch (const Error&) {
        continue;
      }
      EXPECT_LE(r.global.end, p.html.size());
      std::size_t prev = r.global.start;
      for (const auto& t : r.tuples) {
        EXPECT_GE(t.span.start, prev);
        EXPECT_LT(t.span.start, t.span.end);
        EXPECT_LE(t.span.end, r.global.end);
        prev = t.span.end;
        std::vector<Span> values;
        for (const auto& [name, vs] : t.attributes)
          for (const auto& v : vs) {
            EXPECT_GE(v.span.start, t.span.start);
            EXPECT_LE(v.span.end, t.span.end);
            EXPECT_EQ(v.text, p.html.substr(v.span.start, v.span.size()));
            values.push_back(v.span);
          }
        std::sort(values.begin(), values.end(),
                  [](const Span& a, const Span& b) { return a.start < b.start; });
        for (std::size_t k = 1; k < values.size(); ++k)
          EXPECT_LE(values[k - 1].end, values[k].start);
      }
    }
  }
}

TEST(Extract, Deterministic) {
  const auto corpus = generate_corpus(AnomalyProfile{0.2, 0.2, 0.1, 0.1}, 6, 11);
  const auto model = train(fixtures::head(corpus.pages, 3));
  for (const auto& p : corpus.pages) EXPECT_EQ(extract(p.html, model), extract(p.html, model));
}

TEST(Extract, PermutationInvariantWhenTrainedOnBothOrders) {
  AnomalyProfile profile;
  profile.permutation = 0.5;
  for (std::uint64_t seed : {1u, 5u, 42u}) {
    const auto corpus = generate_corpus(profile, 16, seed);
    const auto model = train(fixtures::head(corpus.pages, 6));
    for (std::size_t i = 6; i < corpus.pages.size(); ++i) {
      const auto& p = corpus.pages[i];
      EXPECT_EQ(value_pairs(extract(p.html, model)),
                value_pairs(extract(swap_values(p), model)))
          << "seed " << seed << " " << p.labels.page_id;
    }
  }
}

TEST(Pairing, SelectDisjointMaximizesTotalMargin) {
  using detail::Candidate;
  std::vector<Candidate> c = {
      {"a", {hit(0, 0), hit(10, 0, Edge::End)}, 1.0},
      {"b", {hit(0, 0), hit(4, 0, Edge::End)}, 0.6},
      {"c", {hit(5, 0), hit(10, 0, Edge::End)}, 0.6},
      {"d", {hit(3, 0), hit(6, 0, Edge::End)}, 0.9}};
  const auto kept = detail::select_disjoint(c);
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept[0].name, "b");
  EXPECT_EQ(kept[1].name, "c");
}

TEST(Pairing, SelectDisjointAllowsTouchingZones) {
  using detail::Candidate;
  std::vector<Candidate> c = {{"x", {hit(4, 0), hit(8, 0, Edge::End)}, 0.1},
                              {"y", {hit(0, 0), hit(4, 0, Edge::End)}, 0.1}};
  const auto kept = detail::select_disjoint(c);
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept[0].name, "y");  // page order
}

TEST(Pairing, StrongPairsStopAtNextStrongBegin) {
  detail::Hits begins{{hit(0, 0.5), hit(10, 0.5)}, {}};
  detail::Hits ends{{hit(5, 0.5, Edge::End), hit(12, 0.5, Edge::End),
                     hit(15, -0.5, Edge::End)},
                    {}};
  std::vector<detail::Candidate> c;
  detail::pair_candidates("r", begins, ends, 20, 0.75, c);
  std::set<std::pair<std::size_t, std::size_t>> got;
  for (const auto& x : c) got.insert({x.pair.begin.position, x.pair.end.position});
  const std::set<std::pair<std::size_t, std::size_t>> want = {{0, 5}, {10, 12}, {10, 15}};
  EXPECT_EQ(got, want);
  const auto kept = detail::select_disjoint(c);
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept[1].pair.end.position, 12u);  // better ranked
}

TEST(Pairing, WeakHitsFillGaps) {
  // Strong record at [0,5]; the next record's Begin and End only fit weakly.
  detail::Hits begins{{hit(0, 0.5)}, {hit(6, -1.0)}};
  detail::Hits ends{{hit(5, 0.5, Edge::End)}, {hit(9, -1.0, Edge::End)}};
  std::vector<detail::Candidate> c;
  detail::pair_candidates("r", begins, ends, 12, 0.75, c);
  const auto kept = detail::select_disjoint(c);
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept[1].pair.begin.position, 6u);
  EXPECT_EQ(kept[1].pair.end.position, 9u);
}

TEST(Pairing, LastBeginClosesAtParentEnd) {
  detail::Hits begins{{hit(2, 0.5)}, {}};
  detail::Hits ends{{}, {}};
  std::vector<detail::Candidate> c;
  detail::pair_candidates("r", begins, ends, 9, 0.75, c, hit(9, 0.0, Edge::End));
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].pair.end.position, 9u);
  c.clear();
  detail::pair_candidates("r", begins, ends, 9, 0.75, c);
  EXPECT_TRUE(c.empty());
}

TEST(Pairing, SuppressNeighborsKeepsBestInRadius) {
  const std::vector<SeparatorHit> hits = {hit(3, -0.2), hit(4, 0.1), hit(5, 0.1),
                                          hit(9, -0.7)};
  const auto kept = detail::suppress_neighbors(hits, 2);
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept[0].position, 4u);  // tie with 5 goes to the earlier
  EXPECT_EQ(kept[1].position, 9u);
}

TEST(Pairing, BestHitTieBreaks) {
  const std::vector<SeparatorHit> hits = {hit(1, 0.2), hit(4, 0.5), hit(7, 0.5)};
  EXPECT_EQ(detail::best_hit(hits)->position, 4u);
  EXPECT_EQ(detail::best_hit(hits, 4, true, true)->position, 7u);
  EXPECT_FALSE(detail::best_hit(hits, 7, true).has_value());
}

TEST(Pairing, FirstEndOpensAtParentBegin) {
  detail::Hits begins{{hit(6, 0.5)}, {}};
  detail::Hits ends{{hit(4, 0.5, Edge::End), hit(9, 0.5, Edge::End)}, {}};
  std::vector<detail::Candidate> c;
  detail::pair_candidates("r", begins, ends, 12, 0.75, c, std::nullopt, hit(1, 0.0));
  const auto kept = detail::select_disjoint(c);
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept[0].pair.begin.position, 1u);
  EXPECT_EQ(kept[0].pair.end.position, 4u);
  // A Begin before the first End means nothing is opened.
  c.clear();
  begins.weak = {hit(2, -1.0)};
  detail::pair_candidates("r", begins, ends, 12, 0.75, c, std::nullopt, hit(1, 0.0));
  for (const auto& x : c) EXPECT_NE(x.pair.begin.position, 1u);
}

TEST(Pairing, WeakBeginTakesNegativeStrongEndOnlyWhenInnerFits) {
  detail::Hits ends{{hit(8, -0.4, Edge::End)}, {}};
  detail::Hits begins{{}, {hit(3, -1.0)}};
  std::vector<detail::Candidate> c;
  detail::pair_candidates("r", begins, ends, 12, 0.75, c);
  EXPECT_TRUE(c.empty());
  begins.weak[0].inner_fit = true;
  detail::pair_candidates("r", begins, ends, 12, 0.75, c);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].pair.end.position, 8u);
}

TEST(Scoring, CoveredNeedsEveryClassAtItsDistance) {
  using C = TokenClass;
  const DetectorWindow w{Side::Right, ZoneKind::global(), Edge::Begin,
                         {C::Num, C::Punc, C::C1Alph, C::Punc}};
  const auto m = build_frequency_matrix({w});
  EXPECT_TRUE(covered(m, {C::Num, C::Punc, C::C1Alph, C::Punc}));
  EXPECT_FALSE(covered(m, {C::Punc, C::Num, C::C1Alph, C::Punc}));
  EXPECT_FALSE(covered(m, {C::Num, C::Punc, C::C1Alph, C::Pad}));
}
