#pragma once

// Seeded generator of country/dialing-code listing pages with injected
// anomalies and their gold labels.
//
// Anomalies are assigned to exact record counts (round(rate * records)),
// so realized rates track the profile to within one record.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "fuzzwrap/error.hpp"
#include "fuzzwrap/induction.hpp"
#include "fuzzwrap/page_model.hpp"

namespace fuzzwrap {

struct AnomalyProfile {
  double missing = 0;      // one attribute dropped
  double permutation = 0;  // code before country
  double multi_value = 0;  // a second code value
  double typo = 0;         // delimiter between values replaced by one char
  std::size_t min_records = 5;
  std::size_t max_records = 9;

  void validate() const {
    for (double r : {missing, permutation, multi_value, typo})
      if (!(r >= 0.0 && r <= 1.0))
        throw Error(ErrorCode::InvalidProfile, "anomaly rates must lie in [0,1]");
    if (min_records == 0 || min_records > max_records)
      throw Error(ErrorCode::InvalidProfile, "bad records-per-page range");
  }
  friend bool operator==(const AnomalyProfile&, const AnomalyProfile&) = default;
};

struct GoldCorpus {
  AnomalyProfile profile;
  std::uint64_t seed = 0;
  std::vector<LabelledPage> pages;
};

namespace detail {

inline constexpr std::array<const char*, 40> kCountries = {
    "Congo",   "Chad",     "Mali",    "Niger",    "Togo",    "Benin",
    "Ghana",   "Gabon",    "Kenya",   "Uganda",   "Rwanda",  "Burundi",
    "Zambia",  "Malawi",   "Angola",  "Namibia",  "Botswana", "Lesotho",
    "Tunisia", "Algeria",  "Morocco", "Libya",    "Egypt",   "Sudan",
    "Eritrea", "Djibouti", "Somalia", "Ethiopia", "Senegal", "Gambia",
    "Guinea",  "Liberia",  "Cameroon", "Nigeria", "Mauritania", "Comoros",
    "Seychelles", "Mauritius", "Madagascar", "Mozambique"};

inline constexpr std::array<char, 5> kTypoChars = {'-', ',', ';', '/', '|'};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  // Uniform in [0, n); the modulo bias is negligible for the sizes used.
  std::size_t below(std::size_t n) {
    return static_cast<std::size_t>(engine_() % static_cast<std::uint64_t>(n));
  }
  std::size_t between(std::size_t lo, std::size_t hi) {
    return lo + below(hi - lo + 1);
  }
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

inline std::size_t exact_count(double rate, std::size_t n) {
  return static_cast<std::size_t>(std::llround(rate * static_cast<double>(n)));
}

// Marks exactly round(rate * |eligible|) entries of `eligible` in `flags`.
inline void assign(std::vector<bool>& flags, std::vector<std::size_t> eligible,
                   double rate, Rng& rng) {
  rng.shuffle(eligible);
  std::size_t k = std::min(exact_count(rate, eligible.size()), eligible.size());
  for (std::size_t i = 0; i < k; ++i) flags[eligible[i]] = true;
}

struct RecordPlan {
  bool missing = false;
  bool missing_country = false;
  bool permuted = false;
  bool multi = false;
  bool typo = false;
};

}  // namespace detail

inline GoldCorpus generate_corpus(const AnomalyProfile& profile,
                                  std::size_t n_pages, std::uint64_t seed) {
  using namespace detail;
  profile.validate();
  Rng rng(seed);

  std::vector<std::size_t> per_page(n_pages);
  for (auto& c : per_page) c = rng.between(profile.min_records, profile.max_records);
  const std::size_t total = std::accumulate(per_page.begin(), per_page.end(),
                                            std::size_t{0});

  // Structural anomalies go to disjoint records when their rates allow it.
  std::vector<bool> missing(total), permuted(total), multi(total), typo(total);
  std::vector<std::size_t> all(total);
  std::iota(all.begin(), all.end(), std::size_t{0});
  const double structural = profile.missing + profile.permutation + profile.multi_value;
  if (structural <= 1.0) {
    auto order = all;
    rng.shuffle(order);
    std::size_t k_m = exact_count(profile.missing, total);
    std::size_t k_p = exact_count(profile.permutation, total);
    std::size_t k_v = exact_count(profile.multi_value, total);
    std::size_t i = 0;
    for (; i < std::min(k_m, total); ++i) missing[order[i]] = true;
    for (std::size_t e = std::min(i + k_p, total); i < e; ++i) permuted[order[i]] = true;
    for (std::size_t e = std::min(i + k_v, total); i < e; ++i) multi[order[i]] = true;
  } else {
    assign(missing, all, profile.missing, rng);
    assign(permuted, all, profile.permutation, rng);
    assign(multi, all, profile.multi_value, rng);
  }

  std::vector<RecordPlan> plans(total);
  for (std::size_t r = 0; r < total; ++r) {
    plans[r].missing = missing[r];
    plans[r].missing_country = missing[r] && rng.below(2) == 0;
    plans[r].permuted = permuted[r] && !missing[r];
    plans[r].multi = multi[r] && !(missing[r] && !plans[r].missing_country);
  }
  std::vector<std::size_t> with_delimiter;
  for (std::size_t r = 0; r < total; ++r)
    if (!plans[r].missing || plans[r].multi) with_delimiter.push_back(r);
  assign(typo, with_delimiter, profile.typo, rng);
  for (std::size_t r = 0; r < total; ++r) plans[r].typo = typo[r];

  GoldCorpus corpus;
  corpus.profile = profile;
  corpus.seed = seed;
  std::size_t next = 0;
  for (std::size_t p = 0; p < n_pages; ++p) {
    LabelledPage page;
    ZoneLabels& lab = page.labels;
    lab.page_id = "page" + std::to_string(p + 1);
    std::string& html = page.html;
    html += "<HTML><HEAD><TITLE>Country Codes</TITLE></HEAD>\n<BODY>\n";
    html += "<H1>International Dialing Codes</H1>\n";
    html += "<P>Listing " + std::to_string(p + 1) + " of " +
            std::to_string(n_pages) + ", updated yearly.\n<UL>\n";
    lab.global.start = html.size();

    for (std::size_t r = 0; r < per_page[p]; ++r, ++next) {
      const RecordPlan& plan = plans[next];
      const std::string country = kCountries[rng.below(kCountries.size())];
      std::vector<std::string> codes{std::to_string(rng.between(20, 999))};
      if (plan.multi) codes.push_back(std::to_string(rng.between(20, 999)));
      const char typo_char = kTypoChars[rng.below(kTypoChars.size())];

      struct Part {
        std::string name;
        std::string text;
      };
      std::vector<Part> parts;
      if (!(plan.missing && plan.missing_country)) parts.push_back({"country", country});
      if (!(plan.missing && !plan.missing_country))
        for (const auto& c : codes) parts.push_back({"code", c});
      if (plan.permuted) std::stable_partition(parts.begin(), parts.end(),
                                               [](const Part& x) { return x.name == "code"; });

      if (r > 0) html += "\n";
      Span rec{html.size(), 0};
      html += "<LI>";
      std::vector<AttributeLabel> attrs;
      for (std::size_t k = 0; k < parts.size(); ++k) {
        if (k > 0) html += plan.typo && k == 1 ? std::string(1, typo_char) : " ";
        attrs.push_back({parts[k].name, {html.size(), html.size() + parts[k].text.size()}});
        html += parts[k].text;
      }
      rec.end = html.size();
      lab.records.push_back(rec);
      lab.attributes.push_back(std::move(attrs));
    }
    lab.global.end = html.size();
    html += "\n</UL>\n<P>Source: national telecom regulators.\n</BODY></HTML>\n";
    corpus.pages.push_back(std::move(page));
  }
  return corpus;
}

}  // namespace fuzzwrap
