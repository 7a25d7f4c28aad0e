#pragma once

#include <filesystem>
#include <vector>

#include "fuzzwrap/serialization.hpp"

namespace fuzzwrap::fixtures {

inline std::filesystem::path fixtures_dir() { return FUZZWRAP_FIXTURES; }

inline std::vector<LabelledPage> listing_pages() {
  return load_labelled_pages(fixtures_dir() / "listing" / "labels.json");
}

inline GoldCorpus regular_corpus(std::size_t pages = 10, std::uint64_t seed = 42) {
  return generate_corpus(AnomalyProfile{}, pages, seed);
}

inline std::vector<LabelledPage> head(const std::vector<LabelledPage>& pages,
                                      std::size_t n) {
  return {pages.begin(), pages.begin() + static_cast<std::ptrdiff_t>(std::min(n, pages.size()))};
}

}  // namespace fuzzwrap::fixtures
