// Header-only use: train on labelled pages, extract from a new one.
//   library_usage samples/books/labels.json samples/books/shelf4.html
#include <cstdio>

#include "fuzzwrap/serialization.hpp"

int main(int argc, char** argv) {
  if (argc != 3) {
    std::fprintf(stderr, "usage: %s LABELS.json PAGE.html\n", argv[0]);
    return 2;
  }
  try {
    const auto pages = fuzzwrap::load_labelled_pages(argv[1]);
    const auto model = fuzzwrap::train(pages);
    const auto result = fuzzwrap::extract(fuzzwrap::detail::read_file(argv[2]), model);
    for (const auto& t : result.tuples) {
      for (const auto& [name, values] : t.attributes)
        for (const auto& v : values) std::printf("%s=%s  ", name.c_str(), v.text.c_str());
      std::printf("\n");
    }
  } catch (const fuzzwrap::Error& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 1;
  }
}
