#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "fuzzwrap/tokenizer.hpp"
#include "support/fixtures.hpp"
#include "support/reference_segmenter.hpp"

using namespace fuzzwrap;

namespace {

std::string concat(const std::vector<Token>& tokens) {
  std::string s;
  for (const auto& t : tokens) s += t.lexeme;
  return s;
}

// Random fragments mixing well-formed markup with broken tags, stray
// ampersands, high bytes and control characters.
std::string random_fragment(std::mt19937_64& rng) {
  static const std::vector<std::string> pieces = {
      "<UL>", "</UL>", "<li>", "</LI>", "<TD class=x>", "<BR>", "<br/>", "<P>",
      "</p>", "<B>", "</B>", "<a href=\"u?q=1&r=2\">", "</a>", "<!-- c -->",
      "<", ">", "</", "<1>", "&amp;", "&middot;", "&#233;", "&#x4E2D;", "&",
      "&;", "&#;", "&#x;", "Congo", "FSM", "Professor", "iPhone4", "a1",
      "HTMLPage", "123", "0042", " ", "  ", "\n", "\t\r\n", ",", ".", ":",
      ";", "(", ")", "-", "\xc2\xa7", "\xe2\x80\x94", "\x01", "\x7f", "x"};
  std::uniform_int_distribution<std::size_t> count(0, 12), pick(0, pieces.size() - 1);
  std::uniform_int_distribution<int> byte(1, 255), coin(0, 9);
  std::string s;
  for (std::size_t n = count(rng); n > 0; --n) {
    if (coin(rng) == 0)
      s += static_cast<char>(byte(rng));
    else
      s += pieces[pick(rng)];
  }
  return s;
}

void expect_matches_reference(const std::string& page) {
  auto tokens = tokenize(page);
  auto units = reference::segment(page);
  ASSERT_EQ(concat(tokens), page);
  ASSERT_EQ(tokens.size(), units.size()) << page;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    EXPECT_EQ(tokens[i].lexeme, units[i].lexeme) << page;
    EXPECT_EQ(tokens[i].span.start, units[i].start);
    EXPECT_EQ(tokens[i].cls, reference::classify(units[i].lexeme))
        << '"' << units[i].lexeme << '"';
    EXPECT_EQ(classify(tokens[i].lexeme), tokens[i].cls);
  }
}

}  // namespace

TEST(TokenClass, IdsFollowMatrixColumns) {
  EXPECT_EQ(class_id(TokenClass::Pad), 0);
  const char* names[] = {"C1Alph", "CAlph", "Num",  "0Alph", "Punc", "/Spc",
                         "Spc",    "/Lst",  "Lst",  "/Html", "Html", "Any"};
  for (std::size_t i = 0; i < kNumClasses; ++i) {
    EXPECT_EQ(class_id(kAllClasses[i]), static_cast<int>(i) + 1);
    EXPECT_EQ(class_column(kAllClasses[i]), i);
    EXPECT_EQ(class_name(kAllClasses[i]), names[i]);
    EXPECT_EQ(class_from_name(names[i]), kAllClasses[i]);
  }
}

TEST(Classify, WordShapes) {
  EXPECT_EQ(classify("FSM"), TokenClass::CAlph);
  EXPECT_EQ(classify("Professor"), TokenClass::C1Alph);
  EXPECT_EQ(classify("123"), TokenClass::Num);
  EXPECT_EQ(classify("phone"), TokenClass::Alph0);
  EXPECT_EQ(classify(","), TokenClass::Punc);
  EXPECT_EQ(classify("\xc2\xa7"), TokenClass::Any);
  EXPECT_EQ(classify("&middot;"), TokenClass::Any);
}

TEST(Classify, Tags) {
  EXPECT_EQ(classify("<I>"), TokenClass::HtmlOpen);
  EXPECT_EQ(classify("</I>"), TokenClass::HtmlClose);
  EXPECT_EQ(classify("<li>"), TokenClass::ListOpen);
  EXPECT_EQ(classify("</TD>"), TokenClass::ListClose);
  EXPECT_EQ(classify("<TD colspan=2>"), TokenClass::ListOpen);
  EXPECT_EQ(classify("<BR>"), TokenClass::CtrlOpen);
  EXPECT_EQ(classify("</P>"), TokenClass::CtrlClose);
  EXPECT_EQ(classify("<PRE>"), TokenClass::HtmlOpen);
  EXPECT_EQ(classify("<LIX>"), TokenClass::HtmlOpen);
}

TEST(Classify, WhitespaceRunsAreControl) {
  EXPECT_EQ(classify(" "), TokenClass::CtrlOpen);
  EXPECT_EQ(classify("\n"), TokenClass::CtrlOpen);
  EXPECT_EQ(classify(" \t\n "), TokenClass::CtrlOpen);
}

TEST(Classify, EmptyLexemeRejected) {
  try {
    classify("");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidLexeme);
  }
}

TEST(Tokenize, Empty) { EXPECT_TRUE(tokenize("").empty()); }

TEST(Tokenize, ListFragment) {
  auto t = tokenize("<UL><LI>Congo 1");
  std::vector<TokenClass> want = {TokenClass::ListOpen, TokenClass::ListOpen,
                                  TokenClass::C1Alph, TokenClass::CtrlOpen,
                                  TokenClass::Num};
  EXPECT_EQ(classes_of(t), want);
  EXPECT_EQ(t[2].lexeme, "Congo");
  EXPECT_EQ(t[2].span, (Span{8, 13}));
  EXPECT_EQ(t[3].lexeme, " ");
}

TEST(Tokenize, LetterDigitBoundarySplits) {
  auto t = tokenize("a1");
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t[0].cls, TokenClass::Alph0);
  EXPECT_EQ(t[1].cls, TokenClass::Num);
}

TEST(Tokenize, CamelCaseSplitsAtLowerUpper) {
  auto t = tokenize("CountryCodes");
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t[0].lexeme, "Country");
  EXPECT_EQ(t[1].lexeme, "Codes");
  auto u = tokenize("iPhone4");
  ASSERT_EQ(u.size(), 3u);
  EXPECT_EQ(u[0].cls, TokenClass::Alph0);
  EXPECT_EQ(u[1].cls, TokenClass::C1Alph);
  EXPECT_EQ(u[2].cls, TokenClass::Num);
}

TEST(Tokenize, BrokenMarkupFallsBackToPunctuation) {
  auto t = tokenize("a < b & c");
  EXPECT_EQ(concat(t), "a < b & c");
  EXPECT_EQ(t[2].cls, TokenClass::Punc);
  EXPECT_EQ(t[6].cls, TokenClass::Punc);
}

TEST(Tokenize, SpansTileInput) {
  const std::string page = "<P>Countries&middot;:<B>";
  auto t = tokenize(page);
  std::size_t pos = 0;
  for (const auto& tok : t) {
    EXPECT_EQ(tok.span.start, pos);
    EXPECT_GT(tok.span.end, tok.span.start);
    pos = tok.span.end;
  }
  EXPECT_EQ(pos, page.size());
}

TEST(Tokenize, Deterministic) {
  const std::string page = "<HTML><BODY><H1>Phone<UL>CountryCodes<LI>Congo 242";
  EXPECT_EQ(tokenize(page), tokenize(page));
}

TEST(Tokenize, MatchesReferenceOnRandomFragments) {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 1000; ++i) {
    const std::string page = random_fragment(rng);
    SCOPED_TRACE(i);
    expect_matches_reference(page);
  }
}

TEST(Tokenize, MatchesReferenceOnFixtures) {
  for (const auto& p : fixtures::listing_pages()) expect_matches_reference(p.html);
  for (const auto& p : fixtures::regular_corpus(3).pages) expect_matches_reference(p.html);
}
