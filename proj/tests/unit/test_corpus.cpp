#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "sitext/corpus.hpp"
#include "sitext/error.hpp"

using namespace sitext;

namespace {

Corpus parse(const std::string& text) {
  std::istringstream in(text);
  return parse_jsonl(in);
}

std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) out += t + " ";
  return out;
}

}  // namespace

TEST(LoadJsonl, TwoLabelledDocuments) {
  Corpus c = parse(R"({"id":"a","text":"Go Red Sox","label":"rec"})"
                   "\n"
                   R"({"id":"b","text":"mass is conserved","label":"sci"})"
                   "\n");
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].id, "a");
  EXPECT_EQ(c[1].text, "mass is conserved");
  EXPECT_EQ(c.label_set(), (std::set<std::string>{"rec", "sci"}));
  EXPECT_TRUE(c[0].tokens.empty());
  EXPECT_FALSE(c.tokenized());
}

TEST(LoadJsonl, EmptyInput) {
  Corpus c = parse("");
  EXPECT_EQ(c.size(), 0u);
  EXPECT_TRUE(c.label_set().empty());
}

TEST(LoadJsonl, DuplicateIdNamesIdAndLine) {
  try {
    parse(R"({"id":"a","text":"x"})" "\n" R"({"id":"b","text":"y"})" "\n" R"({"id":"a","text":"z"})" "\n");
    FAIL() << "expected an error";
  } catch (const Error& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("\"a\""), std::string::npos) << msg;
    EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
  }
}

TEST(LoadJsonl, MalformedLineReportsLineNumber) {
  try {
    parse(R"({"id":"a","text":"x"})" "\n{not json\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::parse);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  EXPECT_THROW(parse(R"({"text":"no id"})"), Error);
  EXPECT_THROW(parse(R"({"id":"a"})"), Error);
  EXPECT_THROW(parse(R"({"id":"a","text":"t","label":3})"), Error);
  EXPECT_THROW(parse(R"(["id","text"])"), Error);
}

TEST(LoadJsonl, MissingFileIsIoError) {
  try {
    load_jsonl("/nonexistent/corpus.jsonl");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::io);
  }
}

TEST(LoadJsonl, NullLabelAndUnicodeText) {
  const auto path = std::filesystem::temp_directory_path() / "sitext_corpus_test.jsonl";
  {
    std::ofstream out(path);
    out << R"({"id":"x","text":"Café über","label":null})" << "\n\n";
    out << R"({"id":"y","text":"plain","label":"l"})" << "\n";
  }
  Corpus c = load_jsonl(path);
  std::filesystem::remove(path);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_FALSE(c[0].label.has_value());
  EXPECT_EQ(c.label_set(), std::set<std::string>{"l"});
  EXPECT_EQ(tokenize(c[0].text), (std::vector<std::string>{"café", "über"}));
}

TEST(Tokenize, SpecExamples) {
  EXPECT_EQ(tokenize("The cat, the CAT!"), (std::vector<std::string>{"cat", "cat"}));
  EXPECT_TRUE(tokenize("").empty());
  EXPECT_EQ(tokenize("IBM-PC x86"), (std::vector<std::string>{"ibm", "pc", "x86"}));
}

TEST(Tokenize, DropsShortTokensAndStopwords) {
  EXPECT_EQ(tokenize("a b c it is 42 x"), (std::vector<std::string>{"42"}));
  EXPECT_EQ(tokenize("don't stop"), (std::vector<std::string>{"stop"}));
}

TEST(Tokenize, UnicodeLettersAndCaseFolding) {
  EXPECT_EQ(tokenize("ÉCOLE Straße ΑΘΗΝΑ"), (std::vector<std::string>{"école", "straße", "αθηνα"}));
  // Non-letter symbols split tokens; invalid UTF-8 acts as a separator.
  EXPECT_EQ(tokenize("alpha\xff" "beta\xe2\x80\x94gamma"),
            (std::vector<std::string>{"alpha", "beta", "gamma"}));
}

TEST(Tokenize, StopwordListIsBundled) {
  const auto& words = stopwords();
  EXPECT_GT(words.size(), 150u);
  EXPECT_TRUE(words.contains("the"));
  EXPECT_FALSE(words.contains("cat"));
  for (const auto& w : words) {
    EXPECT_EQ(tokenize(w).size(), 0u) << w;
  }
}

TEST(TokenizeProperty, DeterministicIdempotentAndWellFormed) {
  std::mt19937_64 rng(7);
  const std::vector<std::string> pieces = {"The", "cat", "ÜBER", "x", "42", "—", "pc's", ",", "  ",
                                           "Data-Driven", "naïve", "of", "\t", "IBM", "é", "Zürich"};
  std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1);
  for (int trial = 0; trial < 200; ++trial) {
    std::string text;
    for (int i = 0; i < 12; ++i) text += pieces[pick(rng)] + (rng() % 2 ? " " : "");
    const auto tokens = tokenize(text);
    EXPECT_EQ(tokens, tokenize(text));
    EXPECT_EQ(tokenize(join(tokens)), tokens) << text;
    for (const auto& t : tokens) {
      EXPECT_EQ(t.find_first_of(" \t\n"), std::string::npos);
      EXPECT_EQ(tokenize(t), std::vector<std::string>{t});
    }
  }
}

TEST(TaskSubset, KeepsOrderAndOnlyRequestedLabels) {
  Corpus c(std::vector<Document>{{"1", "t", "a", {}}, {"2", "t", "b", {}}, {"3", "t", "c", {}},
                                 {"4", "t", "a", {}}, {"5", "t", std::nullopt, {}}});
  Corpus ab = task_subset(c, "a", "b");
  ASSERT_EQ(ab.size(), 3u);
  EXPECT_EQ(ab[0].id, "1");
  EXPECT_EQ(ab[1].id, "2");
  EXPECT_EQ(ab[2].id, "4");
  Corpus ba = task_subset(c, "b", "a");
  std::set<std::string> ids_ab, ids_ba;
  for (const auto& d : ab.documents()) ids_ab.insert(d.id);
  for (const auto& d : ba.documents()) ids_ba.insert(d.id);
  EXPECT_EQ(ids_ab, ids_ba);
  EXPECT_EQ(ab.label_set(), (std::set<std::string>{"a", "b"}));
}

TEST(TaskSubset, CountsMatchClassSizes) {
  // Mirrors the shape of the newsgroup tasks: 594 + 600 documents.
  std::vector<Document> docs;
  for (int i = 0; i < 594; ++i) docs.push_back({"auto" + std::to_string(i), "car", "rec.autos", {}});
  for (int i = 0; i < 600; ++i) docs.push_back({"moto" + std::to_string(i), "bike", "rec.motorcycles", {}});
  for (int i = 0; i < 50; ++i) docs.push_back({"other" + std::to_string(i), "x", "sci.space", {}});
  EXPECT_EQ(task_subset(Corpus(std::move(docs)), "rec.autos", "rec.motorcycles").size(), 1194u);
}

TEST(TaskSubset, Errors) {
  Corpus c(std::vector<Document>{{"1", "t", "a", {}}, {"2", "t", "b", {}}});
  try {
    task_subset(c, "a", "xyz");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::not_found);
    const std::string msg = e.what();
    EXPECT_NE(msg.find("xyz"), std::string::npos);
    EXPECT_NE(msg.find("a, b"), std::string::npos) << msg;
  }
  EXPECT_THROW(task_subset(c, "a", "a"), Error);
}

TEST(Corpus, RejectsDuplicateAndEmptyIds) {
  EXPECT_THROW(Corpus(std::vector<Document>{{"x", "", {}, {}}, {"x", "", {}, {}}}), Error);
  EXPECT_THROW(Corpus(std::vector<Document>{{"", "", {}, {}}}), Error);
}

TEST(Corpus, TokenizeCorpusFillsTokens) {
  Corpus c = tokenize_corpus(Corpus(std::vector<Document>{{"1", "The Cat sat", "a", {}}}));
  EXPECT_TRUE(c.tokenized());
  EXPECT_EQ(c[0].tokens, (std::vector<std::string>{"cat", "sat"}));
  EXPECT_EQ(c.find("1"), &c[0]);
  EXPECT_EQ(c.find("2"), nullptr);
}
