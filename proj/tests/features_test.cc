// Copyright 2026 The Causalx Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "causalx/features.h"

#include <map>
#include <string>
#include <vector>

#include "causalx/random.h"
#include "doctest.h"
#include "test_util.h"

namespace causalx {
namespace {

using testing::CodeOf;
using Strings = std::vector<std::string>;

std::string Join(const Strings& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += kNgramSeparator;
    out += parts[i];
  }
  return out;
}

TEST_CASE("tokenize") {
  CHECK(TokenizeToStrings("Node1 causes better node2.") ==
        Strings{"node1", "causes", "better", "node2", "."});
  CHECK(TokenizeToStrings("").empty());
  CHECK(TokenizeToStrings("cross-level effects, really") ==
        Strings{"cross-level", "effects", ",", "really"});
  CHECK(TokenizeToStrings("p < 0.05 (n=1,200)") ==
        Strings{"p", "<", "0.05", "(", "n", "=", "1,200", ")"});
  CHECK(TokenizeToStrings("\xE2\x80\x9CTrust\xE2\x80\x9D \xE2\x80\x94 firms") ==
        Strings{"\"", "trust", "\"", "-", "firms"});
}

TEST_CASE("token spans cover every non-space byte once") {
  Rng rng(3);
  const Strings pieces = {"Firm", "trust", "-", "level", ",", ".", "3.5",
                          "  ", "(", ")", "a-b", "x", "\xE2\x80\x93", "\t"};
  for (int trial = 0; trial < 500; ++trial) {
    std::string text;
    const std::size_t n = UniformIndex(rng, 12);
    for (std::size_t i = 0; i < n; ++i) {
      text += pieces[UniformIndex(rng, pieces.size())];
      if (Bernoulli(rng, 0.5)) text += " ";
    }
    std::vector<int> cover(text.size(), 0);
    std::size_t last = 0;
    for (const Token& t : Tokenize(text)) {
      CHECK_FALSE(t.surface.empty());
      CHECK(t.char_span.begin >= last);
      last = t.char_span.end;
      for (std::size_t i = t.char_span.begin; i < t.char_span.end; ++i) {
        ++cover[i];
      }
    }
    for (std::size_t i = 0; i < text.size(); ++i) {
      const bool space = text[i] == ' ' || text[i] == '\t';
      CHECK(cover[i] == (space ? 0 : 1));
    }
  }
}

TEST_CASE("stop words") {
  CHECK(RemoveStopwords(Strings{"the", "firm", "performs"}) ==
        Strings{"firm", "performs"});
  const Strings in = {"node1", "is", "related", "to", "node2"};
  Strings expected;
  for (const std::string& t : in) {
    if (t == "node1" || t == "node2" || !DefaultStopwords().count(t)) {
      expected.push_back(t);
    }
  }
  CHECK(RemoveStopwords(in) == expected);
  CHECK(expected == Strings{"node1", "related", "node2"});
  CHECK(RemoveStopwords(Strings{}).empty());
  CHECK(DefaultStopwords().size() >= 100);

  const StopwordSet custom = ParseStopwords("# comment\nfoo\n\nbar\n");
  CHECK(custom == StopwordSet{"foo", "bar"});
  // node tokens survive even a list that names them
  CHECK(RemoveStopwords(Strings{"node1", "foo"}, StopwordSet{"node1", "foo"}) ==
        Strings{"node1"});
}

TEST_CASE("word n-grams") {
  CHECK(WordNgrams(Strings{"a", "b", "c"}, 2) ==
        Strings{Join({"a", "b"}), Join({"b", "c"})});
  CHECK(WordNgrams(Strings{"a", "b"}, 3).empty());
  CHECK(WordNgrams(Strings{"node1", "causes", "better", "node2"}, 3).size() ==
        2);
  CHECK(WordNgrams(Strings{"a", "b"}, 1) == Strings{"a", "b"});
  CHECK(CodeOf([] { WordNgrams(Strings{"a"}, 0); }) ==
        ErrorCode::kInvalidNgramOrder);
  Rng rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    Strings t(UniformIndex(rng, 10), "w");
    const int n = 1 + static_cast<int>(UniformIndex(rng, 5));
    const std::size_t expected =
        t.size() >= static_cast<std::size_t>(n) ? t.size() - n + 1 : 0;
    CHECK(WordNgrams(t, n).size() == expected);
  }
}

TEST_CASE("fnv-1a reference vectors") {
  CHECK(Fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(Fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(Fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("vocabulary") {
  std::vector<Strings> corpus;
  for (int i = 0; i < 9; ++i) corpus.push_back({"the"});
  for (int i = 0; i < 5; ++i) corpus.push_back({"firm"});
  corpus.push_back({"rare"});
  const Vocabulary v = BuildVocab(corpus, 1, 1, 0);
  CHECK(v.IndexOf("the") < v.IndexOf("firm"));
  CHECK(v.IndexOf("the") >= Vocabulary::kNumSpecial);
  CHECK(v.WordAt(Vocabulary::kPad) != v.WordAt(Vocabulary::kUnk));
  CHECK(v.IndexOf("never-seen") == Vocabulary::kUnk);
  CHECK(v.IndexOf("node1") == Vocabulary::kNode1);
  CHECK(v.IndexOf("node2") == Vocabulary::kNode2);
  CHECK_FALSE(v.NgramId("a").has_value());

  const Vocabulary v2 = BuildVocab(corpus, 2, 1, 0);
  CHECK(v2.IndexOf("rare") == Vocabulary::kUnk);
  CHECK(v2.IndexOf("firm") != Vocabulary::kUnk);

  // ties are broken lexicographically
  const Vocabulary tie = BuildVocab(std::vector<Strings>{{"b", "a", "c"}}, 1,
                                    1, 0);
  CHECK(tie.IndexOf("a") < tie.IndexOf("b"));
  CHECK(tie.IndexOf("b") < tie.IndexOf("c"));

  CHECK(CodeOf([] { BuildVocab(std::vector<Strings>{}, 1, 1, 0); }) ==
        ErrorCode::kEmptyCorpus);
  CHECK(CodeOf([&] { BuildVocab(corpus, 0, 1, 0); }) ==
        ErrorCode::kInvalidArgument);
  CHECK(CodeOf([&] { BuildVocab(corpus, 1, 1, -1); }) ==
        ErrorCode::kInvalidArgument);
  CHECK(BuildVocab(corpus, 1, 1, 0) == v);
  CHECK(Vocabulary::FromJson(v.ToJson()) == v);
}

TEST_CASE("n-gram ids stay inside the bucket range") {
  Rng rng(17);
  const Strings words = {"a", "b", "c", "d", "firm", "trust", "x", "y"};
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Strings> corpus(1 + UniformIndex(rng, 6));
    for (Strings& s : corpus) {
      s.resize(1 + UniformIndex(rng, 8));
      for (std::string& w : s) w = words[UniformIndex(rng, words.size())];
    }
    const int buckets = 1 + static_cast<int>(UniformIndex(rng, 50));
    const Vocabulary v = BuildVocab(corpus, 1, 3, buckets);
    for (const Strings& s : corpus) {
      const auto ids = FeatureIds(v, s);
      CHECK(ids.size() == s.size() + WordNgrams(s, 2).size() +
                              WordNgrams(s, 3).size());
      for (std::size_t i = s.size(); i < ids.size(); ++i) {
        CHECK(ids[i] >= v.size());
        CHECK(ids[i] < v.size() + buckets);
      }
      for (const std::string& g : WordNgrams(s, 2)) {
        CHECK(*v.NgramId(g) ==
              v.size() + static_cast<std::int64_t>(Fnv1a64(g) % buckets));
      }
    }
  }
}

TEST_CASE("bag of trigrams") {
  const Strings rep = {"a", "b", "c", "a", "b", "c", "a", "b", "c"};
  const Vocabulary v = BuildVocab(std::vector<Strings>{rep}, 1, 3, 1000003);
  CHECK(BowTrigramVector(Strings{"a", "b"}, v).nnz() == 0);

  // brute-force window counter
  std::map<std::int64_t, double> expected;
  for (std::size_t i = 0; i + 3 <= rep.size(); ++i) {
    expected[*v.NgramId(Join({rep[i], rep[i + 1], rep[i + 2]}))] += 1;
  }
  const SparseVector x = BowTrigramVector(rep, v);
  REQUIRE(x.nnz() == expected.size());
  std::size_t k = 0;
  for (const auto& [index, count] : expected) {
    CHECK(x.indices[k] == index);
    CHECK(x.values[k] == count);
    ++k;
  }
  CHECK(expected.at(*v.NgramId(Join({"a", "b", "c"})) ) == 3);
  CHECK(expected.at(*v.NgramId(Join({"b", "c", "a"})) ) == 2);

  const Strings masked = TokenizeToStrings("node1 causes better node2.");
  CHECK(BowTrigramVector(masked, v).L1() == masked.size() - 2);
  for (std::size_t i = 1; i < x.indices.size(); ++i) {
    CHECK(x.indices[i - 1] < x.indices[i]);
  }
  CHECK(CodeOf([] {
          BowTrigramVector(Strings{"a"},
                           BuildVocab(std::vector<Strings>{{"a"}}, 1, 1, 5));
        }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("node masking") {
  const std::string s = "Playing music causes better concentration.";
  CHECK(MaskNodes(s, Span{0, 13}, Span{28, 41}) ==
        "node1 causes better node2.");
  CHECK(MaskNodes("ab cd.", Span{0, 2}, Span{3, 5}) == "node1 node2.");
  CHECK(MaskNodes("ab cd.", Span{0, 2}, Span{2, 5}) == "node1node2.");
  CHECK(CodeOf([] { MaskNodes("ab cd.", Span{0, 3}, Span{2, 5}); }) ==
        ErrorCode::kInvalidSpan);
  CHECK(CodeOf([] { MaskNodes("ab", Span{0, 1}, Span{1, 9}); }) ==
        ErrorCode::kInvalidSpan);
  CHECK(CodeOf([] { MaskNodes("ab", Span{1, 1}, Span{0, 1}); }) ==
        ErrorCode::kInvalidSpan);

  Rng rng(21);
  const std::string text = "the level of trust drives firm growth in markets";
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t a = UniformIndex(rng, text.size() - 1);
    std::size_t b = a + 1 + UniformIndex(rng, text.size() - a - 1);
    std::size_t c = b + UniformIndex(rng, text.size() - b + 1);
    if (c >= text.size()) continue;
    std::size_t d = c + 1 + UniformIndex(rng, text.size() - c);
    const std::string out = MaskNodes(text, Span{a, b}, Span{c, d});
    CHECK(out.find("node1") != std::string::npos);
    CHECK(out.find("node1", out.find("node1") + 1) == std::string::npos);
    CHECK(out.find("node2") != std::string::npos);
    CHECK(out.find("node2", out.find("node2") + 1) == std::string::npos);
  }
}

TEST_CASE("sequence encoding") {
  const Vocabulary v = BuildVocab(std::vector<Strings>{{"a", "b"}}, 1, 1, 0);
  EncodedSequence e = EncodeSequence(Strings(5, "a"), v);
  CHECK(e.ids.size() == kMaxSequenceLength);
  CHECK(e.mask.size() == kMaxSequenceLength);
  for (int i = 0; i < kMaxSequenceLength; ++i) {
    CHECK(e.mask[i] == (i < 5));
    if (i >= 5) CHECK(e.ids[i] == Vocabulary::kPad);
  }
  CHECK(e.ids[0] == v.IndexOf("a"));
  CHECK(EncodeSequence(Strings{"zzz"}, v).ids[0] == Vocabulary::kUnk);

  e = EncodeSequence(Strings(70, "b"), v);
  CHECK(std::count(e.mask.begin(), e.mask.end(), true) == 70);
  e = EncodeSequence(Strings(80, "b"), v);
  CHECK(e.original_length == 80);
  CHECK(e.length() == 70);
  CHECK(std::count(e.mask.begin(), e.mask.end(), true) == 70);
}

}  // namespace
}  // namespace causalx
