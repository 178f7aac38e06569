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

#include "causalx/sequence_tagger.h"

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "causalx/random.h"
#include "doctest.h"
#include "test_util.h"

namespace causalx {
namespace {

using testing::CentralDiff;
using testing::CodeOf;
using testing::RelErr;
using Strings = std::vector<std::string>;

double Sigmoid(double x) { return 1 / (1 + std::exp(-x)); }

Vocabulary SmallVocab(int words) {
  Strings s;
  for (int i = 0; i < words; ++i) s.push_back("t" + std::to_string(i));
  return BuildVocab(std::vector<Strings>{s}, 1, 1, 0);
}

TaggerModel RandomTagger(Rng& rng, int hidden, int embed) {
  TaggerConfig cfg;
  cfg.hidden_units = hidden;
  cfg.embed_dim = embed;
  cfg.seed = rng();
  TaggerModel m = InitTagger(SmallVocab(6), cfg);
  // Spread the parameters so gates are away from their linear regime.
  for (const auto& block : m.params.Blocks()) {
    for (Eigen::Index i = 0; i < block.size; ++i) {
      block.data[i] = Normal(rng) * 0.8;
    }
  }
  return m;
}

TEST_CASE("lstm forward") {
  LstmCell zero;
  zero.w_input = Matrix::Zero(8, 3);
  zero.w_hidden = Matrix::Zero(8, 2);
  zero.bias = Vector::Zero(8);
  const std::vector<Vector> inputs(4, Vector::Zero(3));
  for (const Vector& h : LstmForward(zero, inputs)) {
    CHECK(h.norm() == 0.0);
  }

  // Hand-evaluated single step with H = E = 2 from the zero state.
  LstmCell cell;
  cell.w_input.resize(8, 2);
  cell.w_input << 0.1, 0.2, -0.3, 0.4, 0.5, -0.6, 0.7, 0.8,  //
      -0.9, 1.0, 0.2, 0.1, -0.4, 0.3, 0.6, -0.5;
  cell.w_hidden = Matrix::Constant(8, 2, 0.7);  // unused at the first step
  cell.bias.resize(8);
  cell.bias << 0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08;
  Vector x(2);
  x << 1.5, -2.0;
  const auto out = LstmForward(cell, std::vector<Vector>{x});
  REQUIRE(out.size() == 1);
  for (int j = 0; j < 2; ++j) {
    auto pre = [&](int gate) {
      const int r = gate * 2 + j;
      return cell.w_input(r, 0) * x(0) + cell.w_input(r, 1) * x(1) +
             cell.bias(r);
    };
    const double i = Sigmoid(pre(0));
    const double o = Sigmoid(pre(2));
    const double g = std::tanh(pre(3));
    const double c = i * g;  // forget gate multiplies a zero state
    CHECK(out[0](j) == doctest::Approx(o * std::tanh(c)).epsilon(1e-12));
  }
  CHECK(CodeOf([&] { LstmForward(cell, std::vector<Vector>{Vector::Zero(3)}); }) ==
        ErrorCode::kDimensionMismatch);
}

TEST_CASE("every parameter group passes a finite-difference check") {
  Rng rng(8);
  std::map<std::string, int> points;
  for (int trial = 0; trial < 40; ++trial) {
    TaggerModel m = RandomTagger(rng, 2 + trial % 3, 3);
    const int len = 1 + static_cast<int>(UniformIndex(rng, 5));
    std::vector<int> ids(len), gold(len);
    for (int t = 0; t < len; ++t) {
      ids[t] = static_cast<int>(UniformIndex(rng, m.vocab.size()));
      gold[t] = static_cast<int>(UniformIndex(rng, kNumTags));
    }
    const std::vector<bool> mask(len, true);
    TaggerParameters grads = m.params.ZerosLike();
    SequenceLoss(m, ids, mask, gold, &grads);
    auto f = [&] { return SequenceLoss(m, ids, mask, gold); };
    auto blocks = m.params.Blocks();
    auto grad_blocks = grads.Blocks();
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      const std::string name(blocks[b].name);
      for (int s = 0; s < 4; ++s) {
        Eigen::Index i;
        if (name == "token_embeddings") {
          // a coordinate of a row the sequence actually reads
          const int row = ids[UniformIndex(rng, ids.size())];
          i = row * m.params.token_embeddings.cols() +
              static_cast<Eigen::Index>(
                  UniformIndex(rng, m.params.token_embeddings.cols()));
        } else {
          i = static_cast<Eigen::Index>(
              UniformIndex(rng, static_cast<std::size_t>(blocks[b].size)));
        }
        const double num = CentralDiff(f, &blocks[b].data[i]);
        CAPTURE(name);
        CHECK(RelErr(grad_blocks[b].data[i], num) <= 1e-4);
        ++points[name];
      }
    }
  }
  CHECK(points.size() == 9);
  for (const auto& [name, n] : points) {
    CAPTURE(name);
    CHECK(n >= 100);
  }
}

TEST_CASE("padding never influences loss or tags") {
  Rng rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    TaggerModel m = RandomTagger(rng, 3, 4);
    const int len = 1 + static_cast<int>(UniformIndex(rng, 12));
    Strings tokens(len);
    std::vector<int> gold(len);
    for (int t = 0; t < len; ++t) {
      tokens[t] = "t" + std::to_string(UniformIndex(rng, 6));
      gold[t] = static_cast<int>(UniformIndex(rng, kNumTags));
    }
    const EncodedSequence e = EncodeSequence(tokens, m.vocab);
    const double base = SequenceLoss(m, e.ids, e.mask, gold);

    std::vector<int> longer = e.ids;
    std::vector<bool> mask = e.mask;
    for (int k = 0; k < 10; ++k) {
      longer.push_back(Vocabulary::kPad);
      mask.push_back(false);
    }
    CHECK(std::abs(SequenceLoss(m, longer, mask, gold) - base) <= 1e-9);
    // junk ids inside the padded region
    for (std::size_t k = len; k < longer.size(); ++k) {
      longer[k] = static_cast<int>(UniformIndex(rng, m.vocab.size()));
    }
    CHECK(std::abs(SequenceLoss(m, longer, mask, gold) - base) <= 1e-9);
    EncodedSequence junk = e;
    for (std::size_t k = len; k < junk.ids.size(); ++k) junk.ids[k] = 5;
    CHECK(TagSentence(m, junk) == TagSentence(m, e));
    CHECK(TagSentence(m, e).size() == static_cast<std::size_t>(len));
  }
}

TEST_CASE("zero head tags everything as non-entity") {
  TaggerConfig cfg;
  TaggerModel m = InitTagger(SmallVocab(4), cfg);
  m.params.head.setZero();
  m.params.head_bias.setZero();
  const EncodedSequence e = EncodeSequence(Strings{"t0", "t1", "t2"}, m.vocab);
  CHECK(TagSentence(m, e) == std::vector<int>{0, 0, 0});
  CHECK(RealPositions(e.mask) == std::vector<int>{0, 1, 2});
}

// "c1 c2 causes e1 e2 ." style sentences with known entity positions.
std::vector<TaggedSequence> Templates(const Vocabulary& vocab, int n,
                                      std::uint64_t seed) {
  Rng rng(seed);
  const Strings verbs = {"causes", "drives", "reduces"};
  std::vector<TaggedSequence> out;
  for (int i = 0; i < n; ++i) {
    Strings tokens;
    std::vector<int> labels;
    const int nc = 1 + static_cast<int>(UniformIndex(rng, 2));
    const int ne = 1 + static_cast<int>(UniformIndex(rng, 2));
    if (Bernoulli(rng, 0.5)) {
      tokens.push_back("the");
      labels.push_back(0);
    }
    for (int k = 0; k < nc; ++k) {
      tokens.push_back("w" + std::to_string(UniformIndex(rng, 6)));
      labels.push_back(kTagCause);
    }
    tokens.push_back(verbs[UniformIndex(rng, verbs.size())]);
    labels.push_back(0);
    for (int k = 0; k < ne; ++k) {
      tokens.push_back("w" + std::to_string(UniformIndex(rng, 6)));
      labels.push_back(kTagEffect);
    }
    tokens.push_back(".");
    labels.push_back(0);
    out.push_back({EncodeSequence(tokens, vocab), labels});
  }
  return out;
}

Vocabulary TemplateVocab() {
  Strings words = {"the", "causes", "drives", "reduces", "."};
  for (int i = 0; i < 6; ++i) words.push_back("w" + std::to_string(i));
  return BuildVocab(std::vector<Strings>{words}, 1, 1, 0);
}

TEST_CASE("training learns template entities") {
  const Vocabulary vocab = TemplateVocab();
  const auto train = Templates(vocab, 200, 1);
  const auto test = Templates(vocab, 50, 2);
  TaggerConfig cfg;
  cfg.hidden_units = 8;
  cfg.embed_dim = 8;
  cfg.epochs = 30;
  cfg.learning_rate = 0.01;
  const TrainedTagger t = TrainTagger(vocab, train, test, cfg);
  CHECK(TokenAccuracy(t.model, test) >= 0.98);
  CHECK(t.curve.epochs.size() == 30);
  for (const TaggedSequence& s : test) {
    const auto tags = TagSentence(t.model, s.sequence);
    for (int v : tags) CHECK((v >= 0 && v <= 2));
  }
  const std::string csv = t.curve.ToCsv();
  CHECK(csv.rfind("epoch,train_accuracy,val_accuracy\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 31);
}

TEST_CASE("training accuracy improves across seeds") {
  const Vocabulary vocab = TemplateVocab();
  const auto train = Templates(vocab, 64, 3);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    TaggerConfig cfg;
    cfg.seed = seed;
    cfg.epochs = 10;
    cfg.learning_rate = 0.01;
    const TrainedTagger t = TrainTagger(vocab, train, {}, cfg);
    CHECK(t.curve.epochs.back().train_accuracy >=
          t.curve.epochs.front().train_accuracy);
  }
}

TEST_CASE("training is deterministic and validates labels") {
  const Vocabulary vocab = TemplateVocab();
  const auto train = Templates(vocab, 40, 4);
  TaggerConfig cfg;
  cfg.epochs = 3;
  const TrainedTagger a = TrainTagger(vocab, train, {}, cfg);
  const TrainedTagger b = TrainTagger(vocab, train, {}, cfg);
  CHECK(a.model.params.head == b.model.params.head);
  CHECK(a.model.params.forward.w_hidden == b.model.params.forward.w_hidden);
  CHECK(a.curve.ToCsv() == b.curve.ToCsv());

  auto bad = train;
  bad[0].labels.pop_back();
  CHECK(CodeOf([&] { TrainTagger(vocab, bad, {}, cfg); }) ==
        ErrorCode::kLabelAlignmentError);
  CHECK(CodeOf([&] { TrainTagger(vocab, {}, {}, cfg); }) ==
        ErrorCode::kEmptyInput);

  const TaggerModel c =
      TaggerFromContainer(ParseContainer(SerializeContainer(ToContainer(a.model))));
  CHECK(c.vocab == a.model.vocab);
  for (std::size_t i = 0; i < train.size(); ++i) {
    CHECK(TagSentence(c, train[i].sequence) ==
          TagSentence(a.model, train[i].sequence));
  }
  CHECK(MeanLoss(c, train) == MeanLoss(a.model, train));
}

// Reference: enumerate every maximal run and keep the longest, earliest.
std::optional<Span> BruteRun(const std::vector<int>& labels, int tag) {
  std::optional<Span> best;
  for (std::size_t b = 0; b < labels.size(); ++b) {
    for (std::size_t e = b + 1; e <= labels.size(); ++e) {
      bool all = true;
      for (std::size_t i = b; i < e; ++i) all &= labels[i] == tag;
      const bool maximal = all && (b == 0 || labels[b - 1] != tag) &&
                           (e == labels.size() || labels[e] != tag);
      if (maximal && (!best || e - b > best->size())) best = Span{b, e};
    }
  }
  return best;
}

TEST_CASE("entity extraction") {
  EntityPair p = ExtractEntities(std::vector<int>{1, 1, 0, 0, 2});
  CHECK(p.cause == Span{0, 2});
  CHECK(p.effect == Span{4, 5});
  p = ExtractEntities(std::vector<int>{0, 0, 0});
  CHECK_FALSE(p.cause.has_value());
  CHECK_FALSE(p.effect.has_value());
  p = ExtractEntities(std::vector<int>{1, 0, 1, 1, 2, 2, 2});
  CHECK(p.cause == Span{2, 4});
  CHECK(p.effect == Span{4, 7});

  Rng rng(10);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<int> labels(UniformIndex(rng, 15));
    for (int& l : labels) l = static_cast<int>(UniformIndex(rng, 3));
    const EntityPair e = ExtractEntities(labels);
    CHECK(e.cause == BruteRun(labels, kTagCause));
    CHECK(e.effect == BruteRun(labels, kTagEffect));
  }
}

}  // namespace
}  // namespace causalx
