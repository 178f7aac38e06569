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

#include "causalx/synthetic.h"

#include <array>
#include <cctype>
#include <cstdio>
#include <string_view>
#include <vector>

#include "causalx/error.h"
#include "causalx/features.h"
#include "causalx/random.h"

namespace causalx {

namespace {

constexpr std::array<std::string_view, 20> kModifiers = {
    "firm",        "employee",  "team",      "managerial", "organizational",
    "customer",    "supplier",  "board",     "market",     "strategic",
    "financial",   "social",    "digital",   "environmental", "leader",
    "worker",      "product",   "network",   "institutional", "regional"};

constexpr std::array<std::string_view, 20> kHeads = {
    "performance", "turnover",   "trust",      "commitment", "innovation",
    "satisfaction", "growth",    "diversity",  "autonomy",   "engagement",
    "loyalty",     "capability", "legitimacy", "resilience", "learning",
    "visibility",  "risk",       "reputation", "efficiency", "flexibility"};

constexpr std::array<std::string_view, 12> kSyllables = {
    "ka", "lo", "vre", "mi", "tor", "sen", "du", "pal", "quo", "ri", "zev",
    "na"};

constexpr std::array<std::string_view, 8> kQualifiers = {
    "in small firms",         "among new ventures",
    "in emerging markets",    "for family businesses",
    "over time",              "in the long run",
    "across industries",      "within public organizations"};

constexpr std::array<std::string_view, 6> kLeads = {
    "the level of", "the degree of", "greater", "the extent of",
    "the use of",   "investment in"};

constexpr std::array<std::string_view, 64> kMethodVerbs = {
    "measured",     "collected",   "surveyed",    "coded",
    "sampled",      "estimated",   "reported",    "computed",
    "standardized", "winsorized",  "interviewed", "recorded",
    "observed",     "aggregated",  "matched",     "weighted",
    "lagged",       "clustered",   "bootstrapped", "tested",
    "validated",    "adapted",     "translated",  "piloted",
    "transcribed",  "averaged",    "summed",      "ranked",
    "scaled",       "rescaled",    "centered",    "logged",
    "imputed",      "trimmed",     "merged",      "linked",
    "archived",     "screened",    "cleaned",     "verified",
    "cross-checked", "split",      "pooled",      "stratified",
    "benchmarked",  "audited",     "tabulated",   "plotted",
    "indexed",      "normalized",  "deflated",    "annualized",
    "encoded",      "retrieved",   "scraped",     "digitized",
    "anonymized",   "pretested",   "recoded",     "operationalized",
    "triangulated", "calibrated",  "documented",  "catalogued"};

constexpr std::array<std::string_view, 8> kIndustries = {
    "banking", "retail", "software", "chemical", "automotive", "hospitality",
    "mining",  "textile"};

template <std::size_t N>
std::string_view Pick(const std::array<std::string_view, N>& items, Rng& rng) {
  return items[UniformIndex(rng, N)];
}

std::string PseudoWord(Rng& rng) {
  std::string w;
  const int n = 2 + static_cast<int>(UniformIndex(rng, 2));
  for (int i = 0; i < n; ++i) w += Pick(kSyllables, rng);
  return w;
}

// One to three words; some carry an invented word so held-out entities
// include tokens never seen in training.
std::string Entity(Rng& rng) {
  const double r = Uniform01(rng);
  if (r < 0.2) return std::string(Pick(kHeads, rng));
  if (r < 0.7) {
    return std::string(Pick(kModifiers, rng)) + " " +
           std::string(Pick(kHeads, rng));
  }
  if (r < 0.85) return PseudoWord(rng) + " " + std::string(Pick(kHeads, rng));
  return std::string(Pick(kModifiers, rng)) + " " + PseudoWord(rng) + " " +
         std::string(Pick(kHeads, rng));
}

std::string Number(Rng& rng, int lo, int hi) {
  return std::to_string(lo + static_cast<int>(UniformIndex(
                                  rng, static_cast<std::size_t>(hi - lo + 1))));
}

std::string Marker(Rng& rng) {
  std::string id = Number(rng, 1, 9);
  if (Bernoulli(rng, 0.25)) id.push_back("abc"[UniformIndex(rng, 3)]);
  return Bernoulli(rng, 0.6) ? "H" + id : "Hypothesis " + id;
}

// Text assembled piece by piece so entity offsets are exact.
class Builder {
 public:
  Span Add(std::string_view piece) {
    const std::size_t begin = text_.size();
    text_ += piece;
    return Span{begin, text_.size()};
  }
  std::size_t size() const { return text_.size(); }
  // Marks where the clause after a marker prefix starts.
  void MarkClause() { clause_ = text_.size(); }
  std::string Finish() {
    for (std::size_t i = clause_; i < text_.size(); ++i) {
      char& c = text_[i];
      if (std::isalpha(static_cast<unsigned char>(c))) {
        c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        break;
      }
    }
    return std::move(text_);
  }

 private:
  std::string text_;
  std::size_t clause_ = 0;
};

// A leading phrase such as "the level of" is part of the cause entity in
// half of the sentences that carry one.
Span AddCause(Builder* b, const std::string& x, Rng& rng) {
  if (!Bernoulli(rng, 0.4)) return b->Add(x);
  const std::string lead = std::string(Pick(kLeads, rng)) + " ";
  if (Bernoulli(rng, 0.5)) return b->Add(lead + x);
  b->Add(lead);
  return b->Add(x);
}

struct Relation {
  std::string text;
  Span node1;
  Span node2;
  Direction direction = Direction::kPositive;
  bool causal = false;
};

Relation MakeRelation(bool causal, Rng& rng) {
  Builder b;
  Relation rel;
  rel.causal = causal;
  const bool positive = Bernoulli(rng, 0.5);
  rel.direction = positive ? Direction::kPositive : Direction::kNegative;
  const std::string x = Entity(rng);
  const std::string y = Entity(rng);

  bool suffix_marker = false;
  if (Bernoulli(rng, 0.85)) {
    const std::string m = Marker(rng);
    switch (UniformIndex(rng, 3)) {
      case 0: b.Add(m + ". "); break;
      case 1: b.Add(m + ": "); break;
      default: b.Add("We propose " + m + ": "); break;
    }
    b.MarkClause();
  } else {
    suffix_marker = true;
  }

  if (causal) {
    switch (UniformIndex(rng, 6)) {
      case 0:
        rel.node1 = AddCause(&b, x, rng);
        b.Add(positive ? " leads to higher " : " leads to lower ");
        rel.node2 = b.Add(y);
        break;
      case 1:
        rel.node1 = AddCause(&b, x, rng);
        b.Add(positive ? " causes better " : " causes worse ");
        rel.node2 = b.Add(y);
        break;
      case 2:
        rel.node1 = AddCause(&b, x, rng);
        b.Add(positive ? " increases " : " reduces ");
        rel.node2 = b.Add(y);
        break;
      case 3:
        b.Add("an increase in ");
        rel.node1 = AddCause(&b, x, rng);
        b.Add(positive ? " results in higher " : " results in lower ");
        rel.node2 = b.Add(y);
        break;
      case 4:
        b.Add("if ");
        rel.node1 = AddCause(&b, x, rng);
        b.Add(" increases, then ");
        rel.node2 = b.Add(y);
        b.Add(positive ? " increases" : " decreases");
        b.Add(" as well");
        break;
      default:
        rel.node1 = AddCause(&b, x, rng);
        b.Add(positive ? " drives " : " undermines ");
        rel.node2 = b.Add(y);
        break;
    }
  } else {
    const std::string adv = positive ? "positively" : "negatively";
    switch (UniformIndex(rng, 6)) {
      case 0:
        rel.node1 = AddCause(&b, x, rng);
        b.Add(" is " + adv + " associated with ");
        rel.node2 = b.Add(y);
        break;
      case 1:
        rel.node1 = AddCause(&b, x, rng);
        b.Add(" is " + adv + " related to ");
        rel.node2 = b.Add(y);
        break;
      case 2:
        rel.node1 = AddCause(&b, x, rng);
        b.Add(" will be " + adv + " associated with ");
        rel.node2 = b.Add(y);
        break;
      case 3:
        b.Add(positive ? "there is a positive relationship between "
                       : "there is a negative relationship between ");
        rel.node1 = AddCause(&b, x, rng);
        b.Add(" and ");
        rel.node2 = b.Add(y);
        break;
      case 4:
        rel.node1 = AddCause(&b, x, rng);
        b.Add(" " + adv + " correlates with ");
        rel.node2 = b.Add(y);
        break;
      default:
        if (Bernoulli(rng, 0.3)) {
          rel.direction = Direction::kNonlinear;
          rel.node1 = AddCause(&b, x, rng);
          b.Add(" has an inverted U-shaped relationship with ");
          rel.node2 = b.Add(y);
        } else {
          rel.node1 = AddCause(&b, x, rng);
          b.Add(" and ");
          rel.node2 = b.Add(y);
          b.Add(" are " + adv + " related");
        }
        break;
    }
  }
  // A trailing qualifier; when it directly follows node2, annotators
  // disagree on whether it belongs to the entity, so half of the time it
  // is folded into the span.
  if (Bernoulli(rng, 0.4)) {
    const std::string q = " " + std::string(Pick(kQualifiers, rng));
    if (rel.node2.end == b.size() && Bernoulli(rng, 0.5)) {
      b.Add(q);
      rel.node2.end = b.size();
    } else {
      b.Add(q);
    }
  }
  if (suffix_marker) b.Add(" (" + Marker(rng) + ")");
  b.Add(".");
  rel.text = b.Finish();
  return rel;
}

std::string NonHypothesis(Rng& rng) {
  const std::string x = Entity(rng);
  const std::string y = Entity(rng);
  const std::string n = Number(rng, 1, 9);
  std::string s;
  // Structural twins of the hypothesis templates: same entities, stop
  // words and shapes, with one of many method verbs in place of the
  // relation, so no single predicate word marks the class.
  if (Bernoulli(rng, 0.6)) {
    const std::string verb(Pick(kMethodVerbs, rng));
    switch (UniformIndex(rng, 8)) {
      case 0: s = x + " is " + verb + " together with " + y + "."; break;
      case 1: s = x + " will be " + verb + " with " + y + "."; break;
      case 2: s = x + " was " + verb + " to match " + y + "."; break;
      case 3: s = x + " and " + y + " are " + verb + " for each firm."; break;
      case 4:
        s = "there is a gap between the " + verb + " data on " + x + " and " +
            y + ".";
        break;
      case 5: s = "an index of " + x + " is " + verb + " from " + y + "."; break;
      case 6:
        s = "if " + x + " is missing, then " + y + " is " + verb +
            " as well.";
        break;
      default: s = x + " has been " + verb + " in line with " + y + "."; break;
    }
  }
  if (s.empty()) switch (UniformIndex(rng, 16)) {
    case 0: s = "the regression results were significant for " + x + "."; break;
    case 1:
      s = "we collected survey data from " + Number(rng, 80, 900) +
          " firms in the " + std::string(Pick(kIndustries, rng)) +
          " industry.";
      break;
    case 2:
      s = "table " + n + " reports the descriptive statistics and correlations.";
      break;
    case 3:
      s = "as shown in the regression, the coefficient of " + x +
          " is significant (p < 0.05).";
      break;
    case 4:
      s = x + " was measured with a " + n +
          "-item scale adapted from prior work.";
      break;
    case 5:
      s = "support for H" + n + " was found in the regression with " + y +
          " as the dependent variable.";
      break;
    case 6:
      s = "the results for hypothesis " + n +
          " are reported in the second model.";
      break;
    case 7: s = "we thank Harry and the reviewers for their comments."; break;
    case 8:
      s = "prior studies of " + x + " have focused on the role of " + y +
          " in large firms.";
      break;
    case 9:
      s = "the sample is restricted to firms with complete data on " + x + ".";
      break;
    case 10: s = "controls include firm size, firm age and " + x + "."; break;
    case 11:
      s = "the variance inflation factors were below the threshold of " + n +
          ".";
      break;
    case 12:
      s = "model " + n + " adds the interaction term to the regression.";
      break;
    case 13:
      s = "robustness checks with alternative measures of " + y +
          " yield similar estimates.";
      break;
    case 14:
      s = "H" + n + " is not significant once " + x +
          " is included in the regression.";
      break;
    default:
      s = "in this study, the data on " + x + " and " + y +
          " come from an archival source.";
      break;
  }
  // Results sections cite hypotheses too, so markers and the punctuation
  // around them are no evidence on their own.
  Builder b;
  bool suffix_marker = false;
  if (Bernoulli(rng, 0.85)) {
    const std::string m = Marker(rng);
    switch (UniformIndex(rng, 3)) {
      case 0: b.Add(m + ". "); break;
      case 1: b.Add(m + ": "); break;
      default: b.Add("We propose " + m + ": "); break;
    }
    b.MarkClause();
  } else {
    suffix_marker = Bernoulli(rng, 0.5);
  }
  s.pop_back();  // the final period is re-added below
  b.Add(s);
  if (Bernoulli(rng, 0.4)) b.Add(" " + std::string(Pick(kQualifiers, rng)));
  if (suffix_marker) b.Add(" (" + Marker(rng) + ")");
  b.Add(".");
  return b.Finish();
}

std::string Id(std::string_view prefix, int i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%05d", i);
  return "synth:" + std::string(prefix) + ":" + buf;
}

}  // namespace

const std::set<std::string>& ConnectiveWords() {
  static const std::set<std::string> words = {
      "positively", "negatively", "associated", "related",  "correlates",
      "relationship", "leads",    "causes",     "increases", "reduces",
      "decreases",  "drives",     "undermines", "higher",    "lower",
      "better",     "worse",      "increase",   "positive",
      "negative"};
  return words;
}

LabeledCorpus GenerateSynthetic(std::uint64_t seed, int n_per_class) {
  if (n_per_class < 10) {
    throw Error(ErrorCode::kInvalidArgument, "n_per_class must be >= 10");
  }
  Rng rng(seed);
  LabeledCorpus corpus;
  for (int i = 0; i < n_per_class; ++i) {
    const Relation rel = MakeRelation(Bernoulli(rng, 0.5), rng);
    corpus.hypothesis.push_back(
        TextExample{rel.text, std::string(kHypothesisLabel), Id("hyp", i)});
    corpus.hypothesis.push_back(TextExample{
        NonHypothesis(rng), std::string(kNonHypothesisLabel),
        Id("non", i)});
  }
  for (int i = 0; i < 2 * n_per_class; ++i) {
    const bool causal = i % 2 == 0;
    const Relation rel = MakeRelation(causal, rng);
    CausalityExample e;
    e.sentence = rel.text;
    e.node1_span = rel.node1;
    e.node2_span = rel.node2;
    e.masked = MaskNodes(rel.text, rel.node1, rel.node2);
    e.label = std::string(causal ? kCausalLabel : kAssociativeLabel);
    e.direction = rel.direction;
    e.sentence_id = Id("rel", i);
    TaggingExample t;
    t.labels = TagsFromSpans(rel.text, rel.node1, rel.node2, &t.tokens);
    t.sentence_id = e.sentence_id;
    corpus.causality.push_back(std::move(e));
    corpus.tagging.push_back(std::move(t));
  }
  return corpus;
}

}  // namespace causalx
