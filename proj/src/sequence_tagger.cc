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

#include <algorithm>
#include <cmath>
#include <sstream>

#include "causalx/error.h"
#include "causalx/random.h"

namespace causalx {

using nlohmann::json;

namespace {

using ColMatrix = Eigen::MatrixXd;

double Sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Activations of one direction over a sequence; column t is time step t in
// processing order, state columns are offset by one (column 0 is zero).
struct Trace {
  ColMatrix gates;   // 4H x T, post-activation i, f, o, g
  ColMatrix cells;   // H x (T + 1)
  ColMatrix hidden;  // H x (T + 1)
};

void RunCell(const LstmCell& cell, const ColMatrix& inputs, Trace* trace) {
  const int h = cell.hidden();
  const Eigen::Index steps = inputs.cols();
  trace->gates.resize(4 * h, steps);
  trace->cells = ColMatrix::Zero(h, steps + 1);
  trace->hidden = ColMatrix::Zero(h, steps + 1);
  Vector z(4 * h);
  for (Eigen::Index t = 0; t < steps; ++t) {
    z.noalias() = cell.w_input * inputs.col(t);
    z.noalias() += cell.w_hidden * trace->hidden.col(t);
    z += cell.bias;
    for (int k = 0; k < 3 * h; ++k) z[k] = Sigmoid(z[k]);
    for (int k = 3 * h; k < 4 * h; ++k) z[k] = std::tanh(z[k]);
    trace->gates.col(t) = z;
    const auto i = z.segment(0, h);
    const auto f = z.segment(h, h);
    const auto o = z.segment(2 * h, h);
    const auto g = z.segment(3 * h, h);
    trace->cells.col(t + 1) =
        f.cwiseProduct(trace->cells.col(t)) + i.cwiseProduct(g);
    trace->hidden.col(t + 1) =
        o.cwiseProduct(trace->cells.col(t + 1).array().tanh().matrix());
  }
}

// Backpropagates d loss / d h_t (columns of dh, processing order) through
// the recurrence, accumulating into `grad` and returning d loss / d x_t.
ColMatrix BackCell(const LstmCell& cell, const ColMatrix& inputs,
                   const Trace& trace, const ColMatrix& dh, LstmCell* grad) {
  const int h = cell.hidden();
  const Eigen::Index steps = inputs.cols();
  ColMatrix dx = ColMatrix::Zero(cell.input(), steps);
  Vector dh_next = Vector::Zero(h);
  Vector dc_next = Vector::Zero(h);
  Vector dz(4 * h);
  for (Eigen::Index t = steps - 1; t >= 0; --t) {
    const Vector gates = trace.gates.col(t);
    const auto i = gates.segment(0, h);
    const auto f = gates.segment(h, h);
    const auto o = gates.segment(2 * h, h);
    const auto g = gates.segment(3 * h, h);
    const Vector tanh_c = trace.cells.col(t + 1).array().tanh().matrix();
    const Vector dht = dh.col(t) + dh_next;
    const Vector dc =
        dc_next + dht.cwiseProduct(o).cwiseProduct(
                      (1.0 - tanh_c.array().square()).matrix());
    const Vector c_prev = trace.cells.col(t);
    dz.segment(0, h) = dc.cwiseProduct(g).cwiseProduct(
        i.cwiseProduct((1.0 - i.array()).matrix()));
    dz.segment(h, h) = dc.cwiseProduct(c_prev).cwiseProduct(
        f.cwiseProduct((1.0 - f.array()).matrix()));
    dz.segment(2 * h, h) = dht.cwiseProduct(tanh_c).cwiseProduct(
        o.cwiseProduct((1.0 - o.array()).matrix()));
    dz.segment(3 * h, h) =
        dc.cwiseProduct(i).cwiseProduct((1.0 - g.array().square()).matrix());
    dc_next = dc.cwiseProduct(f);
    grad->w_input.noalias() += dz * inputs.col(t).transpose();
    grad->w_hidden.noalias() += dz * trace.hidden.col(t).transpose();
    grad->bias += dz;
    dx.col(t).noalias() = cell.w_input.transpose() * dz;
    dh_next.noalias() = cell.w_hidden.transpose() * dz;
  }
  return dx;
}

void GlorotUniform(Matrix* m, Rng& rng) {
  const double limit =
      std::sqrt(6.0 / static_cast<double>(m->rows() + m->cols()));
  for (Eigen::Index i = 0; i < m->size(); ++i) {
    m->data()[i] = Uniform(rng, -limit, limit);
  }
}

LstmCell InitCell(int input, int hidden, Rng& rng) {
  LstmCell cell;
  cell.w_input.resize(4 * hidden, input);
  cell.w_hidden.resize(4 * hidden, hidden);
  GlorotUniform(&cell.w_input, rng);
  GlorotUniform(&cell.w_hidden, rng);
  cell.bias = Vector::Zero(4 * hidden);
  cell.bias.segment(hidden, hidden).setOnes();
  return cell;
}

LstmCell ZeroCellLike(const LstmCell& c) {
  return LstmCell{Matrix::Zero(c.w_input.rows(), c.w_input.cols()),
                  Matrix::Zero(c.w_hidden.rows(), c.w_hidden.cols()),
                  Vector::Zero(c.bias.size())};
}

struct Forward {
  std::vector<int> positions;
  ColMatrix inputs;     // E x T
  ColMatrix reversed;   // E x T, reversed time
  Trace fwd, bwd;
  ColMatrix logits;     // 3 x T
};

Forward RunForward(const TaggerModel& model, std::span<const int> ids,
                   const std::vector<bool>& mask) {
  const TaggerParameters& p = model.params;
  if (mask.size() != ids.size()) {
    throw Error(ErrorCode::kLengthMismatch, "ids and mask differ in length");
  }
  Forward out;
  out.positions = RealPositions(mask);
  const auto steps = static_cast<Eigen::Index>(out.positions.size());
  const auto e = p.token_embeddings.cols();
  out.inputs.resize(e, steps);
  out.reversed.resize(e, steps);
  for (Eigen::Index t = 0; t < steps; ++t) {
    const int id = ids[out.positions[t]];
    if (id < 0 || id >= p.token_embeddings.rows()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "token id " + std::to_string(id) + " outside vocabulary");
    }
    out.inputs.col(t) = p.token_embeddings.row(id).transpose();
  }
  for (Eigen::Index t = 0; t < steps; ++t) {
    out.reversed.col(t) = out.inputs.col(steps - 1 - t);
  }
  RunCell(p.forward, out.inputs, &out.fwd);
  RunCell(p.backward, out.reversed, &out.bwd);
  const int h = p.forward.hidden();
  out.logits.resize(kNumTags, steps);
  for (Eigen::Index t = 0; t < steps; ++t) {
    Vector state(2 * h);
    state << out.fwd.hidden.col(t + 1), out.bwd.hidden.col(steps - t);
    out.logits.col(t) = p.head * state + p.head_bias;
  }
  return out;
}

}  // namespace

void TaggerConfig::Validate() const {
  if (embed_dim < 1 || hidden_units < 1 || batch_size < 1 || epochs < 0 ||
      !(learning_rate > 0)) {
    throw Error(ErrorCode::kInvalidArgument, "bad tagger configuration");
  }
}

json TaggerConfig::ToJson() const {
  return json{{"embed_dim", embed_dim},   {"hidden_units", hidden_units},
              {"batch_size", batch_size}, {"epochs", epochs},
              {"learning_rate", learning_rate}, {"beta1", beta1},
              {"beta2", beta2},           {"epsilon", epsilon},
              {"seed", seed},             {"max_len", kMaxLen}};
}

TaggerConfig TaggerConfig::FromJson(const json& j) {
  TaggerConfig c;
  try {
    c.embed_dim = j.at("embed_dim").get<int>();
    c.hidden_units = j.at("hidden_units").get<int>();
    c.batch_size = j.at("batch_size").get<int>();
    c.epochs = j.at("epochs").get<int>();
    c.learning_rate = j.at("learning_rate").get<double>();
    c.beta1 = j.at("beta1").get<double>();
    c.beta2 = j.at("beta2").get<double>();
    c.epsilon = j.at("epsilon").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("bad tagger config: ") + e.what());
  }
  return c;
}

std::vector<Vector> LstmForward(const LstmCell& cell,
                                std::span<const Vector> inputs) {
  ColMatrix x(cell.input(), static_cast<Eigen::Index>(inputs.size()));
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    if (inputs[t].size() != cell.input()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "input " + std::to_string(t) + " has size " +
                      std::to_string(inputs[t].size()) + ", cell expects " +
                      std::to_string(cell.input()));
    }
    x.col(static_cast<Eigen::Index>(t)) = inputs[t];
  }
  Trace trace;
  RunCell(cell, x, &trace);
  std::vector<Vector> out;
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    out.push_back(trace.hidden.col(static_cast<Eigen::Index>(t) + 1));
  }
  return out;
}

std::vector<TaggerParameters::Block> TaggerParameters::Blocks() {
  return {
      {"token_embeddings", token_embeddings.data(), token_embeddings.size()},
      {"forward.w_input", forward.w_input.data(), forward.w_input.size()},
      {"forward.w_hidden", forward.w_hidden.data(), forward.w_hidden.size()},
      {"forward.bias", forward.bias.data(), forward.bias.size()},
      {"backward.w_input", backward.w_input.data(), backward.w_input.size()},
      {"backward.w_hidden", backward.w_hidden.data(), backward.w_hidden.size()},
      {"backward.bias", backward.bias.data(), backward.bias.size()},
      {"head", head.data(), head.size()},
      {"head_bias", head_bias.data(), head_bias.size()},
  };
}

TaggerParameters TaggerParameters::ZerosLike() const {
  TaggerParameters z;
  z.token_embeddings =
      Matrix::Zero(token_embeddings.rows(), token_embeddings.cols());
  z.forward = ZeroCellLike(forward);
  z.backward = ZeroCellLike(backward);
  z.head = Matrix::Zero(head.rows(), head.cols());
  z.head_bias = Vector::Zero(head_bias.size());
  return z;
}

std::vector<int> RealPositions(const std::vector<bool>& mask) {
  std::vector<int> out;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) out.push_back(static_cast<int>(i));
  }
  return out;
}

TaggerModel InitTagger(const Vocabulary& vocab, const TaggerConfig& config) {
  config.Validate();
  TaggerModel model;
  model.vocab = vocab;
  model.config = config;
  Rng rng(config.seed);
  TaggerParameters& p = model.params;
  p.token_embeddings.resize(vocab.size(), config.embed_dim);
  for (Eigen::Index i = 0; i < p.token_embeddings.size(); ++i) {
    p.token_embeddings.data()[i] = Uniform(rng, -0.05, 0.05);
  }
  p.token_embeddings.row(Vocabulary::kPad).setZero();
  p.forward = InitCell(config.embed_dim, config.hidden_units, rng);
  p.backward = InitCell(config.embed_dim, config.hidden_units, rng);
  p.head.resize(kNumTags, 2 * config.hidden_units);
  GlorotUniform(&p.head, rng);
  p.head_bias = Vector::Zero(kNumTags);
  return model;
}

double SequenceLoss(const TaggerModel& model, std::span<const int> ids,
                    const std::vector<bool>& mask, std::span<const int> gold,
                    TaggerParameters* grads) {
  const Forward f = RunForward(model, ids, mask);
  const auto steps = static_cast<Eigen::Index>(f.positions.size());
  if (gold.size() != f.positions.size()) {
    throw Error(ErrorCode::kLabelAlignmentError,
                std::to_string(gold.size()) + " labels for " +
                    std::to_string(f.positions.size()) + " real positions");
  }
  const TaggerParameters& p = model.params;
  const int h = p.forward.hidden();
  double loss = 0.0;
  ColMatrix dlogits(kNumTags, steps);
  for (Eigen::Index t = 0; t < steps; ++t) {
    const int y = gold[t];
    if (y < 0 || y >= kNumTags) {
      throw Error(ErrorCode::kLabelAlignmentError,
                  "tag " + std::to_string(y) + " outside {0,1,2}");
    }
    const Vector z = f.logits.col(t);
    const double max = z.maxCoeff();
    const Vector e = (z.array() - max).exp().matrix();
    const double sum = e.sum();
    loss += -(z[y] - max - std::log(sum));
    dlogits.col(t) = e / sum;
    dlogits(y, t) -= 1.0;
  }
  if (!grads) return loss;

  ColMatrix dh_fwd(h, steps), dh_bwd(h, steps);
  for (Eigen::Index t = 0; t < steps; ++t) {
    Vector state(2 * h);
    state << f.fwd.hidden.col(t + 1), f.bwd.hidden.col(steps - t);
    grads->head.noalias() += dlogits.col(t) * state.transpose();
    grads->head_bias += dlogits.col(t);
    const Vector dstate = p.head.transpose() * dlogits.col(t);
    dh_fwd.col(t) = dstate.segment(0, h);
    // The backward cell saw position t at processing step steps - 1 - t.
    dh_bwd.col(steps - 1 - t) = dstate.segment(h, h);
  }
  const ColMatrix dx_fwd = BackCell(p.forward, f.inputs, f.fwd, dh_fwd,
                                    &grads->forward);
  const ColMatrix dx_bwd = BackCell(p.backward, f.reversed, f.bwd, dh_bwd,
                                    &grads->backward);
  for (Eigen::Index t = 0; t < steps; ++t) {
    const int id = ids[f.positions[t]];
    grads->token_embeddings.row(id) +=
        (dx_fwd.col(t) + dx_bwd.col(steps - 1 - t)).transpose();
  }
  return loss;
}

std::vector<int> TagSentence(const TaggerModel& model,
                             const EncodedSequence& sequence) {
  const Forward f = RunForward(model, sequence.ids, sequence.mask);
  std::vector<int> tags;
  tags.reserve(f.positions.size());
  for (Eigen::Index t = 0; t < f.logits.cols(); ++t) {
    int best = 0;
    for (int k = 1; k < kNumTags; ++k) {
      if (f.logits(k, t) > f.logits(best, t)) best = k;
    }
    tags.push_back(best);
  }
  return tags;
}

namespace {

void CheckAligned(std::span<const TaggedSequence> data) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& s = data[i];
    const auto real = std::count(s.sequence.mask.begin(),
                                 s.sequence.mask.end(), true);
    if (s.sequence.ids.size() != s.sequence.mask.size() ||
        static_cast<std::size_t>(real) != s.labels.size()) {
      throw Error(ErrorCode::kLabelAlignmentError,
                  "sequence " + std::to_string(i) + " has " +
                      std::to_string(s.labels.size()) + " labels for " +
                      std::to_string(real) + " real positions");
    }
  }
}

}  // namespace

double MeanLoss(const TaggerModel& model, std::span<const TaggedSequence> data) {
  double loss = 0.0;
  std::size_t tokens = 0;
  for (const TaggedSequence& s : data) {
    loss += SequenceLoss(model, s.sequence.ids, s.sequence.mask, s.labels);
    tokens += s.labels.size();
  }
  return tokens ? loss / static_cast<double>(tokens) : 0.0;
}

double TokenAccuracy(const TaggerModel& model,
                     std::span<const TaggedSequence> data) {
  std::size_t correct = 0, total = 0;
  for (const TaggedSequence& s : data) {
    const std::vector<int> tags = TagSentence(model, s.sequence);
    for (std::size_t i = 0; i < tags.size(); ++i) {
      correct += tags[i] == s.labels[i];
      ++total;
    }
  }
  return total ? static_cast<double>(correct) / static_cast<double>(total)
               : 0.0;
}

TrainedTagger TrainTagger(const Vocabulary& vocab,
                          std::span<const TaggedSequence> train,
                          std::span<const TaggedSequence> validation,
                          const TaggerConfig& config) {
  if (train.empty()) throw Error(ErrorCode::kEmptyInput, "no training data");
  CheckAligned(train);
  CheckAligned(validation);
  TrainedTagger out;
  out.model = InitTagger(vocab, config);
  TaggerParameters& params = out.model.params;
  TaggerParameters m = params.ZerosLike();
  TaggerParameters v = params.ZerosLike();
  TaggerParameters grads = params.ZerosLike();
  auto param_blocks = params.Blocks();
  auto m_blocks = m.Blocks();
  auto v_blocks = v.Blocks();
  auto g_blocks = grads.Blocks();

  Rng rng(config.seed ^ 0x9E3779B97F4A7C15ULL);
  std::vector<std::size_t> order(train.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  long long t_step = 0;
  const auto batch_size = static_cast<std::size_t>(config.batch_size);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    Shuffle(std::span<std::size_t>(order), rng);
    double epoch_loss = 0.0;
    std::size_t epoch_tokens = 0;
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
      const std::size_t end = std::min(order.size(), start + batch_size);
      for (auto& b : g_blocks) std::fill(b.data, b.data + b.size, 0.0);
      for (std::size_t k = start; k < end; ++k) {
        const TaggedSequence& s = train[order[k]];
        epoch_loss += SequenceLoss(out.model, s.sequence.ids, s.sequence.mask,
                                   s.labels, &grads);
        epoch_tokens += s.labels.size();
      }
      ++t_step;
      const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(t_step));
      const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(t_step));
      for (std::size_t b = 0; b < param_blocks.size(); ++b) {
        double* w = param_blocks[b].data;
        double* mb = m_blocks[b].data;
        double* vb = v_blocks[b].data;
        const double* g = g_blocks[b].data;
        for (Eigen::Index i = 0; i < param_blocks[b].size; ++i) {
          mb[i] = config.beta1 * mb[i] + (1.0 - config.beta1) * g[i];
          vb[i] = config.beta2 * vb[i] + (1.0 - config.beta2) * g[i] * g[i];
          const double mhat = mb[i] / c1;
          const double vhat = vb[i] / c2;
          w[i] -= config.learning_rate * mhat / (std::sqrt(vhat) + config.epsilon);
        }
      }
    }
    EpochStats stats;
    stats.epoch = epoch + 1;
    stats.train_loss =
        epoch_tokens ? epoch_loss / static_cast<double>(epoch_tokens) : 0.0;
    stats.train_accuracy = TokenAccuracy(out.model, train);
    stats.val_accuracy =
        validation.empty() ? 0.0 : TokenAccuracy(out.model, validation);
    out.curve.epochs.push_back(stats);
  }
  for (auto& b : param_blocks) {
    for (Eigen::Index i = 0; i < b.size; ++i) {
      b.data[i] = static_cast<double>(static_cast<float>(b.data[i]));
    }
  }
  return out;
}

std::string TrainingCurve::ToCsv() const {
  std::ostringstream out;
  out.precision(6);
  out << std::fixed;
  out << "epoch,train_accuracy,val_accuracy\n";
  for (const EpochStats& e : epochs) {
    out << e.epoch << ',' << e.train_accuracy << ',' << e.val_accuracy << '\n';
  }
  return out.str();
}

EntityPair ExtractEntities(std::span<const int> labels) {
  EntityPair out;
  auto longest = [&](int tag) -> std::optional<Span> {
    std::optional<Span> best;
    std::size_t i = 0;
    while (i < labels.size()) {
      if (labels[i] != tag) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < labels.size() && labels[j] == tag) ++j;
      if (!best || j - i > best->size()) best = Span{i, j};
      i = j;
    }
    return best;
  };
  out.cause = longest(kTagCause);
  out.effect = longest(kTagEffect);
  return out;
}

Container ToContainer(const TaggerModel& model) {
  Container c;
  c.header = json{{"kind", "tagger"},
                  {"config", model.config.ToJson()},
                  {"vocab", model.vocab.ToJson()}};
  const TaggerParameters& p = model.params;
  auto column = [](const Vector& v) {
    return Matrix(Eigen::Map<const Matrix>(v.data(), v.size(), 1));
  };
  c.matrices.push_back({"token_embeddings", p.token_embeddings});
  c.matrices.push_back({"forward.w_input", p.forward.w_input});
  c.matrices.push_back({"forward.w_hidden", p.forward.w_hidden});
  c.matrices.push_back({"forward.bias", column(p.forward.bias)});
  c.matrices.push_back({"backward.w_input", p.backward.w_input});
  c.matrices.push_back({"backward.w_hidden", p.backward.w_hidden});
  c.matrices.push_back({"backward.bias", column(p.backward.bias)});
  c.matrices.push_back({"head", p.head});
  c.matrices.push_back({"head_bias", column(p.head_bias)});
  return c;
}

TaggerModel TaggerFromContainer(const Container& c) {
  if (c.header.value("kind", "") != "tagger") {
    throw Error(ErrorCode::kFormat, "container is not a tagger");
  }
  TaggerModel model;
  model.config = TaggerConfig::FromJson(c.header.at("config"));
  model.vocab = Vocabulary::FromJson(c.header.at("vocab"));
  auto vec = [&](std::string_view name) {
    const Matrix& m = c.Get(name);
    return Vector(Eigen::Map<const Vector>(m.data(), m.size()));
  };
  TaggerParameters& p = model.params;
  p.token_embeddings = c.Get("token_embeddings");
  p.forward = LstmCell{c.Get("forward.w_input"), c.Get("forward.w_hidden"),
                       vec("forward.bias")};
  p.backward = LstmCell{c.Get("backward.w_input"), c.Get("backward.w_hidden"),
                        vec("backward.bias")};
  p.head = c.Get("head");
  p.head_bias = vec("head_bias");
  return model;
}

}  // namespace causalx
