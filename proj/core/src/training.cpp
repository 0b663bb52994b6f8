#include "ctxsim/training.hpp"

#include <algorithm>
#include <cmath>

#include "ctxsim/errors.hpp"
#include "ctxsim/io.hpp"
#include "ctxsim/rng.hpp"

namespace ctxsim::training {

std::string_view to_string(Head head) { return head == Head::kCosdist ? "COSDIST" : "CLASSIF"; }

Head parse_head(std::string_view text) {
  if (text == "CLASSIF" || text == "classif") return Head::kClassif;
  if (text == "COSDIST" || text == "cosdist") return Head::kCosdist;
  throw InvalidConfig("unknown head '" + std::string(text) + "' (expected CLASSIF or COSDIST)");
}

void FineTuneConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw InvalidConfig("learning_rate must be a finite non-negative number");
  }
  if (epochs <= 0) throw InvalidConfig("epochs must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw InvalidConfig("dropout must lie in [0, 1)");
  if (max_len < 3) throw InvalidConfig("max_len must be at least 3");
  if (batch_size == 0) throw InvalidConfig("batch_size must be positive");
  if (head == Head::kClassif && n_classes != 2 && n_classes != 3) {
    throw InvalidConfig("CLASSIF n_classes must be 2 or 3");
  }
  if (head == Head::kCosdist && n_classes != 2) {
    throw InvalidConfig("COSDIST is a binary objective; n_classes must be 2");
  }
}

nlohmann::ordered_json to_json(const FineTuneConfig& c) {
  nlohmann::ordered_json j;
  j["head"] = std::string(to_string(c.head));
  j["learning_rate"] = c.learning_rate;
  j["epochs"] = c.epochs;
  j["dropout"] = c.dropout;
  j["max_len"] = c.max_len;
  j["batch_size"] = c.batch_size;
  j["seed"] = c.seed;
  j["margin"] = c.margin;
  j["n_classes"] = c.n_classes;
  return j;
}

FineTuneConfig config_from_json(const nlohmann::json& j) {
  FineTuneConfig c;
  try {
    if (j.contains("head")) c.head = parse_head(j.at("head").get<std::string>());
    if (j.contains("learning_rate")) c.learning_rate = j.at("learning_rate").get<double>();
    if (j.contains("epochs")) c.epochs = j.at("epochs").get<int>();
    if (j.contains("dropout")) c.dropout = j.at("dropout").get<double>();
    if (j.contains("max_len")) c.max_len = j.at("max_len").get<std::size_t>();
    if (j.contains("batch_size")) c.batch_size = j.at("batch_size").get<std::size_t>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("margin")) c.margin = j.at("margin").get<double>();
    if (j.contains("n_classes")) c.n_classes = j.at("n_classes").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfig(std::string("fine-tune config: ") + e.what());
  }
  c.validate();
  return c;
}

void check_compatible(const FineTuneConfig& config, const std::vector<LabeledPair>& data) {
  config.validate();
  bool any_ternary = false;
  for (const auto& p : data) any_ternary = any_ternary || is_ternary(p.label);
  if (config.head == Head::kCosdist && any_ternary) {
    throw InvalidConfig("the COSDIST head needs binary T/F data; ukWaC-subs has three classes "
                        "and is compatible with the CLASSIF head only");
  }
  if (config.n_classes == 3) {
    for (const auto& p : data) {
      if (p.source != Source::kUkwacSubs) {
        throw InvalidConfig("3-class CLASSIF is reserved for ukWaC-subs data");
      }
    }
  }
  if (config.n_classes == 2 && any_ternary) {
    throw InvalidConfig("dataset has a/b/c labels but the head is configured for 2 classes");
  }
}

LinearPairHead LinearPairHead::zeros(int n_classes, int hidden_dim) {
  return {Matrix::Zero(n_classes, 2 * hidden_dim), Vector::Zero(n_classes)};
}

LinearPairHead LinearPairHead::init(int n_classes, int hidden_dim, Rng& rng) {
  LinearPairHead h = zeros(n_classes, hidden_dim);
  const double bound = 1.0 / std::sqrt(2.0 * hidden_dim);
  for (Eigen::Index i = 0; i < h.weight.size(); ++i) {
    h.weight.data()[i] = (2.0 * rng.uniform() - 1.0) * bound;
  }
  for (Eigen::Index i = 0; i < h.bias.size(); ++i) h.bias[i] = (2.0 * rng.uniform() - 1.0) * bound;
  return h;
}

nlohmann::json to_json(const LinearPairHead& head) {
  return {{"n_classes", head.weight.rows()},
          {"input_dim", head.weight.cols()},
          {"weight", std::vector<double>(head.weight.data(), head.weight.data() + head.weight.size())},
          {"bias", std::vector<double>(head.bias.data(), head.bias.data() + head.bias.size())}};
}

LinearPairHead head_from_json(const nlohmann::json& j) {
  const auto rows = j.at("n_classes").get<Eigen::Index>();
  const auto cols = j.at("input_dim").get<Eigen::Index>();
  const auto w = j.at("weight").get<std::vector<double>>();
  const auto b = j.at("bias").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(w.size()) != rows * cols || static_cast<Eigen::Index>(b.size()) != rows) {
    throw InvalidConfig("head weights have inconsistent shapes");
  }
  LinearPairHead h{Matrix(rows, cols), Vector(rows)};
  std::copy(w.begin(), w.end(), h.weight.data());
  std::copy(b.begin(), b.end(), h.bias.data());
  return h;
}

namespace {

Vector concat(const Vector& a, const Vector& b) {
  Vector x(a.size() + b.size());
  x << a, b;
  return x;
}

Vector logits(const Vector& rep_a, const Vector& rep_b, const LinearPairHead& head) {
  if (rep_a.size() != rep_b.size() || 2 * rep_a.size() != head.weight.cols()) {
    throw DimensionMismatch("head expects 2 x " + std::to_string(head.weight.cols() / 2) +
                            " inputs, got " + std::to_string(rep_a.size()) + " + " +
                            std::to_string(rep_b.size()));
  }
  return head.weight * concat(rep_a, rep_b) + head.bias;
}

Vector softmax(const Vector& z) {
  const double m = z.maxCoeff();
  Vector e = (z.array() - m).exp().matrix();
  return e / e.sum();
}

double log_sum_exp(const Vector& z) {
  const double m = z.maxCoeff();
  return m + std::log((z.array() - m).exp().sum());
}

struct CosineParts {
  double cos;
  Vector d_a;  // dcos/da
  Vector d_b;
};

CosineParts cosine_with_grad(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw DimensionMismatch("cosine of vectors with different sizes");
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) throw ZeroVector("cosine loss on an all-zero representation");
  const double c = a.dot(b) / (na * nb);
  return {c, b / (na * nb) - c * a / (na * na), a / (na * nb) - c * b / (nb * nb)};
}

}  // namespace

Vector classif_forward(const Vector& rep_a, const Vector& rep_b, const LinearPairHead& head) {
  return softmax(logits(rep_a, rep_b, head));
}

double classif_loss(const Vector& probs, int gold_class) {
  if (gold_class < 0 || gold_class >= probs.size()) {
    throw DimensionMismatch("gold class " + std::to_string(gold_class) + " outside " +
                            std::to_string(probs.size()) + " classes");
  }
  const double p = probs[gold_class];
  return p >= 1.0 ? 0.0 : -std::log(p);
}

ClassifGrad classif_loss_grad(const Vector& rep_a, const Vector& rep_b, const LinearPairHead& head,
                              int gold_class) {
  const Vector z = logits(rep_a, rep_b, head);
  if (gold_class < 0 || gold_class >= z.size()) {
    throw DimensionMismatch("gold class outside the head's classes");
  }
  ClassifGrad g;
  g.loss = log_sum_exp(z) - z[gold_class];
  Vector dz = softmax(z);
  dz[gold_class] -= 1.0;
  const Vector x = concat(rep_a, rep_b);
  g.d_weight = dz * x.transpose();
  g.d_bias = dz;
  const Vector dx = head.weight.transpose() * dz;
  g.d_rep_a = dx.head(rep_a.size());
  g.d_rep_b = dx.tail(rep_b.size());
  return g;
}

double cosdist_loss(const Vector& rep_a, const Vector& rep_b, Label label, double margin) {
  return cosdist_loss_grad(rep_a, rep_b, label, margin).loss;
}

CosdistGrad cosdist_loss_grad(const Vector& rep_a, const Vector& rep_b, Label label, double margin) {
  if (!is_binary(label)) throw InvalidConfig("cosine embedding loss needs a T/F label");
  const CosineParts c = cosine_with_grad(rep_a, rep_b);
  CosdistGrad g;
  if (label == Label::kT) {
    g.loss = 1.0 - c.cos;
    g.d_rep_a = -c.d_a;
    g.d_rep_b = -c.d_b;
  } else if (c.cos > margin) {
    g.loss = c.cos - margin;
    g.d_rep_a = c.d_a;
    g.d_rep_b = c.d_b;
  } else {
    g.loss = 0.0;
    g.d_rep_a = Vector::Zero(rep_a.size());
    g.d_rep_b = Vector::Zero(rep_b.size());
  }
  return g;
}

nlohmann::ordered_json to_json(const TrainReport& report) {
  nlohmann::ordered_json j;
  j["examples_used"] = report.examples_used;
  j["dropped_truncated"] = report.dropped_truncated;
  j["final_checkpoint"] = report.final_checkpoint;
  auto epochs = nlohmann::ordered_json::array();
  for (const auto& e : report.epochs) {
    nlohmann::ordered_json x;
    x["epoch"] = e.epoch;
    x["mean_loss"] = e.mean_loss;
    x["steps"] = e.steps;
    x["heldout_accuracy"] = e.heldout_accuracy ? nlohmann::ordered_json(*e.heldout_accuracy) : nlohmann::ordered_json();
    x["heldout_cos_gap"] = e.heldout_cos_gap ? nlohmann::ordered_json(*e.heldout_cos_gap) : nlohmann::ordered_json();
    epochs.push_back(std::move(x));
  }
  j["epochs"] = std::move(epochs);
  return j;
}

namespace {

struct Example {
  EncodedPair input;
  TokenAlignment a;
  TokenAlignment b;
  Label label;
};

// Encodes every pair, dropping those whose targets fall past max_len.
std::vector<Example> prepare(const std::vector<LabeledPair>& pairs, const Tokenizer& tokenizer,
                             std::size_t max_len, std::size_t* dropped) {
  std::vector<Example> out;
  for (const auto& p : pairs) {
    auto input = build_pair_input(p.a.sentence, p.b.sentence, tokenizer, max_len, p.a.span, p.b.span);
    if (!input) {
      if (dropped) ++*dropped;
      continue;
    }
    TokenAlignment a = locate_target(*input, p.a.span, SentenceRole::kFirst);
    TokenAlignment b = locate_target(*input, p.b.span, SentenceRole::kSecond);
    out.push_back({std::move(*input), std::move(a), std::move(b), p.label});
  }
  return out;
}

class Adam {
 public:
  explicit Adam(double lr) : lr_(lr) {}

  void step(std::vector<Matrix*> params, const std::vector<const Matrix*>& grads) {
    if (m_.empty()) {
      for (const Matrix* p : params) {
        m_.push_back(Matrix::Zero(p->rows(), p->cols()));
        v_.push_back(Matrix::Zero(p->rows(), p->cols()));
      }
    }
    ++t_;
    const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
    for (std::size_t k = 0; k < params.size(); ++k) {
      m_[k] = kBeta1 * m_[k] + (1.0 - kBeta1) * *grads[k];
      v_[k] = kBeta2 * v_[k] + (1.0 - kBeta2) * grads[k]->cwiseProduct(*grads[k]);
      const auto m_hat = m_[k].array() / c1;
      const auto v_hat = v_[k].array() / c2;
      params[k]->array() -= lr_ * m_hat / (v_hat.sqrt() + kEps);
    }
  }

 private:
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEps = 1e-8;
  double lr_;
  long t_ = 0;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
};

Vector dropout_mask(Eigen::Index n, double rate, Rng& rng) {
  Vector m = Vector::Ones(n);
  if (rate <= 0.0) return m;
  const double keep = 1.0 - rate;
  for (Eigen::Index i = 0; i < n; ++i) m[i] = rng.uniform() < keep ? 1.0 / keep : 0.0;
  return m;
}

}  // namespace

FineTuneResult finetune(const TrainableBackend& backend, const std::vector<LabeledPair>& data,
                        const FineTuneConfig& config, const std::vector<LabeledPair>* heldout,
                        const CheckpointTarget* checkpoint) {
  check_compatible(config, data);
  FineTuneResult result;
  result.backend = backend.clone();
  TrainableBackend& model = *result.backend;
  const int hidden = model.hidden_dim();
  const int last = model.n_layers();

  std::vector<Example> examples =
      prepare(data, model.tokenizer(), config.max_len, &result.report.dropped_truncated);
  if (examples.empty()) throw EmptyDataset("no trainable pairs after truncation filtering");
  result.report.examples_used = examples.size();

  Rng rng(config.seed);
  result.head = config.head == Head::kClassif ? LinearPairHead::init(config.n_classes, hidden, rng)
                                              : LinearPairHead::zeros(0, hidden);
  LinearPairHead& head = result.head;

  std::vector<Matrix>& params = model.parameters();
  std::vector<Matrix> grads;
  for (const Matrix& p : params) grads.push_back(Matrix::Zero(p.rows(), p.cols()));
  Matrix head_w_grad = Matrix::Zero(head.weight.rows(), head.weight.cols());
  Matrix head_b_grad = Matrix::Zero(head.bias.size(), 1);

  std::vector<Matrix*> all_params;
  std::vector<const Matrix*> all_grads;
  for (std::size_t k = 0; k < params.size(); ++k) {
    all_params.push_back(&params[k]);
    all_grads.push_back(&grads[k]);
  }
  Matrix bias_as_matrix = head.bias;  // Adam works on matrices
  if (config.head == Head::kClassif) {
    all_params.push_back(&head.weight);
    all_grads.push_back(&head_w_grad);
    all_params.push_back(&bias_as_matrix);
    all_grads.push_back(&head_b_grad);
  }
  Adam adam(config.learning_rate);

  std::vector<std::size_t> order(examples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  std::size_t batch_id = 0;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    EpochStats stats;
    stats.epoch = epoch;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size, ++batch_id) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      for (Matrix& g : grads) g.setZero();
      head_w_grad.setZero();
      head_b_grad.setZero();
      double batch_loss = 0.0;
      for (std::size_t k = start; k < stop; ++k) {
        const Example& ex = examples[order[k]];
        std::unique_ptr<TrainableBackend::Tape> tape;
        const EncoderOutput out = model.forward(ex.input, config.dropout, rng, &tape);
        const Vector rep_a = pool_target(out, ex.a, last);
        const Vector rep_b = pool_target(out, ex.b, last);
        const Vector mask_a = dropout_mask(hidden, config.dropout, rng);
        const Vector mask_b = dropout_mask(hidden, config.dropout, rng);
        const Vector in_a = rep_a.cwiseProduct(mask_a);
        const Vector in_b = rep_b.cwiseProduct(mask_b);

        double loss = 0.0;
        Vector d_a, d_b;
        if (config.head == Head::kClassif) {
          ClassifGrad g = classif_loss_grad(in_a, in_b, head, label_index(ex.label));
          loss = g.loss;
          head_w_grad += g.d_weight;
          head_b_grad += g.d_bias;
          d_a = std::move(g.d_rep_a);
          d_b = std::move(g.d_rep_b);
        } else {
          CosdistGrad g = cosdist_loss_grad(in_a, in_b, ex.label, config.margin);
          loss = g.loss;
          d_a = std::move(g.d_rep_a);
          d_b = std::move(g.d_rep_b);
        }
        if (!std::isfinite(loss)) {
          throw NonFiniteLoss("batch " + std::to_string(batch_id) + " (epoch " +
                              std::to_string(epoch) + ")");
        }
        batch_loss += loss;
        d_a = d_a.cwiseProduct(mask_a);
        d_b = d_b.cwiseProduct(mask_b);

        Matrix grad_last = Matrix::Zero(out.layers.back().rows(), hidden);
        const double wa = 1.0 / static_cast<double>(ex.a.wordpiece_indices.size());
        const double wb = 1.0 / static_cast<double>(ex.b.wordpiece_indices.size());
        for (std::size_t i : ex.a.wordpiece_indices) {
          grad_last.row(static_cast<Eigen::Index>(i)) += wa * d_a.transpose();
        }
        for (std::size_t i : ex.b.wordpiece_indices) {
          grad_last.row(static_cast<Eigen::Index>(i)) += wb * d_b.transpose();
        }
        model.backward(*tape, grad_last, grads);
      }
      const double scale = 1.0 / static_cast<double>(stop - start);
      for (Matrix& g : grads) g *= scale;
      head_w_grad *= scale;
      head_b_grad *= scale;
      adam.step(all_params, all_grads);
      head.bias = bias_as_matrix;
      epoch_loss += batch_loss;
      ++stats.steps;
    }
    stats.mean_loss = epoch_loss / static_cast<double>(examples.size());
    if (heldout && !heldout->empty()) {
      if (config.head == Head::kClassif) {
        stats.heldout_accuracy = heldout_accuracy(model, head, *heldout, config.max_len);
      } else {
        stats.heldout_cos_gap = cos_gap(model, *heldout, config.max_len);
      }
    }
    result.report.epochs.push_back(stats);
    if (checkpoint) {
      const auto dir = checkpoint->root / checkpoint->run_id / ("epoch_" + std::to_string(epoch));
      save_checkpoint(dir, model, head, config, checkpoint->dataset_hash, epoch);
      result.report.final_checkpoint = dir.string();
    }
  }
  return result;
}

double heldout_accuracy(const EncoderBackend& backend, const LinearPairHead& head,
                        const std::vector<LabeledPair>& pairs, std::size_t max_len) {
  if (head.n_classes() == 0) throw InvalidConfig("held-out accuracy needs a CLASSIF head");
  const auto examples = prepare(pairs, backend.tokenizer(), max_len, nullptr);
  if (examples.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& ex : examples) {
    const EncoderOutput out = backend.encode(ex.input);
    const Vector probs = classif_forward(pool_target(out, ex.a, backend.n_layers()),
                                         pool_target(out, ex.b, backend.n_layers()), head);
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < probs.size(); ++k) {
      if (probs[k] > probs[best]) best = k;
    }
    if (best == label_index(ex.label)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(examples.size());
}

double cos_gap(const EncoderBackend& backend, const std::vector<LabeledPair>& pairs,
               std::size_t max_len, std::optional<int> layer) {
  const int l = layer.value_or(backend.n_layers());
  double sum_t = 0.0, sum_f = 0.0;
  std::size_t n_t = 0, n_f = 0;
  for (const auto& ex : prepare(pairs, backend.tokenizer(), max_len, nullptr)) {
    const EncoderOutput out = backend.encode(ex.input);
    const double c = cosine_similarity(pool_target(out, ex.a, l), pool_target(out, ex.b, l));
    if (ex.label == Label::kT) {
      sum_t += c;
      ++n_t;
    } else if (ex.label == Label::kF) {
      sum_f += c;
      ++n_f;
    }
  }
  if (n_t == 0 || n_f == 0) throw EmptyDataset("cos_gap needs both T and F pairs");
  return sum_t / static_cast<double>(n_t) - sum_f / static_cast<double>(n_f);
}

void save_checkpoint(const std::filesystem::path& dir, const TrainableBackend& backend,
                     const LinearPairHead& head, const FineTuneConfig& config,
                     const std::string& dataset_hash, int epoch) {
  namespace fs = std::filesystem;
  fs::path tmp = dir;
  tmp += ".tmp";
  fs::remove_all(tmp);
  fs::create_directories(tmp);
  const std::string backend_json = backend.to_json().dump();
  const std::string head_json = to_json(head).dump();
  io::write_file_atomic(tmp / "backend.json", backend_json);
  io::write_file_atomic(tmp / "head.json", head_json);
  nlohmann::ordered_json manifest;
  manifest["epoch"] = epoch;
  manifest["config"] = to_json(config);
  manifest["dataset_hash"] = dataset_hash;
  manifest["backend_sha256"] = io::sha256_hex(backend_json);
  manifest["head_sha256"] = io::sha256_hex(head_json);
  io::write_file_atomic(tmp / "manifest.json", manifest.dump(2) + "\n");
  fs::remove_all(dir);
  fs::rename(tmp, dir);
}

Checkpoint load_checkpoint(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw MissingResource("checkpoint directory '" + dir.string() +
                          "' not found (expected backend.json, head.json, manifest.json)");
  }
  try {
    const auto manifest = nlohmann::json::parse(io::read_file(dir / "manifest.json"));
    return {ToyEncoder::from_json(nlohmann::json::parse(io::read_file(dir / "backend.json"))),
            head_from_json(nlohmann::json::parse(io::read_file(dir / "head.json"))),
            config_from_json(manifest.at("config")), manifest};
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfig("corrupt checkpoint in '" + dir.string() + "': " + e.what());
  }
}

}  // namespace ctxsim::training
