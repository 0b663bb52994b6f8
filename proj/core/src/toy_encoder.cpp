#include "ctxsim/toy_encoder.hpp"

#include <array>
#include <cmath>

#include "ctxsim/errors.hpp"

namespace ctxsim {

namespace {

constexpr int kSegments = 2;

struct ToyTape final : TrainableBackend::Tape {
  std::vector<int> ids;
  std::vector<int> segments;
  std::array<std::size_t, kSegments> segment_sizes{};
  std::vector<Matrix> inputs;       // block inputs H_l
  std::vector<Matrix> activations;  // tanh outputs A_l
  std::vector<Matrix> masks;        // scaled dropout masks (empty when off)
  std::vector<std::array<Vector, kSegments>> means;
};

Matrix random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols, double scale) {
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = rng.normal() * scale;
  }
  return m;
}

}  // namespace

ToyEncoder::ToyEncoder(const ToyEncoderConfig& config)
    : config_(config), tokenizer_(config.vocab_size, config.chunk_chars, true) {
  if (config_.hidden_dim <= 0 || config_.n_layers <= 0) {
    throw InvalidConfig("toy encoder needs positive hidden_dim and n_layers");
  }
  Rng rng(config_.seed);
  const Eigen::Index d = config_.hidden_dim;
  const double s = config_.init_scale;
  params_.push_back(random_matrix(rng, static_cast<Eigen::Index>(config_.vocab_size), d, s));
  params_.push_back(random_matrix(rng, static_cast<Eigen::Index>(config_.max_positions), d, 0.1 * s));
  params_.push_back(random_matrix(rng, kSegments, d, 0.1 * s));
  const double block_scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (int l = 0; l < config_.n_layers; ++l) {
    params_.push_back(random_matrix(rng, d, d, block_scale));
    params_.push_back(random_matrix(rng, d, d, block_scale));
    params_.push_back(Matrix::Zero(1, d));
  }
}

std::vector<std::string> ToyEncoder::parameter_names() const {
  std::vector<std::string> names = {"token_embedding", "position_embedding", "segment_embedding"};
  for (int l = 1; l <= config_.n_layers; ++l) {
    const std::string p = "block" + std::to_string(l) + ".";
    names.push_back(p + "self");
    names.push_back(p + "context");
    names.push_back(p + "bias");
  }
  return names;
}

EncoderOutput ToyEncoder::encode(const EncodedPair& input) const {
  Rng unused(0);
  return forward(input, 0.0, unused, nullptr);
}

EncoderOutput ToyEncoder::forward(const EncodedPair& input, double dropout, Rng& rng,
                                  std::unique_ptr<Tape>* tape) const {
  const auto seq = input.sequence();
  const Eigen::Index len = static_cast<Eigen::Index>(seq.size());
  const Eigen::Index d = config_.hidden_dim;
  if (seq.size() > config_.max_positions) {
    throw InvalidConfig("sequence of length " + std::to_string(seq.size()) +
                        " exceeds toy encoder max_positions " +
                        std::to_string(config_.max_positions));
  }
  auto record = std::make_unique<ToyTape>();
  Matrix h(len, d);
  for (Eigen::Index i = 0; i < len; ++i) {
    const auto& t = seq[static_cast<std::size_t>(i)];
    const int seg = std::clamp(t.segment, 0, kSegments - 1);
    if (t.id < 0 || static_cast<std::size_t>(t.id) >= config_.vocab_size) {
      throw InvalidConfig("token id " + std::to_string(t.id) + " outside toy vocabulary");
    }
    h.row(i) = params_[kTokenEmb].row(t.id) + params_[kPosEmb].row(i) + params_[kSegEmb].row(seg);
    record->ids.push_back(t.id);
    record->segments.push_back(seg);
    ++record->segment_sizes[static_cast<std::size_t>(seg)];
  }

  EncoderOutput out;
  out.layers.push_back(h);
  for (int l = 0; l < config_.n_layers; ++l) {
    std::array<Vector, kSegments> means;
    for (int s = 0; s < kSegments; ++s) means[s] = Vector::Zero(d);
    for (Eigen::Index i = 0; i < len; ++i) {
      means[record->segments[static_cast<std::size_t>(i)]] += h.row(i).transpose();
    }
    std::array<Vector, kSegments> context;
    for (int s = 0; s < kSegments; ++s) {
      if (record->segment_sizes[s] > 0) means[s] /= static_cast<double>(record->segment_sizes[s]);
      context[s] = u(l) * means[s] + b(l).row(0).transpose();
    }
    Matrix z = h * w(l).transpose();
    for (Eigen::Index i = 0; i < len; ++i) {
      z.row(i) += context[record->segments[static_cast<std::size_t>(i)]].transpose();
    }
    Matrix a = z.array().tanh().matrix();
    Matrix mask;
    if (dropout > 0.0) {
      mask.resize(len, d);
      const double keep = 1.0 - dropout;
      for (Eigen::Index i = 0; i < len; ++i) {
        for (Eigen::Index c = 0; c < d; ++c) mask(i, c) = rng.uniform() < keep ? 1.0 / keep : 0.0;
      }
    }
    Matrix next = mask.size() ? Matrix(h + a.cwiseProduct(mask)) : Matrix(h + a);
    if (tape) {
      record->inputs.push_back(h);
      record->activations.push_back(std::move(a));
      record->masks.push_back(std::move(mask));
      record->means.push_back(means);
    }
    h = std::move(next);
    out.layers.push_back(h);
  }
  if (tape) *tape = std::move(record);
  return out;
}

void ToyEncoder::backward(const Tape& tape_base, const Matrix& grad_last_layer,
                          std::vector<Matrix>& grads) const {
  const auto& tape = dynamic_cast<const ToyTape&>(tape_base);
  const Eigen::Index len = static_cast<Eigen::Index>(tape.ids.size());
  const Eigen::Index d = config_.hidden_dim;
  if (grad_last_layer.rows() != len || grad_last_layer.cols() != d) {
    throw DimensionMismatch("gradient shape does not match the recorded forward pass");
  }
  Matrix g = grad_last_layer;
  for (int l = config_.n_layers - 1; l >= 0; --l) {
    const auto ul = static_cast<std::size_t>(l);
    const Matrix& a = tape.activations[ul];
    Matrix da = tape.masks[ul].size() ? Matrix(g.cwiseProduct(tape.masks[ul])) : g;
    Matrix dz = da.cwiseProduct((1.0 - a.array().square()).matrix());

    Matrix& gw = grads[kFirstBlock + 3 * ul];
    Matrix& gu = grads[kFirstBlock + 3 * ul + 1];
    Matrix& gb = grads[kFirstBlock + 3 * ul + 2];
    gw += dz.transpose() * tape.inputs[ul];
    gb += dz.colwise().sum();

    std::array<Vector, kSegments> seg_sum;
    for (int s = 0; s < kSegments; ++s) seg_sum[s] = Vector::Zero(d);
    for (Eigen::Index i = 0; i < len; ++i) {
      seg_sum[tape.segments[static_cast<std::size_t>(i)]] += dz.row(i).transpose();
    }
    Matrix prev = g + dz * w(l);
    for (int s = 0; s < kSegments; ++s) {
      if (tape.segment_sizes[s] == 0) continue;
      gu += seg_sum[s] * tape.means[ul][s].transpose();
      const Vector dm = u(l).transpose() * seg_sum[s] / static_cast<double>(tape.segment_sizes[s]);
      for (Eigen::Index i = 0; i < len; ++i) {
        if (tape.segments[static_cast<std::size_t>(i)] == s) prev.row(i) += dm.transpose();
      }
    }
    g = std::move(prev);
  }
  for (Eigen::Index i = 0; i < len; ++i) {
    grads[kTokenEmb].row(tape.ids[static_cast<std::size_t>(i)]) += g.row(i);
    grads[kPosEmb].row(i) += g.row(i);
    grads[kSegEmb].row(tape.segments[static_cast<std::size_t>(i)]) += g.row(i);
  }
}

std::unique_ptr<TrainableBackend> ToyEncoder::clone() const {
  return std::make_unique<ToyEncoder>(*this);
}

nlohmann::json ToyEncoder::to_json() const {
  nlohmann::json j;
  j["kind"] = "toy";
  j["config"] = {{"vocab_size", config_.vocab_size},   {"hidden_dim", config_.hidden_dim},
                 {"n_layers", config_.n_layers},       {"max_positions", config_.max_positions},
                 {"chunk_chars", config_.chunk_chars}, {"seed", config_.seed},
                 {"init_scale", config_.init_scale}};
  const auto names = parameter_names();
  nlohmann::json params = nlohmann::json::object();
  for (std::size_t k = 0; k < params_.size(); ++k) {
    const Matrix& m = params_[k];
    params[names[k]] = {{"rows", m.rows()},
                        {"cols", m.cols()},
                        {"data", std::vector<double>(m.data(), m.data() + m.size())}};
  }
  j["params"] = std::move(params);
  return j;
}

ToyEncoder ToyEncoder::from_json(const nlohmann::json& j) {
  if (j.value("kind", "") != "toy") throw InvalidConfig("backend weights are not a toy encoder");
  const auto& c = j.at("config");
  ToyEncoderConfig config;
  config.vocab_size = c.at("vocab_size").get<std::size_t>();
  config.hidden_dim = c.at("hidden_dim").get<int>();
  config.n_layers = c.at("n_layers").get<int>();
  config.max_positions = c.at("max_positions").get<std::size_t>();
  config.chunk_chars = c.at("chunk_chars").get<std::size_t>();
  config.seed = c.at("seed").get<std::uint64_t>();
  config.init_scale = c.at("init_scale").get<double>();
  ToyEncoder encoder(config);
  const auto names = encoder.parameter_names();
  for (std::size_t k = 0; k < names.size(); ++k) {
    const auto& p = j.at("params").at(names[k]);
    Matrix& m = encoder.params_[k];
    const auto data = p.at("data").get<std::vector<double>>();
    if (p.at("rows").get<Eigen::Index>() != m.rows() ||
        p.at("cols").get<Eigen::Index>() != m.cols() ||
        static_cast<Eigen::Index>(data.size()) != m.size()) {
      throw InvalidConfig("parameter '" + names[k] + "' has the wrong shape");
    }
    std::copy(data.begin(), data.end(), m.data());
  }
  return encoder;
}

}  // namespace ctxsim
