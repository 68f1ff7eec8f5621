#include "wete/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "wete/errors.hpp"
#include "wete/math.hpp"
#include "wete/rng.hpp"
#include "wete/transport.hpp"

namespace wete {

std::string to_string(TrainMode mode) {
  switch (mode) {
    case TrainMode::fixed: return "fixed";
    case TrainMode::finetune: return "finetune";
    case TrainMode::scratch: return "scratch";
  }
  return "fixed";
}

std::string to_string(InputTransform t) {
  return t == InputTransform::identity ? "identity" : "log1p";
}

TrainMode parse_train_mode(const std::string& s) {
  if (s == "fixed") return TrainMode::fixed;
  if (s == "finetune") return TrainMode::finetune;
  if (s == "scratch") return TrainMode::scratch;
  throw config_error("unknown mode '" + s + "' (expected fixed, finetune, or scratch)");
}

InputTransform parse_input_transform(const std::string& s) {
  if (s == "identity") return InputTransform::identity;
  if (s == "log1p") return InputTransform::log1p;
  throw config_error("unknown input_transform '" + s + "' (expected identity or log1p)");
}

WeTeModel WeTeModel::init(const ModelConfig& config, std::shared_ptr<const Vocabulary> vocab,
                          EmbeddingMatrix embeddings) {
  if (config.topics < 2) throw config_error("model requires at least 2 topics");
  if (config.embed_dim < 1 || config.trunk_width < 1) {
    throw config_error("embed_dim and trunk width must be >= 1");
  }
  if (config.epsilon < 0.0) throw config_error("epsilon must be nonnegative");
  if (embeddings.dim != config.embed_dim) {
    throw config_error("embedding dimension " + std::to_string(embeddings.dim) +
                       " does not match configured embed_dim " +
                       std::to_string(config.embed_dim));
  }
  if (vocab && vocab->size() != embeddings.rows()) {
    throw config_error("embedding row count does not match vocabulary size");
  }

  WeTeModel m;
  m.config = config;
  m.vocab = std::move(vocab);
  m.word_embeddings = std::move(embeddings);
  m.word_embeddings.set_all_trainable(config.mode != TrainMode::fixed);

  const int v_count = m.word_embeddings.rows();
  const int k = config.topics;
  const int h = config.embed_dim;
  const int width = config.trunk_width;

  constexpr double kInitStddev = 0.02;
  Rng topic_rng = make_rng(derive_seed(config.seed, SeedStream::topic_init));
  m.topic_embeddings.resize(k, h);
  fill_gaussian(m.topic_embeddings, kInitStddev, topic_rng);

  Rng enc_rng = make_rng(derive_seed(config.seed, SeedStream::encoder_init));
  m.encoder.trunk_weight.resize(width, v_count);
  fill_gaussian(m.encoder.trunk_weight, kInitStddev, enc_rng);
  m.encoder.shape_weight.resize(k, width);
  fill_gaussian(m.encoder.shape_weight, kInitStddev, enc_rng);
  m.encoder.scale_weight.resize(k, width);
  fill_gaussian(m.encoder.scale_weight, kInitStddev, enc_rng);
  m.encoder.trunk_bias.setZero(width, 1);
  m.encoder.shape_bias.setZero(k, 1);
  m.encoder.scale_bias.setZero(k, 1);
  return m;
}

namespace {

double apply_transform(InputTransform t, double x) {
  return t == InputTransform::log1p ? std::log1p(x) : x;
}

WeibullParams encode_sparse(const EncoderParams& enc, InputTransform transform,
                            const std::vector<std::pair<int, double>>& entries) {
  Eigen::VectorXd hidden = enc.trunk_bias.col(0);
  for (const auto& [id, value] : entries) {
    if (id < 0 || id >= enc.trunk_weight.cols()) {
      throw std::invalid_argument("encode: term id out of range");
    }
    hidden += apply_transform(transform, value) * enc.trunk_weight.col(id);
  }
  hidden = hidden.cwiseMax(0.0);  // ReLU

  WeibullParams out;
  out.shape = (enc.shape_weight * hidden + enc.shape_bias.col(0))
                  .unaryExpr([](double x) { return std::clamp(softplus(x), kShapeMin, kShapeMax); });
  out.scale = (enc.scale_weight * hidden + enc.scale_bias.col(0))
                  .unaryExpr([](double x) { return std::clamp(softplus(x), kScaleMin, kScaleMax); });
  return out;
}

}  // namespace

WeibullParams WeTeModel::encode(const Document& doc) const {
  std::vector<std::pair<int, double>> entries;
  entries.reserve(doc.bow.size());
  for (const auto& [id, count] : doc.bow) entries.emplace_back(id, static_cast<double>(count));
  return encode_sparse(encoder, config.input_transform, entries);
}

WeibullParams WeTeModel::encode(const Eigen::VectorXd& counts) const {
  if (counts.size() != encoder.trunk_weight.cols()) {
    throw std::invalid_argument("encode: input must have V entries");
  }
  std::vector<std::pair<int, double>> entries;
  for (Eigen::Index v = 0; v < counts.size(); ++v) {
    if (counts[v] != 0.0) entries.emplace_back(static_cast<int>(v), counts[v]);
  }
  return encode_sparse(encoder, config.input_transform, entries);
}

Eigen::VectorXd WeTeModel::infer_theta(const Document& doc) const {
  const WeibullParams wp = encode(doc);
  Eigen::VectorXd mean(wp.shape.size());
  for (Eigen::Index i = 0; i < mean.size(); ++i) {
    mean[i] = wp.scale[i] * std::tgamma(1.0 + 1.0 / wp.shape[i]);
  }
  return normalize_theta(mean);
}

Eigen::VectorXd sample_theta(const WeibullParams& params, const Eigen::VectorXd& noise) {
  if (noise.size() != params.shape.size()) {
    throw std::invalid_argument("sample_theta: noise size != topic count");
  }
  Eigen::VectorXd theta(noise.size());
  for (Eigen::Index i = 0; i < noise.size(); ++i) {
    const double u = std::clamp(noise[i], kNoiseMin, 1.0 - kNoiseMin);
    theta[i] = params.scale[i] * std::pow(-std::log1p(-u), 1.0 / params.shape[i]);
  }
  return theta;
}

Eigen::VectorXd normalize_theta(const Eigen::VectorXd& theta) {
  Eigen::VectorXd floored = theta.array() + kThetaFloor;
  return floored / floored.sum();
}

Eigen::MatrixXd topic_word_dist(const EmbeddingMatrix& embeddings,
                                const Eigen::MatrixXd& topic_embeddings) {
  if (embeddings.dim != topic_embeddings.cols()) {
    throw std::invalid_argument("topic_word_dist: dimension mismatch");
  }
  Eigen::MatrixXd logits = embeddings.values * topic_embeddings.transpose();  // V x K
  for (Eigen::Index k = 0; k < logits.cols(); ++k) {
    const double lse = log_sum_exp(logits.col(k));
    logits.col(k) = (logits.col(k).array() - lse).exp();
  }
  return logits;
}

double poisson_loglik(const std::vector<std::pair<int, int>>& bow, const Eigen::MatrixXd& phi,
                      const Eigen::VectorXd& theta) {
  if (theta.size() != phi.cols()) {
    throw std::invalid_argument("poisson_loglik: theta size != topic count");
  }
  const Eigen::VectorXd rates = (phi * theta).cwiseMax(kRateFloor);
  double ll = -rates.sum();
  for (const auto& [id, count] : bow) {
    if (id < 0 || id >= phi.rows()) {
      throw std::invalid_argument("poisson_loglik: term id out of range");
    }
    ll += static_cast<double>(count) * std::log(rates[id]);
  }
  return ll;
}

std::vector<int> top_words(const Eigen::MatrixXd& phi, int topic, int n) {
  if (topic < 0 || topic >= phi.cols()) {
    throw std::invalid_argument("top_words: topic index out of range");
  }
  if (n < 0 || n > phi.rows()) {
    throw std::invalid_argument("top_words: n out of range");
  }
  std::vector<int> ids(static_cast<std::size_t>(phi.rows()));
  std::iota(ids.begin(), ids.end(), 0);
  std::sort(ids.begin(), ids.end(), [&](int a, int b) {
    if (phi(a, topic) != phi(b, topic)) return phi(a, topic) > phi(b, topic);
    return a < b;
  });
  ids.resize(static_cast<std::size_t>(n));
  return ids;
}

ObjectiveParts objective(const WeTeModel& model, const std::vector<const Document*>& batch,
                         const Eigen::MatrixXd& noise) {
  if (batch.empty()) throw std::invalid_argument("objective: empty batch");
  if (noise.rows() != static_cast<Eigen::Index>(batch.size()) ||
      noise.cols() != model.config.topics) {
    throw std::invalid_argument("objective: noise must be batch x topics");
  }

  const Eigen::MatrixXd phi = topic_word_dist(model.word_embeddings, model.topic_embeddings);

  double ct_sum = 0.0;
  double ll_sum = 0.0;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const Document& doc = *batch[b];
    const WeibullParams wp = model.encode(doc);
    const Eigen::VectorXd theta =
        sample_theta(wp, noise.row(static_cast<Eigen::Index>(b)).transpose());
    const Eigen::VectorXd theta_tilde = normalize_theta(theta);

    const DocEmbedding de = make_doc_embedding(doc, model.word_embeddings);
    ct_sum += ct_cost_closed(de, TopicMixture(theta_tilde, model.topic_embeddings));
    ll_sum += poisson_loglik(doc.bow, phi, theta);
  }

  ObjectiveParts parts;
  const double inv = 1.0 / static_cast<double>(batch.size());
  parts.ct = ct_sum * inv;
  parts.nll = -ll_sum * inv;
  parts.loss = parts.ct + model.config.epsilon * parts.nll;
  return parts;
}

}  // namespace wete
