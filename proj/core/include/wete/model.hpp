#ifndef WETE_MODEL_HPP
#define WETE_MODEL_HPP

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wete/corpus.hpp"
#include "wete/embeddings.hpp"

namespace wete {

enum class TrainMode { fixed, finetune, scratch };
enum class InputTransform { identity, log1p };

std::string to_string(TrainMode mode);
std::string to_string(InputTransform t);
TrainMode parse_train_mode(const std::string& s);
InputTransform parse_input_transform(const std::string& s);

struct ModelConfig {
  int topics = 100;     // K
  int embed_dim = 100;  // H
  int trunk_width = 256;
  double epsilon = 1.0;  // weight of the count-likelihood regularizer
  TrainMode mode = TrainMode::fixed;
  InputTransform input_transform = InputTransform::log1p;
  std::uint64_t seed = 1;
};

// Shared trunk with ReLU, then separate shape/scale heads through softplus.
// Biases are stored as single-column matrices so the optimizer can treat
// every parameter uniformly.
struct EncoderParams {
  Eigen::MatrixXd trunk_weight;  // width x V
  Eigen::MatrixXd trunk_bias;    // width x 1
  Eigen::MatrixXd shape_weight;  // K x width
  Eigen::MatrixXd shape_bias;    // K x 1
  Eigen::MatrixXd scale_weight;  // K x width
  Eigen::MatrixXd scale_bias;    // K x 1
};

// Per-document Weibull posterior parameters, clamped to stable ranges.
struct WeibullParams {
  Eigen::VectorXd shape;  // in [1e-2, 50]
  Eigen::VectorXd scale;  // in [1e-4, 1e4]
};

inline constexpr double kShapeMin = 1e-2;
inline constexpr double kShapeMax = 50.0;
inline constexpr double kScaleMin = 1e-4;
inline constexpr double kScaleMax = 1e4;
inline constexpr double kThetaFloor = 1e-10;
inline constexpr double kRateFloor = 1e-10;
inline constexpr double kNoiseMin = 1e-6;

struct WeTeModel {
  ModelConfig config;
  std::shared_ptr<const Vocabulary> vocab;
  EmbeddingMatrix word_embeddings;    // V x H
  Eigen::MatrixXd topic_embeddings;   // K x H
  EncoderParams encoder;
  // Tensor names (see param_set) excluded from training on top of what the
  // mode dictates.
  std::set<std::string> frozen;

  int vocab_size() const { return word_embeddings.rows(); }

  // Builds a model around an existing embedding table. Topic embeddings and
  // encoder weights start N(0, 0.02); biases start at zero. Embedding rows
  // are trainable iff the mode is not `fixed`.
  static WeTeModel init(const ModelConfig& config, std::shared_ptr<const Vocabulary> vocab,
                        EmbeddingMatrix embeddings);

  WeibullParams encode(const Document& doc) const;
  WeibullParams encode(const Eigen::VectorXd& counts) const;

  // Deterministic topic proportions from the Weibull mean scale*Gamma(1+1/shape).
  Eigen::VectorXd infer_theta(const Document& doc) const;
};

// theta_k = scale_k * (-log(1 - noise_k))^(1/shape_k); noise is clamped to
// [1e-6, 1 - 1e-6].
Eigen::VectorXd sample_theta(const WeibullParams& params, const Eigen::VectorXd& noise);

// Simplex projection by adding a 1e-10 floor and dividing by the sum.
Eigen::VectorXd normalize_theta(const Eigen::VectorXd& theta);

// V x K column-stochastic matrix: column k is the softmax over the vocabulary
// of <word embedding, topic embedding k>.
Eigen::MatrixXd topic_word_dist(const EmbeddingMatrix& embeddings,
                                const Eigen::MatrixXd& topic_embeddings);

// log Poisson(x; Phi theta) dropping the constant -log(x!) term; rates are
// floored at 1e-10. Higher is better.
double poisson_loglik(const std::vector<std::pair<int, int>>& bow, const Eigen::MatrixXd& phi,
                      const Eigen::VectorXd& theta);

// Term ids of the n largest entries of Phi column k; ties break by ascending id.
std::vector<int> top_words(const Eigen::MatrixXd& phi, int topic, int n);

struct ObjectiveParts {
  double loss = 0.0;
  double ct = 0.0;
  double nll = 0.0;  // negative Poisson log-likelihood (before the epsilon weight)
};

// Mean over the batch of the per-document transport cost plus epsilon times
// the negative count log-likelihood, with one theta sample per document drawn
// from the given noise row.
ObjectiveParts objective(const WeTeModel& model, const std::vector<const Document*>& batch,
                         const Eigen::MatrixXd& noise);

}  // namespace wete

#endif  // WETE_MODEL_HPP
