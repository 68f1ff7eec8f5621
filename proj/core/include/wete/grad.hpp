#ifndef WETE_GRAD_HPP
#define WETE_GRAD_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "wete/model.hpp"

namespace wete {

// Named view over one trainable tensor of the model.
struct ParamRef {
  std::string name;
  Eigen::MatrixXd* value = nullptr;
  bool trainable = false;
};

// Fixed order: word_embeddings, topic_embeddings, trunk, shape head, scale head.
std::vector<ParamRef> param_set(WeTeModel& model);

struct NamedGrad {
  std::string name;
  Eigen::MatrixXd value;
};

struct GradResult {
  ObjectiveParts parts;
  std::vector<NamedGrad> grads;  // one entry per trainable tensor, param_set order
};

// Exact gradient of the single-sample objective with respect to every
// trainable tensor, holding the noise fixed. Throws divergence_error if the
// loss is not finite.
GradResult gradient(const WeTeModel& model, const std::vector<const Document*>& batch,
                    const Eigen::MatrixXd& noise);

struct FiniteDiffTensorReport {
  std::string name;
  double max_rel_error = 0.0;
  int coords_checked = 0;
};

struct FiniteDiffReport {
  std::vector<FiniteDiffTensorReport> tensors;
  double max_rel_error = 0.0;
  double tolerance = 0.0;
  bool pass = true;
};

// Central-difference check of gradient() at fixed noise. Relative errors use
// denominators floored at 1e-8. max_coords_per_tensor == 0 checks every
// coordinate; otherwise an evenly strided sample of that many.
FiniteDiffReport finite_diff_check(WeTeModel& model, const std::vector<const Document*>& batch,
                                   const Eigen::MatrixXd& noise, double h, double tol,
                                   int max_coords_per_tensor = 0);

struct AdamConfig {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps_hat = 1e-8;
};

struct AdamState {
  AdamConfig config;
  long step = 0;
  std::map<std::string, std::pair<Eigen::MatrixXd, Eigen::MatrixXd>> moments;  // m, v
};

AdamState make_adam_state(const std::vector<ParamRef>& params, const AdamConfig& config);

// One bias-corrected update; frozen tensors are untouched.
void adam_step(const std::vector<ParamRef>& params, const std::vector<NamedGrad>& grads,
               AdamState& state);

struct TrainConfig {
  int batch_size = 200;
  int epochs = 50;
  double lr = 0.001;
  double epsilon = 1.0;
  std::uint64_t seed = 1;
  int log_every = 1;  // epochs between progress lines on the driver's logger
};

struct EpochStats {
  int epoch = 0;
  double mean_loss = 0.0;
  double mean_ct = 0.0;
  double mean_nll = 0.0;
  double seconds = 0.0;
};

struct TrainResult {
  std::vector<EpochStats> log;
  bool diverged = false;
  std::string divergence_reason;
};

using EpochCallback = std::function<void(const WeTeModel&, const EpochStats&)>;

// Mini-batch driver: per epoch, a fresh permutation of the corpus, then one
// gradient/Adam step per batch (last short batch kept). On divergence (non-
// finite loss, or loss above 10x the first epoch's for 3 consecutive epochs)
// the model is rolled back to the last good epoch and the result is flagged.
TrainResult train(const Corpus& corpus, WeTeModel& model, const TrainConfig& config,
                  const EpochCallback& on_epoch = nullptr);

}  // namespace wete

#endif  // WETE_GRAD_HPP
