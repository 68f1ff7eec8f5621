#include "wete/grad.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "wete/errors.hpp"
#include "wete/math.hpp"
#include "wete/rng.hpp"
#include "wete/transport.hpp"

namespace wete {

std::vector<ParamRef> param_set(WeTeModel& model) {
  const bool emb_rows_trainable =
      std::any_of(model.word_embeddings.trainable.begin(), model.word_embeddings.trainable.end(),
                  [](std::uint8_t f) { return f != 0; });
  auto on = [&](const std::string& name, bool base = true) {
    return base && model.frozen.count(name) == 0;
  };
  return {
      {"word_embeddings", &model.word_embeddings.values, on("word_embeddings", emb_rows_trainable)},
      {"topic_embeddings", &model.topic_embeddings, on("topic_embeddings")},
      {"trunk_weight", &model.encoder.trunk_weight, on("trunk_weight")},
      {"trunk_bias", &model.encoder.trunk_bias, on("trunk_bias")},
      {"head_shape_weight", &model.encoder.shape_weight, on("head_shape_weight")},
      {"head_shape_bias", &model.encoder.shape_bias, on("head_shape_bias")},
      {"head_scale_weight", &model.encoder.scale_weight, on("head_scale_weight")},
      {"head_scale_bias", &model.encoder.scale_bias, on("head_scale_bias")},
  };
}

namespace {

double transform_value(InputTransform t, double x) {
  return t == InputTransform::log1p ? std::log1p(x) : x;
}

}  // namespace

GradResult gradient(const WeTeModel& model, const std::vector<const Document*>& batch,
                    const Eigen::MatrixXd& noise) {
  if (batch.empty()) throw std::invalid_argument("gradient: empty batch");
  const int k_count = model.config.topics;
  if (noise.rows() != static_cast<Eigen::Index>(batch.size()) || noise.cols() != k_count) {
    throw std::invalid_argument("gradient: noise must be batch x topics");
  }

  const Eigen::MatrixXd& emb = model.word_embeddings.values;
  const Eigen::MatrixXd& alpha = model.topic_embeddings;
  const EncoderParams& enc = model.encoder;
  const int v_count = model.vocab_size();
  const int width = model.config.trunk_width;
  const double eps = model.config.epsilon;

  const auto params = param_set(const_cast<WeTeModel&>(model));
  auto trainable = [&](const std::string& name) {
    return std::find_if(params.begin(), params.end(), [&](const ParamRef& p) {
             return p.name == name;
           })->trainable;
  };
  const bool need_emb = trainable("word_embeddings");
  const bool need_alpha = trainable("topic_embeddings");

  const Eigen::MatrixXd phi = topic_word_dist(model.word_embeddings, alpha);

  Eigen::MatrixXd d_emb, d_alpha, d_phi;
  if (need_emb) d_emb.setZero(v_count, model.config.embed_dim);
  d_alpha.setZero(k_count, model.config.embed_dim);
  d_phi.setZero(v_count, k_count);
  Eigen::MatrixXd d_trunk_w = Eigen::MatrixXd::Zero(width, v_count);
  Eigen::VectorXd d_trunk_b = Eigen::VectorXd::Zero(width);
  Eigen::MatrixXd d_shape_w = Eigen::MatrixXd::Zero(k_count, width);
  Eigen::VectorXd d_shape_b = Eigen::VectorXd::Zero(k_count);
  Eigen::MatrixXd d_scale_w = Eigen::MatrixXd::Zero(k_count, width);
  Eigen::VectorXd d_scale_b = Eigen::VectorXd::Zero(k_count);

  const double inv_batch = 1.0 / static_cast<double>(batch.size());
  const double ct_coef = inv_batch;
  const double ll_coef = -eps * inv_batch;

  double ct_sum = 0.0;
  double ll_sum = 0.0;

  for (std::size_t b = 0; b < batch.size(); ++b) {
    const Document& doc = *batch[b];

    // --- encoder forward ---
    std::vector<std::pair<int, double>> inputs;
    inputs.reserve(doc.bow.size());
    for (const auto& [id, count] : doc.bow) {
      inputs.emplace_back(id, transform_value(model.config.input_transform,
                                              static_cast<double>(count)));
    }
    Eigen::VectorXd hidden_pre = enc.trunk_bias.col(0);
    for (const auto& [id, value] : inputs) hidden_pre += value * enc.trunk_weight.col(id);
    const Eigen::VectorXd hidden = hidden_pre.cwiseMax(0.0);

    const Eigen::VectorXd shape_pre = enc.shape_weight * hidden + enc.shape_bias.col(0);
    const Eigen::VectorXd scale_pre = enc.scale_weight * hidden + enc.scale_bias.col(0);

    Eigen::VectorXd shape(k_count), scale(k_count);
    Eigen::VectorXd shape_mask(k_count), scale_mask(k_count);
    for (int k = 0; k < k_count; ++k) {
      const double ks = softplus(shape_pre[k]);
      shape[k] = std::clamp(ks, kShapeMin, kShapeMax);
      shape_mask[k] = (ks > kShapeMin && ks < kShapeMax) ? 1.0 : 0.0;
      const double ls = softplus(scale_pre[k]);
      scale[k] = std::clamp(ls, kScaleMin, kScaleMax);
      scale_mask[k] = (ls > kScaleMin && ls < kScaleMax) ? 1.0 : 0.0;
    }

    // --- theta sample ---
    Eigen::VectorXd gumbel(k_count), theta(k_count);
    for (int k = 0; k < k_count; ++k) {
      const double u =
          std::clamp(noise(static_cast<Eigen::Index>(b), k), kNoiseMin, 1.0 - kNoiseMin);
      gumbel[k] = -std::log1p(-u);  // -log(1 - u) > 0
      theta[k] = scale[k] * std::pow(gumbel[k], 1.0 / shape[k]);
    }
    const Eigen::VectorXd floored = theta.array() + kThetaFloor;
    const double theta_sum = floored.sum();
    const Eigen::VectorXd theta_tilde = floored / theta_sum;

    // --- transport cost and its gradient ---
    const DocEmbedding de = make_doc_embedding(doc, model.word_embeddings);
    const TopicMixture mix(theta_tilde, alpha);
    const CtGrad ct = ct_grad(de, mix);
    ct_sum += ct.cost;

    if (need_alpha) d_alpha.noalias() += ct_coef * (ct.d_inner.transpose() * de.vectors);
    if (need_emb) {
      const Eigen::MatrixXd d_rows = ct_coef * (ct.d_inner * alpha);  // U x H
      for (Eigen::Index i = 0; i < d_rows.rows(); ++i) {
        d_emb.row(de.unique_ids[static_cast<std::size_t>(i)]) += d_rows.row(i);
      }
    }

    // --- Poisson likelihood and its gradient ---
    const Eigen::VectorXd rates_raw = phi * theta;
    const Eigen::VectorXd rates = rates_raw.cwiseMax(kRateFloor);
    double ll = -rates.sum();
    for (const auto& [id, count] : doc.bow) {
      ll += static_cast<double>(count) * std::log(rates[id]);
    }
    ll_sum += ll;

    // d(loss)/d(rates) = ll_coef * (x_v / rate_v - 1), zero where the rate
    // floor is active.
    Eigen::VectorXd d_rates(v_count);
    for (int v = 0; v < v_count; ++v) {
      d_rates[v] = rates_raw[v] > kRateFloor ? -ll_coef : 0.0;
    }
    for (const auto& [id, count] : doc.bow) {
      if (rates_raw[id] > kRateFloor) {
        d_rates[id] += ll_coef * static_cast<double>(count) / rates[id];
      }
    }
    Eigen::VectorXd d_theta = phi.transpose() * d_rates;
    d_phi.noalias() += d_rates * theta.transpose();

    // --- theta_tilde normalization backward (transport path only) ---
    const Eigen::VectorXd d_tilde = ct_coef * ct.d_theta_tilde;
    const double dot = d_tilde.dot(theta_tilde);
    d_theta += (d_tilde.array() - dot).matrix() / theta_sum;

    // --- Weibull reparameterization backward ---
    Eigen::VectorXd d_shape(k_count), d_scale(k_count);
    for (int k = 0; k < k_count; ++k) {
      d_scale[k] = d_theta[k] * theta[k] / scale[k];
      d_shape[k] = d_theta[k] * theta[k] * (-std::log(gumbel[k]) / (shape[k] * shape[k]));
    }

    // --- encoder backward ---
    Eigen::VectorXd d_shape_pre(k_count), d_scale_pre(k_count);
    for (int k = 0; k < k_count; ++k) {
      d_shape_pre[k] = d_shape[k] * shape_mask[k] * sigmoid(shape_pre[k]);
      d_scale_pre[k] = d_scale[k] * scale_mask[k] * sigmoid(scale_pre[k]);
    }
    d_shape_w.noalias() += d_shape_pre * hidden.transpose();
    d_shape_b += d_shape_pre;
    d_scale_w.noalias() += d_scale_pre * hidden.transpose();
    d_scale_b += d_scale_pre;

    Eigen::VectorXd d_hidden =
        enc.shape_weight.transpose() * d_shape_pre + enc.scale_weight.transpose() * d_scale_pre;
    for (int w = 0; w < width; ++w) {
      if (hidden_pre[w] <= 0.0) d_hidden[w] = 0.0;
    }
    d_trunk_b += d_hidden;
    for (const auto& [id, value] : inputs) d_trunk_w.col(id) += value * d_hidden;
  }

  // --- softmax-over-vocabulary backward, once per batch ---
  if (need_alpha || need_emb) {
    for (int k = 0; k < k_count; ++k) {
      const double dot = phi.col(k).dot(d_phi.col(k));
      const Eigen::VectorXd d_logits =
          phi.col(k).cwiseProduct((d_phi.col(k).array() - dot).matrix());
      if (need_alpha) d_alpha.row(k) += (emb.transpose() * d_logits).transpose();
      if (need_emb) d_emb.noalias() += d_logits * alpha.row(k);
    }
  }

  if (need_emb) {
    for (int v = 0; v < v_count; ++v) {
      if (!model.word_embeddings.trainable[static_cast<std::size_t>(v)]) d_emb.row(v).setZero();
    }
  }

  GradResult result;
  result.parts.ct = ct_sum * inv_batch;
  result.parts.nll = -ll_sum * inv_batch;
  result.parts.loss = result.parts.ct + eps * result.parts.nll;
  if (!std::isfinite(result.parts.loss)) {
    throw divergence_error("objective is not finite");
  }

  for (const ParamRef& p : params) {
    if (!p.trainable) continue;
    if (p.name == "word_embeddings") {
      result.grads.push_back({p.name, std::move(d_emb)});
    } else if (p.name == "topic_embeddings") {
      result.grads.push_back({p.name, std::move(d_alpha)});
    } else if (p.name == "trunk_weight") {
      result.grads.push_back({p.name, std::move(d_trunk_w)});
    } else if (p.name == "trunk_bias") {
      result.grads.push_back({p.name, d_trunk_b});
    } else if (p.name == "head_shape_weight") {
      result.grads.push_back({p.name, std::move(d_shape_w)});
    } else if (p.name == "head_shape_bias") {
      result.grads.push_back({p.name, d_shape_b});
    } else if (p.name == "head_scale_weight") {
      result.grads.push_back({p.name, std::move(d_scale_w)});
    } else if (p.name == "head_scale_bias") {
      result.grads.push_back({p.name, d_scale_b});
    }
  }
  return result;
}

FiniteDiffReport finite_diff_check(WeTeModel& model, const std::vector<const Document*>& batch,
                                   const Eigen::MatrixXd& noise, double h, double tol,
                                   int max_coords_per_tensor) {
  if (!(h > 0.0)) throw std::invalid_argument("finite_diff_check: h must be positive");
  const GradResult analytic = gradient(model, batch, noise);

  FiniteDiffReport report;
  report.tolerance = tol;
  const auto params = param_set(model);
  for (const NamedGrad& grad : analytic.grads) {
    const auto it = std::find_if(params.begin(), params.end(),
                                 [&](const ParamRef& p) { return p.name == grad.name; });
    Eigen::MatrixXd& tensor = *it->value;
    const Eigen::Index total = tensor.size();
    const Eigen::Index stride =
        max_coords_per_tensor > 0 && total > max_coords_per_tensor
            ? total / max_coords_per_tensor
            : 1;

    FiniteDiffTensorReport tr;
    tr.name = grad.name;
    for (Eigen::Index idx = 0; idx < total; idx += stride) {
      const double fd = central_difference(
          [&] { return objective(model, batch, noise).loss; }, tensor.data()[idx], h);
      const double ga = grad.value.data()[idx];
      const double rel = std::abs(ga - fd) / std::max(std::abs(fd), 1e-8);
      tr.max_rel_error = std::max(tr.max_rel_error, rel);
      ++tr.coords_checked;
    }
    report.max_rel_error = std::max(report.max_rel_error, tr.max_rel_error);
    report.tensors.push_back(std::move(tr));
  }
  report.pass = report.max_rel_error < tol;
  return report;
}

AdamState make_adam_state(const std::vector<ParamRef>& params, const AdamConfig& config) {
  AdamState state;
  state.config = config;
  for (const ParamRef& p : params) {
    if (!p.trainable) continue;
    state.moments.emplace(p.name,
                          std::make_pair(Eigen::MatrixXd::Zero(p.value->rows(), p.value->cols()),
                                         Eigen::MatrixXd::Zero(p.value->rows(), p.value->cols())));
  }
  return state;
}

void adam_step(const std::vector<ParamRef>& params, const std::vector<NamedGrad>& grads,
               AdamState& state) {
  ++state.step;
  const AdamConfig& c = state.config;
  const double bias1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
  const double bias2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));

  for (const NamedGrad& g : grads) {
    const auto it = std::find_if(params.begin(), params.end(),
                                 [&](const ParamRef& p) { return p.name == g.name; });
    if (it == params.end() || !it->trainable) continue;
    Eigen::MatrixXd& value = *it->value;
    if (g.value.rows() != value.rows() || g.value.cols() != value.cols()) {
      throw std::invalid_argument("adam_step: gradient shape mismatch for " + g.name);
    }
    auto& [m, v] = state.moments.at(g.name);
    m = c.beta1 * m + (1.0 - c.beta1) * g.value;
    v = c.beta2 * v + (1.0 - c.beta2) * g.value.cwiseProduct(g.value);
    const Eigen::MatrixXd m_hat = m / bias1;
    const Eigen::MatrixXd v_hat = v / bias2;
    value -= c.lr * (m_hat.array() / (v_hat.array().sqrt() + c.eps_hat)).matrix();
  }
}

namespace {

std::vector<Eigen::MatrixXd> snapshot_params(const std::vector<ParamRef>& params) {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(params.size());
  for (const ParamRef& p : params) out.push_back(*p.value);
  return out;
}

void restore_params(const std::vector<ParamRef>& params,
                    const std::vector<Eigen::MatrixXd>& snapshot) {
  for (std::size_t i = 0; i < params.size(); ++i) *params[i].value = snapshot[i];
}

}  // namespace

TrainResult train(const Corpus& corpus, WeTeModel& model, const TrainConfig& config,
                  const EpochCallback& on_epoch) {
  if (corpus.documents.empty()) throw config_error("train: empty corpus");
  if (config.batch_size < 1 || config.epochs < 1) {
    throw config_error("train: batch_size and epochs must be >= 1");
  }
  model.config.epsilon = config.epsilon;

  const auto params = param_set(model);
  AdamConfig adam_config;
  adam_config.lr = config.lr;
  AdamState adam = make_adam_state(params, adam_config);

  Rng shuffle_rng = make_rng(derive_seed(config.seed, SeedStream::shuffle));
  Rng noise_rng = make_rng(derive_seed(config.seed, SeedStream::noise));

  const std::size_t j_total = corpus.documents.size();
  std::vector<std::size_t> order(j_total);
  for (std::size_t i = 0; i < j_total; ++i) order[i] = i;

  TrainResult result;
  std::vector<Eigen::MatrixXd> last_good = snapshot_params(params);
  double initial_loss = 0.0;
  int high_loss_epochs = 0;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    shuffle_indices(order, shuffle_rng);

    double loss_acc = 0.0, ct_acc = 0.0, nll_acc = 0.0;
    bool non_finite = false;
    for (std::size_t start = 0; start < j_total; start += config.batch_size) {
      const std::size_t end = std::min(j_total, start + config.batch_size);
      std::vector<const Document*> batch;
      batch.reserve(end - start);
      for (std::size_t i = start; i < end; ++i) batch.push_back(&corpus.documents[order[i]]);

      Eigen::MatrixXd noise(batch.size(), model.config.topics);
      for (Eigen::Index r = 0; r < noise.rows(); ++r) {
        for (Eigen::Index c = 0; c < noise.cols(); ++c) noise(r, c) = uniform01(noise_rng);
      }

      try {
        GradResult step = gradient(model, batch, noise);
        adam_step(params, step.grads, adam);
        const double w = static_cast<double>(batch.size());
        loss_acc += step.parts.loss * w;
        ct_acc += step.parts.ct * w;
        nll_acc += step.parts.nll * w;
      } catch (const divergence_error&) {
        non_finite = true;
        break;
      }
    }

    const auto t1 = std::chrono::steady_clock::now();
    EpochStats stats;
    stats.epoch = epoch;
    stats.mean_loss = loss_acc / static_cast<double>(j_total);
    stats.mean_ct = ct_acc / static_cast<double>(j_total);
    stats.mean_nll = nll_acc / static_cast<double>(j_total);
    stats.seconds = std::chrono::duration<double>(t1 - t0).count();

    if (non_finite || !std::isfinite(stats.mean_loss)) {
      restore_params(params, last_good);
      result.diverged = true;
      result.divergence_reason = "non-finite loss in epoch " + std::to_string(epoch);
      return result;
    }

    result.log.push_back(stats);
    if (on_epoch) on_epoch(model, stats);

    if (epoch == 1) initial_loss = stats.mean_loss;
    if (stats.mean_loss > 10.0 * std::abs(initial_loss)) {
      ++high_loss_epochs;
      if (high_loss_epochs >= 3) {
        restore_params(params, last_good);
        result.diverged = true;
        result.divergence_reason = "loss exceeded 10x its initial value for 3 consecutive epochs";
        return result;
      }
    } else {
      high_loss_epochs = 0;
      last_good = snapshot_params(params);
    }
  }
  return result;
}

}  // namespace wete
