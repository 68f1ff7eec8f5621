#include "wete/transport.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "wete/errors.hpp"
#include "wete/math.hpp"

namespace wete {

namespace {

constexpr double kSimplexTol = 1e-9;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void validate_doc(const DocEmbedding& doc) {
  const Eigen::Index u = doc.weights.size();
  if (u == 0) throw std::invalid_argument("DocEmbedding: empty document");
  if (static_cast<Eigen::Index>(doc.unique_ids.size()) != u || doc.vectors.rows() != u) {
    throw std::invalid_argument("DocEmbedding: misaligned fields");
  }
  if ((doc.weights.array() <= 0.0).any()) {
    throw std::invalid_argument("DocEmbedding: weights must be strictly positive");
  }
  if (std::abs(doc.weights.sum() - 1.0) > kSimplexTol) {
    throw std::invalid_argument("DocEmbedding: weights must sum to 1");
  }
}

// Clamped inner products between every doc word and every topic.
Eigen::MatrixXd inner_products(const DocEmbedding& doc, const Eigen::MatrixXd& alpha) {
  Eigen::MatrixXd m = doc.vectors * alpha.transpose();  // U x K
  return m.unaryExpr([](double x) { return clamp_inner(x); });
}

}  // namespace

TopicMixture::TopicMixture(Eigen::VectorXd theta, const Eigen::MatrixXd& alpha_ref)
    : theta_tilde(std::move(theta)), alpha(alpha_ref) {
  if (theta_tilde.size() != alpha.rows()) {
    throw std::invalid_argument("TopicMixture: theta size != topic count");
  }
  if ((theta_tilde.array() < 0.0).any() || !theta_tilde.allFinite()) {
    throw std::invalid_argument("TopicMixture: theta must be finite and nonnegative");
  }
  if (std::abs(theta_tilde.sum() - 1.0) > kSimplexTol) {
    throw std::invalid_argument("TopicMixture: theta must sum to 1");
  }
}

DocEmbedding make_doc_embedding(const Document& doc, const EmbeddingMatrix& embeddings) {
  DocEmbedding out;
  const auto u = static_cast<Eigen::Index>(doc.bow.size());
  out.unique_ids.reserve(doc.bow.size());
  out.weights.resize(u);
  out.vectors.resize(u, embeddings.dim);
  const double n = static_cast<double>(doc.length());
  for (Eigen::Index i = 0; i < u; ++i) {
    const auto& [id, count] = doc.bow[static_cast<std::size_t>(i)];
    out.unique_ids.push_back(id);
    out.weights[i] = static_cast<double>(count) / n;
    out.vectors.row(i) = embeddings.values.row(id);
  }
  return out;
}

double point_cost(const Eigen::VectorXd& w, const Eigen::VectorXd& a) {
  return std::exp(-clamp_inner(w.dot(a)));
}

Eigen::VectorXd topic_to_word_probs(const DocEmbedding& doc, const Eigen::VectorXd& a) {
  validate_doc(doc);
  Eigen::VectorXd logits(doc.weights.size());
  for (Eigen::Index i = 0; i < logits.size(); ++i) {
    logits[i] = clamp_inner(doc.vectors.row(i).dot(a)) + std::log(doc.weights[i]);
  }
  const double lse = log_sum_exp(logits);
  return (logits.array() - lse).exp();
}

Eigen::VectorXd word_to_topic_probs(const Eigen::VectorXd& w, const TopicMixture& mix) {
  const Eigen::Index k_count = mix.theta_tilde.size();
  Eigen::VectorXd logits(k_count);
  for (Eigen::Index k = 0; k < k_count; ++k) {
    logits[k] = mix.theta_tilde[k] > 0.0
                    ? clamp_inner(w.dot(mix.alpha.row(k))) + std::log(mix.theta_tilde[k])
                    : kNegInf;
  }
  const double lse = log_sum_exp(logits);
  Eigen::VectorXd probs(k_count);
  for (Eigen::Index k = 0; k < k_count; ++k) {
    probs[k] = logits[k] == kNegInf ? 0.0 : std::exp(logits[k] - lse);
  }
  return probs;
}

double ct_cost_naive(const DocEmbedding& doc, const TopicMixture& mix) {
  validate_doc(doc);
  const Eigen::Index u = doc.weights.size();
  const Eigen::Index k_count = mix.theta_tilde.size();

  // topic -> doc: E_{k ~ theta} E_{i ~ pi(.|k)} cost(i, k)
  double topic_to_doc = 0.0;
  for (Eigen::Index k = 0; k < k_count; ++k) {
    if (mix.theta_tilde[k] == 0.0) continue;
    const Eigen::VectorXd a = mix.alpha.row(k);
    const Eigen::VectorXd probs = topic_to_word_probs(doc, a);
    double inner = 0.0;
    for (Eigen::Index i = 0; i < u; ++i) {
      inner += point_cost(doc.vectors.row(i), a) * probs[i];
    }
    topic_to_doc += mix.theta_tilde[k] * inner;
  }

  // doc -> topic: E_{i ~ weights} E_{k ~ pi(.|i)} cost(i, k)
  double doc_to_topic = 0.0;
  for (Eigen::Index i = 0; i < u; ++i) {
    const Eigen::VectorXd w = doc.vectors.row(i);
    const Eigen::VectorXd probs = word_to_topic_probs(w, mix);
    double inner = 0.0;
    for (Eigen::Index k = 0; k < k_count; ++k) {
      if (probs[k] == 0.0) continue;
      inner += point_cost(w, mix.alpha.row(k)) * probs[k];
    }
    doc_to_topic += doc.weights[i] * inner;
  }
  return topic_to_doc + doc_to_topic;
}

CtEval ct_eval(const DocEmbedding& doc, const TopicMixture& mix) {
  validate_doc(doc);
  const Eigen::Index u = doc.weights.size();
  const Eigen::Index k_count = mix.theta_tilde.size();

  CtEval ev;
  Eigen::MatrixXd raw = doc.vectors * mix.alpha.transpose();  // U x K
  ev.clamp_mask = raw.unaryExpr(
      [](double x) { return std::abs(x) <= kInnerProductClamp ? 1.0 : 0.0; });
  ev.m_clamped = raw.unaryExpr([](double x) { return clamp_inner(x); });

  const Eigen::VectorXd log_w = doc.weights.array().log();
  Eigen::VectorXd log_theta(k_count);
  for (Eigen::Index k = 0; k < k_count; ++k) {
    log_theta[k] = mix.theta_tilde[k] > 0.0 ? std::log(mix.theta_tilde[k]) : kNegInf;
  }

  ev.log_denom_word.resize(k_count);
  ev.term_topic.resize(k_count);
  for (Eigen::Index k = 0; k < k_count; ++k) {
    ev.log_denom_word[k] = log_sum_exp(ev.m_clamped.col(k) + log_w);
    ev.term_topic[k] = mix.theta_tilde[k] * std::exp(-ev.log_denom_word[k]);
  }

  ev.log_denom_topic.resize(u);
  ev.term_word.resize(u);
  for (Eigen::Index i = 0; i < u; ++i) {
    ev.log_denom_topic[i] = log_sum_exp(ev.m_clamped.row(i).transpose() + log_theta);
    ev.term_word[i] = doc.weights[i] * std::exp(-ev.log_denom_topic[i]);
  }

  ev.cost = ev.term_topic.sum() + ev.term_word.sum();
  return ev;
}

double ct_cost_closed(const DocEmbedding& doc, const TopicMixture& mix) {
  return ct_eval(doc, mix).cost;
}

double batch_ct_cost(const std::vector<DocEmbedding>& docs,
                     const std::vector<TopicMixture>& mixes) {
  if (docs.empty()) throw std::invalid_argument("batch_ct_cost: empty batch");
  if (docs.size() != mixes.size()) {
    throw std::invalid_argument("batch_ct_cost: docs and mixtures misaligned");
  }
  double total = 0.0;
  for (std::size_t j = 0; j < docs.size(); ++j) {
    total += ct_cost_closed(docs[j], mixes[j]);
  }
  return total / static_cast<double>(docs.size());
}

CtGrad ct_grad(const DocEmbedding& doc, const TopicMixture& mix) {
  const CtEval ev = ct_eval(doc, mix);
  const Eigen::Index u = doc.weights.size();
  const Eigen::Index k_count = mix.theta_tilde.size();

  CtGrad g;
  g.cost = ev.cost;
  g.d_inner.setZero(u, k_count);
  g.d_theta_tilde.resize(k_count);

  for (Eigen::Index k = 0; k < k_count; ++k) {
    g.d_theta_tilde[k] = std::exp(-ev.log_denom_word[k]);
    for (Eigen::Index i = 0; i < u; ++i) {
      // softmax over words inside denominator A_k
      const double s1 =
          std::exp(ev.m_clamped(i, k) + std::log(doc.weights[i]) - ev.log_denom_word[k]);
      g.d_inner(i, k) -= ev.term_topic[k] * s1;
      // softmax over topics inside denominator B_i
      const double e2 = std::exp(ev.m_clamped(i, k) - ev.log_denom_topic[i]);
      g.d_inner(i, k) -= ev.term_word[i] * mix.theta_tilde[k] * e2;
      g.d_theta_tilde[k] -= ev.term_word[i] * e2;
    }
  }
  g.d_inner.array() *= ev.clamp_mask.array();
  return g;
}

}  // namespace wete
