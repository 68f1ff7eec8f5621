#ifndef WETE_TRANSPORT_HPP
#define WETE_TRANSPORT_HPP

#include <vector>

#include <Eigen/Dense>

#include "wete/corpus.hpp"
#include "wete/embeddings.hpp"

namespace wete {

// A document as a weighted point cloud in embedding space: one entry per
// distinct word, weighted by count / N. Aggregating repeated tokens this way
// is exactly the per-token uniform measure.
struct DocEmbedding {
  std::vector<int> unique_ids;
  Eigen::VectorXd weights;  // strictly positive, sums to 1
  Eigen::MatrixXd vectors;  // U x H, row i embeds unique_ids[i]
};

// A document's topic side: simplex weights over K shared topic embeddings.
struct TopicMixture {
  Eigen::VectorXd theta_tilde;              // K, nonnegative, sums to 1
  Eigen::Ref<const Eigen::MatrixXd> alpha;  // K x H

  TopicMixture(Eigen::VectorXd theta, const Eigen::MatrixXd& alpha_ref);
};

DocEmbedding make_doc_embedding(const Document& doc, const EmbeddingMatrix& embeddings);

// exp(-<w, a>) with the inner product clamped to +-30.
double point_cost(const Eigen::VectorXd& w, const Eigen::VectorXd& a);

// Probability of each of the document's distinct words given one topic
// embedding: a count-weighted softmax of the inner products.
Eigen::VectorXd topic_to_word_probs(const DocEmbedding& doc, const Eigen::VectorXd& a);

// Probability of each topic given one word embedding: theta-weighted softmax;
// zero wherever theta_tilde is zero.
Eigen::VectorXd word_to_topic_probs(const Eigen::VectorXd& w, const TopicMixture& mix);

// Bidirectional transport cost by explicit double summation over (word,
// topic) pairs. Reference implementation; the closed form must match it.
double ct_cost_naive(const DocEmbedding& doc, const TopicMixture& mix);

// Same quantity evaluated in log space:
//   sum_k theta_k / (sum_i weight_i e^{m_ik}) + sum_i weight_i / (sum_k theta_k e^{m_ik}).
double ct_cost_closed(const DocEmbedding& doc, const TopicMixture& mix);

double batch_ct_cost(const std::vector<DocEmbedding>& docs,
                     const std::vector<TopicMixture>& mixes);

// Log-space evaluation state shared by the closed-form cost and its gradient.
struct CtEval {
  double cost = 0.0;
  Eigen::MatrixXd m_clamped;       // U x K clamped inner products
  Eigen::MatrixXd clamp_mask;      // 1 where the raw inner product was in range
  Eigen::VectorXd log_denom_word;  // A_k = LSE_i(m_ik + log w_i)
  Eigen::VectorXd log_denom_topic; // B_i = LSE_k(m_ik + log theta_k)
  Eigen::VectorXd term_topic;      // theta_k * e^{-A_k}
  Eigen::VectorXd term_word;       // w_i * e^{-B_i}
};

CtEval ct_eval(const DocEmbedding& doc, const TopicMixture& mix);

// Gradient of the closed-form cost with respect to the clamped inner-product
// matrix and theta_tilde.
struct CtGrad {
  double cost = 0.0;
  Eigen::MatrixXd d_inner;       // U x K, clamp mask applied
  Eigen::VectorXd d_theta_tilde; // K
};

CtGrad ct_grad(const DocEmbedding& doc, const TopicMixture& mix);

}  // namespace wete

#endif  // WETE_TRANSPORT_HPP
