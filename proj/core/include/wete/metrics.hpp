#ifndef WETE_METRICS_HPP
#define WETE_METRICS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <Eigen/Dense>

#include "wete/corpus.hpp"

namespace wete {

// Document-level co-occurrence counts for the term pairs that will be probed.
struct CooccurrenceStats {
  std::vector<int> doc_freq;                           // per term id
  std::unordered_map<std::uint64_t, int> pair_doc_freq;  // key = pack(min, max)
  int doc_count = 0;

  static std::uint64_t pair_key(int a, int b);
  int pair_count(int a, int b) const;
};

// Counts only pairs among `needed_terms` (all pairs when empty).
CooccurrenceStats count_cooccurrence(const Corpus& corpus,
                                     const std::unordered_set<int>& needed_terms = {});

// NPMI = log((p(a,b) + gamma) / (p(a) p(b))) / -log(p(a,b) + gamma) with
// document-level probabilities. gamma defaults to 1/D. The degenerate case
// p(a,b) + gamma >= 1 returns 0; the result is clamped to [-1, 1].
double npmi_pair(const CooccurrenceStats& stats, int a, int b,
                 std::optional<double> gamma = std::nullopt);

// Mean NPMI over all unordered pairs of one topic's top words.
double topic_npmi(const std::vector<int>& topic_words, const CooccurrenceStats& stats);

// Mean of topic_npmi over the supplied topics.
double topic_coherence(const std::vector<std::vector<int>>& topics,
                       const CooccurrenceStats& stats);

// Indices of the ceil(p * K) topics with the highest per-topic mean NPMI;
// ties break by ascending topic id.
std::vector<int> select_topics_by_npmi(const std::vector<std::vector<int>>& topics,
                                       const CooccurrenceStats& stats, double proportion);

// Fraction of distinct words among all listed words.
double topic_diversity(const std::vector<std::vector<int>>& topics);

inline double topic_quality(double tc, double td) { return tc * td; }

// Mean KL divergence (natural log) from each Phi column to the corpus word
// distribution.
double topic_specificity(const Eigen::MatrixXd& phi, const Eigen::VectorXd& corpus_dist);

// Term-frequency distribution over all corpus tokens, floored at 1e-12.
Eigen::VectorXd corpus_word_distribution(const Corpus& corpus);

struct ClusterResult {
  std::vector<int> assignments;
  Eigen::MatrixXd centroids;  // n_clusters x dims
  double inertia = 0.0;
};

// Lloyd's algorithm with k-means++ seeding; best inertia over `restarts`
// runs; empty clusters are repaired with the point farthest from its
// centroid.
ClusterResult kmeans(const Eigen::MatrixXd& points, int n_clusters, std::uint64_t seed,
                     int restarts = 10, int max_iters = 300, double tol = 1e-6);

double purity(const std::vector<int>& assignments, const std::vector<int>& labels);

// I(C;L) / ((H(C) + H(L)) / 2), natural log; 1.0 when both partitions are a
// single degenerate group.
double nmi(const std::vector<int>& assignments, const std::vector<int>& labels);

struct MetricsReport {
  std::vector<std::pair<int, double>> tc_by_proportion;  // (percent, TC)
  double td = 0.0;
  double tq = 0.0;
  double ts = 0.0;
  std::optional<double> km_purity;
  std::optional<double> km_nmi;
  std::vector<std::pair<std::string, std::string>> config;  // echoed settings

  std::string to_text() const;  // key=value lines, config as leading comments
  std::string to_json() const;
};

}  // namespace wete

#endif  // WETE_METRICS_HPP
