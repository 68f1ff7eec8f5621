#include "wete/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "wete/rng.hpp"

namespace wete {

std::uint64_t CooccurrenceStats::pair_key(int a, int b) {
  const auto lo = static_cast<std::uint64_t>(std::min(a, b));
  const auto hi = static_cast<std::uint64_t>(std::max(a, b));
  return (hi << 32) | lo;
}

int CooccurrenceStats::pair_count(int a, int b) const {
  const auto it = pair_doc_freq.find(pair_key(a, b));
  return it == pair_doc_freq.end() ? 0 : it->second;
}

CooccurrenceStats count_cooccurrence(const Corpus& corpus,
                                     const std::unordered_set<int>& needed_terms) {
  CooccurrenceStats stats;
  stats.doc_count = static_cast<int>(corpus.documents.size());
  stats.doc_freq.assign(static_cast<std::size_t>(corpus.vocab_size()), 0);
  for (const Document& doc : corpus.documents) {
    std::vector<int> present;
    present.reserve(doc.bow.size());
    for (const auto& [id, count] : doc.bow) {
      ++stats.doc_freq[static_cast<std::size_t>(id)];
      if (needed_terms.empty() || needed_terms.count(id)) present.push_back(id);
    }
    for (std::size_t i = 0; i < present.size(); ++i) {
      for (std::size_t j = i + 1; j < present.size(); ++j) {
        ++stats.pair_doc_freq[CooccurrenceStats::pair_key(present[i], present[j])];
      }
    }
  }
  return stats;
}

double npmi_pair(const CooccurrenceStats& stats, int a, int b, std::optional<double> gamma) {
  const double d = static_cast<double>(stats.doc_count);
  const double pa = stats.doc_freq[static_cast<std::size_t>(a)] / d;
  const double pb = stats.doc_freq[static_cast<std::size_t>(b)] / d;
  if (!(pa > 0.0) || !(pb > 0.0)) {
    throw std::invalid_argument("npmi_pair: both terms must appear in at least one document");
  }
  const double g = gamma.value_or(1.0 / d);
  const double joint = stats.pair_count(a, b) / d + g;
  if (joint >= 1.0) return 0.0;
  const double value = std::log(joint / (pa * pb)) / -std::log(joint);
  return std::clamp(value, -1.0, 1.0);
}

double topic_npmi(const std::vector<int>& topic_words, const CooccurrenceStats& stats) {
  if (topic_words.empty()) throw std::invalid_argument("topic_npmi: empty topic");
  double sum = 0.0;
  int pairs = 0;
  for (std::size_t i = 0; i < topic_words.size(); ++i) {
    for (std::size_t j = i + 1; j < topic_words.size(); ++j) {
      sum += npmi_pair(stats, topic_words[i], topic_words[j]);
      ++pairs;
    }
  }
  return pairs == 0 ? 0.0 : sum / pairs;
}

double topic_coherence(const std::vector<std::vector<int>>& topics,
                       const CooccurrenceStats& stats) {
  if (topics.empty()) throw std::invalid_argument("topic_coherence: no topics");
  double sum = 0.0;
  for (const auto& topic : topics) sum += topic_npmi(topic, stats);
  return sum / static_cast<double>(topics.size());
}

std::vector<int> select_topics_by_npmi(const std::vector<std::vector<int>>& topics,
                                       const CooccurrenceStats& stats, double proportion) {
  if (!(proportion > 0.0 && proportion <= 1.0)) {
    throw std::invalid_argument("select_topics_by_npmi: proportion must be in (0, 1]");
  }
  const auto k = static_cast<std::size_t>(topics.size());
  const auto take = static_cast<std::size_t>(
      std::ceil(proportion * static_cast<double>(k) - 1e-12));
  std::vector<int> ids(k);
  std::iota(ids.begin(), ids.end(), 0);
  std::vector<double> scores(k);
  for (std::size_t i = 0; i < k; ++i) scores[i] = topic_npmi(topics[i], stats);
  std::sort(ids.begin(), ids.end(), [&](int a, int b) {
    if (scores[static_cast<std::size_t>(a)] != scores[static_cast<std::size_t>(b)]) {
      return scores[static_cast<std::size_t>(a)] > scores[static_cast<std::size_t>(b)];
    }
    return a < b;
  });
  ids.resize(std::max<std::size_t>(1, take));
  std::sort(ids.begin(), ids.end());
  return ids;
}

double topic_diversity(const std::vector<std::vector<int>>& topics) {
  std::size_t listed = 0;
  std::set<int> unique;
  for (const auto& topic : topics) {
    listed += topic.size();
    unique.insert(topic.begin(), topic.end());
  }
  if (listed == 0) throw std::invalid_argument("topic_diversity: no words listed");
  return static_cast<double>(unique.size()) / static_cast<double>(listed);
}

double topic_specificity(const Eigen::MatrixXd& phi, const Eigen::VectorXd& corpus_dist) {
  if (phi.rows() != corpus_dist.size()) {
    throw std::invalid_argument("topic_specificity: dimension mismatch");
  }
  double total = 0.0;
  for (Eigen::Index k = 0; k < phi.cols(); ++k) {
    double kl = 0.0;
    for (Eigen::Index v = 0; v < phi.rows(); ++v) {
      const double p = phi(v, k);
      if (p > 0.0) kl += p * std::log(p / corpus_dist[v]);
    }
    total += kl;
  }
  return total / static_cast<double>(phi.cols());
}

Eigen::VectorXd corpus_word_distribution(const Corpus& corpus) {
  Eigen::VectorXd freq = Eigen::VectorXd::Zero(corpus.vocab_size());
  for (const Document& doc : corpus.documents) {
    for (const auto& [id, count] : doc.bow) freq[id] += static_cast<double>(count);
  }
  freq /= freq.sum();
  freq = freq.cwiseMax(1e-12);
  return freq / freq.sum();
}

namespace {

// Assigns every point to its nearest centroid (lowest index wins ties) and
// returns the total squared distance.
double assign_points(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centroids,
                     std::vector<int>& assignments) {
  double inertia = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
      const double d = (points.row(i) - centroids.row(c)).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(c);
      }
    }
    assignments[static_cast<std::size_t>(i)] = best;
    inertia += best_d;
  }
  return inertia;
}

ClusterResult lloyd_once(const Eigen::MatrixXd& points, int n_clusters, Rng& rng,
                         int max_iters, double tol) {
  const Eigen::Index n = points.rows();
  const Eigen::Index dims = points.cols();

  // k-means++ seeding
  Eigen::MatrixXd centroids(n_clusters, dims);
  std::vector<double> dist2(static_cast<std::size_t>(n),
                            std::numeric_limits<double>::infinity());
  centroids.row(0) = points.row(static_cast<Eigen::Index>(uniform_index(rng, n)));
  for (int c = 1; c < n_clusters; ++c) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      dist2[static_cast<std::size_t>(i)] =
          std::min(dist2[static_cast<std::size_t>(i)],
                   (points.row(i) - centroids.row(c - 1)).squaredNorm());
      total += dist2[static_cast<std::size_t>(i)];
    }
    Eigen::Index pick = n - 1;
    if (total > 0.0) {
      const double target = uniform01(rng) * total;
      double run = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        run += dist2[static_cast<std::size_t>(i)];
        if (run >= target) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<Eigen::Index>(uniform_index(rng, n));
    }
    centroids.row(c) = points.row(pick);
  }

  ClusterResult result;
  result.assignments.assign(static_cast<std::size_t>(n), 0);
  double prev_inertia = std::numeric_limits<double>::infinity();

  for (int iter = 0; iter < max_iters; ++iter) {
    double inertia = assign_points(points, centroids, result.assignments);

    // repair empty clusters with the farthest point from its centroid
    std::vector<int> sizes(static_cast<std::size_t>(n_clusters), 0);
    for (int a : result.assignments) ++sizes[static_cast<std::size_t>(a)];
    for (int c = 0; c < n_clusters; ++c) {
      if (sizes[static_cast<std::size_t>(c)] > 0) continue;
      Eigen::Index far = 0;
      double far_d = -1.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const int a = result.assignments[static_cast<std::size_t>(i)];
        if (sizes[static_cast<std::size_t>(a)] <= 1) continue;
        const double d = (points.row(i) - centroids.row(a)).squaredNorm();
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      --sizes[static_cast<std::size_t>(result.assignments[static_cast<std::size_t>(far)])];
      result.assignments[static_cast<std::size_t>(far)] = c;
      ++sizes[static_cast<std::size_t>(c)];
      centroids.row(c) = points.row(far);
    }

    // update step
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(n_clusters, dims);
    std::vector<int> counts(static_cast<std::size_t>(n_clusters), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const int a = result.assignments[static_cast<std::size_t>(i)];
      sums.row(a) += points.row(i);
      ++counts[static_cast<std::size_t>(a)];
    }
    for (int c = 0; c < n_clusters; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        centroids.row(c) = sums.row(c) / counts[static_cast<std::size_t>(c)];
      }
    }

    if (std::abs(prev_inertia - inertia) < tol) break;
    prev_inertia = inertia;
  }

  // settle assignments against the final centroids
  result.inertia = assign_points(points, centroids, result.assignments);
  result.centroids = std::move(centroids);
  return result;
}

}  // namespace

ClusterResult kmeans(const Eigen::MatrixXd& points, int n_clusters, std::uint64_t seed,
                     int restarts, int max_iters, double tol) {
  if (n_clusters < 1) throw std::invalid_argument("kmeans: n_clusters must be >= 1");
  if (points.rows() < n_clusters) {
    throw std::invalid_argument("kmeans: fewer points than clusters");
  }
  Rng rng = make_rng(derive_seed(seed, SeedStream::kmeans));
  ClusterResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(1, restarts); ++r) {
    ClusterResult run = lloyd_once(points, n_clusters, rng, max_iters, tol);
    if (run.inertia < best.inertia) best = std::move(run);
  }
  return best;
}

double purity(const std::vector<int>& assignments, const std::vector<int>& labels) {
  if (assignments.size() != labels.size() || assignments.empty()) {
    throw std::invalid_argument("purity: assignments and labels must align");
  }
  std::unordered_map<int, std::unordered_map<int, int>> table;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    ++table[assignments[i]][labels[i]];
  }
  long correct = 0;
  for (const auto& [cluster, counts] : table) {
    int best = 0;
    for (const auto& [label, count] : counts) best = std::max(best, count);
    correct += best;
  }
  return static_cast<double>(correct) / static_cast<double>(assignments.size());
}

double nmi(const std::vector<int>& assignments, const std::vector<int>& labels) {
  if (assignments.size() != labels.size() || assignments.empty()) {
    throw std::invalid_argument("nmi: assignments and labels must align");
  }
  const double total = static_cast<double>(assignments.size());
  std::unordered_map<int, int> cluster_sizes, class_sizes;
  std::unordered_map<std::uint64_t, int> joint;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    ++cluster_sizes[assignments[i]];
    ++class_sizes[labels[i]];
    ++joint[(static_cast<std::uint64_t>(static_cast<std::uint32_t>(assignments[i])) << 32) |
            static_cast<std::uint32_t>(labels[i])];
  }

  auto entropy = [&](const std::unordered_map<int, int>& sizes) {
    double h = 0.0;
    for (const auto& [key, count] : sizes) {
      const double p = count / total;
      h -= p * std::log(p);
    }
    return h;
  };
  const double h_clusters = entropy(cluster_sizes);
  const double h_classes = entropy(class_sizes);
  if (h_clusters + h_classes == 0.0) return 1.0;  // both partitions degenerate

  double mi = 0.0;
  for (const auto& [key, count] : joint) {
    const int cluster = static_cast<int>(key >> 32);
    const int label = static_cast<int>(key & 0xffffffffULL);
    const double p = count / total;
    mi += p * std::log(p * total * total /
                       (static_cast<double>(cluster_sizes[cluster]) *
                        static_cast<double>(class_sizes[label])));
  }
  return mi / ((h_clusters + h_classes) / 2.0);
}

namespace {

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

}  // namespace

std::string MetricsReport::to_text() const {
  std::string out;
  for (const auto& [key, value] : config) {
    out += "# " + key + " = " + value + "\n";
  }
  for (const auto& [percent, tc] : tc_by_proportion) {
    out += "tc_p" + std::to_string(percent) + "=" + format_number(tc) + "\n";
  }
  out += "td=" + format_number(td) + "\n";
  out += "tq=" + format_number(tq) + "\n";
  out += "ts=" + format_number(ts) + "\n";
  if (km_purity) out += "km_purity=" + format_number(*km_purity) + "\n";
  if (km_nmi) out += "km_nmi=" + format_number(*km_nmi) + "\n";
  return out;
}

std::string MetricsReport::to_json() const {
  nlohmann::ordered_json j;
  for (const auto& [percent, tc] : tc_by_proportion) {
    j["tc_p" + std::to_string(percent)] = tc;
  }
  j["td"] = td;
  j["tq"] = tq;
  j["ts"] = ts;
  if (km_purity) j["km_purity"] = *km_purity;
  if (km_nmi) j["km_nmi"] = *km_nmi;
  nlohmann::ordered_json cfg;
  for (const auto& [key, value] : config) cfg[key] = value;
  j["config"] = cfg;
  return j.dump(2) + "\n";
}

}  // namespace wete
