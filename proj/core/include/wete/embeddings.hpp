#ifndef WETE_EMBEDDINGS_HPP
#define WETE_EMBEDDINGS_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "wete/corpus.hpp"

namespace wete {

// V x H word-embedding table; row v embeds vocabulary term v.
struct EmbeddingMatrix {
  Eigen::MatrixXd values;            // V x H
  std::vector<std::uint8_t> trainable;  // per-row flag
  int dim = 0;

  int rows() const { return static_cast<int>(values.rows()); }
  void set_all_trainable(bool flag) {
    trainable.assign(static_cast<std::size_t>(values.rows()), flag ? 1 : 0);
  }
};

struct CoverageReport {
  int found = 0;
  std::vector<int> missing;  // vocabulary ids absent from the file
};

// Reads a text embedding file (one `token f_1 ... f_H` entry per line, H
// fixed by the first line). Rows for vocabulary terms found in the file are
// copied verbatim; the rest are drawn from N(0, oov_stddev^2). All rows come
// back non-trainable; the caller flips flags according to its training mode.
std::pair<EmbeddingMatrix, CoverageReport> load_text_embeddings(const std::string& path,
                                                                const Vocabulary& vocab,
                                                                double oov_stddev,
                                                                std::uint64_t seed);

// Writes the table back in the same text format with round-trip-exact floats.
void save_text_embeddings(const std::string& path, const EmbeddingMatrix& embeddings,
                          const Vocabulary& vocab);

// Fresh N(0, stddev^2) table with every row trainable.
EmbeddingMatrix random_init(int vocab_size, int dim, double stddev, std::uint64_t seed);

// Top-k rows by cosine similarity to the query row. The query itself ranks
// first; remaining ties break by ascending term id. Zero-norm non-query rows
// get similarity 0.
std::vector<std::pair<int, double>> nearest_words(const EmbeddingMatrix& embeddings,
                                                  int query_id, int k);

}  // namespace wete

#endif  // WETE_EMBEDDINGS_HPP
