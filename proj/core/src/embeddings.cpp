#include "wete/embeddings.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "wete/errors.hpp"
#include "wete/rng.hpp"

namespace wete {

std::pair<EmbeddingMatrix, CoverageReport> load_text_embeddings(const std::string& path,
                                                                const Vocabulary& vocab,
                                                                double oov_stddev,
                                                                std::uint64_t seed) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open embedding file '" + path + "'");

  const int v_count = vocab.size();
  int dim = -1;
  Eigen::MatrixXd values;
  std::vector<std::uint8_t> found(static_cast<std::size_t>(v_count), 0);

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream iss(line);
    std::string token;
    if (!(iss >> token)) continue;

    std::vector<double> coords;
    std::string field;
    while (iss >> field) {
      char* end = nullptr;
      const double x = std::strtod(field.c_str(), &end);
      if (end == field.c_str() || *end != '\0') {
        throw io_error("embedding file '" + path + "' line " + std::to_string(line_no) +
                       ": cannot parse float '" + field + "'");
      }
      coords.push_back(x);
    }
    if (coords.empty()) {
      throw io_error("embedding file '" + path + "' line " + std::to_string(line_no) +
                     ": entry has no coordinates");
    }
    if (dim < 0) {
      dim = static_cast<int>(coords.size());
      values.setZero(v_count, dim);
    } else if (static_cast<int>(coords.size()) != dim) {
      throw io_error("embedding file '" + path + "' line " + std::to_string(line_no) +
                     ": dimension " + std::to_string(coords.size()) + " != " +
                     std::to_string(dim));
    }
    const int id = vocab.id_of(token);
    if (id < 0 || found[static_cast<std::size_t>(id)]) continue;  // first entry wins
    for (int j = 0; j < dim; ++j) values(id, j) = coords[static_cast<std::size_t>(j)];
    found[static_cast<std::size_t>(id)] = 1;
  }
  if (dim < 0) throw io_error("embedding file '" + path + "' has no usable lines");

  CoverageReport report;
  Rng rng = make_rng(derive_seed(seed, SeedStream::oov));
  for (int v = 0; v < v_count; ++v) {
    if (found[static_cast<std::size_t>(v)]) {
      ++report.found;
    } else {
      report.missing.push_back(v);
      fill_gaussian(values.row(v), oov_stddev, rng);
    }
  }

  EmbeddingMatrix out;
  out.values = std::move(values);
  out.dim = dim;
  out.set_all_trainable(false);
  return {std::move(out), std::move(report)};
}

void save_text_embeddings(const std::string& path, const EmbeddingMatrix& embeddings,
                          const Vocabulary& vocab) {
  if (embeddings.rows() != vocab.size()) {
    throw io_error("save_text_embeddings: row count != vocabulary size");
  }
  std::ofstream out(path);
  if (!out) throw io_error("cannot write embedding file '" + path + "'");
  char buf[40];
  for (int v = 0; v < vocab.size(); ++v) {
    out << vocab.terms[static_cast<std::size_t>(v)];
    for (int j = 0; j < embeddings.dim; ++j) {
      std::snprintf(buf, sizeof(buf), " %.17g", embeddings.values(v, j));
      out << buf;
    }
    out << '\n';
  }
}

EmbeddingMatrix random_init(int vocab_size, int dim, double stddev, std::uint64_t seed) {
  if (vocab_size < 1 || dim < 1) throw config_error("random_init: V and H must be >= 1");
  if (!(stddev > 0.0)) throw config_error("random_init: stddev must be positive");
  EmbeddingMatrix out;
  out.values.resize(vocab_size, dim);
  Rng rng = make_rng(derive_seed(seed, SeedStream::word_init));
  fill_gaussian(out.values, stddev, rng);
  out.dim = dim;
  out.set_all_trainable(true);
  return out;
}

std::vector<std::pair<int, double>> nearest_words(const EmbeddingMatrix& embeddings,
                                                  int query_id, int k) {
  const int v_count = embeddings.rows();
  if (query_id < 0 || query_id >= v_count) {
    throw config_error("nearest_words: query id out of range");
  }
  if (k < 1 || k > v_count) throw config_error("nearest_words: k out of range");

  const Eigen::VectorXd q = embeddings.values.row(query_id);
  const double qn = q.norm();
  if (qn == 0.0) throw config_error("nearest_words: query row has zero norm");

  std::vector<std::pair<int, double>> scored;
  scored.reserve(static_cast<std::size_t>(v_count));
  for (int v = 0; v < v_count; ++v) {
    if (v == query_id) continue;
    const double n = embeddings.values.row(v).norm();
    const double sim = n == 0.0 ? 0.0 : embeddings.values.row(v).dot(q) / (n * qn);
    scored.emplace_back(v, sim);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  std::vector<std::pair<int, double>> out;
  out.reserve(static_cast<std::size_t>(k));
  out.emplace_back(query_id, 1.0);
  for (int i = 0; i + 1 < k; ++i) out.push_back(scored[static_cast<std::size_t>(i)]);
  return out;
}

}  // namespace wete
