#ifndef WETE_CONFIG_HPP
#define WETE_CONFIG_HPP

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace wete {

// Every tunable of the pipeline. Values resolve as
// flag > config file > built-in default.
struct RunConfig {
  std::string mode = "fixed";
  int topics = 100;
  int embed_dim = 100;
  double epsilon = 1.0;
  int batch_size = 200;
  int epochs = 50;
  double lr = 0.001;
  std::uint64_t seed = 1;
  int min_doc_len = 1;
  int min_term_doc_freq = 1;
  std::string input_transform = "log1p";
  int n_clusters = 20;
  int kmeans_restarts = 10;
  std::string corpus;
  std::string labels;
  std::string embeddings;
  std::string checkpoint;
  std::string output_dir;
  std::string stopwords;
  std::string ref_corpus;  // co-occurrence reference for eval; defaults to `corpus`

  // Applies one `key = value` setting; unknown keys raise config_error.
  void set(const std::string& key, const std::string& value);

  std::vector<std::pair<std::string, std::string>> items() const;
  void echo(std::ostream& out) const;
};

// Parses a UTF-8 `key = value` file with '#' comments into `config`.
void apply_config_file(RunConfig& config, const std::string& path);

}  // namespace wete

#endif  // WETE_CONFIG_HPP
