#include "wete/config.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "wete/errors.hpp"

namespace wete {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t");
  return s.substr(begin, end - begin + 1);
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const int x = std::stoi(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return x;
  } catch (const std::exception&) {
    throw config_error("config key '" + key + "': expected an integer, got '" + value + "'");
  }
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return x;
  } catch (const std::exception&) {
    throw config_error("config key '" + key + "': expected a number, got '" + value + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const unsigned long long x = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return static_cast<std::uint64_t>(x);
  } catch (const std::exception&) {
    throw config_error("config key '" + key + "': expected an unsigned integer, got '" +
                       value + "'");
  }
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  if (key == "mode") mode = value;
  else if (key == "topics") topics = parse_int(key, value);
  else if (key == "embed_dim") embed_dim = parse_int(key, value);
  else if (key == "epsilon") epsilon = parse_double(key, value);
  else if (key == "batch_size") batch_size = parse_int(key, value);
  else if (key == "epochs") epochs = parse_int(key, value);
  else if (key == "lr") lr = parse_double(key, value);
  else if (key == "seed") seed = parse_u64(key, value);
  else if (key == "min_doc_len") min_doc_len = parse_int(key, value);
  else if (key == "min_term_doc_freq") min_term_doc_freq = parse_int(key, value);
  else if (key == "input_transform") input_transform = value;
  else if (key == "n_clusters") n_clusters = parse_int(key, value);
  else if (key == "kmeans_restarts") kmeans_restarts = parse_int(key, value);
  else if (key == "corpus") corpus = value;
  else if (key == "labels") labels = value;
  else if (key == "embeddings") embeddings = value;
  else if (key == "checkpoint") checkpoint = value;
  else if (key == "output_dir") output_dir = value;
  else if (key == "stopwords") stopwords = value;
  else if (key == "ref_corpus") ref_corpus = value;
  else throw config_error("unknown config key '" + key + "'");
}

std::vector<std::pair<std::string, std::string>> RunConfig::items() const {
  return {
      {"mode", mode},
      {"topics", std::to_string(topics)},
      {"embed_dim", std::to_string(embed_dim)},
      {"epsilon", format_double(epsilon)},
      {"batch_size", std::to_string(batch_size)},
      {"epochs", std::to_string(epochs)},
      {"lr", format_double(lr)},
      {"seed", std::to_string(seed)},
      {"min_doc_len", std::to_string(min_doc_len)},
      {"min_term_doc_freq", std::to_string(min_term_doc_freq)},
      {"input_transform", input_transform},
      {"n_clusters", std::to_string(n_clusters)},
      {"kmeans_restarts", std::to_string(kmeans_restarts)},
      {"corpus", corpus},
      {"labels", labels},
      {"embeddings", embeddings},
      {"checkpoint", checkpoint},
      {"output_dir", output_dir},
      {"stopwords", stopwords},
      {"ref_corpus", ref_corpus},
  };
}

void RunConfig::echo(std::ostream& out) const {
  for (const auto& [key, value] : items()) {
    out << key << " = " << value << "\n";
  }
}

void apply_config_file(RunConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open config file '" + path + "'");
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw config_error("config file '" + path + "' line " + std::to_string(line_no) +
                         ": expected 'key = value'");
    }
    config.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

}  // namespace wete
