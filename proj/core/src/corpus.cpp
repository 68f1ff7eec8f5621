#include "wete/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "wete/errors.hpp"
#include "wete/rng.hpp"

namespace wete {

int Vocabulary::add(const std::string& term) {
  auto it = index.find(term);
  if (it != index.end()) return it->second;
  const int id = static_cast<int>(terms.size());
  terms.push_back(term);
  index.emplace(term, id);
  return id;
}

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream iss(line);
  std::string tok;
  while (iss >> tok) tokens.push_back(std::move(tok));
  return tokens;
}

Document make_document(const std::vector<int>& ids, std::size_t source_line) {
  Document doc;
  doc.word_ids = ids;
  doc.source_line = source_line;
  std::map<int, int> counts;
  for (int id : ids) ++counts[id];
  doc.bow.assign(counts.begin(), counts.end());
  return doc;
}

}  // namespace

Corpus build_corpus(const std::vector<std::string>& lines, const CorpusOptions& options) {
  if (lines.empty()) throw config_error("build_corpus: no input lines");

  // Pass 1: drop stopword tokens, count document frequency of the rest.
  std::vector<std::vector<std::string>> filtered(lines.size());
  std::unordered_map<std::string, int> doc_freq;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto tokens = tokenize(lines[i]);
    auto& kept = filtered[i];
    kept.reserve(tokens.size());
    std::unordered_set<std::string> seen;
    for (auto& tok : tokens) {
      if (options.stopwords.count(tok)) continue;
      if (seen.insert(tok).second) ++doc_freq[tok];
      kept.push_back(std::move(tok));
    }
  }

  // Pass 2: drop low-document-frequency terms, build the vocabulary in
  // first-occurrence order, then drop short documents.
  auto vocab = std::make_shared<Vocabulary>();
  Corpus corpus;
  corpus.original_line_count = lines.size();
  for (std::size_t i = 0; i < filtered.size(); ++i) {
    std::vector<int> ids;
    ids.reserve(filtered[i].size());
    for (const auto& tok : filtered[i]) {
      if (doc_freq[tok] < options.min_term_doc_freq) continue;
      ids.push_back(vocab->add(tok));
    }
    if (static_cast<int>(ids.size()) < std::max(1, options.min_doc_len)) continue;
    corpus.documents.push_back(make_document(ids, i));
  }
  if (corpus.documents.empty()) {
    throw config_error("build_corpus: every document was filtered away");
  }
  corpus.vocab = std::move(vocab);
  return corpus;
}

Corpus attach_labels(const Corpus& corpus, const std::vector<std::string>& labels) {
  if (labels.size() != corpus.original_line_count) {
    throw config_error("attach_labels: got " + std::to_string(labels.size()) +
                       " labels for " + std::to_string(corpus.original_line_count) +
                       " input lines");
  }
  Corpus out = corpus;
  std::unordered_map<std::string, int> name_to_id;
  out.label_names.clear();
  for (auto& doc : out.documents) {
    const std::string& name = labels[doc.source_line];
    auto it = name_to_id.find(name);
    if (it == name_to_id.end()) {
      it = name_to_id.emplace(name, static_cast<int>(out.label_names.size())).first;
      out.label_names.push_back(name);
    }
    doc.label = it->second;
  }
  return out;
}

std::pair<Corpus, Corpus> split_corpus(const Corpus& corpus, double test_fraction,
                                       std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw config_error("split_corpus: test_fraction must be in (0, 1)");
  }
  const std::size_t total = corpus.documents.size();
  const std::size_t n_test =
      static_cast<std::size_t>(std::floor(static_cast<double>(total) * test_fraction + 0.5));
  if (n_test == 0 || n_test >= total) {
    throw config_error("split_corpus: split would empty one side (test count " +
                       std::to_string(n_test) + " of " + std::to_string(total) + ")");
  }

  std::vector<std::size_t> order(total);
  for (std::size_t i = 0; i < total; ++i) order[i] = i;
  Rng rng = make_rng(derive_seed(seed, SeedStream::split));
  shuffle_indices(order, rng);

  std::vector<bool> is_test(total, false);
  for (std::size_t i = 0; i < n_test; ++i) is_test[order[i]] = true;

  Corpus train, test;
  train.vocab = test.vocab = corpus.vocab;
  train.label_names = test.label_names = corpus.label_names;
  train.original_line_count = test.original_line_count = corpus.original_line_count;
  for (std::size_t i = 0; i < total; ++i) {
    (is_test[i] ? test : train).documents.push_back(corpus.documents[i]);
  }
  return {std::move(train), std::move(test)};
}

Corpus load_corpus_with_vocab(const std::vector<std::string>& lines,
                              std::shared_ptr<const Vocabulary> vocab, int min_doc_len) {
  Corpus corpus;
  corpus.vocab = vocab;
  corpus.original_line_count = lines.size();
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::vector<int> ids;
    for (const auto& tok : tokenize(lines[i])) {
      const int id = vocab->id_of(tok);
      if (id < 0) {
        throw io_error("corpus/vocabulary mismatch: term '" + tok +
                       "' (line " + std::to_string(i + 1) + ") is not in the vocabulary");
      }
      ids.push_back(id);
    }
    if (static_cast<int>(ids.size()) < std::max(1, min_doc_len)) continue;
    corpus.documents.push_back(make_document(ids, i));
  }
  if (corpus.documents.empty()) {
    throw io_error("load_corpus_with_vocab: no usable documents");
  }
  return corpus;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open '" + path + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::unordered_set<std::string> read_stopwords(const std::string& path) {
  std::unordered_set<std::string> words;
  for (const auto& line : read_lines(path)) {
    std::istringstream iss(line);
    std::string tok;
    if (iss >> tok) words.insert(tok);
  }
  return words;
}

}  // namespace wete
