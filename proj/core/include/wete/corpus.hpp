#ifndef WETE_CORPUS_HPP
#define WETE_CORPUS_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace wete {

// Bijection between terms and ids 0..V-1.
struct Vocabulary {
  std::vector<std::string> terms;
  std::unordered_map<std::string, int> index;

  int size() const { return static_cast<int>(terms.size()); }

  // Returns -1 when absent.
  int id_of(const std::string& term) const {
    auto it = index.find(term);
    return it == index.end() ? -1 : it->second;
  }

  int add(const std::string& term);
};

// One tokenized document. `bow` is sorted by term id and aggregates the
// counts of `word_ids`; `label` is -1 when unlabeled. `source_line` is the
// 0-based line of the original input this document came from, kept so labels
// can be attached after filtering drops lines.
struct Document {
  std::vector<int> word_ids;
  std::vector<std::pair<int, int>> bow;
  int label = -1;
  std::size_t source_line = 0;

  int length() const { return static_cast<int>(word_ids.size()); }
};

struct Corpus {
  std::shared_ptr<const Vocabulary> vocab;
  std::vector<Document> documents;
  std::vector<std::string> label_names;
  std::size_t original_line_count = 0;

  int vocab_size() const { return vocab ? vocab->size() : 0; }
  bool has_labels() const { return !label_names.empty(); }
};

struct CorpusOptions {
  int min_doc_len = 1;
  int min_term_doc_freq = 1;
  std::unordered_set<std::string> stopwords;
};

// Filters apply in order: stopwords, then document-frequency threshold, then
// document length. The vocabulary holds every term surviving the first two
// filters, in first-occurrence order.
Corpus build_corpus(const std::vector<std::string>& lines, const CorpusOptions& options = {});

// `labels` must be aligned with the original input lines, including lines
// whose documents were dropped; dropped labels are discarded.
Corpus attach_labels(const Corpus& corpus, const std::vector<std::string>& labels);

// Deterministic disjoint partition; test size is round(J * test_fraction),
// half up. Both sides share the vocabulary object.
std::pair<Corpus, Corpus> split_corpus(const Corpus& corpus, double test_fraction,
                                       std::uint64_t seed);

// Tokenizes lines against a fixed vocabulary; any unknown token raises
// io_error naming it. Documents shorter than min_doc_len are dropped.
Corpus load_corpus_with_vocab(const std::vector<std::string>& lines,
                              std::shared_ptr<const Vocabulary> vocab, int min_doc_len = 1);

std::vector<std::string> read_lines(const std::string& path);
std::unordered_set<std::string> read_stopwords(const std::string& path);

}  // namespace wete

#endif  // WETE_CORPUS_HPP
