#include "wete/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <unordered_set>

#include "wete/checkpoint.hpp"
#include "wete/corpus.hpp"
#include "wete/embeddings.hpp"
#include "wete/errors.hpp"
#include "wete/grad.hpp"
#include "wete/metrics.hpp"
#include "wete/model.hpp"

namespace fs = std::filesystem;

namespace wete {

namespace {

constexpr double kInitStddev = 0.02;

std::string require_path(const std::string& value, const std::string& key) {
  if (value.empty()) throw config_error("config key '" + key + "' is required here");
  return value;
}

fs::path ensure_output_dir(const RunConfig& config) {
  fs::path dir = config.output_dir.empty() ? fs::path(".") : fs::path(config.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec && !fs::exists(dir)) {
    throw io_error("cannot create output directory '" + dir.string() + "': " + ec.message());
  }
  return dir;
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

Corpus load_training_corpus(const RunConfig& config) {
  CorpusOptions options;
  options.min_doc_len = config.min_doc_len;
  options.min_term_doc_freq = config.min_term_doc_freq;
  if (!config.stopwords.empty()) options.stopwords = read_stopwords(config.stopwords);
  return build_corpus(read_lines(require_path(config.corpus, "corpus")), options);
}

WeTeModel build_model(const RunConfig& config, const Corpus& corpus, std::ostream& out) {
  const TrainMode mode = parse_train_mode(config.mode);

  EmbeddingMatrix embeddings;
  if (mode == TrainMode::scratch) {
    embeddings = random_init(corpus.vocab_size(), config.embed_dim, kInitStddev, config.seed);
  } else {
    if (config.embeddings.empty()) {
      throw config_error("mode '" + config.mode + "' requires an embeddings file");
    }
    auto [loaded, coverage] =
        load_text_embeddings(config.embeddings, *corpus.vocab, kInitStddev, config.seed);
    out << "embeddings: " << coverage.found << "/" << corpus.vocab_size()
        << " vocabulary terms found in '" << config.embeddings << "'\n";
    embeddings = std::move(loaded);
  }

  ModelConfig mc;
  mc.topics = config.topics;
  mc.embed_dim = embeddings.dim;  // pretrained file wins over the configured value
  mc.epsilon = config.epsilon;
  mc.mode = mode;
  mc.input_transform = parse_input_transform(config.input_transform);
  mc.seed = config.seed;
  return WeTeModel::init(mc, corpus.vocab, std::move(embeddings));
}

}  // namespace

void cmd_train(const RunConfig& config, std::ostream& out) {
  out << "effective config:\n";
  config.echo(out);
  require_path(config.checkpoint, "checkpoint");

  const Corpus corpus = load_training_corpus(config);
  out << "corpus: " << corpus.documents.size() << " documents, V=" << corpus.vocab_size()
      << "\n";

  WeTeModel model = build_model(config, corpus, out);

  const fs::path out_dir = ensure_output_dir(config);
  std::ofstream log(out_dir / "train_log.csv", std::ios::app);
  if (!log) throw io_error("cannot open training log in '" + out_dir.string() + "'");

  TrainConfig tc;
  tc.batch_size = config.batch_size;
  tc.epochs = config.epochs;
  tc.lr = config.lr;
  tc.epsilon = config.epsilon;
  tc.seed = config.seed;

  const TrainResult result = train(corpus, model, tc, [&](const WeTeModel&, const EpochStats& s) {
    log << s.epoch << ',' << format_double(s.mean_loss) << ',' << format_double(s.mean_ct)
        << ',' << format_double(s.mean_nll) << ',' << format_double(s.seconds) << '\n';
    log.flush();
    out << "epoch " << s.epoch << ": loss=" << format_double(s.mean_loss)
        << " ct=" << format_double(s.mean_ct) << " nll=" << format_double(s.mean_nll) << "\n";
  });

  save_checkpoint(config.checkpoint, model);
  if (result.diverged) {
    throw divergence_error("training diverged (" + result.divergence_reason +
                           "); last good parameters kept in '" + config.checkpoint + "'");
  }
  out << "checkpoint written to '" << config.checkpoint << "'\n";
}

void cmd_eval(const RunConfig& config, std::ostream& out) {
  out << "effective config:\n";
  config.echo(out);

  const WeTeModel loaded = load_checkpoint(require_path(config.checkpoint, "checkpoint"));
  WeTeModel model = loaded;
  model.config.input_transform = parse_input_transform(config.input_transform);

  const auto lines = read_lines(require_path(config.corpus, "corpus"));
  Corpus eval_corpus = load_corpus_with_vocab(lines, model.vocab, config.min_doc_len);
  if (!config.labels.empty()) {
    eval_corpus = attach_labels(eval_corpus, read_lines(config.labels));
  }

  const Corpus ref_corpus =
      config.ref_corpus.empty()
          ? eval_corpus
          : load_corpus_with_vocab(read_lines(config.ref_corpus), model.vocab, 1);

  const Eigen::MatrixXd phi = topic_word_dist(model.word_embeddings, model.topic_embeddings);
  const int v_count = model.vocab_size();
  const int k_count = model.config.topics;

  const int coherence_words = std::min(10, v_count);
  const int diversity_words = std::min(25, v_count);
  std::vector<std::vector<int>> coherence_topics(static_cast<std::size_t>(k_count));
  std::vector<std::vector<int>> diversity_topics(static_cast<std::size_t>(k_count));
  std::unordered_set<int> needed;
  for (int k = 0; k < k_count; ++k) {
    coherence_topics[static_cast<std::size_t>(k)] = top_words(phi, k, coherence_words);
    diversity_topics[static_cast<std::size_t>(k)] = top_words(phi, k, diversity_words);
    needed.insert(coherence_topics[static_cast<std::size_t>(k)].begin(),
                  coherence_topics[static_cast<std::size_t>(k)].end());
  }
  const CooccurrenceStats stats = count_cooccurrence(ref_corpus, needed);

  MetricsReport report;
  for (int percent = 10; percent <= 100; percent += 10) {
    const auto selected =
        select_topics_by_npmi(coherence_topics, stats, percent / 100.0);
    std::vector<std::vector<int>> subset;
    subset.reserve(selected.size());
    for (int id : selected) subset.push_back(coherence_topics[static_cast<std::size_t>(id)]);
    report.tc_by_proportion.emplace_back(percent, topic_coherence(subset, stats));
  }
  report.td = topic_diversity(diversity_topics);
  report.tq = topic_quality(report.tc_by_proportion.back().second, report.td);
  report.ts = topic_specificity(phi, corpus_word_distribution(ref_corpus));

  if (eval_corpus.has_labels()) {
    Eigen::MatrixXd theta(static_cast<Eigen::Index>(eval_corpus.documents.size()), k_count);
    std::vector<int> labels;
    labels.reserve(eval_corpus.documents.size());
    for (std::size_t j = 0; j < eval_corpus.documents.size(); ++j) {
      theta.row(static_cast<Eigen::Index>(j)) =
          model.infer_theta(eval_corpus.documents[j]).transpose();
      labels.push_back(eval_corpus.documents[j].label);
    }
    const ClusterResult clusters =
        kmeans(theta, config.n_clusters, config.seed, config.kmeans_restarts);
    report.km_purity = purity(clusters.assignments, labels);
    report.km_nmi = nmi(clusters.assignments, labels);
  }

  report.config = config.items();
  const fs::path out_dir = ensure_output_dir(config);
  {
    std::ofstream txt(out_dir / "metrics.txt", std::ios::trunc);
    if (!txt) throw io_error("cannot write metrics.txt in '" + out_dir.string() + "'");
    txt << report.to_text();
  }
  {
    std::ofstream json(out_dir / "metrics.json", std::ios::trunc);
    if (!json) throw io_error("cannot write metrics.json in '" + out_dir.string() + "'");
    json << report.to_json();
  }
  out << report.to_text();
}

void cmd_topics(const RunConfig& config, int n_words, std::ostream& out) {
  const WeTeModel model = load_checkpoint(require_path(config.checkpoint, "checkpoint"));
  if (n_words < 1 || n_words > model.vocab_size()) {
    throw config_error("n_words must be in [1, V=" + std::to_string(model.vocab_size()) + "]");
  }
  const Eigen::MatrixXd phi = topic_word_dist(model.word_embeddings, model.topic_embeddings);
  for (int k = 0; k < model.config.topics; ++k) {
    out << k << ':';
    for (int id : top_words(phi, k, n_words)) {
      out << ' ' << model.vocab->terms[static_cast<std::size_t>(id)];
    }
    out << '\n';
  }
}

void cmd_infer(const RunConfig& config, std::ostream& out) {
  const WeTeModel loaded = load_checkpoint(require_path(config.checkpoint, "checkpoint"));
  WeTeModel model = loaded;
  model.config.input_transform = parse_input_transform(config.input_transform);

  const Corpus corpus = load_corpus_with_vocab(
      read_lines(require_path(config.corpus, "corpus")), model.vocab, config.min_doc_len);

  const fs::path out_dir = ensure_output_dir(config);
  const fs::path target = out_dir / "theta.csv";
  std::ofstream csv(target, std::ios::trunc);
  if (!csv) throw io_error("cannot write '" + target.string() + "'");
  for (const Document& doc : corpus.documents) {
    const Eigen::VectorXd theta = model.infer_theta(doc);
    for (Eigen::Index k = 0; k < theta.size(); ++k) {
      if (k > 0) csv << ',';
      csv << format_double(theta[k]);
    }
    csv << '\n';
  }
  out << corpus.documents.size() << " rows written to '" << target.string() << "'\n";
}

void cmd_nearest(const RunConfig& config, const std::string& query, int k, std::ostream& out) {
  const WeTeModel model = load_checkpoint(require_path(config.checkpoint, "checkpoint"));
  const int query_id = model.vocab->id_of(query);
  if (query_id < 0) {
    throw config_error("query word '" + query + "' is not in the vocabulary");
  }
  for (const auto& [id, sim] : nearest_words(model.word_embeddings, query_id, k)) {
    out << model.vocab->terms[static_cast<std::size_t>(id)] << ' ' << format_double(sim)
        << '\n';
  }
}

}  // namespace wete
