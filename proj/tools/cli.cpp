#include "cli.hpp"

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wete/commands.hpp"
#include "wete/config.hpp"
#include "wete/errors.hpp"

namespace wete {

namespace {

// Per-subcommand option set mirroring the config-file keys; values given on
// the command line win over the config file, which wins over defaults.
struct Options {
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> overrides;

  void add_to(CLI::App* app) {
    app->add_option("--config", config_path, "key = value config file");
    static const char* keys[] = {
        "mode", "topics", "embed_dim", "epsilon", "batch_size", "epochs", "lr",
        "seed", "min_doc_len", "min_term_doc_freq", "input_transform", "n_clusters",
        "kmeans_restarts", "corpus", "labels", "embeddings", "checkpoint",
        "output_dir", "stopwords", "ref_corpus"};
    for (const char* key : keys) {
      app->add_option_function<std::string>(
          std::string("--") + key,
          [this, key](const std::string& value) { overrides.emplace_back(key, value); },
          std::string("override config key ") + key);
    }
  }

  RunConfig resolve() const {
    RunConfig config;
    if (!config_path.empty()) apply_config_file(config, config_path);
    for (const auto& [key, value] : overrides) config.set(key, value);
    return config;
  }
};

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"wete - topic modeling by transport between word and topic embeddings"};
  app.require_subcommand(1);

  Options train_opts, eval_opts, topics_opts, infer_opts, nearest_opts;
  int n_words = 10;
  int n_nearest = 8;
  std::string query;

  CLI::App* train = app.add_subcommand("train", "train a model and write a checkpoint");
  train_opts.add_to(train);
  CLI::App* eval = app.add_subcommand("eval", "evaluate a checkpoint on a corpus");
  eval_opts.add_to(eval);
  CLI::App* topics = app.add_subcommand("topics", "list top words per topic");
  topics_opts.add_to(topics);
  topics->add_option("--n_words", n_words, "words per topic");
  CLI::App* infer = app.add_subcommand("infer", "write per-document topic proportions");
  infer_opts.add_to(infer);
  CLI::App* nearest = app.add_subcommand("nearest", "nearest words to a query word");
  nearest_opts.add_to(nearest);
  nearest->add_option("query", query, "query word")->required();
  nearest->add_option("-k", n_nearest, "number of neighbours");

  try {
    app.parse(argc, const_cast<char**>(argv));
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (train->parsed()) {
      cmd_train(train_opts.resolve(), std::cout);
    } else if (eval->parsed()) {
      cmd_eval(eval_opts.resolve(), std::cout);
    } else if (topics->parsed()) {
      cmd_topics(topics_opts.resolve(), n_words, std::cout);
    } else if (infer->parsed()) {
      cmd_infer(infer_opts.resolve(), std::cout);
    } else if (nearest->parsed()) {
      cmd_nearest(nearest_opts.resolve(), query, n_nearest, std::cout);
    }
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const io_error& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 2;
  } catch (const divergence_error& e) {
    std::cerr << "divergence: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace wete
