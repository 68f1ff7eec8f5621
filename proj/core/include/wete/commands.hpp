#ifndef WETE_COMMANDS_HPP
#define WETE_COMMANDS_HPP

#include <ostream>
#include <string>

#include "wete/config.hpp"

namespace wete {

// Command bodies behind the CLI subcommands of the same names. Each one
// throws config_error / io_error / divergence_error; the CLI maps those to
// exit codes 1 / 2 / 3. `out` receives human-readable progress, never data
// another command depends on.

// Builds the corpus, trains per config, writes the checkpoint (atomically)
// and `train_log.csv` under output_dir.
void cmd_train(const RunConfig& config, std::ostream& out);

// Evaluates a checkpoint on a test corpus: topic coherence at proportions
// 10%..100%, diversity, quality, specificity, and (when labels are given)
// k-means purity/NMI over inferred topic proportions. Writes metrics.txt and
// metrics.json under output_dir.
void cmd_eval(const RunConfig& config, std::ostream& out);

// Prints `topic_id: w1 ... wn` lines, one per topic.
void cmd_topics(const RunConfig& config, int n_words, std::ostream& out);

// Writes the per-document topic-proportion matrix to output_dir/theta.csv.
void cmd_infer(const RunConfig& config, std::ostream& out);

// Prints `word similarity` lines for the k nearest words to the query.
void cmd_nearest(const RunConfig& config, const std::string& query, int k, std::ostream& out);

}  // namespace wete

#endif  // WETE_COMMANDS_HPP
