#ifndef WETE_CHECKPOINT_HPP
#define WETE_CHECKPOINT_HPP

#include <string>

#include "wete/model.hpp"

namespace wete {

// Binary container: ASCII magic "WETE1"; uint32 dims V, H, K, trunk width;
// uint8 mode; the vocabulary as length-prefixed UTF-8 terms; then the named
// parameter arrays (word_embeddings, topic_embeddings, trunk_weight,
// trunk_bias, head_shape_weight, head_shape_bias, head_scale_weight,
// head_scale_bias), each as a length-prefixed name, uint32 rows/cols, and
// row-major little-endian float32 data.
//
// The file is written to a sibling temp path and renamed into place, so an
// interrupted save never corrupts an existing checkpoint.
void save_checkpoint(const std::string& path, const WeTeModel& model);

WeTeModel load_checkpoint(const std::string& path);

}  // namespace wete

#endif  // WETE_CHECKPOINT_HPP
