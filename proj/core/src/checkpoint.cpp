#include "wete/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <vector>

#include "wete/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint serialization assumes a little-endian host");

namespace wete {

namespace {

constexpr char kMagic[5] = {'W', 'E', 'T', 'E', '1'};

void write_u32(std::ostream& out, std::uint32_t x) {
  out.write(reinterpret_cast<const char*>(&x), sizeof(x));
}

void write_string(std::ostream& out, const std::string& s) {
  write_u32(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void write_array(std::ostream& out, const std::string& name, const Eigen::MatrixXd& m) {
  write_string(out, name);
  write_u32(out, static_cast<std::uint32_t>(m.rows()));
  write_u32(out, static_cast<std::uint32_t>(m.cols()));
  std::vector<float> row(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      row[static_cast<std::size_t>(j)] = static_cast<float>(m(i, j));
    }
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size() * sizeof(float)));
  }
}

std::uint32_t read_u32(std::istream& in, const std::string& path) {
  std::uint32_t x = 0;
  if (!in.read(reinterpret_cast<char*>(&x), sizeof(x))) {
    throw io_error("checkpoint '" + path + "' is truncated");
  }
  return x;
}

std::string read_string(std::istream& in, const std::string& path) {
  const std::uint32_t len = read_u32(in, path);
  std::string s(len, '\0');
  if (!in.read(s.data(), static_cast<std::streamsize>(len))) {
    throw io_error("checkpoint '" + path + "' is truncated");
  }
  return s;
}

Eigen::MatrixXd read_array(std::istream& in, const std::string& path,
                           const std::string& expected_name) {
  const std::string name = read_string(in, path);
  if (name != expected_name) {
    throw io_error("checkpoint '" + path + "': expected array '" + expected_name +
                   "', found '" + name + "'");
  }
  const std::uint32_t rows = read_u32(in, path);
  const std::uint32_t cols = read_u32(in, path);
  Eigen::MatrixXd m(rows, cols);
  std::vector<float> row(cols);
  for (std::uint32_t i = 0; i < rows; ++i) {
    if (!in.read(reinterpret_cast<char*>(row.data()),
                 static_cast<std::streamsize>(cols * sizeof(float)))) {
      throw io_error("checkpoint '" + path + "' is truncated in array '" + name + "'");
    }
    for (std::uint32_t j = 0; j < cols; ++j) m(i, j) = static_cast<double>(row[j]);
  }
  return m;
}

std::uint8_t mode_to_byte(TrainMode mode) {
  switch (mode) {
    case TrainMode::fixed: return 0;
    case TrainMode::finetune: return 1;
    case TrainMode::scratch: return 2;
  }
  return 0;
}

TrainMode byte_to_mode(std::uint8_t b, const std::string& path) {
  switch (b) {
    case 0: return TrainMode::fixed;
    case 1: return TrainMode::finetune;
    case 2: return TrainMode::scratch;
  }
  throw io_error("checkpoint '" + path + "': unknown mode flag " + std::to_string(b));
}

}  // namespace

void save_checkpoint(const std::string& path, const WeTeModel& model) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
  }
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot write checkpoint '" + tmp.string() + "'");
    out.write(kMagic, sizeof(kMagic));
    write_u32(out, static_cast<std::uint32_t>(model.vocab_size()));
    write_u32(out, static_cast<std::uint32_t>(model.config.embed_dim));
    write_u32(out, static_cast<std::uint32_t>(model.config.topics));
    write_u32(out, static_cast<std::uint32_t>(model.config.trunk_width));
    const std::uint8_t mode = mode_to_byte(model.config.mode);
    out.write(reinterpret_cast<const char*>(&mode), 1);

    if (!model.vocab || model.vocab->size() != model.vocab_size()) {
      throw io_error("save_checkpoint: model has no vocabulary of matching size");
    }
    for (const auto& term : model.vocab->terms) write_string(out, term);

    write_array(out, "word_embeddings", model.word_embeddings.values);
    write_array(out, "topic_embeddings", model.topic_embeddings);
    write_array(out, "trunk_weight", model.encoder.trunk_weight);
    write_array(out, "trunk_bias", model.encoder.trunk_bias);
    write_array(out, "head_shape_weight", model.encoder.shape_weight);
    write_array(out, "head_shape_bias", model.encoder.shape_bias);
    write_array(out, "head_scale_weight", model.encoder.scale_weight);
    write_array(out, "head_scale_bias", model.encoder.scale_bias);
    if (!out) throw io_error("write failed for checkpoint '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw io_error("cannot move checkpoint into place: " + ec.message());
}

WeTeModel load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open checkpoint '" + path + "'");

  char magic[5];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw io_error("'" + path + "' is not a WETE1 checkpoint");
  }
  const std::uint32_t v_count = read_u32(in, path);
  const std::uint32_t embed_dim = read_u32(in, path);
  const std::uint32_t topics = read_u32(in, path);
  const std::uint32_t trunk_width = read_u32(in, path);
  std::uint8_t mode_byte = 0;
  if (!in.read(reinterpret_cast<char*>(&mode_byte), 1)) {
    throw io_error("checkpoint '" + path + "' is truncated");
  }

  auto vocab = std::make_shared<Vocabulary>();
  for (std::uint32_t v = 0; v < v_count; ++v) vocab->add(read_string(in, path));
  if (vocab->size() != static_cast<int>(v_count)) {
    throw io_error("checkpoint '" + path + "': duplicate vocabulary terms");
  }

  WeTeModel model;
  model.config.topics = static_cast<int>(topics);
  model.config.embed_dim = static_cast<int>(embed_dim);
  model.config.trunk_width = static_cast<int>(trunk_width);
  model.config.mode = byte_to_mode(mode_byte, path);
  model.vocab = std::move(vocab);

  model.word_embeddings.values = read_array(in, path, "word_embeddings");
  model.word_embeddings.dim = static_cast<int>(embed_dim);
  model.word_embeddings.set_all_trainable(model.config.mode != TrainMode::fixed);
  model.topic_embeddings = read_array(in, path, "topic_embeddings");
  model.encoder.trunk_weight = read_array(in, path, "trunk_weight");
  model.encoder.trunk_bias = read_array(in, path, "trunk_bias");
  model.encoder.shape_weight = read_array(in, path, "head_shape_weight");
  model.encoder.shape_bias = read_array(in, path, "head_shape_bias");
  model.encoder.scale_weight = read_array(in, path, "head_scale_weight");
  model.encoder.scale_bias = read_array(in, path, "head_scale_bias");

  if (model.word_embeddings.values.rows() != static_cast<Eigen::Index>(v_count) ||
      model.word_embeddings.values.cols() != static_cast<Eigen::Index>(embed_dim) ||
      model.topic_embeddings.rows() != static_cast<Eigen::Index>(topics) ||
      model.encoder.trunk_weight.rows() != static_cast<Eigen::Index>(trunk_width)) {
    throw io_error("checkpoint '" + path + "': array shapes disagree with header dims");
  }
  return model;
}

}  // namespace wete
