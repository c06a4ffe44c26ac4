#include "xpert/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace xpert {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes little-endian");

namespace {

template <class T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& in, const std::string& path) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) {
    throw std::runtime_error(path + ": truncated checkpoint");
  }
  return v;
}

std::string get_bytes(std::istream& in, std::size_t n, const std::string& path) {
  std::string s(n, '\0');
  if (n > 0 && !in.read(s.data(), static_cast<std::streamsize>(n))) {
    throw std::runtime_error(path + ": truncated checkpoint");
  }
  return s;
}

}  // namespace

void save_checkpoint(const ModelParameters& params, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write("XPRT", 4);
  put<std::uint32_t>(out, kCheckpointVersion);
  const std::string config = nlohmann::json(params.config).dump();
  put<std::uint64_t>(out, config.size());
  out.write(config.data(), static_cast<std::streamsize>(config.size()));
  for (const auto& t : params.layout->tensors()) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(t.name.size()));
    out.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(t.shape.size()));
    for (auto d : t.shape) put<std::uint64_t>(out, d);
    out.write(reinterpret_cast<const char*>(params.values.data() + t.offset),
              static_cast<std::streamsize>(t.size * sizeof(double)));
  }
  if (!out) throw std::runtime_error("failed writing " + path);
}

ModelParameters load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  if (get_bytes(in, 4, path) != "XPRT") throw std::runtime_error(path + ": not a checkpoint");
  const auto version = get<std::uint32_t>(in, path);
  if (version != kCheckpointVersion) {
    throw std::runtime_error(path + ": unsupported checkpoint version " + std::to_string(version));
  }
  const auto config_len = get<std::uint64_t>(in, path);
  const auto config = nlohmann::json::parse(get_bytes(in, config_len, path)).get<ModelConfig>();
  ModelParameters params = ModelParameters::initialize(config, 0);
  for (const auto& t : params.layout->tensors()) {
    const auto name = get_bytes(in, get<std::uint32_t>(in, path), path);
    if (name != t.name) {
      throw std::runtime_error(path + ": expected tensor " + t.name + ", found " + name);
    }
    const auto rank = get<std::uint32_t>(in, path);
    if (rank != t.shape.size()) throw std::runtime_error(path + ": rank mismatch for " + name);
    for (auto d : t.shape) {
      if (get<std::uint64_t>(in, path) != d) throw std::runtime_error(path + ": shape mismatch for " + name);
    }
    if (!in.read(reinterpret_cast<char*>(params.values.data() + t.offset),
                 static_cast<std::streamsize>(t.size * sizeof(double)))) {
      throw std::runtime_error(path + ": truncated checkpoint");
    }
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw std::runtime_error(path + ": trailing bytes after the last tensor");
  }
  return params;
}

}  // namespace xpert
