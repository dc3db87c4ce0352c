#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "cloudseg/unet.hpp"

namespace cloudseg::unet {

namespace fs = std::filesystem;

// On-disk model container. Layout, all integers little-endian:
//   "CSCK" | u32 version | u8 scalar_width (4 or 8) | NetworkConfig (6 x i32)
//   | u64 seed | u32 meta_count | meta entries (u32 len + bytes, key then
//   value) | u32 tensor_count | tensor entries (u32 name_len + name, u8 rank,
//   rank x u32 dims, payload) | u64 FNV-1a of everything before it.
template <class T>
struct Checkpoint {
  NetworkConfig config;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> meta;
  struct Entry {
    std::string name;
    std::vector<std::uint32_t> dims;
    std::vector<T> data;
  };
  std::vector<Entry> tensors;

  const Entry* find(const std::string& name) const {
    for (const Entry& e : tensors)
      if (e.name == name) return &e;
    return nullptr;
  }
  const std::string* find_meta(const std::string& key) const {
    for (const auto& [k, v] : meta)
      if (k == key) return &v;
    return nullptr;
  }
};

namespace ckdetail {

constexpr char kMagic[4] = {'C', 'S', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

inline std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 1099511628211ull;
  }
  return h;
}

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline void put_i32(std::string& out, std::int32_t v) {
  put_u32(out, static_cast<std::uint32_t>(v));
}

inline void put_string(std::string& out, const std::string& s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  out.append(s);
}

struct Reader {
  const std::string& bytes;
  std::size_t pos = 0;

  void need(std::size_t n) const {
    if (pos + n > bytes.size()) throw LengthError("checkpoint: truncated file");
  }
  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(bytes[pos++]);
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[pos++])) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[pos++])) << (8 * i);
    return v;
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  std::string str() {
    const std::uint32_t n = u32();
    need(n);
    std::string s = bytes.substr(pos, n);
    pos += n;
    return s;
  }
};

}  // namespace ckdetail

template <class T>
void save_checkpoint(const Checkpoint<T>& ck, const fs::path& path) {
  using namespace ckdetail;
  std::string out;
  out.append(kMagic, 4);
  put_u32(out, kVersion);
  out.push_back(static_cast<char>(sizeof(T)));
  put_i32(out, ck.config.input_size);
  put_i32(out, ck.config.in_channels);
  put_i32(out, ck.config.base_channels);
  put_i32(out, ck.config.channel_cap);
  put_i32(out, ck.config.encode_blocks);
  put_i32(out, ck.config.decode_blocks);
  put_u64(out, ck.seed);
  put_u32(out, static_cast<std::uint32_t>(ck.meta.size()));
  for (const auto& [k, v] : ck.meta) {
    put_string(out, k);
    put_string(out, v);
  }
  put_u32(out, static_cast<std::uint32_t>(ck.tensors.size()));
  for (const auto& e : ck.tensors) {
    put_string(out, e.name);
    out.push_back(static_cast<char>(e.dims.size()));
    std::size_t volume = 1;
    for (std::uint32_t d : e.dims) {
      put_u32(out, d);
      volume *= d;
    }
    if (volume != e.data.size())
      throw ShapeError("checkpoint: tensor '" + e.name + "' dims do not match data");
    const char* raw = reinterpret_cast<const char*>(e.data.data());
    out.append(raw, e.data.size() * sizeof(T));
  }
  put_u64(out, fnv1a(out));

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("checkpoint: cannot open " + path.string() + " for writing");
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw IoError("checkpoint: write failed for " + path.string());
}

template <class T>
Checkpoint<T> load_checkpoint(const fs::path& path) {
  using namespace ckdetail;
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("checkpoint: cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(file)),
                    std::istreambuf_iterator<char>());

  if (bytes.size() < 16) throw LengthError("checkpoint: truncated file");
  const std::string body = bytes.substr(0, bytes.size() - 8);
  Reader tail{bytes, bytes.size() - 8};
  if (tail.u64() != fnv1a(body)) throw IntegrityError("checkpoint: checksum mismatch");

  Reader r{body};
  char magic[4];
  r.need(4);
  std::memcpy(magic, body.data(), 4);
  r.pos = 4;
  if (std::memcmp(magic, kMagic, 4) != 0)
    throw FormatError("checkpoint: bad magic");
  const std::uint32_t version = r.u32();
  if (version != kVersion)
    throw FormatError("checkpoint: unsupported version " + std::to_string(version));
  const std::uint8_t scalar_width = r.u8();
  if (scalar_width != sizeof(T))
    throw ConfigError("checkpoint: stores " + std::to_string(scalar_width * 8) +
                      "-bit scalars, caller expects " + std::to_string(sizeof(T) * 8));

  Checkpoint<T> ck;
  ck.config.input_size = r.i32();
  ck.config.in_channels = r.i32();
  ck.config.base_channels = r.i32();
  ck.config.channel_cap = r.i32();
  ck.config.encode_blocks = r.i32();
  ck.config.decode_blocks = r.i32();
  ck.seed = r.u64();
  const std::uint32_t meta_count = r.u32();
  for (std::uint32_t i = 0; i < meta_count; ++i) {
    std::string k = r.str();
    std::string v = r.str();
    ck.meta.emplace_back(std::move(k), std::move(v));
  }
  const std::uint32_t tensor_count = r.u32();
  for (std::uint32_t i = 0; i < tensor_count; ++i) {
    typename Checkpoint<T>::Entry e;
    e.name = r.str();
    const std::uint8_t rank = r.u8();
    std::size_t volume = 1;
    for (std::uint8_t d = 0; d < rank; ++d) {
      e.dims.push_back(r.u32());
      volume *= e.dims.back();
    }
    r.need(volume * sizeof(T));
    e.data.resize(volume);
    std::memcpy(e.data.data(), body.data() + r.pos, volume * sizeof(T));
    r.pos += volume * sizeof(T);
    ck.tensors.push_back(std::move(e));
  }
  if (r.pos != body.size()) throw FormatError("checkpoint: trailing bytes");
  return ck;
}

/// Checkpoint holding just the model parameters.
template <class T>
Checkpoint<T> params_to_checkpoint(const ModelParams<T>& params, std::uint64_t seed) {
  Checkpoint<T> ck;
  ck.config = params.config;
  ck.seed = seed;
  visit_tensors(params, [&](const TensorInfo& info, const std::vector<T>& values) {
    ck.tensors.push_back({info.name, info.dims, values});
  });
  return ck;
}

/// Rebuilds parameters from a checkpoint; entries that are not model tensors
/// (e.g. optimizer state) are ignored.
template <class T>
ModelParams<T> checkpoint_to_params(const Checkpoint<T>& ck) {
  ModelParams<T> params = make_params<T>(ck.config);
  visit_tensors(params, [&](const TensorInfo& info, std::vector<T>& values) {
    const auto* entry = ck.find(info.name);
    if (!entry) throw FormatError("checkpoint: missing tensor '" + info.name + "'");
    if (entry->dims != info.dims || entry->data.size() != values.size())
      throw FormatError("checkpoint: tensor '" + info.name + "' has unexpected dims");
    values = entry->data;
  });
  return params;
}

template <class T>
void save_params(const ModelParams<T>& params, std::uint64_t seed, const fs::path& path) {
  save_checkpoint(params_to_checkpoint(params, seed), path);
}

template <class T>
ModelParams<T> load_params(const fs::path& path) {
  return checkpoint_to_params(load_checkpoint<T>(path));
}

/// Like load_params but rejects a file whose config differs from `expected`.
template <class T>
ModelParams<T> load_params(const fs::path& path, const NetworkConfig& expected) {
  Checkpoint<T> ck = load_checkpoint<T>(path);
  if (!(ck.config == expected))
    throw ConfigError("checkpoint: stored network config does not match expected config");
  return checkpoint_to_params(ck);
}

}  // namespace cloudseg::unet
