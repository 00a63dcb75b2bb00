// Copyright 2026 The agreement-probe Authors
// SPDX-License-Identifier: Apache-2.0

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "agp/error.hpp"
#include "agp/lstm.hpp"

namespace agp {

namespace {

constexpr unsigned char kMagic[4] = {'A', 'G', 'P', 'R'};
constexpr unsigned char kGateOrder[4] = {'I', 'F', 'G', 'O'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kHeaderSize = 4 + 4 + 4 * 4 + 4;

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const unsigned char> in, std::size_t pos) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[pos + i]) << (8 * i);
  return v;
}

std::uint32_t crc(std::span<const unsigned char> bytes) {
  uLong c = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; checkpoints are far below 4 GiB.
  c = crc32(c, bytes.data(), static_cast<uInt>(bytes.size()));
  return static_cast<std::uint32_t>(c);
}

}  // namespace

std::vector<unsigned char> encode_checkpoint(const LstmLm& model) {
  const auto& d = model.dims();
  std::vector<unsigned char> out(std::begin(kMagic), std::end(kMagic));
  out.reserve(kHeaderSize + 4 * model.parameter_count() + 4);
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(d.vocab));
  put_u32(out, static_cast<std::uint32_t>(d.embed));
  put_u32(out, static_cast<std::uint32_t>(d.hidden));
  put_u32(out, static_cast<std::uint32_t>(d.layers));
  out.insert(out.end(), std::begin(kGateOrder), std::end(kGateOrder));
  for (auto block : model.blocks()) {
    for (double v : block) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  }
  put_u32(out, crc(std::span<const unsigned char>(out).subspan(4)));
  return out;
}

LstmLm decode_checkpoint(std::span<const unsigned char> bytes) {
  if (bytes.size() < kHeaderSize + 4) throw FormatError("checkpoint truncated: header incomplete");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError("checkpoint magic mismatch");
  const std::uint32_t version = get_u32(bytes, 4);
  if (version != kVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(version));
  }
  LstmLm::Dims dims{get_u32(bytes, 8), get_u32(bytes, 12), get_u32(bytes, 16), get_u32(bytes, 20)};
  if (std::memcmp(bytes.data() + 24, kGateOrder, 4) != 0) {
    throw FormatError("unsupported gate order in checkpoint header");
  }
  if (dims.vocab == 0 || dims.embed == 0 || dims.hidden == 0 || dims.layers == 0 ||
      dims.vocab > (1u << 24) || dims.embed > (1u << 16) || dims.hidden > (1u << 16) ||
      dims.layers > 16) {
    throw FormatError("inconsistent checkpoint dimensions");
  }
  LstmLm model(dims);
  const std::size_t expected = kHeaderSize + 4 * model.parameter_count() + 4;
  if (bytes.size() < expected) throw FormatError("checkpoint truncated: payload incomplete");
  if (bytes.size() > expected) throw FormatError("checkpoint has trailing bytes");
  const std::uint32_t stored = get_u32(bytes, expected - 4);
  if (stored != crc(bytes.subspan(4, expected - 8))) throw FormatError("checkpoint checksum mismatch");
  std::size_t pos = kHeaderSize;
  for (auto block : model.blocks()) {
    for (double& v : block) {
      v = static_cast<double>(std::bit_cast<float>(get_u32(bytes, pos)));
      pos += 4;
    }
  }
  if (!model.all_finite()) throw FormatError("checkpoint contains non-finite parameters");
  return model;
}

void save_checkpoint(const LstmLm& model, const std::string& path) {
  const auto bytes = encode_checkpoint(model);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for '" + path + "'");
}

LstmLm load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes);
}

}  // namespace agp
