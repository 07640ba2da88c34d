//
// sage-amine - Copyright 2026 The sage-amine Authors.
// SPDX-License-Identifier: Apache-2.0
//

// Little-endian primitives shared by the model, predictor and checkpoint
// file formats.

#pragma once

#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sage::detail {

inline void put_u32(std::ostream &out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
  out.write(b, 4);
}

inline void put_u64(std::ostream &out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
  out.write(b, 8);
}

inline void put_f64(std::ostream &out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  put_u64(out, bits);
}

inline void put_string(std::ostream &out, std::string_view s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

template <typename Error>
class Reader {
public:
  explicit Reader(std::istream &in) : in_(in) {}

  void expect_magic(std::string_view magic) {
    std::string got(magic.size(), '\0');
    in_.read(got.data(), static_cast<std::streamsize>(got.size()));
    if (!in_ || got != magic) throw Error("bad magic, expected " + std::string(magic));
  }

  std::uint32_t u32() {
    unsigned char b[4];
    read(b, 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
  }

  std::uint64_t u64() {
    unsigned char b[8];
    read(b, 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
  }

  double f64() {
    const std::uint64_t bits = u64();
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
  }

  std::string string(std::uint32_t max_len = 1u << 20) {
    const std::uint32_t n = u32();
    if (n > max_len) throw Error("string length out of range");
    std::string s(n, '\0');
    read(reinterpret_cast<unsigned char *>(s.data()), n);
    return s;
  }

private:
  void read(unsigned char *dst, std::size_t n) {
    in_.read(reinterpret_cast<char *>(dst), static_cast<std::streamsize>(n));
    if (!in_) throw Error("unexpected end of file");
  }

  std::istream &in_;
};

}  // namespace sage::detail
