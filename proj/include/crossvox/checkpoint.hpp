#ifndef CROSSVOX_CHECKPOINT_HPP
#define CROSSVOX_CHECKPOINT_HPP

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "crossvox/core.hpp"
#include "crossvox/errors.hpp"

namespace crossvox {

// Binary container of named f64 tensors.
//
// Layout: magic "LAML", format version as u32 LE, tensor count as u32 LE,
// then one manifest record per tensor (name, shape, payload offset), then the
// payload: all tensor values as little-endian 64-bit floats. Serialization is
// strictly ordered, so identical bytes <=> identical state.
class Checkpoint {
 public:
  static constexpr char kMagic[4] = {'L', 'A', 'M', 'L'};
  static constexpr std::uint32_t kVersion = 1;

  struct Tensor {
    std::string name;
    std::vector<std::uint64_t> shape;
    Vec data;
  };

  void put(std::string name, std::vector<std::uint64_t> shape, Vec data) {
    std::uint64_t n = 1;
    for (auto d : shape) n *= d;
    if (n != data.size())
      throw DimensionMismatchError(static_cast<std::size_t>(n), data.size());
    for (auto& t : tensors_) {
      if (t.name == name) {
        t.shape = std::move(shape);
        t.data = std::move(data);
        return;
      }
    }
    tensors_.push_back(Tensor{std::move(name), std::move(shape), std::move(data)});
  }

  void put_scalar(std::string name, double value) { put(std::move(name), {1}, Vec{value}); }

  bool has(const std::string& name) const {
    for (const auto& t : tensors_)
      if (t.name == name) return true;
    return false;
  }

  const Tensor& get(const std::string& name) const {
    for (const auto& t : tensors_)
      if (t.name == name) return t;
    throw ParseError("checkpoint tensor '" + name + "' not found");
  }

  double get_scalar(const std::string& name) const {
    const auto& t = get(name);
    if (t.data.size() != 1) throw ParseError("tensor '" + name + "' is not a scalar");
    return t.data[0];
  }

  const std::vector<Tensor>& tensors() const { return tensors_; }

  std::vector<std::uint8_t> serialize() const {
    std::vector<std::uint8_t> out;
    out.insert(out.end(), kMagic, kMagic + 4);
    append_u32(out, kVersion);
    append_u32(out, static_cast<std::uint32_t>(tensors_.size()));
    std::uint64_t offset = 0;
    for (const auto& t : tensors_) {
      append_u16(out, static_cast<std::uint16_t>(t.name.size()));
      out.insert(out.end(), t.name.begin(), t.name.end());
      append_u8(out, static_cast<std::uint8_t>(t.shape.size()));
      for (auto d : t.shape) append_u64(out, d);
      append_u64(out, offset);
      offset += t.data.size() * 8;
    }
    for (const auto& t : tensors_)
      for (double x : t.data) append_f64(out, x);
    return out;
  }

  void save(const std::string& path) const {
    const auto bytes = serialize();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("short write to '" + path + "'");
  }

  static Checkpoint deserialize(const std::vector<std::uint8_t>& bytes) {
    Reader r{bytes, 0};
    char magic[4];
    r.bytes(magic, 4);
    if (std::memcmp(magic, kMagic, 4) != 0) throw ParseError("bad checkpoint magic");
    const std::uint32_t version = r.u32();
    if (version != kVersion)
      throw ParseError("unsupported checkpoint version " + std::to_string(version));
    const std::uint32_t count = r.u32();

    struct Rec {
      std::string name;
      std::vector<std::uint64_t> shape;
      std::uint64_t offset;
      std::uint64_t elems;
    };
    std::vector<Rec> recs;
    recs.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
      Rec rec;
      const std::uint16_t name_len = r.u16();
      rec.name.resize(name_len);
      r.bytes(rec.name.data(), name_len);
      const std::uint8_t ndims = r.u8();
      rec.shape.resize(ndims);
      rec.elems = 1;
      for (auto& d : rec.shape) {
        d = r.u64();
        rec.elems *= d;
      }
      rec.offset = r.u64();
      recs.push_back(std::move(rec));
    }
    const std::size_t payload_start = r.pos;
    Checkpoint ck;
    for (auto& rec : recs) {
      Reader rr{bytes, payload_start + static_cast<std::size_t>(rec.offset)};
      Vec data(static_cast<std::size_t>(rec.elems));
      for (auto& x : data) x = rr.f64();
      ck.tensors_.push_back(Tensor{std::move(rec.name), std::move(rec.shape), std::move(data)});
    }
    return ck;
  }

  static Checkpoint load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileNotFoundError(path);
    std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in),
                                    std::istreambuf_iterator<char>()};
    return deserialize(bytes);
  }

 private:
  struct Reader {
    const std::vector<std::uint8_t>& buf;
    std::size_t pos;

    void bytes(char* out, std::size_t n) {
      if (pos + n > buf.size()) throw ParseError("truncated checkpoint");
      std::memcpy(out, buf.data() + pos, n);
      pos += n;
    }
    std::uint8_t u8() {
      std::uint8_t v;
      bytes(reinterpret_cast<char*>(&v), 1);
      return v;
    }
    std::uint16_t u16() {
      const std::uint16_t lo = u8();
      const std::uint16_t hi = u8();
      return static_cast<std::uint16_t>(lo | (hi << 8));
    }
    std::uint32_t u32() {
      std::uint32_t v = 0;
      for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(u8()) << (8 * i);
      return v;
    }
    std::uint64_t u64() {
      std::uint64_t v = 0;
      for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(u8()) << (8 * i);
      return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
  };

  static void append_u8(std::vector<std::uint8_t>& out, std::uint8_t v) { out.push_back(v); }
  static void append_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
  }
  static void append_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
  }
  static void append_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
  }
  static void append_f64(std::vector<std::uint8_t>& out, double x) {
    append_u64(out, std::bit_cast<std::uint64_t>(x));
  }

  std::vector<Tensor> tensors_;
};

}  // namespace crossvox

#endif  // CROSSVOX_CHECKPOINT_HPP
