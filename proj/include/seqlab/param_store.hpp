#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <deque>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>

#include "seqlab/tensor.hpp"

namespace seqlab {

// Named parameter tensors with paired gradient buffers and optimizer state.
// Registration order is fixed and drives both initialization and the
// checkpoint layout, so runs with the same seed are reproducible.
template <class Real>
class ParamStore {
 public:
  struct Param {
    std::string name;
    Tensor<Real> value;
    Tensor<Real> grad;
    Tensor<Real> velocity;  // SGD momentum
    Tensor<Real> moment1;   // Adam
    Tensor<Real> moment2;   // Adam
  };

  Param& add(const std::string& name, Tensor<Real> init) {
    require(index_.find(name) == index_.end(), "param '", name,
            "' registered twice");
    require(init.finite(), "param '", name, "' initialized with non-finite values");
    params_.push_back(Param{name, std::move(init), {}, {}, {}, {}});
    Param& p = params_.back();
    p.grad = Tensor<Real>::zeros(p.value.shape);
    index_[name] = params_.size() - 1;
    return p;
  }

  bool has(const std::string& name) const { return index_.count(name) != 0; }

  Param& get(const std::string& name) {
    auto it = index_.find(name);
    require(it != index_.end(), "unknown param '", name, "'");
    return params_[it->second];
  }
  const Param& get(const std::string& name) const {
    return const_cast<ParamStore*>(this)->get(name);
  }

  std::size_t size() const { return params_.size(); }
  Param& at(std::size_t i) { return params_[i]; }
  const Param& at(std::size_t i) const { return params_[i]; }

  void zero_grads() {
    for (Param& p : params_) p.grad.fill(Real(0));
  }

  std::size_t total_values() const {
    std::size_t n = 0;
    for (const Param& p : params_) n += p.value.numel();
    return n;
  }

 private:
  std::deque<Param> params_;
  std::unordered_map<std::string, std::size_t> index_;
};

// ---------------------------------------------------------------------------
// Checkpoint format: header (magic, format version, scalar width, parameter
// count), then per parameter a length-prefixed name, the shape, and the raw
// values. All integers and values little-endian.

namespace io {

inline void put_u8(std::ostream& os, std::uint8_t v) {
  os.put(static_cast<char>(v));
}
inline void put_u32(std::ostream& os, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) os.put(static_cast<char>((v >> (8 * i)) & 0xff));
}
inline void put_u64(std::ostream& os, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) os.put(static_cast<char>((v >> (8 * i)) & 0xff));
}
inline std::uint8_t get_u8(std::istream& is) {
  int c = is.get();
  require(c != std::char_traits<char>::eof(), "checkpoint: truncated file");
  return static_cast<std::uint8_t>(c);
}
inline std::uint32_t get_u32(std::istream& is) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t(get_u8(is)) << (8 * i);
  return v;
}
inline std::uint64_t get_u64(std::istream& is) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t(get_u8(is)) << (8 * i);
  return v;
}

inline void put_real(std::ostream& os, double v) {
  put_u64(os, std::bit_cast<std::uint64_t>(v));
}
inline void put_real(std::ostream& os, float v) {
  put_u32(os, std::bit_cast<std::uint32_t>(v));
}
inline void get_real(std::istream& is, double& v) {
  v = std::bit_cast<double>(get_u64(is));
}
inline void get_real(std::istream& is, float& v) {
  v = std::bit_cast<float>(get_u32(is));
}

inline void put_string(std::ostream& os, const std::string& s) {
  put_u32(os, static_cast<std::uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}
inline std::string get_string(std::istream& is) {
  std::uint32_t n = get_u32(is);
  std::string s(n, '\0');
  is.read(s.data(), n);
  require(static_cast<std::uint32_t>(is.gcount()) == n, "checkpoint: truncated string");
  return s;
}

template <class Real>
void put_tensor(std::ostream& os, const Tensor<Real>& t) {
  put_u32(os, static_cast<std::uint32_t>(t.rank()));
  for (std::size_t e : t.shape) put_u64(os, e);
  for (Real x : t.data) put_real(os, x);
}

template <class Real>
Tensor<Real> get_tensor(std::istream& is) {
  std::uint32_t rank = get_u32(is);
  require(rank <= 4, "checkpoint: implausible tensor rank ", rank);
  Shape shape(rank);
  for (std::uint32_t i = 0; i < rank; ++i) shape[i] = get_u64(is);
  Tensor<Real> t(shape);
  for (Real& x : t.data) get_real(is, x);
  return t;
}

}  // namespace io

inline constexpr char kCheckpointMagic[4] = {'S', 'L', 'C', 'P'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

template <class Real>
void write_checkpoint(std::ostream& os, const ParamStore<Real>& store) {
  os.write(kCheckpointMagic, 4);
  io::put_u32(os, kCheckpointVersion);
  io::put_u8(os, static_cast<std::uint8_t>(sizeof(Real)));
  io::put_u64(os, store.size());
  for (std::size_t i = 0; i < store.size(); ++i) {
    const auto& p = store.at(i);
    io::put_string(os, p.name);
    io::put_tensor(os, p.value);
  }
}

template <class Real>
std::string checkpoint_bytes(const ParamStore<Real>& store) {
  std::ostringstream os(std::ios::binary);
  write_checkpoint(os, store);
  return os.str();
}

template <class Real>
void save_checkpoint(const std::string& path, const ParamStore<Real>& store) {
  std::ofstream os(path, std::ios::binary);
  require(os.good(), "cannot open checkpoint for writing: ", path);
  write_checkpoint(os, store);
  require(os.good(), "checkpoint write failed: ", path);
}

// Loads values into an already-built store. Every parameter in the file must
// exist with the same shape; this is the vocab/config mismatch guard.
template <class Real>
void read_checkpoint(std::istream& is, ParamStore<Real>& store) {
  char magic[4];
  is.read(magic, 4);
  require(is.gcount() == 4 && std::memcmp(magic, kCheckpointMagic, 4) == 0,
          "checkpoint: bad magic");
  std::uint32_t version = io::get_u32(is);
  require(version == kCheckpointVersion, "checkpoint: unsupported version ", version);
  std::uint8_t width = io::get_u8(is);
  require(width == sizeof(Real), "checkpoint: precision mismatch (file ",
          int(width) * 8, "-bit, expected ", sizeof(Real) * 8, "-bit)");
  std::uint64_t count = io::get_u64(is);
  require(count == store.size(), "checkpoint: holds ", count,
          " params, model expects ", store.size());
  for (std::uint64_t i = 0; i < count; ++i) {
    std::string name = io::get_string(is);
    Tensor<Real> value = io::get_tensor<Real>(is);
    require(store.has(name), "checkpoint: unknown param '", name, "'");
    auto& p = store.get(name);
    require(p.value.shape == value.shape, "checkpoint: shape mismatch for '",
            name, "': file ", shape_str(value.shape), ", model ",
            shape_str(p.value.shape));
    p.value = std::move(value);
  }
}

template <class Real>
void load_checkpoint(const std::string& path, ParamStore<Real>& store) {
  std::ifstream is(path, std::ios::binary);
  require(is.good(), "cannot open checkpoint: ", path);
  read_checkpoint(is, store);
}

}  // namespace seqlab
