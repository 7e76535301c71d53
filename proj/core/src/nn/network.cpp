// SPDX-License-Identifier: Apache-2.0
#include "linetrace/nn/network.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "linetrace/error.hpp"

namespace linetrace::nn {

namespace {

// Model file layout (all integers and reals little-endian):
//   "LTNN" | u32 version | u64 seed | u8 mode | u32 rank, u64 dims[rank]
//   u32 layer count, then per layer:
//     u8 kind | u64 units | u64 kernel | u8 orientation | u64 pool
//     f64 rate | f64 momentum | f64 epsilon | u8 activation | u8 stats_ready
//   then per layer: u32 tensor count, per tensor: u32 rank, u64 dims[rank], f64 data[]
constexpr std::array<char, 4> kMagic{'L', 'T', 'N', 'N'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& out, T value) {
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(bytes.data(), bytes.size());
}

class Reader {
 public:
  Reader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  template <typename T>
  T get(const char* field) {
    std::array<char, sizeof(T)> bytes;
    if (!in_.read(bytes.data(), bytes.size())) {
      throw ParseError(source_, 0, field, "unexpected end of model file");
    }
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    T value;
    std::memcpy(&value, bytes.data(), sizeof(T));
    return value;
  }

  const std::string& source() const { return source_; }

 private:
  std::istream& in_;
  std::string source_;
};

void put_tensor(std::ostream& out, const Tensor& t) {
  put<std::uint32_t>(out, static_cast<std::uint32_t>(t.rank()));
  for (std::size_t d : t.shape()) put<std::uint64_t>(out, d);
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(t.data()), std::streamsize(t.size() * sizeof(double)));
  } else {
    for (double x : t.values()) put<double>(out, x);
  }
}

void get_tensor_into(Reader& r, Tensor& dst, const std::string& what) {
  const auto rank = r.get<std::uint32_t>("tensor rank");
  if (rank > 8) throw ParseError(r.source(), 0, what, "implausible tensor rank");
  Shape shape(rank);
  for (auto& d : shape) d = r.get<std::uint64_t>("tensor dim");
  if (shape != dst.shape()) {
    throw ParseError(r.source(), 0, what,
                     "stored shape " + to_string(shape) + " does not match layer shape " + to_string(dst.shape()));
  }
  for (double& x : dst.values()) x = r.get<double>("tensor data");
}

}  // namespace

Network::Network(Shape input_shape, std::vector<LayerSpec> specs, std::uint64_t seed)
    : input_shape_(std::move(input_shape)), specs_(std::move(specs)), seed_(seed), dropout_rng_(mix64(seed)) {
  if (input_shape_.empty() || numel(input_shape_) == 0) throw ShapeError("network input shape must be non-empty");
  if (specs_.empty()) throw std::invalid_argument("network needs at least one layer");
  Rng init_rng(seed);
  Shape shape = input_shape_;
  for (const LayerSpec& spec : specs_) {
    layers_.push_back(make_layer(spec, shape, init_rng));
    shape = layers_.back()->output_shape(shape);
    shapes_.push_back(shape);
  }
}

Tensor Network::forward(const Tensor& x) {
  if (x.rank() != input_shape_.size() + 1 || !std::equal(input_shape_.begin(), input_shape_.end(), x.shape().begin() + 1)) {
    throw ShapeError("network input " + to_string(x.shape()) + " does not match (N, " +
                     to_string(input_shape_).substr(1));
  }
  if (!x.all_finite()) throw NonFiniteError("network input contains NaN/Inf");
  Tensor h = x;
  for (auto& layer : layers_) h = layer->forward(h, mode_, dropout_rng_);
  if (!h.all_finite()) throw NonFiniteError("network output contains NaN/Inf");
  has_forward_ = true;
  return h;
}

Tensor Network::backward(const Tensor& grad_output) {
  if (!has_forward_) throw UsageError("Network::backward called without a stored forward pass");
  Tensor g = grad_output;
  for (std::size_t i = layers_.size(); i-- > 0;) g = layers_[i]->backward(g);
  has_forward_ = false;
  return g;
}

void Network::reseed_dropout(std::uint64_t seed) { dropout_rng_.reseed(mix64(seed)); }

std::vector<Param*> Network::params() {
  std::vector<Param*> out;
  for (auto& layer : layers_) {
    for (Param* p : layer->params()) out.push_back(p);
  }
  return out;
}

std::size_t Network::parameter_count() const {
  std::size_t n = 0;
  for (const auto& layer : layers_) n += layer->parameter_count();
  return n;
}

void Network::save(std::ostream& out) const {
  out.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, kVersion);
  put<std::uint64_t>(out, seed_);
  put<std::uint8_t>(out, mode_ == Mode::Train ? 0 : 1);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(input_shape_.size()));
  for (std::size_t d : input_shape_) put<std::uint64_t>(out, d);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(specs_.size()));
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    const LayerSpec& s = specs_[i];
    put<std::uint8_t>(out, static_cast<std::uint8_t>(s.kind));
    put<std::uint64_t>(out, s.units);
    put<std::uint64_t>(out, s.kernel);
    put<std::uint8_t>(out, static_cast<std::uint8_t>(s.orientation));
    put<std::uint64_t>(out, s.pool);
    put<double>(out, s.rate);
    put<double>(out, s.momentum);
    put<double>(out, s.epsilon);
    put<std::uint8_t>(out, static_cast<std::uint8_t>(s.activation));
    put<std::uint8_t>(out, layers_[i]->running_stats_ready() ? 1 : 0);
  }
  for (const auto& layer : layers_) {
    auto* l = layer.get();
    std::vector<const Tensor*> tensors;
    for (Param* p : l->params()) tensors.push_back(&p->value);
    for (Tensor* t : l->buffers()) tensors.push_back(t);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(tensors.size()));
    for (const Tensor* t : tensors) put_tensor(out, *t);
  }
}

void Network::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write model file " + path.string());
  save(out);
}

Network Network::load(std::istream& in, const std::string& source) {
  Reader r(in, source);
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw ParseError(source, 0, "magic", "not a linetrace model file");
  }
  const auto version = r.get<std::uint32_t>("version");
  if (version != kVersion) throw ParseError(source, 0, "version", "unsupported version " + std::to_string(version));
  const auto seed = r.get<std::uint64_t>("seed");
  const auto mode = r.get<std::uint8_t>("mode");
  const auto rank = r.get<std::uint32_t>("input rank");
  if (rank == 0 || rank > 8) throw ParseError(source, 0, "input rank", "implausible rank");
  Shape input(rank);
  for (auto& d : input) d = r.get<std::uint64_t>("input dim");
  const auto count = r.get<std::uint32_t>("layer count");
  if (count == 0 || count > 4096) throw ParseError(source, 0, "layer count", "implausible layer count");
  std::vector<LayerSpec> specs(count);
  std::vector<bool> stats_ready(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    LayerSpec& s = specs[i];
    const auto kind = r.get<std::uint8_t>("layer kind");
    if (kind > static_cast<std::uint8_t>(LayerKind::Activation)) {
      throw ParseError(source, 0, "layer kind", "unknown layer kind " + std::to_string(kind));
    }
    s.kind = static_cast<LayerKind>(kind);
    s.units = r.get<std::uint64_t>("units");
    s.kernel = r.get<std::uint64_t>("kernel");
    const auto orient = r.get<std::uint8_t>("orientation");
    if (orient > 1) throw ParseError(source, 0, "orientation", "unknown conv orientation");
    s.orientation = static_cast<ConvOrientation>(orient);
    s.pool = r.get<std::uint64_t>("pool");
    s.rate = r.get<double>("rate");
    s.momentum = r.get<double>("momentum");
    s.epsilon = r.get<double>("epsilon");
    const auto act = r.get<std::uint8_t>("activation");
    if (act > 2) throw ParseError(source, 0, "activation", "unknown activation");
    s.activation = static_cast<ActivationKind>(act);
    stats_ready[i] = r.get<std::uint8_t>("stats_ready") != 0;
  }
  Network net(std::move(input), std::move(specs), seed);
  net.mode_ = mode == 0 ? Mode::Train : Mode::Eval;
  for (std::uint32_t i = 0; i < count; ++i) {
    Layer& l = *net.layers_[i];
    l.set_running_stats_ready(stats_ready[i]);
    std::vector<Tensor*> tensors;
    for (Param* p : l.params()) tensors.push_back(&p->value);
    for (Tensor* t : l.buffers()) tensors.push_back(t);
    const auto n = r.get<std::uint32_t>("tensor count");
    if (n != tensors.size()) {
      throw ParseError(source, 0, "layer " + std::to_string(i), "tensor count mismatch");
    }
    for (Tensor* t : tensors) get_tensor_into(r, *t, "layer " + std::to_string(i));
  }
  return net;
}

Network Network::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("model file not found: " + path.string());
  return load(in, path.string());
}

}  // namespace linetrace::nn
