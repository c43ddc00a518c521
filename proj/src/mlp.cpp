#include "satoff/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace satoff {
namespace {

constexpr char kMagic[8] = {'S', 'O', 'F', 'F', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kCheckpointVersion = 1;

void check_sizes(const std::vector<int>& sizes) {
  if (sizes.size() < 2) throw std::invalid_argument("mlp: need input and output layers");
  for (int s : sizes) {
    if (s < 1) throw std::invalid_argument("mlp: layer sizes must be positive");
  }
}

template <typename T>
void write_raw(std::ostream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_raw(std::istream& in) {
  T value;
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw std::runtime_error("checkpoint: truncated file");
  return value;
}

}  // namespace

Mlp::Mlp(std::vector<int> sizes) : sizes_(std::move(sizes)) {
  check_sizes(sizes_);
  build_offsets();
}

void Mlp::build_offsets() {
  std::size_t total = 0;
  w_off_.clear();
  b_off_.clear();
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    w_off_.push_back(total);
    total += static_cast<std::size_t>(sizes_[l + 1]) * sizes_[l];
    b_off_.push_back(total);
    total += sizes_[l + 1];
  }
  params_.assign(total, 0.0);
  grads_.assign(total, 0.0);
}

Mlp Mlp::init(std::vector<int> sizes, Rng& rng) {
  Mlp net(std::move(sizes));
  for (std::size_t l = 0; l + 1 < net.sizes_.size(); ++l) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(net.sizes_[l]));
    const std::size_t count = static_cast<std::size_t>(net.sizes_[l + 1]) * net.sizes_[l];
    for (std::size_t k = 0; k < count; ++k) {
      net.params_[net.w_off_[l] + k] = scale * rng.normal();
    }
    // biases stay zero
  }
  return net;
}

void Mlp::zero_grad() { std::fill(grads_.begin(), grads_.end(), 0.0); }

void Mlp::scale_output_layer(double factor) {
  const std::size_t l = sizes_.size() - 2;
  const std::size_t count = static_cast<std::size_t>(sizes_[l + 1]) * sizes_[l];
  for (std::size_t k = 0; k < count; ++k) params_[w_off_[l] + k] *= factor;
  for (int k = 0; k < sizes_[l + 1]; ++k) params_[b_off_[l] + k] *= factor;
}

std::vector<double> Mlp::forward(const std::vector<double>& input) {
  if (static_cast<int>(input.size()) != sizes_.front())
    throw std::invalid_argument("mlp: input size mismatch");
  acts_.assign(1, input);
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    const std::vector<double>& a = acts_.back();
    std::vector<double> z(sizes_[l + 1]);
    const bool last = l + 2 == sizes_.size();
    for (int j = 0; j < sizes_[l + 1]; ++j) {
      double acc = params_[b_off_[l] + j];
      const std::size_t row = w_off_[l] + static_cast<std::size_t>(j) * sizes_[l];
      for (int i = 0; i < sizes_[l]; ++i) acc += params_[row + i] * a[i];
      z[j] = last ? acc : std::tanh(acc);
    }
    acts_.push_back(std::move(z));
  }
  has_forward_ = true;
  return acts_.back();
}

std::vector<double> Mlp::backward(const std::vector<double>& upstream) {
  if (!has_forward_) throw std::logic_error("mlp: backward without cached forward");
  if (static_cast<int>(upstream.size()) != sizes_.back())
    throw std::invalid_argument("mlp: upstream size mismatch");
  std::vector<double> delta = upstream;  // dLoss/dz of the current layer
  for (std::size_t l = sizes_.size() - 2; ; --l) {
    const std::vector<double>& a = acts_[l];
    for (int j = 0; j < sizes_[l + 1]; ++j) {
      const std::size_t row = w_off_[l] + static_cast<std::size_t>(j) * sizes_[l];
      for (int i = 0; i < sizes_[l]; ++i) grads_[row + i] += delta[j] * a[i];
      grads_[b_off_[l] + j] += delta[j];
    }
    std::vector<double> prev(sizes_[l], 0.0);
    for (int j = 0; j < sizes_[l + 1]; ++j) {
      const std::size_t row = w_off_[l] + static_cast<std::size_t>(j) * sizes_[l];
      for (int i = 0; i < sizes_[l]; ++i) prev[i] += delta[j] * params_[row + i];
    }
    if (l == 0) return prev;
    for (int i = 0; i < sizes_[l]; ++i) prev[i] *= 1.0 - a[i] * a[i];  // tanh'
    delta = std::move(prev);
  }
}

void Adam::step(std::vector<double>& params, const std::vector<double>& grads, double lr) {
  if (params.size() != m.size() || grads.size() != m.size())
    throw std::invalid_argument("adam: size mismatch");
  ++t;
  const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * grads[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * grads[i] * grads[i];
    const double mhat = m[i] / c1;
    const double vhat = v[i] / c2;
    params[i] -= lr * mhat / (std::sqrt(vhat) + eps);
  }
}

std::vector<double> masked_log_softmax(const std::vector<double>& logits,
                                       const std::vector<char>& mask) {
  if (logits.size() != mask.size())
    throw std::invalid_argument("softmax: mask size mismatch");
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (mask[i] && logits[i] > mx) mx = logits[i];
  }
  if (mx == -std::numeric_limits<double>::infinity())
    throw std::invalid_argument("softmax: mask excludes every entry");
  double denom = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (mask[i]) denom += std::exp(logits[i] - mx);
  }
  const double log_denom = mx + std::log(denom);
  std::vector<double> out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = mask[i] ? logits[i] - log_denom : -std::numeric_limits<double>::infinity();
  }
  return out;
}

int sample_from_log_probs(const std::vector<double>& log_probs, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  int last_valid = -1;
  for (std::size_t i = 0; i < log_probs.size(); ++i) {
    if (log_probs[i] == -std::numeric_limits<double>::infinity()) continue;
    last_valid = static_cast<int>(i);
    acc += std::exp(log_probs[i]);
    if (u < acc) return last_valid;
  }
  if (last_valid < 0) throw std::invalid_argument("sample: no valid entry");
  return last_valid;  // rounding residue lands on the final unmasked entry
}

void save_checkpoint(std::ostream& out, const std::vector<CheckpointEntry>& entries) {
  out.write(kMagic, sizeof(kMagic));
  write_raw(out, kCheckpointVersion);
  write_raw(out, static_cast<std::uint32_t>(entries.size()));
  for (const CheckpointEntry& e : entries) {
    write_raw(out, static_cast<std::uint32_t>(e.name.size()));
    out.write(e.name.data(), static_cast<std::streamsize>(e.name.size()));
    write_raw(out, static_cast<std::uint32_t>(e.shape.size()));
    for (int d : e.shape) write_raw(out, static_cast<std::int32_t>(d));
    write_raw(out, static_cast<std::uint64_t>(e.data.size()));
    out.write(reinterpret_cast<const char*>(e.data.data()),
              static_cast<std::streamsize>(e.data.size() * sizeof(double)));
  }
  if (!out) throw std::runtime_error("checkpoint: write failed");
}

std::vector<CheckpointEntry> load_checkpoint(std::istream& in) {
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("checkpoint: bad magic");
  const auto version = read_raw<std::uint32_t>(in);
  if (version != kCheckpointVersion)
    throw std::runtime_error("checkpoint: unsupported version");
  const auto count = read_raw<std::uint32_t>(in);
  std::vector<CheckpointEntry> entries(count);
  for (CheckpointEntry& e : entries) {
    const auto name_len = read_raw<std::uint32_t>(in);
    e.name.resize(name_len);
    in.read(e.name.data(), name_len);
    const auto ndims = read_raw<std::uint32_t>(in);
    e.shape.resize(ndims);
    for (std::uint32_t d = 0; d < ndims; ++d) e.shape[d] = read_raw<std::int32_t>(in);
    const auto values = read_raw<std::uint64_t>(in);
    e.data.resize(values);
    in.read(reinterpret_cast<char*>(e.data.data()),
            static_cast<std::streamsize>(values * sizeof(double)));
    if (!in) throw std::runtime_error("checkpoint: truncated file");
  }
  return entries;
}

void save_checkpoint_file(const std::string& path, const std::vector<CheckpointEntry>& entries) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("checkpoint: cannot open " + path);
  save_checkpoint(out, entries);
}

std::vector<CheckpointEntry> load_checkpoint_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
  return load_checkpoint(in);
}

CheckpointEntry mlp_to_entry(const std::string& name, const Mlp& net) {
  CheckpointEntry e;
  e.name = name;
  e.shape = net.sizes();
  e.data = net.params();
  return e;
}

Mlp mlp_from_entry(const CheckpointEntry& entry) {
  Mlp net(entry.shape);
  if (entry.data.size() != net.param_count())
    throw std::runtime_error("checkpoint: payload does not match architecture");
  net.params() = entry.data;
  return net;
}

}  // namespace satoff
