#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "satoff/rng.hpp"

namespace satoff {

// Dense net: tanh hidden layers, identity output, doubles throughout.
// Parameters live in one flat vector (per layer: row-major weights, then
// biases) so the optimizer and the checkpoint writer can stay shape-blind.
class Mlp {
 public:
  Mlp() = default;
  explicit Mlp(std::vector<int> sizes);  // zero parameters

  // weights ~ N(0, 1/fan_in), biases zero; draw order is layer by layer
  static Mlp init(std::vector<int> sizes, Rng& rng);

  const std::vector<int>& sizes() const { return sizes_; }
  int input_dim() const { return sizes_.front(); }
  int output_dim() const { return sizes_.back(); }
  std::size_t param_count() const { return params_.size(); }
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }
  const std::vector<double>& grads() const { return grads_; }
  void zero_grad();

  // multiplies the output layer's weights and biases; a small factor keeps
  // initial policies near uniform
  void scale_output_layer(double factor);

  // Runs the net and caches activations for backward. Throws on size mismatch.
  std::vector<double> forward(const std::vector<double>& input);

  // Accumulates dLoss/dParam into grads() given dLoss/dOutput; returns
  // dLoss/dInput. Throws std::logic_error without a cached forward pass.
  std::vector<double> backward(const std::vector<double>& upstream);

 private:
  std::vector<int> sizes_;
  std::vector<double> params_;
  std::vector<double> grads_;
  std::vector<std::size_t> w_off_, b_off_;  // per-layer offsets into the flat vector
  std::vector<std::vector<double>> acts_;   // input plus every layer output
  bool has_forward_ = false;

  void build_offsets();
};

// Adam with bias correction; the learning rate arrives per call so schedules
// stay outside the optimizer.
struct Adam {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::vector<double> m, v;
  std::int64_t t = 0;

  explicit Adam(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
  void step(std::vector<double>& params, const std::vector<double>& grads, double lr);
};

// Log-softmax over the unmasked entries (max-subtraction inside); masked
// entries come back as -inf. Throws std::invalid_argument when the mask
// blanks every entry.
std::vector<double> masked_log_softmax(const std::vector<double>& logits,
                                       const std::vector<char>& mask);

// Draws an index from exp(log_probs); -inf entries are never chosen.
int sample_from_log_probs(const std::vector<double>& log_probs, Rng& rng);

// One named tensor inside a checkpoint: metadata ints plus a flat payload.
struct CheckpointEntry {
  std::string name;
  std::vector<int> shape;
  std::vector<double> data;
};

// Binary container: magic "SOFFCKPT", format version, then the entries.
// Round-trips byte-exactly; loading rejects bad magic, unknown versions, and
// truncated payloads with std::runtime_error.
void save_checkpoint(std::ostream& out, const std::vector<CheckpointEntry>& entries);
std::vector<CheckpointEntry> load_checkpoint(std::istream& in);
void save_checkpoint_file(const std::string& path, const std::vector<CheckpointEntry>& entries);
std::vector<CheckpointEntry> load_checkpoint_file(const std::string& path);

// Mlp <-> checkpoint glue: shape carries the layer sizes.
CheckpointEntry mlp_to_entry(const std::string& name, const Mlp& net);
Mlp mlp_from_entry(const CheckpointEntry& entry);

}  // namespace satoff
