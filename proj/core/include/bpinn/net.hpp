#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bpinn/types.hpp"

namespace bpinn {

enum class Activation { Tanh };

std::string_view activation_name(Activation a);
Activation parse_activation(std::string_view name);

/// Layer layout of the fully connected network (x, y) -> (u, v, p, theta).
///
/// Hidden layers use the activation; the output layer is affine. Widths are
/// stored input first, so a valid architecture always starts with 2 and ends
/// with 4, e.g. "2-32-32-4".
class MLPArchitecture {
 public:
  explicit MLPArchitecture(std::vector<int> widths, Activation activation = Activation::Tanh);

  /// Parses the dash separated form "2-h1-...-4".
  static MLPArchitecture parse(std::string_view text);

  std::string to_string() const;

  std::span<const int> widths() const { return widths_; }
  Activation activation() const { return activation_; }

  /// Number of affine maps (hidden layers + output layer).
  std::size_t num_layers() const { return widths_.size() - 1; }
  std::size_t hidden_layers() const { return widths_.size() - 2; }
  int fan_in(std::size_t layer) const { return widths_[layer]; }
  int fan_out(std::size_t layer) const { return widths_[layer + 1]; }

  /// Offset of layer `layer`'s row-major weight block in the flat parameter vector.
  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
  /// Offset of the bias block, which directly follows the weights.
  std::size_t bias_offset(std::size_t layer) const {
    return offsets_[layer] + static_cast<std::size_t>(fan_in(layer)) * fan_out(layer);
  }

  std::size_t parameter_count() const { return offsets_.back(); }

  friend bool operator==(const MLPArchitecture& a, const MLPArchitecture& b) {
    return a.widths_ == b.widths_ && a.activation_ == b.activation_;
  }

 private:
  std::vector<int> widths_;
  Activation activation_;
  std::vector<std::size_t> offsets_;
};

std::size_t parameter_count(const MLPArchitecture& arch);

/// Flat trainable parameters, layer by layer: row-major weights then biases.
class ParameterVector {
 public:
  ParameterVector() = default;
  explicit ParameterVector(std::vector<double> values);
  ParameterVector(std::size_t n, double fill) : values_(n, fill) {}

  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  const double* data() const { return values_.data(); }
  double* data() { return values_.data(); }

  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  bool all_finite() const;

  friend bool operator==(const ParameterVector&, const ParameterVector&) = default;

 private:
  std::vector<double> values_;
};

/// Glorot-uniform weights, zero biases; a pure function of (arch, seed).
ParameterVector init_parameters(const MLPArchitecture& arch, std::uint64_t seed);

/// Throws ArchitectureError if the parameter length does not match.
void check_parameters(const MLPArchitecture& arch, std::span<const double> params);

/// Network outputs (u, v, p, theta) at one point.
FieldState forward(const MLPArchitecture& arch, std::span<const double> params, Point2 point);

inline FieldState forward(const MLPArchitecture& arch, const ParameterVector& params, Point2 point) {
  return forward(arch, params.values(), point);
}

}  // namespace bpinn
