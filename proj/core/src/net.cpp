#include "bpinn/net.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "bpinn/errors.hpp"
#include "bpinn/rng.hpp"
#include "propagate.hpp"

namespace bpinn {

std::string_view activation_name(Activation a) {
  switch (a) {
    case Activation::Tanh: return "tanh";
  }
  return "tanh";
}

Activation parse_activation(std::string_view name) {
  if (name == "tanh") return Activation::Tanh;
  throw ArchitectureError("unknown activation '" + std::string(name) + "'");
}

MLPArchitecture::MLPArchitecture(std::vector<int> widths, Activation activation)
    : widths_(std::move(widths)), activation_(activation) {
  if (widths_.size() < 2) throw ArchitectureError("architecture needs at least input and output widths");
  if (widths_.front() != 2) throw ArchitectureError("architecture must take 2 inputs, got " + to_string());
  if (widths_.back() != 4) throw ArchitectureError("architecture must produce 4 outputs, got " + to_string());
  if (std::any_of(widths_.begin(), widths_.end(), [](int w) { return w <= 0; })) {
    throw ArchitectureError("layer widths must be positive: " + to_string());
  }
  offsets_.assign(1, 0);
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    const auto n = static_cast<std::size_t>(widths_[l]);
    const auto m = static_cast<std::size_t>(widths_[l + 1]);
    offsets_.push_back(offsets_.back() + n * m + m);
  }
}

MLPArchitecture MLPArchitecture::parse(std::string_view text) {
  std::vector<int> widths;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t dash = std::min(text.find('-', pos), text.size());
    const std::string_view token = text.substr(pos, dash - pos);
    int w = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), w);
    if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size()) {
      throw ArchitectureError("malformed architecture string '" + std::string(text) + "'");
    }
    widths.push_back(w);
    pos = dash + 1;
  }
  return MLPArchitecture(std::move(widths));
}

std::string MLPArchitecture::to_string() const {
  std::string s;
  for (std::size_t i = 0; i < widths_.size(); ++i) {
    if (i) s += '-';
    s += std::to_string(widths_[i]);
  }
  return s;
}

std::size_t parameter_count(const MLPArchitecture& arch) { return arch.parameter_count(); }

ParameterVector::ParameterVector(std::vector<double> values) : values_(std::move(values)) {}

bool ParameterVector::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

ParameterVector init_parameters(const MLPArchitecture& arch, std::uint64_t seed) {
  ParameterVector params(arch.parameter_count(), 0.0);
  Rng rng(derive_seed(seed, 0x1417));
  for (std::size_t l = 0; l < arch.num_layers(); ++l) {
    const int n = arch.fan_in(l);
    const int m = arch.fan_out(l);
    const double bound = std::sqrt(6.0 / static_cast<double>(n + m));
    const std::size_t w0 = arch.weight_offset(l);
    for (std::size_t k = 0; k < static_cast<std::size_t>(n) * m; ++k) {
      params[w0 + k] = rng.uniform(-bound, bound);
    }
  }
  return params;
}

void check_parameters(const MLPArchitecture& arch, std::span<const double> params) {
  if (params.size() != arch.parameter_count()) {
    throw ArchitectureError("parameter vector has " + std::to_string(params.size()) + " entries, architecture " +
                            arch.to_string() + " needs " + std::to_string(arch.parameter_count()));
  }
}

FieldState forward(const MLPArchitecture& arch, std::span<const double> params, Point2 point) {
  const auto prop = detail::propagate_point<1>(arch, params, point);
  return {prop.out[0][0], prop.out[1][0], prop.out[2][0], prop.out[3][0]};
}

}  // namespace bpinn
