#pragma once

// Single-point propagation shared by forward() and evaluate_jet(). Both go
// through the same template so the value path is identical operation for
// operation.

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "bpinn/errors.hpp"
#include "bpinn/net.hpp"

namespace bpinn::detail {

template <int Components>
struct PointPropagation {
  // Per neuron: value, then (when Components == 6) dx, dy, dxx, dxy, dyy.
  std::vector<std::array<double, Components>> out;
};

template <int Components>
PointPropagation<Components> propagate_point(const MLPArchitecture& arch,
                                             std::span<const double> params, Point2 point) {
  static_assert(Components == 1 || Components == 6);
  check_parameters(arch, params);

  std::vector<std::array<double, Components>> in(2);
  in[0].fill(0.0);
  in[1].fill(0.0);
  in[0][0] = point.x;
  in[1][0] = point.y;
  if constexpr (Components == 6) {
    in[0][1] = 1.0;  // d x / d x
    in[1][2] = 1.0;  // d y / d y
  }

  std::vector<std::array<double, Components>> next;
  const std::size_t layers = arch.num_layers();
  for (std::size_t l = 0; l < layers; ++l) {
    const int n = arch.fan_in(l);
    const int m = arch.fan_out(l);
    const double* w = params.data() + arch.weight_offset(l);
    const double* b = params.data() + arch.bias_offset(l);
    const bool hidden = l + 1 < layers;

    next.assign(static_cast<std::size_t>(m), {});
    for (int i = 0; i < m; ++i) {
      std::array<double, Components> z{};
      const double* row = w + static_cast<std::ptrdiff_t>(i) * n;
      for (int j = 0; j < n; ++j) {
        for (int c = 0; c < Components; ++c) z[c] += row[j] * in[j][c];
      }
      z[0] += b[i];

      auto& a = next[i];
      if (!hidden) {
        a = z;
      } else {
        const double s = std::tanh(z[0]);
        a[0] = s;
        if constexpr (Components == 6) {
          const double t1 = 1.0 - s * s;
          const double t2 = -2.0 * s * t1;
          a[1] = t1 * z[1];
          a[2] = t1 * z[2];
          a[3] = t2 * z[1] * z[1] + t1 * z[3];
          a[4] = t2 * z[1] * z[2] + t1 * z[4];
          a[5] = t2 * z[2] * z[2] + t1 * z[5];
        }
      }
      for (int c = 0; c < Components; ++c) {
        if (!std::isfinite(a[c])) {
          throw NumericalOverflowError("non-finite value in layer " + std::to_string(l + 1) + " of " +
                                       arch.to_string());
        }
      }
    }
    in.swap(next);
  }
  return {std::move(in)};
}

}  // namespace bpinn::detail
