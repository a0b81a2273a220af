#pragma once

#include <span>

#include "bpinn/net.hpp"
#include "bpinn/types.hpp"

namespace bpinn {

/// Values and first/second spatial derivatives of all four outputs at one
/// point, by forward propagation of truncated second-order Taylor jets.
///
/// The value path performs exactly the same floating point operations as
/// forward(), so jet values agree with it bit for bit. Throws
/// NumericalOverflowError naming the layer if a non-finite value appears.
FieldJet2 evaluate_jet(const MLPArchitecture& arch, std::span<const double> params, Point2 point);

inline FieldJet2 evaluate_jet(const MLPArchitecture& arch, const ParameterVector& params, Point2 point) {
  return evaluate_jet(arch, params.values(), point);
}

}  // namespace bpinn
