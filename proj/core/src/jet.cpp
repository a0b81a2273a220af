#include "bpinn/jet.hpp"

#include "propagate.hpp"

namespace bpinn {

FieldJet2 evaluate_jet(const MLPArchitecture& arch, std::span<const double> params, Point2 point) {
  const auto prop = detail::propagate_point<6>(arch, params, point);
  FieldJet2 jet;
  for (Field f : kFields) {
    const auto& o = prop.out[static_cast<std::size_t>(f)];
    jet[f] = Jet2{o[0], o[1], o[2], o[3], o[4], o[5]};
  }
  return jet;
}

}  // namespace bpinn
