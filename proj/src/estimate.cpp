#include "lrd/estimate.hpp"

namespace lrd {

const char* to_string(EstimateMethod method) noexcept {
  switch (method) {
    case EstimateMethod::dfa: return "dfa";
    case EstimateMethod::wavelet_ols: return "wavelet-ols";
    case EstimateMethod::wavelet_gls: return "wavelet-gls";
  }
  return "unknown";
}

}  // namespace lrd
