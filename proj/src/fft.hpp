// Thin RAII layer over FFTW. Plan creation is serialized (the FFTW planner is
// not re-entrant); execution on private buffers is safe from any thread.
#ifndef LRD_SRC_FFT_HPP
#define LRD_SRC_FFT_HPP

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace lrd::fft {

using cplx = std::complex<double>;

/// Forward real-to-complex transform: n reals -> n/2 + 1 bins,
/// X_k = sum_j x_j exp(-2 pi i j k / n).
std::vector<cplx> forward_real(std::span<const double> x);

/// Inverse of forward_real without the 1/n factor:
/// x_j = sum over the full Hermitian spectrum of X_k exp(+2 pi i j k / n).
std::vector<double> backward_real(std::span<const cplx> half_spectrum, std::size_t n);

/// Unnormalized complex transform, sign -1 (forward) or +1 (backward).
std::vector<cplx> complex_transform(std::span<const cplx> x, int sign);

}  // namespace lrd::fft

#endif
