#pragma once

// Thin wrapper over FFTW3 with a process-wide plan cache. Plans are created
// with FFTW_ESTIMATE so the chosen algorithm (and therefore every rounding
// decision) is identical from run to run. Execution goes through FFTW's
// new-array interface, which is safe to call concurrently.

#include <complex>
#include <span>

namespace kdvk::detail {

using cplx = std::complex<double>;

// Unnormalized sums: forward uses e^{-2 pi i jk/n}, backward e^{+2 pi i jk/n}.
void fft_forward(std::span<const cplx> in, std::span<cplx> out);
void fft_backward(std::span<const cplx> in, std::span<cplx> out);

// Real transforms; the half spectrum has n/2 + 1 entries.
void fft_r2c(std::span<const double> in, std::span<cplx> out);
// Destroys `in`.
void fft_c2r(std::span<cplx> in, std::span<double> out);

}  // namespace kdvk::detail
