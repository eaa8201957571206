#pragma once

#include <complex>
#include <span>

namespace mfglab::detail {

/// Unnormalized d-dimensional complex DFT on an n^d grid.
/// sign = -1 computes sum_j f_j e^{-2pi i jk/n}; sign = +1 the inverse sum.
/// Plans are created once per (d, n, sign) and shared between threads.
void fft(int d, int n, int sign, std::span<const std::complex<double>> in,
         std::span<std::complex<double>> out);

}  // namespace mfglab::detail
