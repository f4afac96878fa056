#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace bilat {

// In-place iterative radix-2 FFT. a.size() must be a power of two.
void fft_radix2(std::vector<std::complex<double>>& a);

size_t next_pow2(size_t n);

}  // namespace bilat
