#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace avalign::fft {

std::size_t next_pow2(std::size_t n);

// In-place radix-2 transform; a.size() must be a power of two. The inverse
// includes the 1/N scale so transform(transform(x), inverse) == x.
void transform(std::vector<std::complex<double>>& a, bool inverse);

}  // namespace avalign::fft
