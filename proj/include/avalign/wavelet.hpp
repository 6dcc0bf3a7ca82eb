#pragma once

#include <vector>

namespace avalign {

enum class Wavelet { haar, db4 };

struct WaveletCoeffs {
    std::vector<double> approx;                // coarsest level
    std::vector<std::vector<double>> details;  // details[0] = finest
    std::size_t padded_len = 0;
    std::size_t origin_len = 0;
    Wavelet wavelet = Wavelet::db4;
};

// Periodized orthogonal DWT. The input is zero-padded to a multiple of
// 2^levels; reconstruction trims back to origin_len.
WaveletCoeffs dwt(const std::vector<double>& x, Wavelet w, int levels);
std::vector<double> idwt(const WaveletCoeffs& c);

}  // namespace avalign
