#pragma once

#include <complex>
#include <vector>

namespace metacombine {

// In-place iterative radix-2 FFT; a.size() must be a power of two.
void fft_inplace(std::vector<std::complex<double>>& a, bool inverse);

// Linear convolution of two nonnegative mass vectors; output has length
// a.size() + b.size() - 1. Small products are convolved directly, larger
// ones through a power-of-two FFT with both inputs packed into one complex
// transform. Negative roundoff in the FFT output is clamped to zero; the
// clamped total is accumulated into *clamped if given.
std::vector<double> convolve_mass(const std::vector<double>& a,
                                  const std::vector<double>& b,
                                  double* clamped = nullptr);

}  // namespace metacombine
