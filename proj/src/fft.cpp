#include "metacombine/fft.hpp"

#include <cmath>
#include <cstddef>

namespace metacombine {

namespace {

constexpr std::size_t kDirectCutoff = 256;

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

std::vector<double> convolve_direct(const std::vector<double>& a,
                                    const std::vector<double>& b) {
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0.0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    }
    return out;
}

}  // namespace

void fft_inplace(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    if (n <= 1) return;

    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }

    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * M_PI / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }

    if (inverse) {
        const double scale = 1.0 / static_cast<double>(n);
        for (auto& x : a) x *= scale;
    }
}

std::vector<double> convolve_mass(const std::vector<double>& a,
                                  const std::vector<double>& b,
                                  double* clamped) {
    const std::size_t out_len = a.size() + b.size() - 1;
    if (out_len < kDirectCutoff || a.size() <= 8 || b.size() <= 8)
        return convolve_direct(a, b);

    const std::size_t n = next_pow2(out_len);
    // Pack a into the real and b into the imaginary part; one forward
    // transform yields both spectra by Hermitian symmetry.
    std::vector<std::complex<double>> z(n, {0.0, 0.0});
    for (std::size_t i = 0; i < a.size(); ++i) z[i] = {a[i], 0.0};
    for (std::size_t i = 0; i < b.size(); ++i) z[i] += std::complex<double>(0.0, b[i]);
    fft_inplace(z, false);

    std::vector<std::complex<double>> prod(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::complex<double> zk = z[k];
        const std::complex<double> zc = std::conj(z[(n - k) & (n - 1)]);
        const std::complex<double> fa = 0.5 * (zk + zc);
        const std::complex<double> fb = std::complex<double>(0.0, -0.5) * (zk - zc);
        prod[k] = fa * fb;
    }
    fft_inplace(prod, true);

    std::vector<double> out(out_len);
    double clamp_total = 0.0;
    for (std::size_t i = 0; i < out_len; ++i) {
        double v = prod[i].real();
        if (v < 0.0) {
            clamp_total -= v;
            v = 0.0;
        }
        out[i] = v;
    }
    if (clamped) *clamped += clamp_total;
    return out;
}

}  // namespace metacombine
