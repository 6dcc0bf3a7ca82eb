#include "avalign/wavelet.hpp"

#include <cmath>

#include "avalign/errors.hpp"

namespace avalign {

namespace {

std::vector<double> scaling_filter(Wavelet w) {
    if (w == Wavelet::haar) {
        const double r = 1.0 / std::sqrt(2.0);
        return {r, r};
    }
    // Daubechies with four vanishing moments, eight taps.
    return {0.23037781330885523,  0.7148465705525415,   0.6308807679295904,
            -0.02798376941698385, -0.18703481171888114, 0.030841381835986965,
            0.032883011666982945, -0.010597401784997278};
}

std::vector<double> detail_filter(const std::vector<double>& h) {
    std::vector<double> g(h.size());
    for (std::size_t m = 0; m < h.size(); ++m) {
        double v = h[h.size() - 1 - m];
        g[m] = (m % 2 == 0) ? v : -v;
    }
    return g;
}

void step_forward(const std::vector<double>& x, const std::vector<double>& h,
                  const std::vector<double>& g, std::vector<double>& a, std::vector<double>& d) {
    const std::size_t n = x.size();
    const std::size_t half = n / 2;
    a.assign(half, 0.0);
    d.assign(half, 0.0);
    for (std::size_t k = 0; k < half; ++k) {
        double sa = 0.0, sd = 0.0;
        for (std::size_t m = 0; m < h.size(); ++m) {
            double v = x[(2 * k + m) % n];
            sa += h[m] * v;
            sd += g[m] * v;
        }
        a[k] = sa;
        d[k] = sd;
    }
}

void step_inverse(const std::vector<double>& a, const std::vector<double>& d,
                  const std::vector<double>& h, const std::vector<double>& g,
                  std::vector<double>& x) {
    const std::size_t n = a.size() * 2;
    x.assign(n, 0.0);
    for (std::size_t k = 0; k < a.size(); ++k) {
        for (std::size_t m = 0; m < h.size(); ++m) {
            std::size_t i = (2 * k + m) % n;
            x[i] += h[m] * a[k] + g[m] * d[k];
        }
    }
}

}  // namespace

WaveletCoeffs dwt(const std::vector<double>& x, Wavelet w, int levels) {
    if (x.empty()) throw EmptyAudio("wavelet input is empty");
    if (levels < 1) throw ParamOutOfRange("wavelet levels must be >= 1");

    const std::vector<double> h = scaling_filter(w);
    const std::vector<double> g = detail_filter(h);

    // Cap depth so every level keeps at least filter-length coefficients.
    int max_levels = 0;
    std::size_t len = x.size();
    while ((len >> (max_levels + 1)) >= h.size()) ++max_levels;
    if (max_levels < 1) throw TooShort("signal too short for one wavelet level");
    if (levels > max_levels) levels = max_levels;

    std::size_t unit = static_cast<std::size_t>(1) << levels;
    std::size_t padded = ((x.size() + unit - 1) / unit) * unit;

    WaveletCoeffs c;
    c.origin_len = x.size();
    c.padded_len = padded;
    c.wavelet = w;

    std::vector<double> cur(padded, 0.0);
    std::copy(x.begin(), x.end(), cur.begin());
    for (int l = 0; l < levels; ++l) {
        std::vector<double> a, d;
        step_forward(cur, h, g, a, d);
        c.details.push_back(std::move(d));
        cur = std::move(a);
    }
    c.approx = std::move(cur);
    return c;
}

std::vector<double> idwt(const WaveletCoeffs& c) {
    if (c.details.empty()) throw EmptyAudio("no wavelet coefficients");
    const std::vector<double> h = scaling_filter(c.wavelet);
    const std::vector<double> g = detail_filter(h);

    std::vector<double> cur = c.approx;
    for (std::size_t l = c.details.size(); l-- > 0;) {
        std::vector<double> next;
        step_inverse(cur, c.details[l], h, g, next);
        cur = std::move(next);
    }
    cur.resize(c.origin_len);
    return cur;
}

}  // namespace avalign
