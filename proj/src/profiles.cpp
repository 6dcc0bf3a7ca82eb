#include "avalign/profiles.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "avalign/errors.hpp"
#include "avalign/stft.hpp"

namespace avalign {

namespace {

std::vector<double> bump_profile(std::initializer_list<std::array<double, 3>> bumps, double floor_level) {
    // Each bump: {center_hz, width_hz, height} in log-magnitude units on the
    // 8 kHz / 128-bin view grid (one view bin ~ 31.4 Hz).
    std::vector<double> p(ClassProfileTable::kBins, floor_level);
    const StftConfig cfg{};
    for (int g = 0; g < ClassProfileTable::kBins; ++g) {
        double hz = view_bin_center_hz(g, cfg, 8000);
        for (const auto& b : bumps) {
            double d = (hz - b[0]) / b[1];
            p[static_cast<std::size_t>(g)] += b[2] * std::exp(-0.5 * d * d);
        }
    }
    return p;
}

}  // namespace

ClassProfileTable ClassProfileTable::builtin_defaults() {
    ClassProfileTable t;
    t.set("dog", bump_profile({{{600, 150, 3.0}}, {{1200, 250, 1.6}}}, 0.05));
    t.set("speech", bump_profile({{{300, 120, 2.6}}, {{1700, 500, 1.4}}}, 0.05));
    t.set("engine", bump_profile({{{90, 40, 3.4}}, {{190, 60, 2.2}}}, 0.05));
    t.set("bell", bump_profile({{{1400, 80, 3.2}}, {{2800, 120, 1.8}}}, 0.05));
    t.set("waterfall", bump_profile({{{2600, 1400, 1.6}}}, 0.7));
    t.set("music", bump_profile({{{440, 90, 2.8}}, {{880, 110, 1.9}}, {{1320, 130, 1.1}}}, 0.05));
    return t;
}

const std::vector<double>& ClassProfileTable::get(const std::string& label) const {
    auto it = profiles_.find(label);
    if (it == profiles_.end()) throw UnknownLabelNoFallback("no profile for label: " + label);
    return it->second;
}

void ClassProfileTable::set(const std::string& label, std::vector<double> profile) {
    if (static_cast<int>(profile.size()) != kBins)
        throw ParamOutOfRange("profile must have exactly 128 bins");
    profiles_[label] = std::move(profile);
}

std::vector<std::string> ClassProfileTable::labels() const {
    std::vector<std::string> out;
    out.reserve(profiles_.size());
    for (const auto& [k, v] : profiles_) out.push_back(k);
    return out;
}

double ClassProfileTable::centroid_hz(const std::string& label) const {
    const std::vector<double>& p = get(label);
    const StftConfig cfg{};
    double wsum = 0.0, msum = 0.0;
    for (int g = 0; g < kBins; ++g) {
        double mag = std::expm1(std::max(p[static_cast<std::size_t>(g)], 0.0));
        wsum += view_bin_center_hz(g, cfg, 8000) * mag;
        msum += mag;
    }
    return msum > 1e-12 ? wsum / msum : 0.0;
}

ClassProfileTable ClassProfileTable::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open profile table: " + path);
    std::string line;
    long line_no = 0;
    if (!std::getline(f, line)) throw ParseError("empty profile table", 1);
    ++line_no;
    if (line != std::string("# ") + kVersion)
        throw ParseError("unexpected profile table version header: " + line, line_no);

    ClassProfileTable t;
    std::string label;
    while (std::getline(f, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string word;
        ss >> word;
        if (word == "label") {
            ss >> label;
            if (label.empty()) throw ParseError("label line without a name", line_no);
        } else if (word == "bins") {
            int n = 0;
            ss >> n;
            if (n != kBins) throw ParseError("profile table must use 128 bins", line_no);
        } else {
            if (label.empty()) throw ParseError("profile values before any label", line_no);
            std::vector<double> vals;
            vals.reserve(kBins);
            std::istringstream vs(line);
            double v;
            while (vs >> v) vals.push_back(v);
            if (static_cast<int>(vals.size()) != kBins)
                throw ParseError("expected 128 values for label " + label, line_no);
            t.set(label, std::move(vals));
            label.clear();
        }
    }
    return t;
}

void ClassProfileTable::save(const std::string& path) const {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw IoError("cannot write profile table: " + path);
    f << "# " << kVersion << "\n";
    for (const auto& [label, p] : profiles_) {
        f << "label " << label << "\n";
        f << "bins " << kBins << "\n";
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (i) f << ' ';
            f << p[i];
        }
        f << "\n";
    }
}

}  // namespace avalign
