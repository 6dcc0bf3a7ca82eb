#pragma once

#include <map>
#include <string>
#include <vector>

namespace avalign {

// Per-class reference spectra in the 128-bin log-magnitude space of the
// default analysis grid. Stored as a versioned plain-text table.
class ClassProfileTable {
public:
    static constexpr int kBins = 128;
    static constexpr const char* kVersion = "avalign-profiles v1";

    static ClassProfileTable builtin_defaults();
    static ClassProfileTable load(const std::string& path);
    void save(const std::string& path) const;

    bool has(const std::string& label) const { return profiles_.count(label) > 0; }
    const std::vector<double>& get(const std::string& label) const;
    void set(const std::string& label, std::vector<double> profile);
    std::vector<std::string> labels() const;
    bool empty() const { return profiles_.empty(); }

    // Linear-magnitude spectral centroid of a stored profile, in Hz on the
    // default 8 kHz grid.
    double centroid_hz(const std::string& label) const;

private:
    std::map<std::string, std::vector<double>> profiles_;
};

}  // namespace avalign
