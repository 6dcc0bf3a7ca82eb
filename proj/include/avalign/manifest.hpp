#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "avalign/video.hpp"

namespace avalign {

// One line of a corpus manifest. Unknown fields survive a read/write round
// trip via `extra`.
struct AVPairRecord {
    std::string pair_id;
    std::string audio_path;  // relative to the manifest directory
    VideoFeatureSeries video;
    nlohmann::json ground_truth;  // null when absent
    nlohmann::json extra = nlohmann::json::object();
};

nlohmann::json record_to_json(const AVPairRecord& r);
AVPairRecord record_from_json(const nlohmann::json& j);

// Line-delimited JSON with sorted keys; write(read(x)) is byte identical for
// files produced by write_manifest.
std::vector<AVPairRecord> read_manifest(const std::string& path);
void write_manifest(const std::string& path, const std::vector<AVPairRecord>& records);

}  // namespace avalign
