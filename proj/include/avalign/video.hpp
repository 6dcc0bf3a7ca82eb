#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace avalign {

// Precomputed per-frame visual activity stand-in for raw video: a bounded
// activity series plus content labels.
struct VideoFeatureSeries {
    double frame_rate_hz = 25.0;
    std::vector<double> activity;  // one value per frame, in [0, 1]
    std::vector<std::string> labels;
    std::string description_hint;

    double duration_s() const {
        return frame_rate_hz > 0 ? static_cast<double>(activity.size()) / frame_rate_hz : 0.0;
    }
};

void check_video(const VideoFeatureSeries& v);  // EmptyFeatures / ParamOutOfRange

nlohmann::json video_to_json(const VideoFeatureSeries& v);
VideoFeatureSeries video_from_json(const nlohmann::json& j);
VideoFeatureSeries load_video_features(const std::string& path);
void save_video_features(const std::string& path, const VideoFeatureSeries& v);

}  // namespace avalign
