#include "avalign/video.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "avalign/errors.hpp"

namespace avalign {

void check_video(const VideoFeatureSeries& v) {
    if (v.activity.empty()) throw EmptyFeatures("video activity series is empty");
    if (v.frame_rate_hz <= 0.0) throw ParamOutOfRange("video frame_rate_hz must be positive");
    for (double a : v.activity) {
        if (!std::isfinite(a) || a < 0.0 || a > 1.0)
            throw ParamOutOfRange("video activity values must be finite and within [0, 1]");
    }
}

nlohmann::json video_to_json(const VideoFeatureSeries& v) {
    nlohmann::json j;
    j["frame_rate_hz"] = v.frame_rate_hz;
    j["activity"] = v.activity;
    j["labels"] = v.labels;
    if (!v.description_hint.empty()) j["description_hint"] = v.description_hint;
    return j;
}

VideoFeatureSeries video_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ParseError("video features must be a JSON object");
    VideoFeatureSeries v;
    if (j.contains("frame_rate_hz")) v.frame_rate_hz = j["frame_rate_hz"].get<double>();
    if (j.contains("activity")) v.activity = j["activity"].get<std::vector<double>>();
    if (j.contains("labels")) v.labels = j["labels"].get<std::vector<std::string>>();
    if (j.contains("description_hint")) v.description_hint = j["description_hint"].get<std::string>();
    return v;
}

VideoFeatureSeries load_video_features(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open video features: " + path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad video feature JSON: ") + e.what());
    }
    return video_from_json(j);
}

void save_video_features(const std::string& path, const VideoFeatureSeries& v) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw IoError("cannot write video features: " + path);
    f << video_to_json(v).dump(2) << "\n";
}

}  // namespace avalign
