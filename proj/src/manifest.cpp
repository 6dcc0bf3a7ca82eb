#include "avalign/manifest.hpp"

#include <fstream>

#include "avalign/errors.hpp"

namespace avalign {

nlohmann::json record_to_json(const AVPairRecord& r) {
    nlohmann::json j = r.extra.is_object() ? r.extra : nlohmann::json::object();
    j["pair_id"] = r.pair_id;
    j["audio"] = r.audio_path;
    j["video"] = video_to_json(r.video);
    if (!r.ground_truth.is_null()) j["ground_truth"] = r.ground_truth;
    return j;
}

AVPairRecord record_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ParseError("manifest record must be a JSON object");
    if (!j.contains("pair_id") || !j["pair_id"].is_string())
        throw ParseError("manifest record needs a string pair_id");
    if (!j.contains("audio") || !j["audio"].is_string())
        throw ParseError("manifest record needs a string audio path");
    if (!j.contains("video") || !j["video"].is_object())
        throw ParseError("manifest record needs a video object");

    AVPairRecord r;
    r.pair_id = j["pair_id"].get<std::string>();
    r.audio_path = j["audio"].get<std::string>();
    r.video = video_from_json(j["video"]);
    if (j.contains("ground_truth")) r.ground_truth = j["ground_truth"];
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (it.key() == "pair_id" || it.key() == "audio" || it.key() == "video" ||
            it.key() == "ground_truth")
            continue;
        r.extra[it.key()] = it.value();
    }
    return r;
}

std::vector<AVPairRecord> read_manifest(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open manifest: " + path);
    std::vector<AVPairRecord> out;
    std::string line;
    long line_no = 0;
    while (std::getline(f, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("bad manifest JSON: ") + e.what(), line_no);
        }
        try {
            out.push_back(record_from_json(j));
        } catch (const ParseError& e) {
            throw ParseError(e.what(), line_no);
        }
    }
    return out;
}

void write_manifest(const std::string& path, const std::vector<AVPairRecord>& records) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw IoError("cannot write manifest: " + path);
    for (const AVPairRecord& r : records) f << record_to_json(r).dump() << "\n";
}

}  // namespace avalign
