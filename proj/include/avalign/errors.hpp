#pragma once

#include <stdexcept>
#include <string>

namespace avalign {

// Base for every error thrown by the library. Catching AvalignError at a
// pipeline boundary is guaranteed to cover all failure modes below.
struct AvalignError : std::runtime_error {
    explicit AvalignError(const std::string& msg) : std::runtime_error(msg) {}
};

// ---- audio / DSP ----
struct EmptyAudio : AvalignError {
    explicit EmptyAudio(const std::string& msg = "audio buffer is empty or shorter than one window")
        : AvalignError(msg) {}
};
struct TooShort : AvalignError {
    explicit TooShort(const std::string& msg) : AvalignError(msg) {}
};
struct ParamOutOfRange : AvalignError {
    explicit ParamOutOfRange(const std::string& msg) : AvalignError(msg) {}
};
struct SilentInput : AvalignError {
    explicit SilentInput(const std::string& msg = "input is entirely silent") : AvalignError(msg) {}
};
struct DegenerateWindow : AvalignError {
    explicit DegenerateWindow(const std::string& msg = "window overlap-add sum vanishes in the interior")
        : AvalignError(msg) {}
};

// ---- captioning / features ----
struct EmptyFeatures : AvalignError {
    explicit EmptyFeatures(const std::string& msg = "feature series is empty") : AvalignError(msg) {}
};
struct MissingFeatures : AvalignError {
    explicit MissingFeatures(const std::string& msg) : AvalignError(msg) {}
};

// ---- planning ----
struct UnparseablePlan : AvalignError {
    explicit UnparseablePlan(const std::string& msg) : AvalignError(msg) {}
};
struct IllegalAction : AvalignError {
    explicit IllegalAction(const std::string& msg) : AvalignError(msg) {}
};

// ---- scoring ----
struct DegenerateSeries : AvalignError {
    explicit DegenerateSeries(const std::string& msg = "series has no variance") : AvalignError(msg) {}
};
struct UnknownLabelNoFallback : AvalignError {
    explicit UnknownLabelNoFallback(const std::string& msg) : AvalignError(msg) {}
};

// ---- backend ----
struct BackendUnreachable : AvalignError {
    explicit BackendUnreachable(const std::string& msg) : AvalignError(msg) {}
};
struct BackendMalformedResponse : AvalignError {
    explicit BackendMalformedResponse(const std::string& msg) : AvalignError(msg) {}
};
struct Timeout : AvalignError {
    explicit Timeout(const std::string& msg) : AvalignError(msg) {}
};

// ---- corpus / manifests / IO ----
struct ParseError : AvalignError {
    ParseError(const std::string& msg, long line = -1)
        : AvalignError(line >= 0 ? msg + " (line " + std::to_string(line) + ")" : msg), line_number(line) {}
    long line_number;
};
struct InsufficientPairs : AvalignError {
    explicit InsufficientPairs(const std::string& msg) : AvalignError(msg) {}
};
struct MissingAudioFile : AvalignError {
    explicit MissingAudioFile(const std::string& msg) : AvalignError(msg) {}
};
struct IoError : AvalignError {
    explicit IoError(const std::string& msg) : AvalignError(msg) {}
};

}  // namespace avalign
