#include "avalign/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "avalign/errors.hpp"
#include "avalign/resample.hpp"

namespace avalign {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xfffe;

std::uint32_t rd_u32(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}
std::uint16_t rd_u16(const std::uint8_t* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void wr_u32(std::vector<std::uint8_t>& v, std::uint32_t x) {
    v.push_back(static_cast<std::uint8_t>(x & 0xff));
    v.push_back(static_cast<std::uint8_t>((x >> 8) & 0xff));
    v.push_back(static_cast<std::uint8_t>((x >> 16) & 0xff));
    v.push_back(static_cast<std::uint8_t>((x >> 24) & 0xff));
}
void wr_u16(std::vector<std::uint8_t>& v, std::uint16_t x) {
    v.push_back(static_cast<std::uint8_t>(x & 0xff));
    v.push_back(static_cast<std::uint8_t>((x >> 8) & 0xff));
}

}  // namespace

AudioBuffer decode_wav(const std::vector<std::uint8_t>& bytes, WavInfo* info) {
    if (bytes.size() < 44 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
        throw ParseError("not a RIFF/WAVE byte stream");

    std::uint16_t fmt_tag = 0, channels = 0, bits = 0;
    std::uint32_t rate = 0;
    const std::uint8_t* data = nullptr;
    std::size_t data_len = 0;
    bool have_fmt = false;

    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const std::uint8_t* hdr = bytes.data() + pos;
        std::uint32_t chunk_len = rd_u32(hdr + 4);
        std::size_t body = pos + 8;
        if (body + chunk_len > bytes.size()) chunk_len = static_cast<std::uint32_t>(bytes.size() - body);
        if (std::memcmp(hdr, "fmt ", 4) == 0 && chunk_len >= 16) {
            fmt_tag = rd_u16(bytes.data() + body);
            channels = rd_u16(bytes.data() + body + 2);
            rate = rd_u32(bytes.data() + body + 4);
            bits = rd_u16(bytes.data() + body + 14);
            if (fmt_tag == kFormatExtensible && chunk_len >= 40)
                fmt_tag = rd_u16(bytes.data() + body + 24);
            have_fmt = true;
        } else if (std::memcmp(hdr, "data", 4) == 0) {
            data = bytes.data() + body;
            data_len = chunk_len;
        }
        pos = body + chunk_len + (chunk_len & 1);
    }

    if (!have_fmt || data == nullptr) throw ParseError("WAV missing fmt or data chunk");
    if (channels == 0 || rate == 0) throw ParseError("WAV has zero channels or rate");

    WavFormat format;
    std::size_t bytes_per_sample;
    if (fmt_tag == kFormatPcm && bits == 16) {
        format = WavFormat::pcm16;
        bytes_per_sample = 2;
    } else if (fmt_tag == kFormatFloat && bits == 32) {
        format = WavFormat::float32;
        bytes_per_sample = 4;
    } else {
        throw ParseError("unsupported WAV encoding (need pcm16 or float32)");
    }

    std::size_t frame_bytes = bytes_per_sample * channels;
    std::size_t frames = data_len / frame_bytes;

    AudioBuffer out;
    out.sample_rate_hz = static_cast<int>(rate);
    out.samples.resize(frames);
    for (std::size_t i = 0; i < frames; ++i) {
        double acc = 0.0;
        for (std::uint16_t c = 0; c < channels; ++c) {
            const std::uint8_t* p = data + i * frame_bytes + c * bytes_per_sample;
            if (format == WavFormat::pcm16) {
                std::int16_t s = 0;
                std::memcpy(&s, p, 2);
                acc += static_cast<double>(s) / 32768.0;
            } else {
                float s = 0.0f;
                std::memcpy(&s, p, 4);
                acc += static_cast<double>(s);
            }
        }
        out.samples[i] = acc / channels;
    }

    if (info) {
        info->sample_rate_hz = out.sample_rate_hz;
        info->channels = channels;
        info->format = format;
        info->frames = frames;
    }
    return out;
}

AudioBuffer read_wav(const std::string& path, WavInfo* info) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw MissingAudioFile("cannot open WAV file: " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    try {
        return decode_wav(bytes, info);
    } catch (const ParseError& e) {
        throw ParseError(std::string(e.what()) + ": " + path);
    }
}

std::vector<std::uint8_t> encode_wav(const AudioBuffer& audio, WavFormat format) {
    check_audio(audio);
    const std::size_t n = audio.samples.size();
    const std::uint16_t bits = format == WavFormat::pcm16 ? 16 : 32;
    const std::uint32_t byte_rate = static_cast<std::uint32_t>(audio.sample_rate_hz) * bits / 8;
    const std::uint32_t data_len = static_cast<std::uint32_t>(n * bits / 8);

    std::vector<std::uint8_t> out;
    out.reserve(44 + data_len);
    out.insert(out.end(), {'R', 'I', 'F', 'F'});
    wr_u32(out, 36 + data_len);
    out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
    wr_u32(out, 16);
    wr_u16(out, format == WavFormat::pcm16 ? kFormatPcm : kFormatFloat);
    wr_u16(out, 1);
    wr_u32(out, static_cast<std::uint32_t>(audio.sample_rate_hz));
    wr_u32(out, byte_rate);
    wr_u16(out, static_cast<std::uint16_t>(bits / 8));
    wr_u16(out, bits);
    out.insert(out.end(), {'d', 'a', 't', 'a'});
    wr_u32(out, data_len);

    for (double s : audio.samples) {
        if (format == WavFormat::pcm16) {
            long v = std::lround(s * 32768.0);
            v = std::clamp(v, -32768l, 32767l);
            std::int16_t sv = static_cast<std::int16_t>(v);
            std::uint8_t b[2];
            std::memcpy(b, &sv, 2);
            out.push_back(b[0]);
            out.push_back(b[1]);
        } else {
            float fv = static_cast<float>(s);
            std::uint8_t b[4];
            std::memcpy(b, &fv, 4);
            out.insert(out.end(), b, b + 4);
        }
    }
    return out;
}

void write_wav(const std::string& path, const AudioBuffer& audio, WavFormat format) {
    std::vector<std::uint8_t> bytes = encode_wav(audio, format);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open for writing: " + path);
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw IoError("short write: " + path);
}

AudioBuffer load_audio(const std::string& path, int target_rate_hz) {
    AudioBuffer a = read_wav(path);
    if (a.empty()) throw EmptyAudio("WAV has no samples: " + path);
    if (a.sample_rate_hz != target_rate_hz) a = resample(a, target_rate_hz);
    return a;
}

}  // namespace avalign
