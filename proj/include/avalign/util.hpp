#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace avalign {

// FNV-1a over arbitrary bytes; used to fingerprint audio buffers in traces.
std::uint64_t fnv1a(const void* data, std::size_t len);
std::string hex64(std::uint64_t v);

// Stable per-item seed derivation: mixes a base seed with a string key so
// results do not depend on scheduling or worker count.
std::uint64_t derive_seed(std::uint64_t base, const std::string& key);

std::string base64_encode(const std::vector<std::uint8_t>& data);
std::vector<std::uint8_t> base64_decode(const std::string& text);

// Fixed-format float for reports: %.4f, locale independent.
std::string fmt_fixed(double v, int digits = 4);

}  // namespace avalign
