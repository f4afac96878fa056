#pragma once

#include <cstdint>
#include <string>

namespace bilat {

// FNV-1a 64-bit content hash, used by the run manifest.
inline uint64_t fnv1a64(const void* data, size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    uint64_t h = 0xcbf29ce484222325ULL;
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

std::string hex64(uint64_t h);

// hash of a file's bytes; throws on missing file
uint64_t hash_file(const std::string& path);

}  // namespace bilat
