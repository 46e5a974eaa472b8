// Copyright 2026 The meshmatch authors
// SPDX-License-Identifier: Apache-2.0
//
// Content hashing for cache keys. FNV-1a (64-bit) is enough for
// content-addressed lookups at collection scale and keeps keys short.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace meshmatch {

constexpr std::uint64_t kFnvOffset = 1469598103934665603ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

constexpr std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = kFnvOffset) {
    std::uint64_t h = seed;
    for (char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= kFnvPrime;
    }
    return h;
}

// Hash of a file's raw bytes. Throws if the file cannot be read.
std::uint64_t hash_file(const std::filesystem::path& path);

// Fixed-width lowercase hex, usable as a path component.
std::string hash_hex(std::uint64_t h);

}  // namespace meshmatch
