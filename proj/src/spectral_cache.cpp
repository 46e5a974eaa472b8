// Copyright 2026 The meshmatch authors
// SPDX-License-Identifier: Apache-2.0

#include "meshmatch/spectral_cache.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace meshmatch {

namespace {

constexpr char kMagic[8] = {'m', 'm', 's', 'p', 'e', 'c', '0', '1'};

template <typename T>
void put(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in, const std::filesystem::path& path) {
    T v;
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw std::runtime_error(path.string() + ": truncated spectral cache");
    return v;
}

}  // namespace

void save_spectral_cache(const std::filesystem::path& path, const SpectralBasis& basis,
                         std::uint64_t mesh_hash) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error(tmp.string() + ": cannot open cache for writing");
        out.write(kMagic, sizeof(kMagic));
        put<std::uint64_t>(out, mesh_hash);
        const std::int64_t m = basis.eigenfunctions.rows();
        const std::int64_t k = basis.size();
        put(out, m);
        put(out, k);
        out.write(reinterpret_cast<const char*>(basis.eigenvalues.data()),
                  static_cast<std::streamsize>(sizeof(double) * static_cast<size_t>(k)));
        out.write(reinterpret_cast<const char*>(basis.eigenfunctions.data()),
                  static_cast<std::streamsize>(sizeof(double) * static_cast<size_t>(m * k)));
        out.write(reinterpret_cast<const char*>(basis.mass_diagonal.data()),
                  static_cast<std::streamsize>(sizeof(double) * static_cast<size_t>(m)));
        if (!out) throw std::runtime_error(tmp.string() + ": cache write failed");
    }
    std::filesystem::rename(tmp, path);
}

std::optional<SpectralBasis> load_spectral_cache(const std::filesystem::path& path,
                                                 std::uint64_t mesh_hash) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;

    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(magic)) != 0) return std::nullopt;
    if (get<std::uint64_t>(in, path) != mesh_hash) return std::nullopt;

    const auto m = get<std::int64_t>(in, path);
    const auto k = get<std::int64_t>(in, path);
    if (m <= 0 || k <= 0 || k > m)
        throw std::runtime_error(path.string() + ": corrupt spectral cache dimensions");

    SpectralBasis basis;
    basis.eigenvalues.resize(k);
    basis.eigenfunctions.resize(m, k);
    basis.mass_diagonal.resize(m);
    in.read(reinterpret_cast<char*>(basis.eigenvalues.data()),
            static_cast<std::streamsize>(sizeof(double) * static_cast<size_t>(k)));
    in.read(reinterpret_cast<char*>(basis.eigenfunctions.data()),
            static_cast<std::streamsize>(sizeof(double) * static_cast<size_t>(m * k)));
    in.read(reinterpret_cast<char*>(basis.mass_diagonal.data()),
            static_cast<std::streamsize>(sizeof(double) * static_cast<size_t>(m)));
    if (!in) throw std::runtime_error(path.string() + ": truncated spectral cache");
    return basis;
}

}  // namespace meshmatch
