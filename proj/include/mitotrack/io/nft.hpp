#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numeric>
#include <string>
#include <type_traits>
#include <vector>

#include "mitotrack/common.hpp"

namespace mitotrack::io {

/// Dense little-endian tensor file:
///   magic (4 ASCII bytes) | u32 rank | rank x u32 dims | payload, row-major.
/// Magic "NFT1" = float32 payload, "NFI1" = int32 payload.
template <typename T>
struct Tensor {
    std::vector<std::uint32_t> dims;
    std::vector<T> data;

    std::size_t size() const {
        return std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                               [](std::size_t a, std::uint32_t d) { return a * d; });
    }
};

using FloatTensor = Tensor<float>;
using IntTensor = Tensor<std::int32_t>;

namespace detail {

template <typename T>
const char* nft_magic() {
    if constexpr (std::is_same_v<T, float>)
        return "NFT1";
    else
        return "NFI1";
}

inline std::uint32_t read_u32(std::istream& in, const std::string& path) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4))
        throw BadTensorHeader(path + ": truncated header");
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

inline void write_u32(std::ostream& out, std::uint32_t v) {
    const unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                                static_cast<unsigned char>((v >> 8) & 0xff),
                                static_cast<unsigned char>((v >> 16) & 0xff),
                                static_cast<unsigned char>((v >> 24) & 0xff)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

}  // namespace detail

template <typename T>
Tensor<T> read_nft(const std::string& path) {
    static_assert(sizeof(T) == 4);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw BadTensorHeader(path + ": cannot open");

    char magic[4];
    if (!in.read(magic, 4)) throw BadTensorHeader(path + ": truncated header");
    if (std::memcmp(magic, detail::nft_magic<T>(), 4) != 0)
        throw BadTensorHeader(path + ": bad magic '" + std::string(magic, 4) + "'");

    Tensor<T> t;
    const std::uint32_t rank = detail::read_u32(in, path);
    if (rank == 0 || rank > 8) throw BadTensorHeader(path + ": bad rank " + std::to_string(rank));
    t.dims.resize(rank);
    for (auto& d : t.dims) d = detail::read_u32(in, path);

    t.data.resize(t.size());
    if (!in.read(reinterpret_cast<char*>(t.data.data()),
                 static_cast<std::streamsize>(t.data.size() * sizeof(T))))
        throw BadTensorHeader(path + ": truncated payload");

    if constexpr (std::endian::native == std::endian::big)
        for (auto& v : t.data) {
            auto* p = reinterpret_cast<unsigned char*>(&v);
            std::swap(p[0], p[3]);
            std::swap(p[1], p[2]);
        }
    return t;
}

template <typename T>
void write_nft(const std::string& path, const Tensor<T>& t) {
    static_assert(sizeof(T) == 4);
    static_assert(std::endian::native == std::endian::little,
                  "big-endian write not implemented");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out.write(detail::nft_magic<T>(), 4);
    detail::write_u32(out, static_cast<std::uint32_t>(t.dims.size()));
    for (auto d : t.dims) detail::write_u32(out, d);
    out.write(reinterpret_cast<const char*>(t.data.data()),
              static_cast<std::streamsize>(t.data.size() * sizeof(T)));
    if (!out) throw std::runtime_error(path + ": write failed");
}

}  // namespace mitotrack::io
