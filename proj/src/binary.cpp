#include "kgpe/binary.hpp"

#include "kgpe/error.hpp"

#include <bit>
#include <cstring>

namespace kgpe::binary {

Writer::Writer(const std::filesystem::path& path) : path_(path), out_(path, std::ios::binary)
{
    if (!out_)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
}

void Writer::bytes(const unsigned char* p, std::size_t n)
{
    out_.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n));
    if (!out_)
        throw std::runtime_error("write failed: " + path_.string());
}

void Writer::magic(std::string_view tag)
{
    if (tag.size() != 8)
        throw std::logic_error("magic headers are eight bytes");
    bytes(reinterpret_cast<const unsigned char*>(tag.data()), 8);
}

void Writer::u32(std::uint32_t v)
{
    unsigned char b[4];
    for (int i = 0; i < 4; ++i)
        b[i] = static_cast<unsigned char>(v >> (8 * i));
    bytes(b, 4);
}

void Writer::f64(double v)
{
    const auto bits = std::bit_cast<std::uint64_t>(v);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i)
        b[i] = static_cast<unsigned char>(bits >> (8 * i));
    bytes(b, 8);
}

void Writer::f64s(std::span<const double> v)
{
    if constexpr (std::endian::native == std::endian::little) {
        bytes(reinterpret_cast<const unsigned char*>(v.data()), v.size_bytes());
    } else {
        for (double d : v)
            f64(d);
    }
}

void Writer::close()
{
    out_.close();
    if (!out_)
        throw std::runtime_error("close failed: " + path_.string());
}

Reader::Reader(const std::filesystem::path& path) : path_(path), in_(path, std::ios::binary)
{
    if (!in_)
        throw std::runtime_error("cannot open " + path.string());
}

void Reader::bytes(unsigned char* p, std::size_t n)
{
    in_.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(n));
    if (!in_)
        throw FormatError(path_.string() + ": truncated file");
}

void Reader::expect_magic(std::string_view tag)
{
    char b[8];
    bytes(reinterpret_cast<unsigned char*>(b), 8);
    if (std::string_view(b, 8) != tag)
        throw FormatError(path_.string() + ": expected header " + std::string(tag));
}

std::uint32_t Reader::u32()
{
    unsigned char b[4];
    bytes(b, 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
        v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

double Reader::f64()
{
    unsigned char b[8];
    bytes(b, 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
        v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return std::bit_cast<double>(v);
}

void Reader::f64s(std::span<double> v)
{
    if constexpr (std::endian::native == std::endian::little) {
        bytes(reinterpret_cast<unsigned char*>(v.data()), v.size_bytes());
    } else {
        for (double& d : v)
            d = f64();
    }
}

bool Reader::at_end()
{
    return in_.peek() == std::char_traits<char>::eof();
}

} // namespace kgpe::binary
