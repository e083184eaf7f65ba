#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string_view>

namespace kgpe::binary {

// Little-endian primitive writers/readers for the KGPE dump formats.
// Every magic header is exactly eight bytes.
class Writer {
public:
    explicit Writer(const std::filesystem::path& path);

    void magic(std::string_view tag);
    void u32(std::uint32_t v);
    void f64(double v);
    void f64s(std::span<const double> v);
    void close();

private:
    void bytes(const unsigned char* p, std::size_t n);
    std::filesystem::path path_;
    std::ofstream out_;
};

class Reader {
public:
    explicit Reader(const std::filesystem::path& path);

    void expect_magic(std::string_view tag);
    std::uint32_t u32();
    double f64();
    void f64s(std::span<double> v);
    bool at_end();

private:
    void bytes(unsigned char* p, std::size_t n);
    std::filesystem::path path_;
    std::ifstream in_;
};

} // namespace kgpe::binary
