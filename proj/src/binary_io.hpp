#pragma once

#include <bg2/common.hpp>

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

namespace bg2::detail {

class LeWriter {
public:
    explicit LeWriter(std::ostream& os) : os_(os) {}

    void bytes(const void* data, std::size_t n) { os_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n)); }

    void u16(std::uint16_t v)
    {
        const unsigned char b[2] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8)};
        bytes(b, 2);
    }
    void u32(std::uint32_t v)
    {
        unsigned char b[4];
        for (int i = 0; i < 4; ++i)
            b[i] = static_cast<unsigned char>(v >> (8 * i));
        bytes(b, 4);
    }
    void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
    void f32(double v) { f32(static_cast<float>(v)); }
    void string(const std::string& s)
    {
        u32(static_cast<std::uint32_t>(s.size()));
        bytes(s.data(), s.size());
    }

    void check()
    {
        if (!os_)
            throw Error(ErrorCode::IoError, "write failed");
    }

private:
    std::ostream& os_;
};

class LeReader {
public:
    explicit LeReader(std::istream& is) : is_(is) {}

    void bytes(void* data, std::size_t n)
    {
        is_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(is_.gcount()) != n)
            throw Error(ErrorCode::FormatError, "unexpected end of file");
    }
    std::uint16_t u16()
    {
        unsigned char b[2];
        bytes(b, 2);
        return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
    }
    std::uint32_t u32()
    {
        unsigned char b[4];
        bytes(b, 4);
        return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
               (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
    }
    float f32() { return std::bit_cast<float>(u32()); }
    std::string string(std::uint32_t maxLen = 1u << 16)
    {
        const std::uint32_t n = u32();
        if (n > maxLen)
            throw Error(ErrorCode::FormatError, "string length out of range");
        std::string s(n, '\0');
        bytes(s.data(), n);
        return s;
    }
    void magic(const char (&expected)[5])
    {
        char m[4];
        bytes(m, 4);
        if (std::memcmp(m, expected, 4) != 0)
            throw Error(ErrorCode::FormatError, std::string("bad magic, expected ") + expected);
    }

private:
    std::istream& is_;
};

} // namespace bg2::detail
