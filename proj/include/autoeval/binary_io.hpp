#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "autoeval/errors.hpp"

namespace autoeval {

// Little-endian binary writer/reader for the checkpoint and bundle formats.
// Multi-byte fields are serialized byte-by-byte so the on-disk layout is
// fixed regardless of host endianness.

class BinaryWriter {
public:
    explicit BinaryWriter(const std::string& path)
        : out_(path, std::ios::binary), path_(path) {
        if (!out_) throw Error(ErrorKind::kFormat, "cannot open for writing: " + path);
    }

    void magic(const char tag[4]) { out_.write(tag, 4); }

    void u8(std::uint8_t v) { out_.put(static_cast<char>(v)); }

    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out_.put(static_cast<char>((v >> (8 * i)) & 0xFF));
    }

    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) out_.put(static_cast<char>((v >> (8 * i)) & 0xFF));
    }

    void f32(float v) {
        std::uint32_t bits;
        static_assert(sizeof(bits) == sizeof(v));
        std::memcpy(&bits, &v, 4);
        u32(bits);
    }

    void f64(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, 8);
        u64(bits);
    }

    void f32_array(const float* data, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) f32(data[i]);
    }

    void f64_array(const double* data, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) f64(data[i]);
    }

    void u32_array(const std::uint32_t* data, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) u32(data[i]);
    }

    void str(const std::string& s) {
        u32(static_cast<std::uint32_t>(s.size()));
        out_.write(s.data(), static_cast<std::streamsize>(s.size()));
    }

    void close() {
        out_.close();
        if (!out_) throw Error(ErrorKind::kFormat, "write failed: " + path_);
    }

private:
    std::ofstream out_;
    std::string path_;
};

class BinaryReader {
public:
    explicit BinaryReader(const std::string& path)
        : in_(path, std::ios::binary), path_(path) {
        if (!in_) throw Error(ErrorKind::kFormat, "cannot open for reading: " + path);
    }

    void expect_magic(const char tag[4]) {
        char got[4];
        read_raw(got, 4);
        if (std::memcmp(got, tag, 4) != 0)
            throw Error(ErrorKind::kFormat, "bad magic in " + path_);
    }

    std::uint8_t u8() {
        char c;
        read_raw(&c, 1);
        return static_cast<std::uint8_t>(c);
    }

    std::uint32_t u32() {
        unsigned char b[4];
        read_raw(reinterpret_cast<char*>(b), 4);
        return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
               (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
    }

    std::uint64_t u64() {
        std::uint64_t v = 0;
        unsigned char b[8];
        read_raw(reinterpret_cast<char*>(b), 8);
        for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
        return v;
    }

    float f32() {
        std::uint32_t bits = u32();
        float v;
        std::memcpy(&v, &bits, 4);
        return v;
    }

    double f64() {
        std::uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }

    void f32_array(float* data, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) data[i] = f32();
    }

    void f64_array(double* data, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) data[i] = f64();
    }

    void u32_array(std::uint32_t* data, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) data[i] = u32();
    }

    std::string str() {
        std::uint32_t n = u32();
        if (n > (1u << 24)) throw Error(ErrorKind::kFormat, "implausible string length in " + path_);
        std::string s(n, '\0');
        read_raw(s.data(), n);
        return s;
    }

    bool at_eof() {
        return in_.peek() == std::char_traits<char>::eof();
    }

private:
    void read_raw(char* dst, std::size_t n) {
        in_.read(dst, static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in_.gcount()) != n)
            throw Error(ErrorKind::kFormat, "truncated payload in " + path_);
    }

    std::ifstream in_;
    std::string path_;
};

}  // namespace autoeval
