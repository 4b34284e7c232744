#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

#include "dida/error.hpp"

namespace dida {

static_assert(std::endian::native == std::endian::little,
              "file formats are little-endian; big-endian hosts need byte swaps");

class ByteWriter {
public:
    void u32(std::uint32_t v) { raw(&v, 4); }
    void u64(std::uint64_t v) { raw(&v, 8); }
    void i32(std::int32_t v) { raw(&v, 4); }
    void f32(float v) { raw(&v, 4); }
    void f64(double v) { raw(&v, 8); }
    void bytes(std::span<const std::uint8_t> b) { raw(b.data(), b.size()); }
    void magic(const char (&m)[9]) { raw(m, 8); } // 8 chars + NUL

    const std::vector<std::uint8_t>& buffer() const { return buf_; }
    std::vector<std::uint8_t> take() { return std::move(buf_); }

private:
    void raw(const void* p, std::size_t n) {
        const auto* b = static_cast<const std::uint8_t*>(p);
        buf_.insert(buf_.end(), b, b + n);
    }
    std::vector<std::uint8_t> buf_;
};

class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::uint32_t u32() { return get<std::uint32_t>(); }
    std::uint64_t u64() { return get<std::uint64_t>(); }
    std::int32_t i32() { return get<std::int32_t>(); }
    float f32() { return get<float>(); }
    double f64() { return get<double>(); }

    void magic(const char (&expect)[9], const char* what) {
        char m[8];
        copy(m, 8);
        if (std::memcmp(m, expect, 8) != 0) {
            throw IoError(std::string(what) + ": bad magic");
        }
    }

    void expect_end(const char* what) {
        if (pos_ != bytes_.size()) {
            throw IoError(std::string(what) + ": trailing bytes");
        }
    }

    std::size_t remaining() const { return bytes_.size() - pos_; }

private:
    template <typename T>
    T get() {
        T v;
        copy(&v, sizeof(T));
        return v;
    }
    void copy(void* out, std::size_t n) {
        if (pos_ + n > bytes_.size()) throw IoError("truncated stream");
        std::memcpy(out, bytes_.data() + pos_, n);
        pos_ += n;
    }
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

std::vector<std::uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, std::span<const std::uint8_t> bytes);
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

// Shortest round-trip decimal form of v (std::to_chars), locale independent.
std::string format_double(double v);

} // namespace dida
