#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "cqalog/errors.hpp"

namespace cqalog {

// LEB128 unsigned varints, used by the index and snapshot formats.

inline void put_varint(std::string& out, std::uint64_t v) {
    while (v >= 0x80) {
        out.push_back(static_cast<char>((v & 0x7f) | 0x80));
        v >>= 7;
    }
    out.push_back(static_cast<char>(v));
}

class ByteReader {
  public:
    ByteReader(const char* data, std::size_t size) : data_(data), size_(size) {}
    explicit ByteReader(std::string_view bytes) : ByteReader(bytes.data(), bytes.size()) {}

    std::uint64_t varint() {
        std::uint64_t v = 0;
        int shift = 0;
        for (;;) {
            if (pos_ >= size_) throw FormatError("truncated varint");
            unsigned char c = static_cast<unsigned char>(data_[pos_++]);
            v |= static_cast<std::uint64_t>(c & 0x7f) << shift;
            if (!(c & 0x80)) return v;
            shift += 7;
            if (shift > 63) throw FormatError("varint overflow");
        }
    }

    std::uint64_t u64() {
        if (pos_ + 8 > size_) throw FormatError("truncated u64");
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
        pos_ += 8;
        return v;
    }

    std::uint32_t u32() {
        if (pos_ + 4 > size_) throw FormatError("truncated u32");
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
        pos_ += 4;
        return v;
    }

    double f64() {
        std::uint64_t bits = u64();
        double d;
        static_assert(sizeof(d) == 8);
        __builtin_memcpy(&d, &bits, 8);
        return d;
    }

    std::string str() {
        std::uint64_t n = varint();
        if (pos_ + n > size_) throw FormatError("truncated string");
        std::string s(data_ + pos_, n);
        pos_ += n;
        return s;
    }

    std::string_view str_bytes(std::size_t n) {
        if (pos_ + n > size_) throw FormatError("truncated record");
        std::string_view s(data_ + pos_, n);
        pos_ += n;
        return s;
    }

    bool done() const { return pos_ == size_; }
    std::size_t pos() const { return pos_; }

  private:
    const char* data_;
    std::size_t size_;
    std::size_t pos_ = 0;
};

struct ByteWriter {
    std::string buf;

    void varint(std::uint64_t v) { put_varint(buf, v); }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
    void f64(double d) {
        std::uint64_t bits;
        __builtin_memcpy(&bits, &d, 8);
        u64(bits);
    }
    void str(const std::string& s) {
        varint(s.size());
        buf.append(s);
    }
};

std::string read_file(const std::filesystem::path& path);

/// Writes via a temporary file in the same directory, then renames, so a
/// failed stage never leaves a half-written artifact behind.
void write_file_atomic(const std::filesystem::path& path, const std::string& bytes);

}  // namespace cqalog
