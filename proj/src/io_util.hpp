#pragma once

// Little-endian binary primitives shared by the dataset/index/checkpoint
// container formats. Doubles round-trip bit-exactly via their IEEE-754 image.

#include <bit>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "craft/error.hpp"
#include "craft/matrix.hpp"

namespace craft::io {

inline void write_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(b), 4);
}

inline void write_u64(std::ostream& out, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(b), 8);
}

inline void write_f64(std::ostream& out, double v) {
    write_u64(out, std::bit_cast<std::uint64_t>(v));
}

inline void write_string(std::ostream& out, const std::string& s) {
    write_u64(out, s.size());
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline void write_f64_block(std::ostream& out, const double* data, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) write_f64(out, data[i]);
}

inline void write_matrix(std::ostream& out, const Matrix& m) {
    write_u64(out, m.rows());
    write_u64(out, m.cols());
    write_f64_block(out, m.data(), m.size());
}

inline void write_f64_vector(std::ostream& out, const std::vector<double>& v) {
    write_u64(out, v.size());
    write_f64_block(out, v.data(), v.size());
}

class Reader {
public:
    Reader(std::istream& in, std::string context) : in_(in), context_(std::move(context)) {}

    std::uint32_t u32() {
        unsigned char b[4];
        take(b, 4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
        return v;
    }

    std::uint64_t u64() {
        unsigned char b[8];
        take(b, 8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
        return v;
    }

    double f64() { return std::bit_cast<double>(u64()); }

    std::string string(std::uint64_t max_len = 1ull << 30) {
        const std::uint64_t len = u64();
        if (len > max_len) throw IoError(context_ + ": string length " + std::to_string(len));
        std::string s(len, '\0');
        if (len) take(s.data(), len);
        return s;
    }

    Matrix matrix(std::uint64_t max_elems = 1ull << 28) {
        const std::uint64_t rows = u64();
        const std::uint64_t cols = u64();
        if (rows * cols > max_elems) throw IoError(context_ + ": matrix too large");
        std::vector<double> data(rows * cols);
        for (double& v : data) v = f64();
        return Matrix(rows, cols, std::move(data));
    }

    std::vector<double> f64_vector(std::uint64_t max_len = 1ull << 28) {
        const std::uint64_t len = u64();
        if (len > max_len) throw IoError(context_ + ": vector too large");
        std::vector<double> v(len);
        for (double& x : v) x = f64();
        return v;
    }

    void expect_magic(const char (&magic)[9]) {
        char got[8];
        take(got, 8);
        for (int i = 0; i < 8; ++i)
            if (got[i] != magic[i])
                throw IoError(context_ + ": bad magic (not a " + context_ + " file)");
    }

    /// Fails loudly if bytes remain: trailing garbage means a format bug.
    void expect_eof() {
        char c;
        in_.read(&c, 1);
        if (!in_.eof()) throw IoError(context_ + ": trailing bytes after payload");
    }

private:
    void take(void* dst, std::size_t n) {
        in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in_.gcount()) != n)
            throw IoError(context_ + ": truncated file");
    }

    std::istream& in_;
    std::string context_;
};

inline std::ofstream open_out(const std::string& path, const char* what) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(std::string(what) + ": cannot open " + path + " for writing");
    return out;
}

inline std::ifstream open_in(const std::string& path, const char* what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(std::string(what) + ": cannot open " + path);
    return in;
}

}  // namespace craft::io
