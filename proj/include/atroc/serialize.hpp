#ifndef ATROC_SERIALIZE_HPP
#define ATROC_SERIALIZE_HPP

#include "atroc/types.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

namespace atroc {

/// Little-endian binary writer/reader for the versioned containers
/// (datasets, checkpoints). Each container starts with 8 magic bytes and a
/// u32 format version; payload is u64 counts and f64 arrays.
class BinaryWriter {
public:
    explicit BinaryWriter(const std::string& path)
        : out_(path, std::ios::binary | std::ios::trunc) {
        if (!out_) throw std::runtime_error("cannot open for writing: " + path);
    }

    void magic(const char (&m)[9]) { out_.write(m, 8); }

    void u32(std::uint32_t v) { write_le(v); }
    void u64(std::uint64_t v) { write_le(v); }
    void i64(std::int64_t v) { write_le(static_cast<std::uint64_t>(v)); }

    void f64(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        write_le(bits);
    }

    void vec(const Eigen::Ref<const Vec>& v) {
        u64(static_cast<std::uint64_t>(v.size()));
        for (Eigen::Index i = 0; i < v.size(); ++i) f64(v[i]);
    }

    void mat(const Mat& m) {
        u64(static_cast<std::uint64_t>(m.rows()));
        u64(static_cast<std::uint64_t>(m.cols()));
        for (Eigen::Index i = 0; i < m.size(); ++i) f64(m.data()[i]);
    }

    void str(const std::string& s) {
        u64(s.size());
        out_.write(s.data(), static_cast<std::streamsize>(s.size()));
    }

    bool good() const { return static_cast<bool>(out_); }

private:
    template <typename T>
    void write_le(T v) {
        unsigned char buf[sizeof(T)];
        for (size_t i = 0; i < sizeof(T); ++i) {
            buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
        }
        out_.write(reinterpret_cast<const char*>(buf), sizeof(T));
    }

    std::ofstream out_;
};

class BinaryReader {
public:
    explicit BinaryReader(const std::string& path)
        : in_(path, std::ios::binary) {
        if (!in_) throw std::runtime_error("cannot open for reading: " + path);
    }

    void expect_magic(const char (&m)[9]) {
        char buf[8];
        in_.read(buf, 8);
        if (!in_ || std::memcmp(buf, m, 8) != 0) {
            throw std::runtime_error("bad container magic");
        }
    }

    std::uint32_t u32() { return read_le<std::uint32_t>(); }
    std::uint64_t u64() { return read_le<std::uint64_t>(); }
    std::int64_t i64() { return static_cast<std::int64_t>(read_le<std::uint64_t>()); }

    double f64() {
        const std::uint64_t bits = read_le<std::uint64_t>();
        double v;
        std::memcpy(&v, &bits, sizeof v);
        return v;
    }

    Vec vec() {
        const auto n = static_cast<Eigen::Index>(u64());
        Vec v(n);
        for (Eigen::Index i = 0; i < n; ++i) v[i] = f64();
        return v;
    }

    Mat mat() {
        const auto rows = static_cast<Eigen::Index>(u64());
        const auto cols = static_cast<Eigen::Index>(u64());
        Mat m(rows, cols);
        for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = f64();
        return m;
    }

    std::string str() {
        const auto n = u64();
        std::string s(n, '\0');
        in_.read(s.data(), static_cast<std::streamsize>(n));
        if (!in_) throw std::runtime_error("truncated container");
        return s;
    }

private:
    template <typename T>
    T read_le() {
        unsigned char buf[sizeof(T)];
        in_.read(reinterpret_cast<char*>(buf), sizeof(T));
        if (!in_) throw std::runtime_error("truncated container");
        T v = 0;
        for (size_t i = 0; i < sizeof(T); ++i) {
            v |= static_cast<T>(buf[i]) << (8 * i);
        }
        return v;
    }

    std::ifstream in_;
};

} // namespace atroc

#endif // ATROC_SERIALIZE_HPP
