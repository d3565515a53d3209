#include "geobeam/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "geobeam/errors.hpp"

namespace geobeam {

std::uint64_t fnv1a(const std::string& bytes, std::uint64_t h) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string fmt(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::uint64_t model_hash(const CurvatureModel& m) {
    std::ostringstream os;
    auto put = [&](const FourierSeries& f) {
        for (const auto& c : f.modes()) os << fmt(c.real()) << ',' << fmt(c.imag()) << ';';
        os << '|';
    };
    os << m.omega << '|' << fmt(m.r0) << '|' << (m.taylor_order ? *m.taylor_order : -1) << '|';
    put(m.R);
    for (const auto& [j, f] : m.higher) {
        os << j << ':';
        put(f);
    }
    if (m.curvature) os << "callable";
    return fnv1a(os.str());
}

void write_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error(ErrorKind::IoFailure, "cannot open " + tmp.string());
        f.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!f) throw Error(ErrorKind::IoFailure, "write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) throw Error(ErrorKind::IoFailure, "rename to " + path + " failed: " + ec.message());
}

namespace {

template <class T>
void put_le(std::string& out, T v) {
    static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    out.append(reinterpret_cast<const char*>(b), sizeof(T));
}

template <class T>
T get_le(const std::string& in, std::size_t& pos) {
    if (pos + sizeof(T) > in.size()) throw Error(ErrorKind::IoFailure, "truncated binary dump");
    unsigned char b[sizeof(T)];
    std::memcpy(b, in.data() + pos, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    pos += sizeof(T);
    T v;
    std::memcpy(&v, b, sizeof(T));
    return v;
}

}  // namespace

std::string encode_binary(const std::vector<std::uint32_t>& dims, const std::vector<cplx>& data) {
    std::string out = "GBM1";
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(dims.size()));
    for (auto d : dims) put_le<std::uint32_t>(out, d);
    for (const auto& c : data) {
        put_le<double>(out, c.real());
        put_le<double>(out, c.imag());
    }
    return out;
}

void decode_binary(const std::string& bytes, std::vector<std::uint32_t>& dims, std::vector<cplx>& data) {
    if (bytes.size() < 8 || bytes.compare(0, 4, "GBM1") != 0) throw Error(ErrorKind::IoFailure, "not a GBM1 dump");
    std::size_t pos = 4;
    const auto rank = get_le<std::uint32_t>(bytes, pos);
    dims.clear();
    std::size_t total = 1;
    for (std::uint32_t i = 0; i < rank; ++i) {
        dims.push_back(get_le<std::uint32_t>(bytes, pos));
        total *= dims.back();
    }
    data.resize(total);
    for (auto& c : data) {
        const double re = get_le<double>(bytes, pos);
        const double im = get_le<double>(bytes, pos);
        c = cplx(re, im);
    }
}

std::string CsvTable::str() const {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
    out += '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + fmt(row[i]);
        out += '\n';
    }
    return out;
}

}  // namespace geobeam
