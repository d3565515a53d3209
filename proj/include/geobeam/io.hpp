#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "geobeam/fourier.hpp"
#include "geobeam/surface.hpp"

namespace geobeam {

inline constexpr const char* kVersion = "1.0.0";

std::uint64_t fnv1a(const std::string& bytes, std::uint64_t seed = 1469598103934665603ULL);
std::uint64_t model_hash(const CurvatureModel& model);
std::string hex64(std::uint64_t v);

// Write to a temporary sibling, then rename over the target.
void write_atomic(const std::string& path, const std::string& content);

// "GBM1", u32 rank, u32 dims..., then little-endian f64 (re, im) pairs in row-major order.
std::string encode_binary(const std::vector<std::uint32_t>& dims, const std::vector<cplx>& data);
void decode_binary(const std::string& bytes, std::vector<std::uint32_t>& dims, std::vector<cplx>& data);

// Round-trip decimal representation of a double.
std::string fmt(double v);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    std::string str() const;
};

}  // namespace geobeam
