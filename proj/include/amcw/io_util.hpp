#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace amcw::io {

/// Shortest decimal string that round-trips the double exactly.
std::string fmt_double(double v);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

/// FNV-1a over bytes; stable fingerprint for manifests.
std::uint64_t fnv1a(const std::string& bytes);
std::string fnv1a_hex(const std::string& bytes);

/// Creates the directory (and parents) if missing; throws on failure.
void ensure_dir(const std::string& path);

/// Grayscale PFM ("Pf", little-endian, scale -1.0). Rows are written
/// bottom-to-top; `values` is row-major with row 0 at the top.
void write_pfm(const std::string& path, int width, int height,
               const std::vector<float>& values);

/// Binary PGM (P5), one byte per pixel.
void write_pgm(const std::string& path, int width, int height,
               const std::vector<std::uint8_t>& values);

/// Row-major numeric grid as CSV, one image row per line.
void write_csv_grid(const std::string& path, int width, int height,
                    const std::vector<double>& values);

}  // namespace amcw::io
