#include "amcw/io_util.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace amcw::io {

std::string fmt_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  if (res.ec != std::errc()) throw std::runtime_error("fmt_double: conversion failed");
  return std::string(buf, res.ptr);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return data;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string fnv1a_hex(const std::string& bytes) {
  static const char* digits = "0123456789abcdef";
  std::uint64_t h = fnv1a(bytes);
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<size_t>(i)] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

void ensure_dir(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) throw std::runtime_error("cannot create directory " + path + ": " + ec.message());
}

void write_pfm(const std::string& path, int width, int height,
               const std::vector<float>& values) {
  if (width <= 0 || height <= 0 ||
      values.size() != static_cast<size_t>(width) * static_cast<size_t>(height))
    throw std::invalid_argument("write_pfm: size mismatch");
  static_assert(std::endian::native == std::endian::little,
                "PFM writer assumes a little-endian host");
  std::string out;
  out += "Pf\n";
  out += std::to_string(width) + " " + std::to_string(height) + "\n";
  out += "-1.0\n";
  // Scanlines bottom to top per the format convention.
  for (int y = height - 1; y >= 0; --y) {
    const char* row = reinterpret_cast<const char*>(values.data() + static_cast<size_t>(y) * width);
    out.append(row, sizeof(float) * static_cast<size_t>(width));
  }
  write_file(path, out);
}

void write_pgm(const std::string& path, int width, int height,
               const std::vector<std::uint8_t>& values) {
  if (width <= 0 || height <= 0 ||
      values.size() != static_cast<size_t>(width) * static_cast<size_t>(height))
    throw std::invalid_argument("write_pgm: size mismatch");
  std::string out;
  out += "P5\n";
  out += std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(values.data()), values.size());
  write_file(path, out);
}

void write_csv_grid(const std::string& path, int width, int height,
                    const std::vector<double>& values) {
  if (width <= 0 || height <= 0 ||
      values.size() != static_cast<size_t>(width) * static_cast<size_t>(height))
    throw std::invalid_argument("write_csv_grid: size mismatch");
  std::string out;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (x) out += ',';
      out += fmt_double(values[static_cast<size_t>(y) * width + x]);
    }
    out += '\n';
  }
  write_file(path, out);
}

}  // namespace amcw::io
