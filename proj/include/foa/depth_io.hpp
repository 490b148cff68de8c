#pragma once

// Depth frames and their on-disk formats.
//
// Frames are binary PGM (P5) images with maxval 65535: two bytes per pixel,
// big-endian, value = millimeters, 0 = invalid. A sequence is described by a
// manifest, one "<relative path> <timestamp_s>" pair per line, '#' comments.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "foa/error.hpp"

namespace foa {

struct DepthFrame {
  int width = 0;
  int height = 0;
  std::vector<std::uint16_t> depth_mm;  // row-major
  std::int64_t frame_index = 0;
  double timestamp_s = 0.0;

  DepthFrame() = default;
  DepthFrame(int w, int h, std::uint16_t fill = 0)
      : width(w), height(h), depth_mm(static_cast<std::size_t>(w) * h, fill) {}

  std::uint16_t at(int u, int v) const { return depth_mm[static_cast<std::size_t>(v) * width + u]; }
  std::uint16_t& at(int u, int v) { return depth_mm[static_cast<std::size_t>(v) * width + u]; }
  bool valid() const { return width > 0 && height > 0 && depth_mm.size() == std::size_t(width) * height; }
};

// Depth of the empty scene, same layout as a frame.
struct BackgroundModel {
  int width = 0;
  int height = 0;
  std::vector<std::uint16_t> depth_mm;

  std::uint16_t at(int u, int v) const { return depth_mm[static_cast<std::size_t>(v) * width + u]; }

  static BackgroundModel from_frame(const DepthFrame& f) { return {f.width, f.height, f.depth_mm}; }
};

namespace detail {

// Reads the PGM header up to and including the single whitespace byte that
// precedes the raster.
inline void read_pgm_header(std::istream& in, const std::string& path, int& w, int& h, int& maxval) {
  std::string magic;
  in >> magic;
  if (magic != "P5") throw DataError(path, "not a binary PGM (P5) file");
  auto next_int = [&](int& out) {
    for (;;) {
      in >> std::ws;
      if (in.peek() == '#') {
        std::string comment;
        std::getline(in, comment);
        continue;
      }
      break;
    }
    if (!(in >> out)) throw DataError(path, "truncated PGM header");
  };
  next_int(w);
  next_int(h);
  next_int(maxval);
  in.get();
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535) {
    throw DataError(path, "invalid PGM dimensions or maxval");
  }
}

}  // namespace detail

inline void write_depth_pgm(const std::filesystem::path& path, const DepthFrame& frame) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path.string(), "cannot open for writing");
  out << "P5\n" << frame.width << " " << frame.height << "\n65535\n";
  std::vector<char> raster(frame.depth_mm.size() * 2);
  for (std::size_t i = 0; i < frame.depth_mm.size(); ++i) {
    raster[2 * i] = static_cast<char>(frame.depth_mm[i] >> 8);
    raster[2 * i + 1] = static_cast<char>(frame.depth_mm[i] & 0xFF);
  }
  out.write(raster.data(), static_cast<std::streamsize>(raster.size()));
  if (!out) throw DataError(path.string(), "write failed");
}

inline DepthFrame read_depth_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path.string(), "cannot open");
  int w = 0, h = 0, maxval = 0;
  detail::read_pgm_header(in, path.string(), w, h, maxval);
  if (maxval < 256) throw DataError(path.string(), "expected a 16-bit PGM (maxval > 255)");
  DepthFrame frame(w, h);
  std::vector<unsigned char> raster(frame.depth_mm.size() * 2);
  in.read(reinterpret_cast<char*>(raster.data()), static_cast<std::streamsize>(raster.size()));
  if (in.gcount() != static_cast<std::streamsize>(raster.size())) {
    throw DataError(path.string(), "truncated raster");
  }
  for (std::size_t i = 0; i < frame.depth_mm.size(); ++i) {
    frame.depth_mm[i] = static_cast<std::uint16_t>((raster[2 * i] << 8) | raster[2 * i + 1]);
  }
  return frame;
}

struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;
};

inline void write_gray_pgm(const std::filesystem::path& path, const GrayImage& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path.string(), "cannot open for writing");
  out << "P5\n" << img.width << " " << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
  if (!out) throw DataError(path.string(), "write failed");
}

inline GrayImage read_gray_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path.string(), "cannot open");
  GrayImage img;
  int maxval = 0;
  detail::read_pgm_header(in, path.string(), img.width, img.height, maxval);
  if (maxval > 255) throw DataError(path.string(), "expected an 8-bit PGM");
  img.pixels.resize(static_cast<std::size_t>(img.width) * img.height);
  in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(img.pixels.size())) {
    throw DataError(path.string(), "truncated raster");
  }
  return img;
}

struct ManifestEntry {
  std::filesystem::path path;  // resolved against the manifest's directory
  double timestamp_s = 0.0;
};

inline std::vector<ManifestEntry> read_manifest(const std::filesystem::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw DataError(manifest.string(), "cannot open manifest");
  std::vector<ManifestEntry> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    std::string rel;
    double ts = 0.0;
    if (!(ls >> rel >> ts)) {
      throw DataError(manifest.string(), "malformed line " + std::to_string(line_no));
    }
    if (!out.empty() && ts <= out.back().timestamp_s) {
      throw DataError(manifest.string(),
                      "timestamps must be strictly increasing (line " + std::to_string(line_no) + ")");
    }
    out.push_back({manifest.parent_path() / rel, ts});
  }
  return out;
}

inline void write_manifest(const std::filesystem::path& manifest,
                           const std::vector<std::pair<std::string, double>>& entries) {
  std::ofstream out(manifest);
  if (!out) throw DataError(manifest.string(), "cannot open for writing");
  out << "# frame timestamp_s\n";
  char buf[64];
  for (const auto& [rel, ts] : entries) {
    std::snprintf(buf, sizeof buf, "%.6f", ts);
    out << rel << " " << buf << "\n";
  }
}

}  // namespace foa
