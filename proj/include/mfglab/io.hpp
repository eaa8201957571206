#pragma once

// Binary artifacts, all little-endian:
//   field  "MFGM" u8 version, u8 d, u32 n, n^d (re, im) f64 pairs,
//          row-major with each axis running k = -n/2 .. n/2-1
//   path   "MFGP" u8 version, u32 node count, then that many field records
//   kernel "MFGK" u8 version, u8 d, u32 n, u32 probes, rows x probes f64

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mfglab/spectral.hpp"

namespace mfglab::io {

inline constexpr std::uint8_t kFormatVersion = 1;

void write_field(std::ostream& out, const spectral::SpectralField& field);
spectral::SpectralField read_field(std::istream& in);

void write_path(std::ostream& out, const std::vector<spectral::SpectralField>& path);
std::vector<spectral::SpectralField> read_path(std::istream& in);

struct KernelBlock {
  int d = 1;
  int n = 0;
  std::size_t probes = 0;
  std::vector<double> values;  // row-major, x rows by probe columns
};

void write_kernel(std::ostream& out, const KernelBlock& kernel);
KernelBlock read_kernel(std::istream& in);

/// Whole-buffer helpers for the cache.
std::string to_bytes(const std::vector<spectral::SpectralField>& path);
std::vector<spectral::SpectralField> path_from_bytes(const std::string& bytes);

}  // namespace mfglab::io
