#pragma once

// Binary ensemble format:
//
//   "ENRPMODL"            8-byte magic
//   u32 format version    little-endian
//   u32 header length
//   header                UTF-8 JSON: grid, n, dims, sub-network config, source metadata
//   parameters            float32 little-endian, cell by cell (m = 1..M^rank); per
//                         layer the weight matrix row-major then the bias, then the
//                         Fourier matrix row-major when present

#include <cstdint>
#include <filesystem>
#include <string>

#include "enrp/trainer.hpp"

namespace enrp {

inline constexpr std::uint32_t kModelFormatVersion = 1;

std::string encode_model(const EnsembleModel& model);
EnsembleModel decode_model(const std::string& bytes);

void save_model(const EnsembleModel& model, const std::filesystem::path& path);
EnsembleModel load_model(const std::filesystem::path& path);

}  // namespace enrp
