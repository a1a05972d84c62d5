#pragma once

#include <string>

#include "sbrnn/autoencoder.hpp"

namespace sbrnn {

/// Binary layout (all integers little-endian):
///   8 bytes   magic "SBRNNCKP"
///   u32       version
///   u32 u32   dims (M, n)
///   u32       array count
///   per array: u32 name length, name bytes, u32 rank, rank x u64 shape,
///              row-major values as little-endian IEEE-754 binary64
inline constexpr std::uint32_t kCheckpointVersion = 1;

std::string encode_checkpoint(const TransceiverParams& params);
TransceiverParams decode_checkpoint(const std::string& bytes);

void save_checkpoint(const std::string& path, const TransceiverParams& params);
TransceiverParams load_checkpoint(const std::string& path);

/// Whole-file helpers shared by the harness.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace sbrnn
