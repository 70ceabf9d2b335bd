#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "adaptswarm/nn/network.hpp"

namespace adaptswarm::nn {

inline constexpr std::uint8_t kParamFormatVersion = 1;

/// Binary parameter file:
///   "ADRL" | version:u8 | input_width:u32 | input_steps:u32 | layer_count:u32
///   then per layer: body_length:u32 | kind:u8 | body
///     flatten (0): empty
///     dense   (1): activation:u8 rows:u32 cols:u32 weights:f64[rows*cols] bias:f64[rows]
///     gru     (2): inputs:u32 hidden:u32 then W_z U_z b_z W_r U_r b_r W_h U_h b_h as f64
/// All integers and floats little-endian.
std::vector<std::uint8_t> save_params(const Network& net);

/// Throws ParseError (with offset) on malformed input, VersionError on a
/// version mismatch. Never returns a partially decoded network.
Network load_params(std::span<const std::uint8_t> bytes);

}  // namespace adaptswarm::nn
