#pragma once

#include <filesystem>

#include "reportcert/uncertainty.hpp"

namespace reportcert {

/// Binary reconstruction-stack format:
///   bytes 0..3   magic "VSTK"
///   bytes 4..5   version, little-endian u16 (currently 1)
///   bytes 6..21  T, C, H, W as little-endian u32
///   then T*C*H*W little-endian IEEE-754 f32, t-major then c,h,w row-major
///
/// Throws StackFormatError on magic/version/truncation problems and
/// ShapeMismatch on impossible shapes (any zero dimension, or T < 2).
ReconstructionStack read_stack(const std::filesystem::path& path);

void write_stack(const std::filesystem::path& path, const ReconstructionStack& stack);

}  // namespace reportcert
