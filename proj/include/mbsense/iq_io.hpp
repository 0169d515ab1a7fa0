#pragma once

#include "mbsense/mcleish.hpp"

#include <filesystem>

/// IQ sample files.
///
/// Binary: little-endian IEEE-754 binary32, interleaved I,Q,I,Q,... with no
/// header; the length must be a positive multiple of 8 bytes.
/// Text: one `i,q` pair per line.
namespace mbsense::iq_io {

void write_binary(const std::filesystem::path& path, const mcleish::ComplexSampleBuffer& samples);
mcleish::ComplexSampleBuffer read_binary(const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, const mcleish::ComplexSampleBuffer& samples);
mcleish::ComplexSampleBuffer read_text(const std::filesystem::path& path);

} // namespace mbsense::iq_io
