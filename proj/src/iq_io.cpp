#include "mbsense/iq_io.hpp"

#include "mbsense/errors.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>
#include <string>

namespace mbsense::iq_io {

namespace {

static_assert(sizeof(float) == 4 && std::numeric_limits<float>::is_iec559);

void put_le(char* dst, float value)
{
    auto bits = std::bit_cast<std::uint32_t>(value);
    for (int i = 0; i < 4; ++i) {
        dst[i] = static_cast<char>(bits & 0xffu);
        bits >>= 8;
    }
}

float get_le(const char* src)
{
    std::uint32_t bits = 0;
    for (int i = 3; i >= 0; --i) {
        bits = (bits << 8) | static_cast<unsigned char>(src[i]);
    }
    return std::bit_cast<float>(bits);
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode)
{
    std::ofstream out(path, mode);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    return out;
}

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode)
{
    std::ifstream in(path, mode);
    if (!in) {
        throw IoError("cannot open " + path.string() + " for reading");
    }
    return in;
}

} // namespace

void write_binary(const std::filesystem::path& path, const mcleish::ComplexSampleBuffer& samples)
{
    std::string bytes(samples.size() * 8, '\0');
    for (std::size_t i = 0; i < samples.size(); ++i) {
        put_le(&bytes[8 * i], static_cast<float>(samples[i].real()));
        put_le(&bytes[8 * i + 4], static_cast<float>(samples[i].imag()));
    }
    auto out = open_out(path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

mcleish::ComplexSampleBuffer read_binary(const std::filesystem::path& path)
{
    auto in = open_in(path, std::ios::binary);
    const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    if (bytes.empty()) {
        throw FormatError(path.string() + ": empty IQ file");
    }
    if (bytes.size() % 8 != 0) {
        throw FormatError(path.string() + ": length " + std::to_string(bytes.size())
                          + " is not a multiple of 8 bytes");
    }
    mcleish::ComplexSampleBuffer out(bytes.size() / 8);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = {get_le(&bytes[8 * i]), get_le(&bytes[8 * i + 4])};
    }
    return out;
}

void write_text(const std::filesystem::path& path, const mcleish::ComplexSampleBuffer& samples)
{
    auto out = open_out(path, std::ios::trunc);
    char line[64];
    for (const auto& s : samples) {
        std::snprintf(line, sizeof line, "%.9g,%.9g\n", s.real(), s.imag());
        out << line;
    }
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

mcleish::ComplexSampleBuffer read_text(const std::filesystem::path& path)
{
    auto in = open_in(path, std::ios::in);
    mcleish::ComplexSampleBuffer out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') {
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw FormatError(path.string() + ":" + std::to_string(lineno) + ": expected i,q");
        }
        try {
            std::size_t used_i = 0;
            std::size_t used_q = 0;
            const std::string qs = line.substr(comma + 1);
            const double i = std::stod(line.substr(0, comma), &used_i);
            const double q = std::stod(qs, &used_q);
            if (qs.find_first_not_of(" \t\r", used_q) != std::string::npos) {
                throw std::invalid_argument("trailing");
            }
            out.emplace_back(i, q);
        } catch (const std::logic_error&) {
            throw FormatError(path.string() + ":" + std::to_string(lineno) + ": malformed sample");
        }
    }
    if (out.empty()) {
        throw FormatError(path.string() + ": no samples");
    }
    return out;
}

} // namespace mbsense::iq_io
