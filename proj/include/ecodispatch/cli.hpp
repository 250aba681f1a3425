#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace ecodispatch::cli {

inline constexpr const char* kToolName = "ecodispatch";
inline constexpr const char* kVersion = "0.1.0";

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kDataError = 1;
inline constexpr int kUsageError = 2;

// Runs one command line (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// FNV-1a 64-bit digest of a file's bytes, hex encoded.
std::string file_digest(const std::filesystem::path& path);

}  // namespace ecodispatch::cli
