#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>

namespace cbir::detail {

std::string xml_escape(const std::string& text);
std::string base64_encode(std::span<const std::uint8_t> bytes);

/// PNG thumbnail (longest side `size`) as a data URI, or nothing if unreadable.
std::optional<std::string> thumbnail_data_uri(const std::filesystem::path& path, int size);

}  // namespace cbir::detail
