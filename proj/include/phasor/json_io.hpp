#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "phasor/phasor_array.hpp"

namespace phasor {

/// {"rows", "cols", "h", "real", "coeffs": [[re, im], ...]} with coeffs
/// ordered k = -h..h outermost, then row-major (i, j).
nlohmann::json toJson(const PhasorArray& a);
PhasorArray phasorFromJson(const nlohmann::json& doc);

std::string serialize(const PhasorArray& a);
PhasorArray deserialize(const std::string& text);

PhasorArray readPhasorFile(const std::filesystem::path& path);
void writePhasorFile(const std::filesystem::path& path, const PhasorArray& a);

/// Reads a whole file; throws ValidationError when it cannot be opened.
std::string readTextFile(const std::filesystem::path& path);
void writeTextFile(const std::filesystem::path& path, const std::string& text);

}  // namespace phasor
