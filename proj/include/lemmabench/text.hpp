#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace lemmabench::text {

std::vector<std::string_view> split(std::string_view s, char sep);
std::string_view trim(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

void strip_cr(std::string& line);
void strip_bom(std::string& line);

std::vector<std::string> lines(std::string_view s);

std::string read_file(const std::string& path);
/// Writes via a temporary file and rename, so readers never see a partial file.
void write_file(const std::string& path, std::string_view contents);

}  // namespace lemmabench::text
