#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace stegbench::lm {

std::vector<std::string> tokenize(std::string_view sentence, bool lowercase = false);

// One sentence per line; blank lines are skipped.
std::vector<std::string> read_lines(const std::filesystem::path& path);
std::vector<std::vector<std::string>> read_corpus(const std::filesystem::path& path, bool lowercase = false);

}  // namespace stegbench::lm
