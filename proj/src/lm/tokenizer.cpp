#include "stegbench/lm/tokenizer.hpp"

#include <cctype>
#include <fstream>

#include "stegbench/error.hpp"

namespace stegbench::lm {

std::vector<std::string> tokenize(std::string_view sentence, bool lowercase) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < sentence.size()) {
    while (i < sentence.size() && std::isspace(static_cast<unsigned char>(sentence[i]))) ++i;
    std::size_t j = i;
    while (j < sentence.size() && !std::isspace(static_cast<unsigned char>(sentence[j]))) ++j;
    if (j > i) {
      std::string tok(sentence.substr(i, j - i));
      if (lowercase) {
        for (auto& c : tok) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      }
      out.push_back(std::move(tok));
    }
    i = j;
  }
  return out;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    lines.push_back(line);
  }
  return lines;
}

std::vector<std::vector<std::string>> read_corpus(const std::filesystem::path& path, bool lowercase) {
  std::vector<std::vector<std::string>> corpus;
  for (const auto& line : read_lines(path)) corpus.push_back(tokenize(line, lowercase));
  return corpus;
}

}  // namespace stegbench::lm
