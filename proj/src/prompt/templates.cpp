#include "stegbench/prompt/templates.hpp"

#include <array>
#include <cctype>

#include "stegbench/error.hpp"

namespace stegbench::prompt {

namespace {

constexpr std::string_view kStegoLong = "steganographic";
constexpr std::string_view kCoverLong = "non-steganographic";

constexpr std::array<PromptTemplate, kTemplateCount> kTemplates{{
    {1, "### Text: ", "### Question: Is the above text steganographic or non-steganographic?", "### Answer:",
     kStegoLong, kCoverLong},
    {2, "### Text: ", "### Question: Is the above text steganographic?", "### Answer:", "yes", "no"},
    {3, "### Here is a tweet: ", "### Question: Is the above tweet steganographic?", "### Answer:", "yes", "no"},
    {4, "### ", "", "###", kStegoLong, kCoverLong},
    {5, "### ", "", "###", "1", "0"},
    {6, "### Text: ", "", "### Label:", kStegoLong, kCoverLong},
    {7, "### Text: ", "", "### Label:", "stega", "cover"},
    {8, "### Text: ", "", "### Label:", "1", "0"},
}};

bool is_trimmable(char c) {
  const auto u = static_cast<unsigned char>(c);
  return std::isspace(u) || std::ispunct(u);
}

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) != std::tolower(static_cast<unsigned char>(b[i]))) return false;
  }
  return true;
}

}  // namespace

const PromptTemplate& get_template(int template_id) {
  if (template_id < 1 || template_id > kTemplateCount) {
    throw Error(ErrorCode::InvalidTemplate, "template id " + std::to_string(template_id) + " not in 1..8");
  }
  return kTemplates[static_cast<std::size_t>(template_id - 1)];
}

std::string_view label_string(int template_id, Label label) {
  const auto& t = get_template(template_id);
  return label == Label::Stego ? t.stego_label : t.cover_label;
}

std::string render(int template_id, std::string_view sentence, std::optional<Label> label) {
  const auto& t = get_template(template_id);
  if (sentence.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    throw Error(ErrorCode::EmptySentence, "sentence is blank");
  }
  std::string out;
  out.reserve(sentence.size() + 128);
  out += t.sentence_prefix;
  out += sentence;
  out += '\n';
  if (!t.question.empty()) {
    out += t.question;
    out += '\n';
  }
  out += t.answer_marker;
  if (label) {
    out += ' ';
    out += label_string(template_id, *label);
  }
  return out;
}

ParseResult parse_answer(int template_id, std::string_view generated, Label truth) {
  const auto& t = get_template(template_id);
  std::size_t b = 0;
  std::size_t e = generated.size();
  while (b < e && is_trimmable(generated[b])) ++b;
  while (e > b && is_trimmable(generated[e - 1])) --e;
  const std::string_view answer = generated.substr(b, e - b);

  std::array<std::pair<std::string_view, ParsedLabel>, 2> candidates{{
      {t.stego_label, ParsedLabel::Stego},
      {t.cover_label, ParsedLabel::Cover},
  }};
  if (candidates[1].first.size() > candidates[0].first.size()) std::swap(candidates[0], candidates[1]);

  ParseResult result;
  for (const auto& [text, parsed] : candidates) {
    if (iequals(answer, text)) {
      result.value = parsed;
      break;
    }
  }
  std::optional<Label> answer_label;
  if (result.value == ParsedLabel::Stego) answer_label = Label::Stego;
  if (result.value == ParsedLabel::Cover) answer_label = Label::Cover;
  result.cell = metrics::classify(truth, answer_label);
  return result;
}

}  // namespace stegbench::prompt
