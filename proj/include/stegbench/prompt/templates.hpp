#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "stegbench/label.hpp"
#include "stegbench/metrics/metrics.hpp"

namespace stegbench::prompt {

inline constexpr int kTemplateCount = 8;

struct PromptTemplate {
  int id;
  std::string_view sentence_prefix;  // text before the sentence on line one
  std::string_view question;         // empty when the template has no question line
  std::string_view answer_marker;    // final separator the answer follows
  std::string_view stego_label;
  std::string_view cover_label;
};

// Throws InvalidTemplate for ids outside 1..8.
const PromptTemplate& get_template(int template_id);

std::string_view label_string(int template_id, Label label);

// Lines are joined with "\n". Without a label the result ends at the answer
// marker; with a label, a single space and the label string follow it.
// Throws InvalidTemplate or EmptySentence (blank after trimming).
std::string render(int template_id, std::string_view sentence, std::optional<Label> label = std::nullopt);

enum class ParsedLabel { Stego, Cover, Unknown };

struct ParseResult {
  ParsedLabel value = ParsedLabel::Unknown;
  metrics::Cell cell = metrics::Cell::US;
};

// Strips surrounding whitespace and punctuation, then compares
// case-insensitively against the template's label strings, longest first.
// Anything else is Unknown (US for a stego sample, UN for a cover).
ParseResult parse_answer(int template_id, std::string_view generated, Label truth);

}  // namespace stegbench::prompt
