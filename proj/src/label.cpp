#include "stegbench/label.hpp"

#include <string>

#include "stegbench/error.hpp"

namespace stegbench {

std::string_view to_string(Label label) { return label == Label::Stego ? "stego" : "cover"; }

Label parse_label(std::string_view text) {
  if (text == "stego") return Label::Stego;
  if (text == "cover") return Label::Cover;
  throw Error(ErrorCode::FormatError, "unknown label '" + std::string(text) + "'");
}

}  // namespace stegbench
