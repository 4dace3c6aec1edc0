#pragma once

#include <string_view>

namespace stegbench {

enum class Label { Stego, Cover };

std::string_view to_string(Label label);
// "stego" / "cover"; throws FormatError otherwise.
Label parse_label(std::string_view text);

}  // namespace stegbench
