#pragma once

#include <string>
#include <string_view>

namespace relrec {

using PaperId = std::string;

/// Accepts old-style identifiers `<archive>[.<subclass>]/<7 digits>` such as
/// `hep-th/0602276` or `math.AG/0601001`, and new-style `<4 digits>.<4-5 digits>`
/// such as `0704.0001` or `1501.00001`.
bool is_valid_paper_id(std::string_view id);

bool is_old_style_id(std::string_view id);
bool is_new_style_id(std::string_view id);

}  // namespace relrec
