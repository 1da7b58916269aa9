#include "relrec/error.hpp"
#include "relrec/paper_id.hpp"

#include <cctype>

namespace relrec {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::DisorderExceeded: return "DisorderExceeded";
    case ErrorCode::UnorderedInput: return "UnorderedInput";
    case ErrorCode::BudgetTooSmall: return "BudgetTooSmall";
    case ErrorCode::UnknownPaper: return "UnknownPaper";
    case ErrorCode::UnknownTerm: return "UnknownTerm";
    case ErrorCode::UnknownDocument: return "UnknownDocument";
    case ErrorCode::DegenerateGraph: return "DegenerateGraph";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::NoInputsResolved: return "NoInputsResolved";
    case ErrorCode::EmptyRelevantSet: return "EmptyRelevantSet";
    case ErrorCode::EmptyTestSet: return "EmptyTestSet";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Parse: return "Parse";
  }
  return "Unknown";
}

namespace {

bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

bool all_digits(std::string_view s) {
  for (char c : s) {
    if (!is_digit(c)) return false;
  }
  return !s.empty();
}

}  // namespace

bool is_old_style_id(std::string_view id) {
  const auto slash = id.find('/');
  if (slash == std::string_view::npos) return false;
  const auto number = id.substr(slash + 1);
  if (number.size() != 7 || !all_digits(number)) return false;

  auto archive = id.substr(0, slash);
  if (const auto dot = archive.find('.'); dot != std::string_view::npos) {
    const auto subclass = archive.substr(dot + 1);
    if (subclass.size() != 2 || !is_alpha(subclass[0]) || !is_alpha(subclass[1])) return false;
    archive = archive.substr(0, dot);
  }
  // [a-z]+(-[a-z]+)*
  if (archive.empty() || !is_lower(archive.front()) || !is_lower(archive.back())) return false;
  char prev = '\0';
  for (char c : archive) {
    if (c == '-') {
      if (prev == '-') return false;
    } else if (!is_lower(c)) {
      return false;
    }
    prev = c;
  }
  return true;
}

bool is_new_style_id(std::string_view id) {
  const auto dot = id.find('.');
  if (dot != 4) return false;
  const auto tail = id.substr(5);
  return all_digits(id.substr(0, 4)) && all_digits(tail) && tail.size() >= 4 && tail.size() <= 5;
}

bool is_valid_paper_id(std::string_view id) { return is_old_style_id(id) || is_new_style_id(id); }

}  // namespace relrec
