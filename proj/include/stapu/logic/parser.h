#pragma once

#include <string_view>

#include "stapu/logic/formula.h"

namespace stapu::logic {

/// Parses the ASCII LTL grammar:
///
///   or     := and ('|' and)*
///   and    := until ('&' until)*
///   until  := unary ('U' until)?          right-associative
///   unary  := ('X' | 'F' | 'G') unary | '!' atom | primary
///   primary:= atom | 'true' | 'false' | '(' or ')'
///   atom   := [a-z][a-zA-Z0-9_]*
///
/// Chains of '&' or '|' become a single n-ary node.
/// Throws ParseError with the 1-based line and column of the offending token.
Formula parse(std::string_view text);

}  // namespace stapu::logic
