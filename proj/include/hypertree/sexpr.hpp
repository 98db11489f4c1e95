#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace hypertree {

/// Binary s-expression: either an atom or a pair `(a b)`.
struct SExpr {
    std::string atom;
    std::size_t position = 0;  // offset of the atom or the opening parenthesis
    std::vector<SExpr> children;

    bool is_atom() const { return children.empty(); }
};

/// Grammar `tree := ATOM | '(' tree tree ')'`, ATOM = [A-Za-z0-9_]+.
/// Whitespace is insignificant except as an atom separator. Throws
/// ParseError with the offending offset.
SExpr parse_sexpr(std::string_view text);

}  // namespace hypertree
