#include "hypertree/sexpr.hpp"

#include <cctype>

#include "hypertree/errors.hpp"

namespace hypertree {
namespace {

class Parser {
  public:
    explicit Parser(std::string_view text) : text_(text) {}

    SExpr parse_all() {
        SExpr root = parse_tree();
        skip_ws();
        if (pos_ != text_.size()) throw ParseError("unexpected trailing input", pos_);
        return root;
    }

  private:
    static bool is_atom_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])) != 0)
            ++pos_;
    }

    SExpr parse_tree() {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
        const char c = text_[pos_];
        if (c == '(') {
            SExpr node;
            node.position = pos_++;
            node.children.push_back(parse_tree());
            node.children.push_back(parse_tree());
            skip_ws();
            if (pos_ >= text_.size()) throw ParseError("expected ')'", pos_);
            if (text_[pos_] != ')') {
                throw ParseError(
                    "expected ')' (a node must have exactly two children)", pos_);
            }
            ++pos_;
            return node;
        }
        if (!is_atom_char(c)) throw ParseError(std::string("unexpected character '") + c + "'", pos_);
        SExpr leaf;
        leaf.position = pos_;
        while (pos_ < text_.size() && is_atom_char(text_[pos_])) leaf.atom.push_back(text_[pos_++]);
        return leaf;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace

SExpr parse_sexpr(std::string_view text) { return Parser(text).parse_all(); }

}  // namespace hypertree
