#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "logsentinel/value.hpp"

namespace logsentinel {

enum class TokenKind {
    Operator,          // $-prefixed known MongoDB keyword (quoted key, or bare word)
    BareDollar,        // '$' that is not part of a recognized keyword ($, $unknown, a.$)
    FieldName,
    StringLiteral,     // quoted string in value position; opaque
    NumberLiteral,
    NullLiteral,
    BooleanLiteral,
    Punctuation,
    ComparisonSymbol,  // >=, <=, <, >
};

struct FilterToken {
    TokenKind kind;
    std::string text;      // exact input slice, quotes included
    std::size_t position;  // offset of the first character in the input
    std::string content;   // unquoted/unescaped payload; equals text for bare tokens
};

// Best-effort lexer for MongoDB filter strings. Well-formed JSON filters lex
// losslessly; arbitrary text (injection payloads are often malformed) still
// yields a token stream. Never throws.
std::vector<FilterToken> tokenize_filter(std::string_view text);

// The engineered feature block derived from a filter string (one column per
// field, in the order given by feature_columns()).
struct FilterFeatures {
    // Per-operator presence
    bool op_eq = false, op_gt = false, op_in = false, op_ne = false, op_nin = false;
    bool op_type = false, op_mod = false, op_regex = false, op_where = false;
    bool op_elem_match = false, op_size = false;
    bool dollar = false;  // any bare-dollar token
    // Comparison symbols (the characters, not the keywords)
    bool cmp_ge = false, cmp_le = false, cmp_lt = false, cmp_gt = false;
    // Operator categories
    bool selector_comparison = false, selector_logical = false, selector_element = false;
    bool selector_evaluation = false, selector_array = false, selector_bitwise = false;
    bool projection = false, misc = false;
    bool selector = false;          // OR of the six selector_* categories
    bool standard_logical = false;  // presence of logical-category operators
    bool all_operators = false;     // any recognized operator or bare-dollar
    bool null_operand = false;        // null literal as an operator's operand
    bool regex_null_operand = false;  // null literal as a $regex operand
    std::string text;
    std::int64_t query_length_raw = 0;  // Unicode scalar values
    std::string keywords_only;
    std::int64_t query_length_keywords_only = 0;
};

FilterFeatures extract(std::string_view text);

// Keep operator keywords, bare dollars, punctuation, comparison symbols and
// null/true/false; drop field names, value strings (unless the string is
// itself a $-keyword) and numbers. No whitespace in the output.
std::string keywords_only(std::string_view text);

// Whitespace- and quote-insensitive canonical form used to join logged
// filters against dataset query texts: every name/string re-emitted
// double-quoted with standard JSON escaping, everything else verbatim.
std::string normalize_filter_text(std::string_view text);

// True iff word (without quotes) is a recognized MongoDB operator keyword.
bool is_known_operator(std::string_view word);

// (column name, value as 0/1 or string) pairs in dataset column order.
// Booleans are paired first, then text/length fields.
std::vector<std::pair<std::string, Scalar>> feature_columns(const FilterFeatures& f);

}  // namespace logsentinel
