#include "logsentinel/filter_features.hpp"

#include <array>
#include <algorithm>
#include <cctype>
#include <unordered_map>
#include <unordered_set>

#include "logsentinel/textutil.hpp"

namespace logsentinel {

namespace {

enum Category : unsigned {
    CatComparison = 1u << 0,
    CatLogical = 1u << 1,
    CatElement = 1u << 2,
    CatEvaluation = 1u << 3,
    CatArray = 1u << 4,
    CatBitwise = 1u << 5,
    CatProjection = 1u << 6,
    CatMisc = 1u << 7,
};

// MongoDB query operator taxonomy. An operator may belong to more than one
// category ($elemMatch is both an array selector and a projection operator).
const std::unordered_map<std::string_view, unsigned>& operator_table() {
    static const std::unordered_map<std::string_view, unsigned> table = {
        {"$eq", CatComparison},
        {"$gt", CatComparison},
        {"$gte", CatComparison},
        {"$in", CatComparison},
        {"$lt", CatComparison},
        {"$lte", CatComparison},
        {"$ne", CatComparison},
        {"$nin", CatComparison},
        {"$and", CatLogical},
        {"$not", CatLogical},
        {"$nor", CatLogical},
        {"$or", CatLogical},
        {"$exists", CatElement},
        {"$type", CatElement},
        {"$expr", CatEvaluation},
        {"$jsonSchema", CatEvaluation},
        {"$mod", CatEvaluation},
        {"$regex", CatEvaluation},
        {"$text", CatEvaluation},
        {"$where", CatEvaluation},
        {"$all", CatArray},
        {"$elemMatch", CatArray | CatProjection},
        {"$size", CatArray},
        {"$bitsAllClear", CatBitwise},
        {"$bitsAllSet", CatBitwise},
        {"$bitsAnyClear", CatBitwise},
        {"$bitsAnySet", CatBitwise},
        {"$meta", CatProjection},
        {"$slice", CatProjection},
        {"$comment", CatMisc},
        {"$rand", CatMisc},
        {"$natural", CatMisc},
    };
    return table;
}

bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$' || c == '.';
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

int hex_val(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

// Unescape the inside of a quoted string, tolerantly: unknown escapes keep
// the escaped character, truncated ones are passed through.
std::string unescape(std::string_view body) {
    std::string out;
    out.reserve(body.size());
    for (std::size_t i = 0; i < body.size(); ++i) {
        char c = body[i];
        if (c != '\\' || i + 1 >= body.size()) {
            out.push_back(c);
            continue;
        }
        char e = body[++i];
        switch (e) {
            case 'b': out.push_back('\b'); break;
            case 'f': out.push_back('\f'); break;
            case 'n': out.push_back('\n'); break;
            case 'r': out.push_back('\r'); break;
            case 't': out.push_back('\t'); break;
            case 'u': {
                std::uint32_t cp = 0;
                bool ok = body.size() >= i + 5;
                for (int k = 1; k <= 4 && ok; ++k) {
                    int h = hex_val(body[i + k]);
                    if (h < 0)
                        ok = false;
                    else
                        cp = cp * 16 + static_cast<std::uint32_t>(h);
                }
                if (ok) {
                    i += 4;
                    // Surrogate pair
                    if (cp >= 0xD800 && cp <= 0xDBFF && body.size() >= i + 7 && body[i + 1] == '\\' &&
                        body[i + 2] == 'u') {
                        std::uint32_t lo = 0;
                        bool ok2 = true;
                        for (int k = 3; k <= 6 && ok2; ++k) {
                            int h = hex_val(body[i + k]);
                            if (h < 0)
                                ok2 = false;
                            else
                                lo = lo * 16 + static_cast<std::uint32_t>(h);
                        }
                        if (ok2 && lo >= 0xDC00 && lo <= 0xDFFF) {
                            cp = 0x10000 + ((cp - 0xD800) << 10) + (lo - 0xDC00);
                            i += 6;
                        }
                    }
                    append_utf8(out, cp);
                } else {
                    out.push_back(e);
                }
                break;
            }
            default: out.push_back(e); break;
        }
    }
    return out;
}

// Scan a quoted run starting at s[start] (a quote character). Returns one
// past the closing quote; terminated is false if the input ended first.
std::size_t scan_quoted(std::string_view s, std::size_t start, bool& terminated) {
    char q = s[start];
    std::size_t i = start + 1;
    while (i < s.size()) {
        if (s[i] == '\\') {
            i += 2;
            continue;
        }
        if (s[i] == q) {
            terminated = true;
            return i + 1;
        }
        ++i;
    }
    terminated = false;
    return s.size();
}

std::size_t scan_number(std::string_view s, std::size_t start) {
    std::size_t i = start;
    if (i < s.size() && (s[i] == '-' || s[i] == '+')) ++i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (i < s.size() && s[i] == '.') {
        ++i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    }
    if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < s.size() && (s[j] == '-' || s[j] == '+')) ++j;
        if (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) {
            i = j;
            while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        }
    }
    return i;
}

bool next_nonspace_is_colon(std::string_view s, std::size_t from) {
    while (from < s.size() && is_space(s[from])) ++from;
    return from < s.size() && s[from] == ':';
}

TokenKind classify_word(std::string_view word) {
    if (word == "null") return TokenKind::NullLiteral;
    if (word == "true" || word == "false") return TokenKind::BooleanLiteral;
    if (is_known_operator(word)) return TokenKind::Operator;
    if (word.find('$') != std::string_view::npos) return TokenKind::BareDollar;
    return TokenKind::FieldName;
}

void escape_json_into(std::string& out, std::string_view s) {
    for (unsigned char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\b': out += "\\b"; break;
            case '\f': out += "\\f"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (c < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out.push_back(static_cast<char>(c));
                }
        }
    }
}

}  // namespace

bool is_known_operator(std::string_view word) {
    return operator_table().count(word) > 0;
}

std::vector<FilterToken> tokenize_filter(std::string_view s) {
    std::vector<FilterToken> tokens;
    std::size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        if (is_space(c)) {
            ++i;
            continue;
        }
        FilterToken tok;
        tok.position = i;
        if (c == '"' || c == '\'') {
            bool terminated = false;
            std::size_t end = scan_quoted(s, i, terminated);
            tok.text = std::string(s.substr(i, end - i));
            std::string_view body = terminated ? s.substr(i + 1, end - i - 2) : s.substr(i + 1);
            tok.content = unescape(body);
            if (next_nonspace_is_colon(s, end)) {
                TokenKind k = classify_word(tok.content);
                // A key can only be an operator, bare-dollar or field name;
                // quoted "null"/"true" keys are field names.
                tok.kind = (k == TokenKind::Operator || k == TokenKind::BareDollar) ? k : TokenKind::FieldName;
            } else {
                tok.kind = TokenKind::StringLiteral;
            }
            i = end;
        } else if (c == '>' || c == '<') {
            tok.kind = TokenKind::ComparisonSymbol;
            if (i + 1 < s.size() && s[i + 1] == '=') {
                tok.text = std::string(s.substr(i, 2));
                i += 2;
            } else {
                tok.text = std::string(1, c);
                ++i;
            }
            tok.content = tok.text;
        } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                   ((c == '-' || c == '+') && i + 1 < s.size() &&
                    std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
            std::size_t end = scan_number(s, i);
            tok.kind = TokenKind::NumberLiteral;
            tok.text = std::string(s.substr(i, end - i));
            tok.content = tok.text;
            i = end;
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$') {
            std::size_t end = i;
            while (end < s.size() && is_word_char(s[end])) ++end;
            tok.text = std::string(s.substr(i, end - i));
            tok.content = tok.text;
            tok.kind = classify_word(tok.text);
            i = end;
        } else {
            tok.kind = TokenKind::Punctuation;
            tok.text = std::string(1, c);
            tok.content = tok.text;
            ++i;
        }
        tokens.push_back(std::move(tok));
    }
    return tokens;
}

std::string keywords_only(std::string_view text) {
    std::string out;
    for (const FilterToken& t : tokenize_filter(text)) {
        switch (t.kind) {
            case TokenKind::Operator:
            case TokenKind::BareDollar:
                out += t.content;
                break;
            case TokenKind::Punctuation:
            case TokenKind::ComparisonSymbol:
            case TokenKind::NullLiteral:
            case TokenKind::BooleanLiteral:
                out += t.text;
                break;
            case TokenKind::StringLiteral:
                // A value string that is itself a keyword keeps the keyword.
                if (is_known_operator(t.content)) out += t.content;
                break;
            case TokenKind::FieldName:
            case TokenKind::NumberLiteral:
                break;
        }
    }
    return out;
}

std::string normalize_filter_text(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (const FilterToken& t : tokenize_filter(text)) {
        switch (t.kind) {
            case TokenKind::Operator:
            case TokenKind::BareDollar:
            case TokenKind::FieldName:
            case TokenKind::StringLiteral:
                out.push_back('"');
                escape_json_into(out, t.content);
                out.push_back('"');
                break;
            default:
                out += t.text;
        }
    }
    return out;
}

FilterFeatures extract(std::string_view text) {
    FilterFeatures f;
    f.text = std::string(text);
    f.query_length_raw = utf8_length(text);
    const auto tokens = tokenize_filter(text);

    unsigned categories = 0;
    bool any_named = false;

    // Governing-key tracking for null operands: the governor of a value is
    // the nearest enclosing object key; arrays inherit the key that owns
    // them, nested objects reset it.
    struct Frame {
        bool is_object;
        std::string gov;  // operator keyword governing values at this level ("" if none)
    };
    std::vector<Frame> stack;
    std::string pending_key;  // key seen at current object level, waiting for its value

    auto current_governor = [&]() -> const std::string& {
        static const std::string none;
        if (!pending_key.empty()) return pending_key;
        if (!stack.empty() && !stack.back().is_object) return stack.back().gov;
        return none;
    };

    for (std::size_t idx = 0; idx < tokens.size(); ++idx) {
        const FilterToken& t = tokens[idx];
        switch (t.kind) {
            case TokenKind::Operator: {
                any_named = true;
                auto it = operator_table().find(t.content);
                unsigned cat = it->second;
                categories |= cat;
                const std::string& kw = t.content;
                if (kw == "$eq") f.op_eq = true;
                else if (kw == "$gt") f.op_gt = true;
                else if (kw == "$in") f.op_in = true;
                else if (kw == "$ne") f.op_ne = true;
                else if (kw == "$nin") f.op_nin = true;
                else if (kw == "$type") f.op_type = true;
                else if (kw == "$mod") f.op_mod = true;
                else if (kw == "$regex") f.op_regex = true;
                else if (kw == "$where") f.op_where = true;
                else if (kw == "$elemMatch") f.op_elem_match = true;
                else if (kw == "$size") f.op_size = true;
                // Keys become the governor of the value that follows.
                if (idx + 1 < tokens.size() && tokens[idx + 1].kind == TokenKind::Punctuation &&
                    tokens[idx + 1].text == ":")
                    pending_key = kw;
                break;
            }
            case TokenKind::BareDollar:
                f.dollar = true;
                if (idx + 1 < tokens.size() && tokens[idx + 1].kind == TokenKind::Punctuation &&
                    tokens[idx + 1].text == ":")
                    pending_key.clear();
                break;
            case TokenKind::FieldName:
                if (idx + 1 < tokens.size() && tokens[idx + 1].kind == TokenKind::Punctuation &&
                    tokens[idx + 1].text == ":")
                    pending_key.clear();
                break;
            case TokenKind::ComparisonSymbol:
                if (t.text == ">=") f.cmp_ge = true;
                else if (t.text == "<=") f.cmp_le = true;
                else if (t.text == "<") f.cmp_lt = true;
                else if (t.text == ">") f.cmp_gt = true;
                break;
            case TokenKind::NullLiteral: {
                const std::string& gov = current_governor();
                if (!gov.empty() && is_known_operator(gov)) {
                    f.null_operand = true;
                    if (gov == "$regex") f.regex_null_operand = true;
                }
                pending_key.clear();
                break;
            }
            case TokenKind::Punctuation: {
                char p = t.text[0];
                if (p == '{') {
                    stack.push_back({true, ""});
                    pending_key.clear();
                } else if (p == '[') {
                    stack.push_back({false, current_governor()});
                    pending_key.clear();
                } else if (p == '}' || p == ']') {
                    if (!stack.empty()) stack.pop_back();
                    pending_key.clear();
                } else if (p != ':') {
                    // ',' and anything else ends the current value.
                    pending_key.clear();
                }
                break;
            }
            default:
                // scalar value consumed
                pending_key.clear();
                break;
        }
    }

    f.selector_comparison = categories & CatComparison;
    f.selector_logical = categories & CatLogical;
    f.selector_element = categories & CatElement;
    f.selector_evaluation = categories & CatEvaluation;
    f.selector_array = categories & CatArray;
    f.selector_bitwise = categories & CatBitwise;
    f.projection = (categories & CatProjection) || f.dollar;
    f.misc = categories & CatMisc;
    f.selector = f.selector_comparison || f.selector_logical || f.selector_element ||
                 f.selector_evaluation || f.selector_array || f.selector_bitwise;
    f.standard_logical = f.selector_logical;
    f.all_operators = any_named || f.dollar;

    f.keywords_only = keywords_only(text);
    f.query_length_keywords_only = utf8_length(f.keywords_only);
    return f;
}

std::vector<std::pair<std::string, Scalar>> feature_columns(const FilterFeatures& f) {
    std::vector<std::pair<std::string, Scalar>> cols;
    cols.reserve(33);
    cols.emplace_back("$eq", f.op_eq);
    cols.emplace_back("$gt", f.op_gt);
    cols.emplace_back("$in", f.op_in);
    cols.emplace_back("$ne", f.op_ne);
    cols.emplace_back("$nin", f.op_nin);
    cols.emplace_back("$type", f.op_type);
    cols.emplace_back("$mod", f.op_mod);
    cols.emplace_back("$regex", f.op_regex);
    cols.emplace_back("$where", f.op_where);
    cols.emplace_back("$elemMatch", f.op_elem_match);
    cols.emplace_back("$size", f.op_size);
    cols.emplace_back("$", f.dollar);
    cols.emplace_back(">=", f.cmp_ge);
    cols.emplace_back("<=", f.cmp_le);
    cols.emplace_back("<", f.cmp_lt);
    cols.emplace_back(">", f.cmp_gt);
    cols.emplace_back("selector_comparison", f.selector_comparison);
    cols.emplace_back("selector_logical", f.selector_logical);
    cols.emplace_back("selector_element", f.selector_element);
    cols.emplace_back("selector_evaluation", f.selector_evaluation);
    cols.emplace_back("selector_array", f.selector_array);
    cols.emplace_back("selector_bitwise", f.selector_bitwise);
    cols.emplace_back("projection", f.projection);
    cols.emplace_back("misc", f.misc);
    cols.emplace_back("selector", f.selector);
    cols.emplace_back("standard_logical", f.standard_logical);
    cols.emplace_back("all_operators", f.all_operators);
    cols.emplace_back("null_operand", f.null_operand);
    cols.emplace_back("regex_null_operand", f.regex_null_operand);
    cols.emplace_back("text", f.text);
    cols.emplace_back("query_length_raw", f.query_length_raw);
    cols.emplace_back("keywords_only", f.keywords_only);
    cols.emplace_back("query_length_keywords_only", f.query_length_keywords_only);
    return cols;
}

}  // namespace logsentinel
