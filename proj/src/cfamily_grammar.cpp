#include "coderag/grammar.hpp"

#include "coderag/error.hpp"
#include "coderag/lexer.hpp"

#include <algorithm>
#include <array>
#include <unordered_set>

namespace coderag {

std::string_view to_string(UnitKind kind) {
    switch (kind) {
    case UnitKind::function: return "function";
    case UnitKind::class_type: return "class";
    case UnitKind::whole_file: return "whole_file";
    }
    return "unknown";
}

UnitKind unit_kind_from_string(std::string_view s) {
    if (s == "function") return UnitKind::function;
    if (s == "class") return UnitKind::class_type;
    if (s == "whole_file") return UnitKind::whole_file;
    throw DataError("unknown unit kind '" + std::string(s) + "'");
}

namespace {

using cfamily::Token;
using cfamily::TokenKind;

// Identifiers that precede a parenthesis without naming a function.
const std::unordered_set<std::string_view>& non_callable_words() {
    static const std::unordered_set<std::string_view> words = {
        "if", "for", "while", "switch", "return", "sizeof", "alignof", "alignas", "decltype",
        "catch", "static_assert", "noexcept", "throw", "new", "delete", "case", "do", "else",
        "typeid", "__attribute__", "__declspec", "operator", "template", "typename", "using",
        "namespace", "requires", "co_await", "co_return", "co_yield", "explicit", "asm",
        "__asm__", "_Alignas", "_Static_assert", "__typeof__", "typeof", "_Generic",
        "int", "char", "bool", "float", "double", "long", "short", "unsigned", "signed",
        "void", "auto", "const", "volatile", "static_cast", "dynamic_cast", "const_cast",
        "reinterpret_cast", "defined", "__has_include", "constexpr", "consteval"};
    return words;
}

// Words that may precede an expression, so an identifier after them is not a
// declared name.
const std::unordered_set<std::string_view>& expression_lead_words() {
    static const std::unordered_set<std::string_view> words = {
        "return", "throw", "case", "else", "do", "co_return", "co_yield", "co_await",
        "delete", "and", "or", "not", "xor", "bitand", "bitor", "compl", "not_eq", "and_eq",
        "or_eq", "xor_eq", "goto"};
    return words;
}

bool is_class_key(std::string_view s) { return s == "class" || s == "struct" || s == "union"; }

bool is_macro_like(std::string_view s) {
    bool has_alpha = false;
    for (char c : s) {
        if (c >= 'a' && c <= 'z') return false;
        if (c >= 'A' && c <= 'Z') has_alpha = true;
    }
    return has_alpha;
}

struct ParseFailure {
    std::string message;
};

class DefinitionParser {
public:
    explicit DefinitionParser(const std::vector<Token>& tokens) : t_(tokens) {}

    DefinitionScan run() {
        DefinitionScan scan;
        try {
            std::size_t i = 0;
            parse_scope(i, Scope::file, true);
        } catch (const ParseFailure& f) {
            scan.ok = false;
            scan.error = f.message;
        }
        scan.definitions = std::move(defs_);
        scan.has_function_definition = has_function_;
        return scan;
    }

private:
    enum class Scope { file, transparent, class_body };

    struct Head {
        std::size_t start = 0;
        std::vector<std::size_t> tokens; // head-level token indices
        std::vector<std::size_t> parens; // head-level '(' indices
        std::size_t operator_paren = static_cast<std::size_t>(-1);
        std::size_t operator_word = 0;
        bool assign = false;
        bool saw_paren = false;
        bool ctor_init = false;
        std::size_t ctor_colon = static_cast<std::size_t>(-1);

        void reset(std::size_t next) { *this = Head{}; start = next; }
    };

    bool at(std::size_t i, std::string_view s) const {
        return i < t_.size() && t_[i].kind == TokenKind::punct && t_[i].text == s;
    }
    bool word_at(std::size_t i, std::string_view s) const {
        return i < t_.size() && t_[i].is_ident() && t_[i].text == s;
    }

    [[noreturn]] void fail(std::size_t i, const std::string& what) const {
        const std::size_t line = i < t_.size() ? t_[i].line : (t_.empty() ? 0 : t_.back().line);
        throw ParseFailure{what + " near line " + std::to_string(line)};
    }

    // Index one past the bracket matching the opener at `open`.
    std::size_t skip_balanced(std::size_t open) const {
        std::vector<char> expect;
        std::size_t j = open;
        while (j < t_.size()) {
            const Token& tk = t_[j];
            if (tk.kind == TokenKind::punct && tk.text.size() == 1) {
                const char c = tk.text[0];
                if (c == '(') expect.push_back(')');
                else if (c == '[') expect.push_back(']');
                else if (c == '{') expect.push_back('}');
                else if (c == ')' || c == ']' || c == '}') {
                    if (expect.empty() || expect.back() != c) fail(j, "mismatched bracket");
                    expect.pop_back();
                    if (expect.empty()) return j + 1;
                }
            }
            ++j;
        }
        fail(open, "unterminated bracket");
    }

    // Index one past the '>' matching '<' at `open`; open + 1 when the '<' is
    // not a template bracket.
    std::size_t skip_angles(std::size_t open) const {
        int depth = 0;
        std::size_t j = open;
        while (j < t_.size()) {
            if (at(j, "<")) {
                ++depth;
            } else if (at(j, ">")) {
                if (--depth == 0) return j + 1;
            } else if (at(j, "(") || at(j, "[")) {
                j = skip_balanced(j);
                continue;
            } else if (at(j, ";") || at(j, "{") || at(j, "}")) {
                return open + 1;
            }
            ++j;
        }
        return open + 1;
    }

    // Index of the '<' matching the '>' at `close`, scanning backwards.
    std::size_t match_angle_back(std::size_t close, std::size_t floor) const {
        int depth = 0;
        for (std::size_t j = close + 1; j-- > floor;) {
            if (at(j, ">")) ++depth;
            else if (at(j, "<") && --depth == 0) return j;
            else if (at(j, ";") || at(j, "{") || at(j, "}")) break;
        }
        return static_cast<std::size_t>(-1);
    }

    void parse_scope(std::size_t& i, Scope scope, bool emit) {
        Head head;
        head.reset(i);
        while (i < t_.size()) {
            const Token& tk = t_[i];
            if (tk.kind == TokenKind::punct) {
                if (tk.is(";")) {
                    ++i;
                    head.reset(i);
                    continue;
                }
                if (tk.is("}")) {
                    if (scope == Scope::file) fail(i, "unbalanced '}'");
                    ++i;
                    return;
                }
                if (tk.is(")") || tk.is("]")) fail(i, "unbalanced bracket");
                if (tk.is("(")) {
                    head.tokens.push_back(i);
                    head.parens.push_back(i);
                    head.saw_paren = true;
                    i = skip_balanced(i);
                    continue;
                }
                if (tk.is("[")) {
                    i = skip_balanced(i);
                    continue;
                }
                if (tk.is("=")) {
                    head.assign = true;
                } else if (tk.is(":")) {
                    if (scope == Scope::class_body && head.tokens.size() == 1 &&
                        (word_at(head.start, "public") || word_at(head.start, "private") ||
                         word_at(head.start, "protected"))) {
                        ++i;
                        head.reset(i);
                        continue;
                    }
                    if (head.saw_paren && !head.assign && !head.ctor_init) {
                        head.ctor_init = true;
                        head.ctor_colon = i;
                    }
                } else if (tk.is("{")) {
                    on_open_brace(i, head, emit);
                    continue;
                }
                head.tokens.push_back(i);
                ++i;
                continue;
            }
            if (tk.is_ident()) {
                if (tk.is("template") && at(i + 1, "<")) {
                    head.tokens.push_back(i);
                    i = skip_angles(i + 1);
                    continue;
                }
                if (tk.is("operator")) {
                    head.tokens.push_back(i);
                    head.operator_word = i;
                    std::size_t j = i + 1;
                    if ((at(j, "(") && at(j + 1, ")")) || (at(j, "[") && at(j + 1, "]"))) {
                        j += 2;
                    } else {
                        while (j < t_.size() && !at(j, "(") && !at(j, ";") && !at(j, "{")) ++j;
                    }
                    if (at(j, "(")) head.operator_paren = j;
                    i = j;
                    continue;
                }
            }
            head.tokens.push_back(i);
            ++i;
        }
        if (scope != Scope::file) fail(i, "unexpected end of input inside a scope");
    }

    std::size_t find_callable_paren(const Head& head, std::string* name,
                                    std::size_t* start_out) const {
        std::size_t chosen = static_cast<std::size_t>(-1);
        for (std::size_t p : head.parens) {
            if (p > head.ctor_colon) break;
            if (p == head.operator_paren) {
                chosen = p;
                continue;
            }
            if (p == head.start) continue;
            std::size_t prev = p - 1;
            if (at(prev, ">")) {
                const std::size_t lt = match_angle_back(prev, head.start);
                if (lt == static_cast<std::size_t>(-1) || lt == head.start) continue;
                prev = lt - 1;
            }
            if (!t_[prev].is_ident() || non_callable_words().contains(t_[prev].text)) continue;
            chosen = p;
        }
        if (chosen == static_cast<std::size_t>(-1)) return chosen;

        // Leading macro invocations (EXPORT_FOO(x) void f() {...}) are not part
        // of the definition.
        std::size_t start = head.start;
        for (std::size_t p : head.parens) {
            if (p >= chosen) break;
            if (p > head.start && t_[p - 1].is_ident() && is_macro_like(t_[p - 1].text) &&
                p - 1 == start) {
                start = skip_balanced(p);
            }
        }
        *start_out = start;

        std::size_t k;
        std::string n;
        if (chosen == head.operator_paren) {
            k = head.operator_word;
            for (std::size_t j = k; j < chosen; ++j) {
                if (j > k && t_[j].is_ident() && t_[j - 1].is_ident()) n.push_back(' ');
                n.append(t_[j].text);
            }
        } else {
            k = chosen - 1;
            if (at(k, ">")) k = match_angle_back(k, head.start) - 1;
            n = std::string(t_[k].text);
            if (k > start && at(k - 1, "~")) {
                n = "~" + n;
                --k;
            }
        }
        while (k >= start + 2 && at(k - 1, "::")) {
            std::size_t q = k - 2;
            if (at(q, ">")) {
                const std::size_t lt = match_angle_back(q, start);
                if (lt == static_cast<std::size_t>(-1) || lt == start) break;
                q = lt - 1;
            }
            if (!t_[q].is_ident()) break;
            n = std::string(t_[q].text) + "::" + n;
            k = q;
        }
        *name = std::move(n);
        return chosen;
    }

    std::string class_name(const Head& head, std::size_t key_pos) const {
        std::string name;
        for (std::size_t idx = 0; idx < head.tokens.size(); ++idx) {
            const std::size_t j = head.tokens[idx];
            if (j <= key_pos) continue;
            if (at(j, ":")) break;
            if (at(j, "<")) {
                // template arguments of a specialization; skip to the matching '>'
                const std::size_t past = skip_angles(j);
                while (idx + 1 < head.tokens.size() && head.tokens[idx + 1] < past) ++idx;
                continue;
            }
            if (!t_[j].is_ident() || t_[j].is("final") || t_[j].is("alignas")) continue;
            if (idx + 1 < head.tokens.size() && at(head.tokens[idx + 1], "(")) continue;
            name = std::string(t_[j].text);
        }
        return name;
    }

    void add_definition(UnitKind kind, std::string name, std::size_t start_line,
                        std::size_t end_line) {
        // Two definitions sharing a line cannot both be exact line slices
        // without overlapping; the earlier one keeps the line.
        if (!defs_.empty() && start_line <= defs_.back().end_line) return;
        defs_.push_back({kind, std::move(name), start_line, end_line});
    }

    void on_open_brace(std::size_t& i, Head& head, bool emit) {
        if (head.tokens.empty()) {
            i = skip_balanced(i);
            head.reset(i);
            return;
        }
        const Token& prev = t_[i - 1];
        if (head.ctor_init && (prev.is_ident() || at(i - 1, ">"))) {
            i = skip_balanced(i); // brace member initializer
            return;
        }
        if (head.assign && !head.ctor_init) {
            i = skip_balanced(i); // initializer, the declaration ends at ';'
            return;
        }

        std::size_t key_pos = static_cast<std::size_t>(-1);
        bool is_enum = false;
        bool is_namespace = false;
        for (std::size_t j : head.tokens) {
            if (!t_[j].is_ident()) continue;
            if (t_[j].is("namespace")) is_namespace = true;
            if (t_[j].is("enum")) is_enum = true;
            if (key_pos == static_cast<std::size_t>(-1) && is_class_key(t_[j].text) &&
                !(j > head.start && word_at(j - 1, "enum"))) {
                key_pos = j;
            }
        }
        const bool is_linkage_block = word_at(head.start, "extern") && head.tokens.size() == 2 &&
                                      t_[head.tokens[1]].kind == TokenKind::string_literal;
        if (is_namespace || is_linkage_block) {
            ++i;
            parse_scope(i, Scope::transparent, true);
            head.reset(i);
            return;
        }
        if (is_enum) {
            i = skip_balanced(i);
            return;
        }

        std::string fn_name;
        std::size_t fn_start = head.start;
        const std::size_t paren = find_callable_paren(head, &fn_name, &fn_start);
        bool is_function = paren != static_cast<std::size_t>(-1);
        if (is_function && key_pos != static_cast<std::size_t>(-1) && key_pos < paren &&
            is_macro_like(fn_name)) {
            is_function = false; // class EXPORT_MACRO(x) Foo {...}
        }

        if (is_function) {
            has_function_ = true;
            const std::size_t past = skip_balanced(i);
            if (emit) {
                add_definition(UnitKind::function, fn_name, t_[fn_start].line, t_[past - 1].line);
            }
            i = past;
            head.reset(i);
            return;
        }

        if (key_pos != static_cast<std::size_t>(-1)) {
            std::string name = class_name(head, key_pos);
            ++i;
            parse_scope(i, Scope::class_body, false);
            std::size_t end_line = t_[i - 1].line;
            std::size_t j = i;
            std::string declarator;
            while (j < t_.size() && !at(j, ";")) {
                const Token& tk = t_[j];
                if (at(j, "(") || at(j, "[") || at(j, "{")) {
                    j = skip_balanced(j);
                } else if (tk.is_ident() || tk.kind == TokenKind::number ||
                           tk.kind == TokenKind::string_literal || at(j, "*") || at(j, "&") ||
                           at(j, ",") || at(j, "=") || at(j, "::") || at(j, "<") || at(j, ">")) {
                    if (tk.is_ident() && declarator.empty()) declarator = std::string(tk.text);
                    ++j;
                } else {
                    break;
                }
            }
            if (at(j, ";")) {
                end_line = t_[j].line;
                i = j + 1;
            }
            if (name.empty() && word_at(head.start, "typedef")) name = declarator;
            if (emit) add_definition(UnitKind::class_type, std::move(name), t_[head.start].line, end_line);
            head.reset(i);
            return;
        }

        i = skip_balanced(i);
    }

    const std::vector<Token>& t_;
    std::vector<Definition> defs_;
    bool has_function_ = false;
};

} // namespace

DefinitionScan CFamilyGrammar::scan_definitions(std::string_view source) const {
    const auto lexed = cfamily::lex(source);
    if (!lexed.ok) {
        DefinitionScan scan;
        scan.ok = false;
        scan.error = lexed.error;
        return scan;
    }
    return DefinitionParser(lexed.tokens).run();
}

std::vector<CallSite> CFamilyGrammar::extract_calls(std::string_view fragment) const {
    const auto lexed = cfamily::lex(fragment);
    const auto& t = lexed.tokens;
    auto punct = [&](std::size_t i, std::string_view s) {
        return i < t.size() && t[i].kind == TokenKind::punct && t[i].text == s;
    };
    constexpr std::size_t npos = static_cast<std::size_t>(-1);

    // '<' index matching the '>' at close, within one statement.
    auto angle_open_before = [&](std::size_t close) -> std::size_t {
        int depth = 0;
        for (std::size_t j = close + 1; j-- > 0;) {
            if (punct(j, ">")) ++depth;
            else if (punct(j, "<") && --depth == 0) return j;
            else if (punct(j, ";") || punct(j, "{") || punct(j, "}") || punct(j, "(") ||
                     punct(j, ")")) return npos;
        }
        return npos;
    };
    // '>' index closing a template argument list opened at `open`.
    auto angle_close_after = [&](std::size_t open) -> std::size_t {
        int depth = 0;
        for (std::size_t j = open; j < t.size() && j < open + 32; ++j) {
            if (punct(j, "<")) ++depth;
            else if (punct(j, ">") && --depth == 0) return j;
            else if (punct(j, ";") || punct(j, "{") || punct(j, "}") || punct(j, "(") ||
                     punct(j, ")") || punct(j, "=")) return npos;
        }
        return npos;
    };

    std::vector<CallSite> calls;
    std::unordered_set<std::string_view> seen;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!t[i].is_ident() || non_callable_words().contains(t[i].text)) continue;
        std::size_t after = i + 1;
        if (punct(after, "<")) {
            const std::size_t close = angle_close_after(after);
            if (close == npos) continue;
            after = close + 1;
        }
        if (!punct(after, "(")) continue;

        bool is_call = true;
        if (i > 0 && (punct(i - 1, ".") || punct(i - 1, "->"))) {
            is_call = true;
        } else if (i > 0 && (punct(i - 1, "~") || t[i - 1].is("new"))) {
            is_call = false;
        } else {
            // Walk back over a qualification chain to the first name.
            std::size_t h = i;
            while (h >= 2 && punct(h - 1, "::")) {
                std::size_t q = h - 2;
                if (punct(q, ">")) {
                    const std::size_t lt = angle_open_before(q);
                    if (lt == npos || lt == 0) break;
                    q = lt - 1;
                }
                if (!t[q].is_ident()) break;
                h = q;
            }
            if (h >= 1 && punct(h - 1, "::")) --h;
            if (h >= 1 && punct(h - 1, "~")) {
                is_call = false;
            } else if (h >= 1) {
                const Token& prev = t[h - 1];
                if (prev.is_ident() && !expression_lead_words().contains(prev.text)) {
                    is_call = false; // declaration: `int f(`, `Foo x(`, `void A::m(`
                } else if (punct(h - 1, ">")) {
                    const std::size_t lt = angle_open_before(h - 1);
                    if (lt != npos && lt > 0 && t[lt - 1].is_ident()) is_call = false;
                } else if ((punct(h - 1, "*") || punct(h - 1, "&")) && h >= 2 &&
                           t[h - 2].is_ident() && !expression_lead_words().contains(t[h - 2].text) &&
                           (h == 2 || punct(h - 3, ";") || punct(h - 3, "{") || punct(h - 3, "}"))) {
                    is_call = false; // `Foo* make(` at statement start
                }
            }
        }
        if (!is_call) continue;
        if (seen.insert(t[i].text).second) {
            calls.push_back({std::string(t[i].text), t[i].line, t[i].offset});
        }
    }
    return calls;
}

const Grammar& default_grammar() {
    static const CFamilyGrammar grammar;
    return grammar;
}

} // namespace coderag
