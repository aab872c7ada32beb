#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace coderag {

enum class UnitKind { function, class_type, whole_file };

std::string_view to_string(UnitKind kind);
UnitKind unit_kind_from_string(std::string_view s);

/// A top-level definition found by a grammar. Lines are 1-based, inclusive.
struct Definition {
    UnitKind kind = UnitKind::function;
    std::string name; // qualified when written qualified, e.g. "Foo::bar"
    std::size_t start_line = 0;
    std::size_t end_line = 0;
};

struct DefinitionScan {
    std::vector<Definition> definitions; // outermost definitions in source order
    bool has_function_definition = false; // at any depth, including class bodies
    bool ok = true;
    std::string error;
};

struct CallSite {
    std::string name; // unqualified
    std::size_t line = 0;
    std::size_t offset = 0;

    friend bool operator==(const CallSite&, const CallSite&) = default;
};

/// Language front-end used for segmentation and call extraction.
class Grammar {
public:
    virtual ~Grammar() = default;
    virtual std::string_view id() const = 0;
    virtual DefinitionScan scan_definitions(std::string_view source) const = 0;
    /// Call names in source order, first occurrence only. Must tolerate
    /// fragments that are not complete translation units.
    virtual std::vector<CallSite> extract_calls(std::string_view fragment) const = 0;
};

/// C and C++ front-end over a hand-written lexer.
///
/// Nested definitions resolve outermost-wins: a class is one definition
/// covering its inline members, while out-of-class member definitions
/// (`void Foo::bar() {...}`) are separate functions. Namespaces and
/// `extern "C" {}` blocks are transparent.
class CFamilyGrammar final : public Grammar {
public:
    std::string_view id() const override { return "cfamily-v1"; }
    DefinitionScan scan_definitions(std::string_view source) const override;
    std::vector<CallSite> extract_calls(std::string_view fragment) const override;
};

const Grammar& default_grammar();

} // namespace coderag
