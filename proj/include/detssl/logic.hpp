#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace detssl::logic {

struct SourcePos {
    int line = 0;  // 1-based; 0 = synthesized node
    int col = 0;
};

class Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

/// Propositional formula over a declared, ordered attribute list. Nodes are
/// immutable and shared; `exactly_one(...)` is expanded at parse time.
class Formula {
public:
    enum class Kind { Var, Not, And, Or, Implies, Iff, ConstTrue, ConstFalse };

    Kind kind = Kind::ConstTrue;
    int var_index = -1;     // Var only
    std::string var_name;   // Var only
    FormulaPtr lhs, rhs;    // Not uses lhs; binary nodes use both
    SourcePos pos;

    static FormulaPtr var(int index, std::string name, SourcePos pos = {});
    static FormulaPtr negation(FormulaPtr f, SourcePos pos = {});
    static FormulaPtr binary(Kind kind, FormulaPtr l, FormulaPtr r, SourcePos pos = {});
    static FormulaPtr constant(bool value, SourcePos pos = {});
    /// The one-hot constraint: exactly one of `vars` holds.
    static FormulaPtr exactly_one(const std::vector<FormulaPtr>& vars, SourcePos pos = {});

    /// Truth value under an assignment; bit k of `assignment` is variable k.
    bool evaluate(std::uint32_t assignment) const;

    bool structurally_equal(const Formula& other) const;
};

/// Renders with minimal parentheses; reparsing yields a structurally
/// identical AST.
std::string pretty_print(const Formula& f);

/// Parses newline-separated formulas over declared attributes into their
/// conjunction. '#' starts a comment. Throws ParseError with position.
FormulaPtr parse_rules(std::string_view text, const std::vector<std::string>& attributes);

struct RuleSet {
    std::vector<std::string> attributes;
    FormulaPtr formula;
};

/// Full rule-file format: first non-comment line "attrs: a, b, c", then
/// formula lines.
RuleSet parse_rule_file(std::string_view text);

/// One DNF clause as polarity bitmasks; attributes in neither mask are free.
struct DnfClause {
    std::uint32_t pos = 0;
    std::uint32_t neg = 0;

    bool operator==(const DnfClause&) const = default;
};

struct DnfForm {
    int num_attributes = 0;
    std::vector<DnfClause> clauses;  // empty = unsatisfiable

    bool satisfied(std::uint32_t assignment) const;
};

inline constexpr std::size_t kDefaultClauseCap = std::size_t{1} << 16;
inline constexpr int kMaxTruthTableAttributes = 20;

/// Conversion via negation normal form and distribution, with duplicate,
/// contradictory and subsumed clauses removed. Throws ResourceError when the
/// intermediate clause count exceeds `clause_cap`.
DnfForm to_dnf(const Formula& f, int num_attributes,
               std::size_t clause_cap = kDefaultClauseCap);

std::string dnf_to_string(const DnfForm& dnf, const std::vector<std::string>& attributes);

/// The valid label set V as sorted bitmasks over K attributes.
struct ValidSet {
    int num_attributes = 0;
    std::vector<std::uint32_t> vectors;

    bool contains(std::uint32_t v) const;
};

/// Exhaustive truth-table enumeration; K capped at 20.
ValidSet enumerate_valid(const Formula& f, int num_attributes);

/// Minterm (complete-literal) DNF of a valid set; clauses are disjoint.
DnfForm minterms_of(const ValidSet& v);

std::string format_vector(std::uint32_t v, int num_attributes);

}  // namespace detssl::logic
