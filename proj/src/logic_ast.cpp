#include "detssl/logic.hpp"

#include <stdexcept>
#include <utility>

namespace detssl::logic {

namespace {

std::shared_ptr<Formula> make_node(Formula::Kind kind, SourcePos pos) {
    auto f = std::make_shared<Formula>();
    f->kind = kind;
    f->pos = pos;
    return f;
}

}  // namespace

FormulaPtr Formula::var(int index, std::string name, SourcePos pos) {
    auto f = make_node(Kind::Var, pos);
    f->var_index = index;
    f->var_name = std::move(name);
    return f;
}

FormulaPtr Formula::negation(FormulaPtr child, SourcePos pos) {
    auto f = make_node(Kind::Not, pos);
    f->lhs = std::move(child);
    return f;
}

FormulaPtr Formula::binary(Kind kind, FormulaPtr l, FormulaPtr r, SourcePos pos) {
    auto f = make_node(kind, pos);
    f->lhs = std::move(l);
    f->rhs = std::move(r);
    return f;
}

FormulaPtr Formula::constant(bool value, SourcePos pos) {
    return make_node(value ? Kind::ConstTrue : Kind::ConstFalse, pos);
}

FormulaPtr Formula::exactly_one(const std::vector<FormulaPtr>& vars, SourcePos pos) {
    if (vars.empty()) return constant(false, pos);
    // OR over k of (z_k AND all-others-negated).
    FormulaPtr result;
    for (std::size_t k = 0; k < vars.size(); ++k) {
        FormulaPtr clause = vars[k];
        for (std::size_t j = 0; j < vars.size(); ++j) {
            if (j == k) continue;
            clause = binary(Kind::And, clause, negation(vars[j], pos), pos);
        }
        result = result ? binary(Kind::Or, result, clause, pos) : clause;
    }
    return result;
}

bool Formula::evaluate(std::uint32_t assignment) const {
    switch (kind) {
        case Kind::Var:
            return (assignment >> var_index) & 1u;
        case Kind::Not:
            return !lhs->evaluate(assignment);
        case Kind::And:
            return lhs->evaluate(assignment) && rhs->evaluate(assignment);
        case Kind::Or:
            return lhs->evaluate(assignment) || rhs->evaluate(assignment);
        case Kind::Implies:
            return !lhs->evaluate(assignment) || rhs->evaluate(assignment);
        case Kind::Iff:
            return lhs->evaluate(assignment) == rhs->evaluate(assignment);
        case Kind::ConstTrue:
            return true;
        case Kind::ConstFalse:
            return false;
    }
    throw std::logic_error("unreachable formula kind");
}

bool Formula::structurally_equal(const Formula& other) const {
    if (kind != other.kind) return false;
    switch (kind) {
        case Kind::Var:
            return var_index == other.var_index;
        case Kind::ConstTrue:
        case Kind::ConstFalse:
            return true;
        case Kind::Not:
            return lhs->structurally_equal(*other.lhs);
        default:
            return lhs->structurally_equal(*other.lhs) && rhs->structurally_equal(*other.rhs);
    }
}

namespace {

// Binding strength for minimal parenthesization; higher binds tighter.
int precedence(Formula::Kind k) {
    switch (k) {
        case Formula::Kind::Iff: return 1;
        case Formula::Kind::Implies: return 2;
        case Formula::Kind::Or: return 3;
        case Formula::Kind::And: return 4;
        case Formula::Kind::Not: return 5;
        default: return 6;
    }
}

const char* op_text(Formula::Kind k) {
    switch (k) {
        case Formula::Kind::And: return " & ";
        case Formula::Kind::Or: return " | ";
        case Formula::Kind::Implies: return " -> ";
        case Formula::Kind::Iff: return " <-> ";
        default: return "";
    }
}

void print_rec(const Formula& f, int parent_prec, std::string& out) {
    int prec = precedence(f.kind);
    switch (f.kind) {
        case Formula::Kind::Var:
            out += f.var_name;
            return;
        case Formula::Kind::ConstTrue:
            out += "true";
            return;
        case Formula::Kind::ConstFalse:
            out += "false";
            return;
        case Formula::Kind::Not:
            out += '!';
            print_rec(*f.lhs, prec, out);
            return;
        default:
            break;
    }
    bool needs_parens = prec < parent_prec;
    if (needs_parens) out += '(';
    // '->' is right-associative; the other binary operators left-associative.
    bool right_assoc = f.kind == Formula::Kind::Implies;
    print_rec(*f.lhs, right_assoc ? prec + 1 : prec, out);
    out += op_text(f.kind);
    print_rec(*f.rhs, right_assoc ? prec : prec + 1, out);
    if (needs_parens) out += ')';
}

}  // namespace

std::string pretty_print(const Formula& f) {
    std::string out;
    print_rec(f, 0, out);
    return out;
}

}  // namespace detssl::logic
