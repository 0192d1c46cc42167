#include <algorithm>
#include <string>
#include <vector>

#include "detssl/errors.hpp"
#include "detssl/logic.hpp"

namespace detssl::logic {

namespace {

using ClauseList = std::vector<DnfClause>;

void check_cap(std::size_t n, std::size_t cap) {
    if (n > cap)
        throw ResourceError("DNF clause cap (" + std::to_string(cap) +
                            ") exceeded; enumerate the valid set and use minterm "
                            "compilation instead");
}

// Cross product of two clause lists; contradictory merges are dropped.
ClauseList cross(const ClauseList& a, const ClauseList& b, std::size_t cap) {
    ClauseList out;
    out.reserve(std::min(a.size() * b.size(), cap + 1));
    for (const DnfClause& x : a) {
        for (const DnfClause& y : b) {
            DnfClause m{x.pos | y.pos, x.neg | y.neg};
            if (m.pos & m.neg) continue;
            out.push_back(m);
            check_cap(out.size(), cap);
        }
    }
    return out;
}

ClauseList concat(ClauseList a, const ClauseList& b, std::size_t cap) {
    a.insert(a.end(), b.begin(), b.end());
    check_cap(a.size(), cap);
    return a;
}

// DNF of f (or of !f when negate), built bottom-up.
ClauseList build(const Formula& f, bool negate, std::size_t cap) {
    using K = Formula::Kind;
    switch (f.kind) {
        case K::Var: {
            DnfClause c;
            std::uint32_t bit = 1u << f.var_index;
            (negate ? c.neg : c.pos) = bit;
            return {c};
        }
        case K::Not:
            return build(*f.lhs, !negate, cap);
        case K::And:
            if (negate)
                return concat(build(*f.lhs, true, cap), build(*f.rhs, true, cap), cap);
            return cross(build(*f.lhs, false, cap), build(*f.rhs, false, cap), cap);
        case K::Or:
            if (negate)
                return cross(build(*f.lhs, true, cap), build(*f.rhs, true, cap), cap);
            return concat(build(*f.lhs, false, cap), build(*f.rhs, false, cap), cap);
        case K::Implies:
            // a -> b == !a | b
            if (negate)
                return cross(build(*f.lhs, false, cap), build(*f.rhs, true, cap), cap);
            return concat(build(*f.lhs, true, cap), build(*f.rhs, false, cap), cap);
        case K::Iff: {
            // a <-> b == (a & b) | (!a & !b); negation swaps one polarity.
            ClauseList both = cross(build(*f.lhs, false, cap), build(*f.rhs, negate, cap), cap);
            ClauseList neither = cross(build(*f.lhs, true, cap), build(*f.rhs, !negate, cap), cap);
            return concat(std::move(both), neither, cap);
        }
        case K::ConstTrue:
            if (negate) return {};
            return {DnfClause{}};
        case K::ConstFalse:
            if (negate) return {DnfClause{}};
            return {};
    }
    return {};
}

bool subsumes(const DnfClause& a, const DnfClause& b) {
    // a's literals are a subset of b's, so b is redundant in a disjunction.
    return (a.pos & ~b.pos) == 0 && (a.neg & ~b.neg) == 0;
}

void simplify(ClauseList& clauses) {
    std::sort(clauses.begin(), clauses.end(), [](const DnfClause& a, const DnfClause& b) {
        return a.pos != b.pos ? a.pos < b.pos : a.neg < b.neg;
    });
    clauses.erase(std::unique(clauses.begin(), clauses.end()), clauses.end());

    std::vector<bool> dead(clauses.size(), false);
    for (std::size_t i = 0; i < clauses.size(); ++i) {
        if (dead[i]) continue;
        for (std::size_t j = 0; j < clauses.size(); ++j) {
            if (i == j || dead[j]) continue;
            if (subsumes(clauses[i], clauses[j])) dead[j] = true;
        }
    }
    ClauseList kept;
    kept.reserve(clauses.size());
    for (std::size_t i = 0; i < clauses.size(); ++i)
        if (!dead[i]) kept.push_back(clauses[i]);
    clauses = std::move(kept);
}

}  // namespace

bool DnfForm::satisfied(std::uint32_t assignment) const {
    for (const DnfClause& c : clauses) {
        if ((assignment & c.pos) == c.pos && (assignment & c.neg) == 0) return true;
    }
    return false;
}

DnfForm to_dnf(const Formula& f, int num_attributes, std::size_t clause_cap) {
    DnfForm out;
    out.num_attributes = num_attributes;
    out.clauses = build(f, false, clause_cap);
    simplify(out.clauses);
    return out;
}

std::string dnf_to_string(const DnfForm& dnf, const std::vector<std::string>& attributes) {
    if (dnf.clauses.empty()) return "false";
    std::string out;
    for (std::size_t i = 0; i < dnf.clauses.size(); ++i) {
        if (i) out += " | ";
        const DnfClause& c = dnf.clauses[i];
        if (c.pos == 0 && c.neg == 0) {
            out += "true";
            continue;
        }
        bool first = true;
        for (int k = 0; k < dnf.num_attributes; ++k) {
            std::uint32_t bit = 1u << k;
            if (!(c.pos & bit) && !(c.neg & bit)) continue;
            if (!first) out += " & ";
            if (c.neg & bit) out += '!';
            out += attributes[k];
            first = false;
        }
    }
    return out;
}

bool ValidSet::contains(std::uint32_t v) const {
    return std::binary_search(vectors.begin(), vectors.end(), v);
}

ValidSet enumerate_valid(const Formula& f, int num_attributes) {
    if (num_attributes < 1 || num_attributes > kMaxTruthTableAttributes)
        throw ResourceError("valid-set enumeration supports 1..20 attributes, got " +
                            std::to_string(num_attributes));
    ValidSet out;
    out.num_attributes = num_attributes;
    std::uint32_t n = 1u << num_attributes;
    for (std::uint32_t v = 0; v < n; ++v) {
        if (f.evaluate(v)) out.vectors.push_back(v);
    }
    return out;
}

DnfForm minterms_of(const ValidSet& v) {
    DnfForm out;
    out.num_attributes = v.num_attributes;
    std::uint32_t mask = (v.num_attributes >= 32) ? ~0u : ((1u << v.num_attributes) - 1);
    out.clauses.reserve(v.vectors.size());
    for (std::uint32_t vec : v.vectors)
        out.clauses.push_back(DnfClause{vec, ~vec & mask});
    return out;
}

std::string format_vector(std::uint32_t v, int num_attributes) {
    std::string s(num_attributes, '0');
    for (int k = 0; k < num_attributes; ++k)
        if ((v >> k) & 1u) s[k] = '1';
    return s;
}

}  // namespace detssl::logic
