#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "detssl/errors.hpp"
#include "detssl/logic.hpp"
#include "detssl/relaxations.hpp"
#include "detssl/rng.hpp"
#include "detssl/rule_relaxation.hpp"
#include "support/oracles.hpp"

using namespace detssl;
using namespace detssl::logic;
using detssl::testing::finite_diff;
using detssl::testing::vector_rel_err;

namespace {

const std::vector<std::string> kNames = {"a", "b", "c", "d", "e", "f"};

std::vector<std::string> names(int k) {
    return std::vector<std::string>(kNames.begin(), kNames.begin() + k);
}

// Random formula over k attributes for equivalence fuzzing.
FormulaPtr random_formula(int k, int depth, CounterRng& rng) {
    if (depth == 0 || rng.below(5) == 0) {
        if (rng.below(12) == 0) return Formula::constant(rng.below(2) == 1);
        int idx = static_cast<int>(rng.below(k));
        return Formula::var(idx, kNames[idx]);
    }
    switch (rng.below(5)) {
        case 0: return Formula::negation(random_formula(k, depth - 1, rng));
        case 1:
            return Formula::binary(Formula::Kind::And, random_formula(k, depth - 1, rng),
                                   random_formula(k, depth - 1, rng));
        case 2:
            return Formula::binary(Formula::Kind::Or, random_formula(k, depth - 1, rng),
                                   random_formula(k, depth - 1, rng));
        case 3:
            return Formula::binary(Formula::Kind::Implies, random_formula(k, depth - 1, rng),
                                   random_formula(k, depth - 1, rng));
        default:
            return Formula::binary(Formula::Kind::Iff, random_formula(k, depth - 1, rng),
                                   random_formula(k, depth - 1, rng));
    }
}

std::vector<double> box_point(int k, CounterRng& rng) {
    std::vector<double> v(k);
    for (double& x : v) x = rng.uniform(0.05, 0.95);
    return v;
}

CompiledRelaxation compile_vectors(std::vector<std::uint32_t> vectors, int k, GFunction g) {
    ValidSet v;
    v.num_attributes = k;
    v.vectors = std::move(vectors);
    return CompiledRelaxation::from_valid_set(v, g);
}

constexpr GFunction kIdentity{GFunction::Kind::Identity, 1.0};

}  // namespace

TEST_CASE("parser maps the grammar onto the AST") {
    FormulaPtr f = parse_rules("legs -> !fins", {"legs", "fins"});
    REQUIRE(f->kind == Formula::Kind::Implies);
    CHECK(f->lhs->kind == Formula::Kind::Var);
    CHECK(f->lhs->var_index == 0);
    CHECK(f->rhs->kind == Formula::Kind::Not);
    CHECK(f->rhs->lhs->var_index == 1);

    // Precedence: ! > & > | > -> > <->, with '->' right-associative.
    FormulaPtr g = parse_rules("!a & b | c -> d -> a <-> b", names(6));
    CHECK(g->kind == Formula::Kind::Iff);
    CHECK(g->lhs->kind == Formula::Kind::Implies);
    CHECK(g->lhs->rhs->kind == Formula::Kind::Implies);  // right-assoc
    CHECK(g->lhs->lhs->kind == Formula::Kind::Or);
    CHECK(g->lhs->lhs->lhs->kind == Formula::Kind::And);
    CHECK(g->lhs->lhs->lhs->lhs->kind == Formula::Kind::Not);
}

TEST_CASE("exactly_one expands to the one-hot disjunction") {
    FormulaPtr macro = parse_rules("exactly_one(a, b, c)", names(3));
    std::vector<FormulaPtr> vars;
    for (int i = 0; i < 3; ++i) vars.push_back(Formula::var(i, kNames[i]));
    FormulaPtr manual = Formula::exactly_one(vars);
    for (std::uint32_t v = 0; v < 8; ++v) {
        CHECK(macro->evaluate(v) == manual->evaluate(v));
        CHECK(macro->evaluate(v) == (v == 1 || v == 2 || v == 4));
    }
}

TEST_CASE("parse errors carry positions") {
    CHECK_THROWS_AS(parse_rules("a & (b", names(2)), ParseError);
    try {
        parse_rules("a & (b", names(2));
    } catch (const ParseError& e) {
        CHECK(e.line() == 1);
        CHECK(e.col() == 7);  // error at end of line, after the unclosed paren
    }
    CHECK_THROWS_AS(parse_rules("a & unknown", names(2)), ParseError);
    CHECK_THROWS_AS(parse_rules("a @ b", names(2)), ParseError);

    // Multi-line rule files report the right line.
    try {
        parse_rules("a & b\n# fine\nc |", names(3));
        CHECK(false);
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
}

TEST_CASE("rule files conjoin lines and declare attributes") {
    RuleSet rules = parse_rule_file(
        "# two attribute animals\n"
        "attrs: legs, fins\n"
        "legs -> !fins\n");
    CHECK(rules.attributes == std::vector<std::string>{"legs", "fins"});
    ValidSet v = enumerate_valid(*rules.formula, 2);
    CHECK(v.vectors == std::vector<std::uint32_t>{0b00, 0b01, 0b10});

    CHECK_THROWS_AS(parse_rule_file("legs -> !fins\n"), ParseError);  // no attrs line
}

TEST_CASE("pretty-print reparses to an identical AST") {
    CounterRng rng(31);
    for (int i = 0; i < 300; ++i) {
        int k = 2 + static_cast<int>(rng.below(4));
        FormulaPtr f = random_formula(k, 4, rng);
        FormulaPtr g = parse_rules(pretty_print(*f), names(k));
        CHECK(f->structurally_equal(*g));
    }
}

TEST_CASE("to_dnf matches the truth table") {
    // (a | b) & !c
    FormulaPtr f = parse_rules("(a | b) & !c", names(3));
    DnfForm dnf = to_dnf(*f, 3);
    CHECK(dnf.clauses.size() == 2);
    for (std::uint32_t v = 0; v < 8; ++v) CHECK(dnf.satisfied(v) == f->evaluate(v));

    DnfForm empty = to_dnf(*Formula::constant(false), 3);
    CHECK(empty.clauses.empty());

    CounterRng rng(32);
    for (int i = 0; i < 250; ++i) {
        int k = 2 + static_cast<int>(rng.below(5));  // up to 6
        FormulaPtr g = random_formula(k, 5, rng);
        DnfForm d = to_dnf(*g, k);
        for (std::uint32_t v = 0; v < (1u << k); ++v)
            CHECK(d.satisfied(v) == g->evaluate(v));
    }
}

TEST_CASE("to_dnf enforces the clause cap") {
    FormulaPtr f = parse_rules("(a | b) & (c | d) & (e | f)", names(6));
    CHECK_THROWS_AS(to_dnf(*f, 6, 4), ResourceError);
    CHECK(to_dnf(*f, 6, 64).clauses.size() == 8);
}

TEST_CASE("enumerate_valid is the truth table") {
    FormulaPtr onehot = parse_rules("exactly_one(a, b)", names(2));
    CHECK(enumerate_valid(*onehot, 2).vectors == std::vector<std::uint32_t>{0b01, 0b10});

    CHECK(enumerate_valid(*Formula::constant(true), 3).vectors.size() == 8);

    FormulaPtr imp = parse_rules("a -> !b", names(2));
    CHECK(enumerate_valid(*imp, 2).vectors == std::vector<std::uint32_t>{0, 1, 2});

    CHECK_THROWS_AS(enumerate_valid(*Formula::constant(true), 21), ResourceError);

    CounterRng rng(33);
    for (int i = 0; i < 200; ++i) {
        int k = 2 + static_cast<int>(rng.below(5));
        FormulaPtr g = random_formula(k, 5, rng);
        DnfForm d = to_dnf(*g, k);
        ValidSet v = enumerate_valid(*g, k);
        std::size_t count = 0;
        for (std::uint32_t b = 0; b < (1u << k); ++b) {
            bool in_v = v.contains(b);
            CHECK(d.satisfied(b) == in_v);
            count += in_v;
        }
        CHECK(count == v.vectors.size());
    }
}

TEST_CASE("compiled relaxation with identity g equals Table 1 row X for K=2") {
    CompiledRelaxation c = compile_vectors({0b01, 0b10}, 2, kIdentity);
    relax::RelaxationSpec spec;
    spec.kind = relax::Kind::CompiledRules;
    spec.rules = std::make_shared<const CompiledRelaxation>(c);

    CounterRng rng(34);
    for (int i = 0; i < 1000; ++i) {
        double t = rng.uniform01();
        std::vector<double> theta = {t, 1.0 - t};
        double lhs = relax::unsup_loss_grad(spec, theta).value;
        double rhs = relax::exclusivity_loss(ProbVector(theta));
        CHECK(std::abs(lhs - rhs) < 1e-12);
    }
}

TEST_CASE("unweighted minterm relaxation is the indicator on binary vectors") {
    CounterRng rng(35);
    for (int i = 0; i < 50; ++i) {
        int k = 2 + static_cast<int>(rng.below(3));
        FormulaPtr f = random_formula(k, 4, rng);
        ValidSet v = enumerate_valid(*f, k);
        if (v.vectors.empty()) continue;
        CompiledRelaxation c = CompiledRelaxation::from_valid_set(v, kIdentity);
        for (std::uint32_t b = 0; b < (1u << k); ++b) {
            std::vector<double> theta(k);
            for (int j = 0; j < k; ++j) theta[j] = (b >> j) & 1u ? 1.0 : 0.0;
            CHECK(c.evaluate(theta) == doctest::Approx(v.contains(b) ? 1.0 : 0.0));
        }
    }
}

TEST_CASE("power-g relaxation matches direct summation") {
    // V = {110, 001}: q = g(t0) g(t1) g(1-t2) + g(1-t0) g(1-t1) g(t2).
    GFunction power{GFunction::Kind::Power, 10.0};
    CompiledRelaxation c = compile_vectors({0b011, 0b100}, 3, power);
    std::vector<double> theta = {0.9, 0.9, 0.1};
    double direct = std::pow(0.9, 10.0) * std::pow(0.9, 10.0) * std::pow(0.9, 10.0) +
                    std::pow(0.1, 10.0) * std::pow(0.1, 10.0) * std::pow(0.1, 10.0);
    CHECK(c.evaluate(theta) == doctest::Approx(direct).epsilon(1e-12));
    CHECK(c.logloss_grad(theta, relax::kDefaultEps).value ==
          doctest::Approx(std::log(direct)).epsilon(1e-12));
}

TEST_CASE("vacuous rules give identically zero log-loss under identity g") {
    FormulaPtr f = Formula::constant(true);
    ValidSet v = enumerate_valid(*f, 3);
    CompiledRelaxation c = CompiledRelaxation::from_valid_set(v, kIdentity);
    CounterRng rng(36);
    for (int i = 0; i < 100; ++i) {
        std::vector<double> theta = box_point(3, rng);
        CHECK(std::abs(c.logloss_grad(theta, relax::kDefaultEps).value) < 1e-12);
    }
}

TEST_CASE("relaxation log-loss gradient matches finite differences") {
    CounterRng rng(37);
    FormulaPtr f = parse_rules("a -> !b\na | b | c", names(3));
    ValidSet v = enumerate_valid(*f, 3);
    for (GFunction g : {kIdentity, GFunction{GFunction::Kind::Power, 10.0}}) {
        CompiledRelaxation c = CompiledRelaxation::from_valid_set(v, g);
        auto value_of = [&c](const std::vector<double>& t) {
            return c.logloss_grad(t, relax::kDefaultEps).value;
        };
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            std::vector<double> theta = box_point(3, rng);
            LossGrad lg = c.logloss_grad(theta, relax::kDefaultEps);
            worst = std::max(worst, vector_rel_err(lg.grad, finite_diff(value_of, theta, 1e-6)));
        }
        CHECK(worst < 1e-4);
    }
}

TEST_CASE("cross-module: exactly-one K=2 gradient equals exclusivity gradient") {
    CompiledRelaxation c = compile_vectors({0b01, 0b10}, 2, kIdentity);
    relax::RelaxationSpec rules_spec;
    rules_spec.kind = relax::Kind::CompiledRules;
    rules_spec.rules = std::make_shared<const CompiledRelaxation>(c);
    relax::RelaxationSpec x_spec;
    x_spec.kind = relax::Kind::MutualExclusivity;

    CounterRng rng(38);
    for (int i = 0; i < 100; ++i) {
        double t = rng.uniform(0.02, 0.98);
        std::vector<double> theta = {t, 1.0 - t};
        LossGrad a = relax::unsup_loss_grad(rules_spec, theta);
        LossGrad b = relax::unsup_loss_grad(x_spec, theta);
        CHECK(a.value == doctest::Approx(b.value).epsilon(1e-12));
        CHECK(a.grad[0] == doctest::Approx(b.grad[0]).epsilon(1e-9));
        CHECK(a.grad[1] == doctest::Approx(b.grad[1]).epsilon(1e-9));
    }
}

TEST_CASE("power temperature sweep decreases q off the valid set") {
    FormulaPtr f = parse_rules("exactly_one(a, b, c)", names(3));
    ValidSet v = enumerate_valid(*f, 3);
    CounterRng rng(39);
    for (int i = 0; i < 50; ++i) {
        std::vector<double> theta = box_point(3, rng);
        double prev = std::numeric_limits<double>::infinity();
        for (double t : {1.0, 10.0, 100.0}) {
            CompiledRelaxation c =
                CompiledRelaxation::from_valid_set(v, {GFunction::Kind::Power, t});
            double q = c.evaluate(theta);
            CHECK(q < prev);
            prev = q;
        }
    }
}

TEST_CASE("hill climbing on q only converges to valid vectors") {
    // Projected gradient ascent from random starts; limit points must round
    // to vectors of V (free coordinates may stall anywhere, and any rounding
    // of a free coordinate stays in V).
    std::vector<std::string> rule_texts = {"exactly_one(a, b, c)", "a -> !b", "a <-> b",
                                           "exactly_one(a, b, c, d)\nc -> d"};
    CounterRng rng(40);
    for (const std::string& text : rule_texts) {
        int k = text.find('d') != std::string::npos ? 4 : 3;
        if (text == "a -> !b" || text == "a <-> b") k = 2;
        FormulaPtr f = parse_rules(text, names(k));
        ValidSet v = enumerate_valid(*f, k);
        CompiledRelaxation c = CompiledRelaxation::from_valid_set(v, kIdentity);

        int starts = 250;
        for (int s = 0; s < starts; ++s) {
            std::vector<double> theta = box_point(k, rng);
            for (int it = 0; it < 400; ++it) {
                LossGrad lg = c.logloss_grad(theta, 1e-9);
                double q = std::exp(lg.value);
                for (int j = 0; j < k; ++j)
                    theta[j] = std::clamp(theta[j] + 0.1 * q * lg.grad[j], 0.0, 1.0);
            }
            std::uint32_t rounded = 0;
            for (int j = 0; j < k; ++j)
                if (theta[j] >= 0.5) rounded |= 1u << j;
            CAPTURE(text);
            CHECK(v.contains(rounded));
        }
    }
}

TEST_CASE("weighted mode validates its keys") {
    ValidSet v;
    v.num_attributes = 2;
    v.vectors = {0b01, 0b10};
    std::map<std::uint32_t, double> bad = {{0b11, 2.0}};
    CHECK_THROWS_AS(CompiledRelaxation::from_valid_set(v, kIdentity, &bad), ConfigError);

    std::map<std::uint32_t, double> good = {{0b01, 2.0}, {0b10, 1.0}};
    CompiledRelaxation c = CompiledRelaxation::from_valid_set(v, kIdentity, &good);
    CHECK(c.weighted());
    // Weighted q at a vertex reports the weight instead of 1.
    CHECK(c.evaluate(std::vector<double>{1.0, 0.0}) == doctest::Approx(2.0));
}

TEST_CASE("unsatisfiable rules are an error, not a number") {
    ValidSet v;
    v.num_attributes = 2;
    CompiledRelaxation c = CompiledRelaxation::from_valid_set(v, kIdentity);
    std::vector<double> theta = {0.5, 0.5};
    CHECK_THROWS_AS(c.logloss_grad(theta, relax::kDefaultEps), UnsatisfiableRulesError);
}
