#include <cctype>
#include <optional>
#include <string>
#include <vector>

#include "detssl/errors.hpp"
#include "detssl/logic.hpp"

namespace detssl::logic {

namespace {

enum class Tok { Ident, Bang, Amp, Pipe, Arrow, DArrow, LParen, RParen, Comma, End };

struct Token {
    Tok kind;
    std::string text;
    SourcePos pos;
};

class Lexer {
public:
    Lexer(std::string_view src, int line) : src_(src), line_(line) {}

    Token next() {
        while (i_ < src_.size() && (src_[i_] == ' ' || src_[i_] == '\t')) ++i_;
        SourcePos pos{line_, static_cast<int>(i_) + 1};
        if (i_ >= src_.size()) return {Tok::End, "", pos};
        char c = src_[i_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = i_;
            while (i_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[i_])) || src_[i_] == '_'))
                ++i_;
            return {Tok::Ident, std::string(src_.substr(start, i_ - start)), pos};
        }
        ++i_;
        switch (c) {
            case '!': return {Tok::Bang, "!", pos};
            case '&': return {Tok::Amp, "&", pos};
            case '|': return {Tok::Pipe, "|", pos};
            case '(': return {Tok::LParen, "(", pos};
            case ')': return {Tok::RParen, ")", pos};
            case ',': return {Tok::Comma, ",", pos};
            case '-':
                if (i_ < src_.size() && src_[i_] == '>') {
                    ++i_;
                    return {Tok::Arrow, "->", pos};
                }
                break;
            case '<':
                if (i_ + 1 < src_.size() && src_[i_] == '-' && src_[i_ + 1] == '>') {
                    i_ += 2;
                    return {Tok::DArrow, "<->", pos};
                }
                break;
            default:
                break;
        }
        throw ParseError("unexpected character '" + std::string(1, c) + "'", pos.line, pos.col);
    }

private:
    std::string_view src_;
    std::size_t i_ = 0;
    int line_;
};

// Precedence: ! > & > | > -> > <->, with '->' right-associative.
class LineParser {
public:
    LineParser(std::string_view src, int line, const std::vector<std::string>& attributes)
        : lexer_(src, line), attributes_(attributes) {
        advance();
    }

    FormulaPtr parse() {
        FormulaPtr f = parse_iff();
        if (cur_.kind != Tok::End)
            throw ParseError("unexpected token '" + cur_.text + "'", cur_.pos.line, cur_.pos.col);
        return f;
    }

private:
    void advance() { cur_ = lexer_.next(); }

    bool accept(Tok kind) {
        if (cur_.kind != kind) return false;
        advance();
        return true;
    }

    void expect(Tok kind, const char* what) {
        if (cur_.kind != kind)
            throw ParseError(std::string("expected ") + what + ", found '" +
                                 (cur_.kind == Tok::End ? "end of line" : cur_.text) + "'",
                             cur_.pos.line, cur_.pos.col);
        advance();
    }

    FormulaPtr parse_iff() {
        FormulaPtr f = parse_implies();
        while (cur_.kind == Tok::DArrow) {
            SourcePos pos = cur_.pos;
            advance();
            f = Formula::binary(Formula::Kind::Iff, f, parse_implies(), pos);
        }
        return f;
    }

    FormulaPtr parse_implies() {
        FormulaPtr f = parse_or();
        if (cur_.kind == Tok::Arrow) {
            SourcePos pos = cur_.pos;
            advance();
            return Formula::binary(Formula::Kind::Implies, f, parse_implies(), pos);
        }
        return f;
    }

    FormulaPtr parse_or() {
        FormulaPtr f = parse_and();
        while (cur_.kind == Tok::Pipe) {
            SourcePos pos = cur_.pos;
            advance();
            f = Formula::binary(Formula::Kind::Or, f, parse_and(), pos);
        }
        return f;
    }

    FormulaPtr parse_and() {
        FormulaPtr f = parse_unary();
        while (cur_.kind == Tok::Amp) {
            SourcePos pos = cur_.pos;
            advance();
            f = Formula::binary(Formula::Kind::And, f, parse_unary(), pos);
        }
        return f;
    }

    FormulaPtr parse_unary() {
        if (cur_.kind == Tok::Bang) {
            SourcePos pos = cur_.pos;
            advance();
            return Formula::negation(parse_unary(), pos);
        }
        return parse_atom();
    }

    FormulaPtr parse_atom() {
        if (accept(Tok::LParen)) {
            FormulaPtr f = parse_iff();
            expect(Tok::RParen, "')'");
            return f;
        }
        if (cur_.kind != Tok::Ident)
            throw ParseError("expected a variable, constant or '('", cur_.pos.line, cur_.pos.col);
        Token tok = cur_;
        advance();
        if (tok.text == "true") return Formula::constant(true, tok.pos);
        if (tok.text == "false") return Formula::constant(false, tok.pos);
        if (tok.text == "exactly_one") {
            expect(Tok::LParen, "'(' after exactly_one");
            std::vector<FormulaPtr> vars;
            vars.push_back(parse_declared_var());
            while (accept(Tok::Comma)) vars.push_back(parse_declared_var());
            expect(Tok::RParen, "')'");
            return Formula::exactly_one(vars, tok.pos);
        }
        return make_var(tok);
    }

    FormulaPtr parse_declared_var() {
        if (cur_.kind != Tok::Ident)
            throw ParseError("expected a variable name", cur_.pos.line, cur_.pos.col);
        Token tok = cur_;
        advance();
        return make_var(tok);
    }

    FormulaPtr make_var(const Token& tok) {
        for (std::size_t i = 0; i < attributes_.size(); ++i) {
            if (attributes_[i] == tok.text)
                return Formula::var(static_cast<int>(i), tok.text, tok.pos);
        }
        throw ParseError("undeclared variable '" + tok.text + "'", tok.pos.line, tok.pos.col);
    }

    Lexer lexer_;
    const std::vector<std::string>& attributes_;
    Token cur_{Tok::End, "", {}};
};

std::string_view strip(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return s.substr(b, e - b);
}

// Splits into lines, dropping '#' comments but preserving line numbers.
std::vector<std::pair<int, std::string_view>> content_lines(std::string_view text) {
    std::vector<std::pair<int, std::string_view>> lines;
    int line_no = 1;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        if (auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = strip(line);
        if (!line.empty()) lines.emplace_back(line_no, line);
        start = end + 1;
        ++line_no;
        if (end == text.size()) break;
    }
    return lines;
}

}  // namespace

FormulaPtr parse_rules(std::string_view text, const std::vector<std::string>& attributes) {
    FormulaPtr conj;
    for (auto [line_no, line] : content_lines(text)) {
        FormulaPtr f = LineParser(line, line_no, attributes).parse();
        conj = conj ? Formula::binary(Formula::Kind::And, conj, f) : f;
    }
    if (!conj) conj = Formula::constant(true);
    return conj;
}

RuleSet parse_rule_file(std::string_view text) {
    auto lines = content_lines(text);
    if (lines.empty())
        throw ParseError("rule file has no content", 1, 1);
    auto [header_line, header] = lines.front();
    constexpr std::string_view prefix = "attrs:";
    if (header.substr(0, prefix.size()) != prefix)
        throw ParseError("rule file must start with an 'attrs:' line", header_line, 1);

    RuleSet rules;
    std::string_view names = header.substr(prefix.size());
    std::size_t p = 0;
    while (p <= names.size()) {
        std::size_t comma = names.find(',', p);
        if (comma == std::string_view::npos) comma = names.size();
        std::string_view name = strip(names.substr(p, comma - p));
        if (name.empty())
            throw ParseError("empty attribute name in 'attrs:' line", header_line, 1);
        rules.attributes.emplace_back(name);
        p = comma + 1;
        if (comma == names.size()) break;
    }

    FormulaPtr conj;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        auto [line_no, line] = lines[i];
        FormulaPtr f = LineParser(line, line_no, rules.attributes).parse();
        conj = conj ? Formula::binary(Formula::Kind::And, conj, f) : f;
    }
    rules.formula = conj ? conj : Formula::constant(true);
    return rules;
}

}  // namespace detssl::logic
