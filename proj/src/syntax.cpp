#include "hcif/syntax.hpp"

#include "hcif/errors.hpp"
#include "hcif/predicates.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace hcif {

namespace {

enum class Tok {
    ident,
    number,
    lbrace,
    rbrace,
    lparen,
    rparen,
    comma,
    colon,
    quote,
    plus,
    stepped_plus,
    minus,
    star,
    eq,
    ne,
    lt,
    le,
    gt,
    ge,
    arrow,
    bar_bar,
    end,
};

struct Token {
    Tok kind = Tok::end;
    std::string text;
    std::size_t line = 1;
    std::size_t column = 1;
    std::size_t begin = 0;
    std::size_t end = 0;
};

const std::set<std::string, std::less<>> keywords = {
    "and", "or", "not", "true", "false", "exp", "automaton", "location", "init",
    "tcp", "term", "sub", "edge", "disc", "cont",
};

bool ident_start(char c)
{
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool ident_char(char c)
{
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    std::vector<Token> run()
    {
        std::vector<Token> out;
        for (;;) {
            skip_blank();
            Token t;
            t.line = line_;
            t.column = column_;
            t.begin = pos_;
            if (pos_ >= text_.size()) {
                t.kind = Tok::end;
                t.end = pos_;
                out.push_back(t);
                return out;
            }
            const char c = text_[pos_];
            if (ident_start(c)) {
                while (pos_ < text_.size() && ident_char(text_[pos_]))
                    advance();
                t.kind = Tok::ident;
            } else if (std::isdigit(static_cast<unsigned char>(c))) {
                lex_number();
                t.kind = Tok::number;
            } else {
                t.kind = punctuation(out);
            }
            t.end = pos_;
            t.text = std::string(text_.substr(t.begin, t.end - t.begin));
            out.push_back(std::move(t));
        }
    }

private:
    void advance()
    {
        if (text_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    [[nodiscard]] char peek(std::size_t ahead = 0) const
    {
        return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
    }

    void skip_blank()
    {
        for (;;) {
            while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
                advance();
            if (peek() == '/' && peek(1) == '/') {
                while (pos_ < text_.size() && text_[pos_] != '\n')
                    advance();
                continue;
            }
            return;
        }
    }

    void lex_number()
    {
        while (std::isdigit(static_cast<unsigned char>(peek())))
            advance();
        if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
            advance();
            while (std::isdigit(static_cast<unsigned char>(peek())))
                advance();
        }
        if (peek() == 'e' || peek() == 'E') {
            std::size_t ahead = 1;
            if (peek(ahead) == '+' || peek(ahead) == '-')
                ++ahead;
            if (std::isdigit(static_cast<unsigned char>(peek(ahead)))) {
                for (std::size_t i = 0; i < ahead; ++i)
                    advance();
                while (std::isdigit(static_cast<unsigned char>(peek())))
                    advance();
            }
        }
    }

    // `x+` is the stepped form when the plus directly follows a variable and
    // is itself followed by a delimiter.
    [[nodiscard]] bool stepped_plus(const std::vector<Token>& previous) const
    {
        if (previous.empty() || previous.back().end != pos_)
            return false;
        const Tok before = previous.back().kind;
        if (before != Tok::ident && before != Tok::quote)
            return false;
        const char next = peek(1);
        return next == '\0' || std::isspace(static_cast<unsigned char>(next)) ||
               std::string_view(")=<>!:,}").find(next) != std::string_view::npos;
    }

    Tok punctuation(const std::vector<Token>& previous)
    {
        const char c = peek();
        const char d = peek(1);
        auto take = [&](std::size_t n, Tok kind) {
            for (std::size_t i = 0; i < n; ++i)
                advance();
            return kind;
        };
        switch (c) {
        case '{': return take(1, Tok::lbrace);
        case '}': return take(1, Tok::rbrace);
        case '(': return take(1, Tok::lparen);
        case ')': return take(1, Tok::rparen);
        case ',': return take(1, Tok::comma);
        case ':': return take(1, Tok::colon);
        case '\'': return take(1, Tok::quote);
        case '*': return take(1, Tok::star);
        case '=': return take(1, Tok::eq);
        case '+': return take(1, stepped_plus(previous) ? Tok::stepped_plus : Tok::plus);
        case '-': return d == '>' ? take(2, Tok::arrow) : take(1, Tok::minus);
        case '!':
            if (d == '=')
                return take(2, Tok::ne);
            break;
        case '<': return d == '=' ? take(2, Tok::le) : take(1, Tok::lt);
        case '>': return d == '=' ? take(2, Tok::ge) : take(1, Tok::gt);
        case '|':
            if (d == '|')
                return take(2, Tok::bar_bar);
            break;
        default:
            break;
        }
        throw SyntaxError(line_, column_, std::string("unexpected character '") + c + "'");
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t column_ = 1;
};

class Parser {
public:
    explicit Parser(std::string_view text) : tokens_(Lexer(text).run()) {}

    ModelFile model()
    {
        ModelFile out;
        while (is_keyword("disc") || is_keyword("cont")) {
            const VarKind kind = next().text == "disc" ? VarKind::discrete : VarKind::continuous;
            out.declarations.add({identifier("variable name"), kind});
        }
        out.root = composition();
        expect(Tok::end, "end of input");
        return out;
    }

    Expr standalone_predicate()
    {
        Expr e = predicate();
        expect(Tok::end, "end of predicate");
        return e;
    }

private:
    [[nodiscard]] const Token& peek(std::size_t ahead = 0) const
    {
        return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
    }

    const Token& next()
    {
        const Token& t = peek();
        if (pos_ < tokens_.size() - 1)
            ++pos_;
        return t;
    }

    [[nodiscard]] bool is(Tok kind) const { return peek().kind == kind; }

    [[nodiscard]] bool is_keyword(std::string_view word) const
    {
        return peek().kind == Tok::ident && peek().text == word;
    }

    [[noreturn]] void fail(const std::string& message) const
    {
        const Token& t = peek();
        const std::string found = t.kind == Tok::end ? "end of input" : "'" + t.text + "'";
        throw SyntaxError(t.line, t.column, message + ", found " + found);
    }

    const Token& expect(Tok kind, const std::string& what)
    {
        if (!is(kind))
            fail("expected " + what);
        return next();
    }

    void keyword(std::string_view word)
    {
        if (!is_keyword(word))
            fail("expected '" + std::string(word) + "'");
        next();
    }

    std::string identifier(const std::string& what)
    {
        if (!is(Tok::ident) || keywords.count(peek().text) != 0)
            fail("expected " + what);
        return next().text;
    }

    // Labels may contain hyphens: `switch-on` lexes as ident, minus, ident.
    std::string label()
    {
        std::string out = identifier("action label");
        while (is(Tok::minus) && peek(1).kind == Tok::ident && tokens_[pos_ - 1].end == peek().begin &&
               peek().end == peek(1).begin) {
            next();
            out += '-';
            out += next().text;
        }
        return out;
    }

    CompositionPtr composition()
    {
        CompositionPtr left = primary();
        while (is(Tok::bar_bar)) {
            next();
            expect(Tok::lbrace, "'{' opening the synchronisation set");
            ActionSet sync;
            if (!is(Tok::rbrace)) {
                sync.insert(label());
                while (is(Tok::comma)) {
                    next();
                    sync.insert(label());
                }
            }
            expect(Tok::rbrace, "'}' closing the synchronisation set");
            CompositionPtr right = primary();
            left = make_parallel(std::move(left), std::move(sync), std::move(right));
        }
        return left;
    }

    CompositionPtr primary()
    {
        if (is(Tok::lparen)) {
            next();
            CompositionPtr inner = composition();
            expect(Tok::rparen, "')'");
            return inner;
        }
        if (!is_keyword("automaton"))
            fail("expected 'automaton' or '('");
        return make_atomic(automaton());
    }

    AtomicAutomaton automaton()
    {
        keyword("automaton");
        std::string name = identifier("automaton name");
        expect(Tok::lbrace, "'{'");
        std::vector<Location> locations;
        std::vector<Edge> edges;
        do {
            location(locations, edges);
        } while (is_keyword("location"));
        expect(Tok::rbrace, "'}' or 'location'");
        return AtomicAutomaton(std::move(name), std::move(locations), std::move(edges));
    }

    void location(std::vector<Location>& locations, std::vector<Edge>& edges)
    {
        keyword("location");
        Location loc;
        loc.name = identifier("location name");
        expect(Tok::lbrace, "'{'");
        std::set<std::string> seen;
        auto once = [&](const std::string& clause) {
            if (!seen.insert(clause).second)
                fail("duplicate '" + clause + "' clause");
            next();
        };
        for (;;) {
            if (is_keyword("init")) {
                once("init");
                loc.init = predicate();
            } else if (is_keyword("tcp")) {
                once("tcp");
                loc.tcp = predicate();
            } else if (is_keyword("term")) {
                once("term");
                loc.term = predicate();
            } else if (is_keyword("sub")) {
                once("sub");
                loc.sub = composition();
            } else if (is_keyword("edge")) {
                next();
                Edge e;
                e.source = loc.name;
                e.guard = predicate();
                expect(Tok::colon, "':' after the guard");
                e.action = label();
                expect(Tok::colon, "':' after the action");
                e.reset = predicate();
                expect(Tok::arrow, "'->'");
                e.target = identifier("target location");
                edges.push_back(std::move(e));
            } else {
                break;
            }
        }
        expect(Tok::rbrace, "'}' or a location clause");
        locations.push_back(std::move(loc));
    }

    Expr predicate() { return disjunction(); }

    Expr disjunction()
    {
        Expr e = conjunction();
        while (is_keyword("or")) {
            next();
            e = Expr::binary(ExprKind::logical_or, e, conjunction());
        }
        return e;
    }

    Expr conjunction()
    {
        Expr e = negation();
        while (is_keyword("and")) {
            next();
            e = Expr::binary(ExprKind::logical_and, e, negation());
        }
        return e;
    }

    Expr negation()
    {
        if (is_keyword("not")) {
            next();
            return Expr::unary(ExprKind::logical_not, negation());
        }
        return comparison();
    }

    Expr comparison()
    {
        Expr lhs = sum();
        ExprKind kind;
        switch (peek().kind) {
        case Tok::eq: kind = ExprKind::eq; break;
        case Tok::ne: kind = ExprKind::ne; break;
        case Tok::lt: kind = ExprKind::lt; break;
        case Tok::le: kind = ExprKind::le; break;
        case Tok::gt: kind = ExprKind::gt; break;
        case Tok::ge: kind = ExprKind::ge; break;
        default: return lhs;
        }
        next();
        return Expr::binary(kind, lhs, sum());
    }

    Expr sum()
    {
        Expr e = product();
        while (is(Tok::plus) || is(Tok::minus)) {
            const ExprKind kind = next().kind == Tok::plus ? ExprKind::add : ExprKind::subtract;
            e = Expr::binary(kind, e, product());
        }
        return e;
    }

    Expr product()
    {
        Expr e = unary();
        while (is(Tok::star)) {
            next();
            e = Expr::binary(ExprKind::multiply, e, unary());
        }
        return e;
    }

    Expr unary()
    {
        if (is(Tok::minus)) {
            next();
            return Expr::unary(ExprKind::negate, unary());
        }
        return atom();
    }

    Expr atom()
    {
        if (is(Tok::number)) {
            const Token& t = next();
            double value = 0.0;
            auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), value);
            if (ec != std::errc() || ptr != t.text.data() + t.text.size())
                throw SyntaxError(t.line, t.column, "malformed number '" + t.text + "'");
            return Expr::number(value);
        }
        if (is(Tok::lparen)) {
            next();
            Expr e = predicate();
            expect(Tok::rparen, "')'");
            return e;
        }
        if (is_keyword("true") || is_keyword("false"))
            return Expr::boolean(next().text == "true");
        if (is_keyword("exp")) {
            next();
            expect(Tok::lparen, "'(' after exp");
            Expr e = predicate();
            expect(Tok::rparen, "')'");
            return Expr::unary(ExprKind::exp, e);
        }
        VarRef ref;
        ref.name = identifier("expression");
        if (is(Tok::quote)) {
            next();
            ref.dotted = true;
        }
        if (is(Tok::stepped_plus)) {
            next();
            ref.stepped = true;
        }
        return Expr::variable(std::move(ref));
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Printing

class Printer {
public:
    std::string str() const { return out_.str(); }

    void composition(const Composition& p, int indent)
    {
        if (const auto* at = p.as_atomic()) {
            automaton(at->automaton, indent);
            return;
        }
        if (p.as_postfix() != nullptr)
            throw Error("postfix terms have no surface syntax");
        const auto* par = p.as_parallel();
        composition(*par->left, indent);
        out_ << " || {";
        bool first = true;
        for (const auto& a : par->sync) {
            out_ << (first ? "" : ", ") << a;
            first = false;
        }
        out_ << "} ";
        if (par->right->as_parallel() != nullptr) {
            out_ << "(";
            composition(*par->right, indent);
            out_ << ")";
        } else {
            composition(*par->right, indent);
        }
    }

private:
    void pad(int indent) { out_ << std::string(static_cast<std::size_t>(indent) * 2, ' '); }

    void automaton(const AtomicAutomaton& a, int indent)
    {
        out_ << "automaton " << a.name() << " {\n";
        for (const auto& loc : a.locations()) {
            pad(indent + 1);
            out_ << "location " << loc.name << " {\n";
            const Expr init = a.effective_init(loc);
            if (!init.is_false())
                clause("init", init, indent + 2);
            if (!loc.tcp.is_true())
                clause("tcp", loc.tcp, indent + 2);
            if (!loc.term.is_false())
                clause("term", loc.term, indent + 2);
            if (loc.sub) {
                pad(indent + 2);
                out_ << "sub ";
                composition(*loc.sub, indent + 2);
                out_ << "\n";
            }
            for (const Edge* e : a.outgoing(loc.name)) {
                pad(indent + 2);
                out_ << "edge " << to_string(e->guard) << " : " << e->action << " : " << to_string(e->reset)
                     << " -> " << e->target << "\n";
            }
            pad(indent + 1);
            out_ << "}\n";
        }
        pad(indent);
        out_ << "}";
    }

    void clause(const char* name, const Expr& e, int indent)
    {
        pad(indent);
        out_ << name << " " << to_string(e) << "\n";
    }

    std::ostringstream out_;
};

void collect_automata(const Composition& p, std::map<std::string, AtomicAutomaton>& out)
{
    if (const auto* at = p.as_atomic()) {
        out.emplace(at->automaton.name(), at->automaton);
        for (const auto& loc : at->automaton.locations())
            if (loc.sub)
                collect_automata(*loc.sub, out);
    } else if (const auto* post = p.as_postfix()) {
        collect_automata(*post->child, out);
        out.emplace(post->parent.name(), post->parent);
    } else {
        const auto* par = p.as_parallel();
        collect_automata(*par->left, out);
        collect_automata(*par->right, out);
    }
}

void top_level(const Composition& p, std::vector<const AtomicAutomaton*>& out)
{
    if (const auto* at = p.as_atomic())
        out.push_back(&at->automaton);
    else if (const auto* post = p.as_postfix())
        out.push_back(&post->parent);
    else {
        top_level(*p.as_parallel()->left, out);
        top_level(*p.as_parallel()->right, out);
    }
}

} // namespace

ModelFile parse_model(std::string_view text)
{
    return Parser(text).model();
}

Expr parse_predicate(std::string_view text)
{
    return Parser(text).standalone_predicate();
}

ModelFile load_model(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    ModelFile model;
    try {
        model = parse_model(buffer.str());
    } catch (const SyntaxError& e) {
        throw Error(path.string() + ":" + e.what());
    }
    const auto diagnostics = validate(*model.root, model.declarations);
    if (!diagnostics.empty()) {
        std::string message = path.string() + ": invalid model";
        for (const auto& d : diagnostics)
            message += "\n  " + to_string(d);
        throw Error(message);
    }
    return model;
}

std::string print_composition(const Composition& p)
{
    Printer printer;
    printer.composition(p, 0);
    return printer.str();
}

std::string print_model(const ModelFile& model)
{
    std::string out;
    for (const auto& d : model.declarations.all())
        out += std::string(d.kind == VarKind::discrete ? "disc " : "cont ") + d.name + "\n";
    if (!out.empty())
        out += "\n";
    out += print_composition(*model.root);
    out += "\n";
    return out;
}

bool structurally_equal(const AtomicAutomaton& a, const AtomicAutomaton& b)
{
    if (a.name() != b.name() || a.pinned() != b.pinned())
        return false;
    if (a.locations().size() != b.locations().size() || a.edges().size() != b.edges().size())
        return false;
    for (std::size_t i = 0; i < a.locations().size(); ++i) {
        const Location& x = a.locations()[i];
        const Location& y = b.locations()[i];
        if (x.name != y.name || !(x.init == y.init) || !(x.tcp == y.tcp) || !(x.term == y.term))
            return false;
        if (static_cast<bool>(x.sub) != static_cast<bool>(y.sub))
            return false;
        if (x.sub && !structurally_equal(*x.sub, *y.sub))
            return false;
    }
    // Edge order only matters per source location.
    for (const auto& loc : a.locations()) {
        const auto xs = a.outgoing(loc.name);
        const auto ys = b.outgoing(loc.name);
        if (xs.size() != ys.size())
            return false;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const Edge& x = *xs[i];
            const Edge& y = *ys[i];
            if (x.action != y.action || x.target != y.target || !(x.guard == y.guard) || !(x.reset == y.reset))
                return false;
        }
    }
    return true;
}

bool structurally_equal(const Composition& a, const Composition& b)
{
    if (a.node().index() != b.node().index())
        return false;
    if (const auto* x = a.as_atomic())
        return structurally_equal(x->automaton, b.as_atomic()->automaton);
    if (const auto* x = a.as_postfix()) {
        const auto* y = b.as_postfix();
        return structurally_equal(x->parent, y->parent) && structurally_equal(*x->child, *y->child);
    }
    const auto* x = a.as_parallel();
    const auto* y = b.as_parallel();
    return x->sync == y->sync && structurally_equal(*x->left, *y->left) && structurally_equal(*x->right, *y->right);
}

bool structurally_equal(const ModelFile& a, const ModelFile& b)
{
    return a.declarations == b.declarations && structurally_equal(*a.root, *b.root);
}

std::map<std::string, AtomicAutomaton> named_automata(const Composition& p)
{
    std::map<std::string, AtomicAutomaton> out;
    collect_automata(p, out);
    return out;
}

Valuation default_initial_valuation(const ModelFile& model)
{
    Valuation sigma = model.declarations.zero_valuation();
    std::vector<const AtomicAutomaton*> tops;
    top_level(*model.root, tops);
    for (const AtomicAutomaton* a : tops) {
        for (const auto& loc : a->locations()) {
            const Expr init = a->effective_init(loc);
            if (init.is_false())
                continue;
            for (const auto& c : conjuncts(init))
                if (auto binding = constant_binding(c, model.declarations))
                    sigma.set(binding->first, binding->second);
            break;
        }
    }
    return sigma;
}

std::vector<Valuation> parse_sigma_file(std::string_view text, const Declarations& decls, const Valuation& base)
{
    std::vector<Valuation> out;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t stop = text.find('\n', start);
        if (stop == std::string_view::npos)
            stop = text.size();
        std::string line(text.substr(start, stop - start));
        start = stop + 1;
        ++line_no;
        for (const char* marker : {"#", "//"})
            if (auto cut = line.find(marker); cut != std::string::npos)
                line.erase(cut);
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;

        Valuation sigma = base;
        std::stringstream items(line);
        std::string item;
        while (std::getline(items, item, ',')) {
            Expr e;
            try {
                e = parse_predicate(item);
            } catch (const SyntaxError& err) {
                throw SyntaxError(line_no, err.column(), std::string("in valuation: ") + err.what());
            }
            auto binding = constant_binding(e, decls);
            if (!binding || decls.find(binding->first.name) == nullptr)
                throw SyntaxError(line_no, 1, "expected 'variable = constant' for a declared variable, got '" +
                                                  to_string(e) + "'");
            sigma.set(binding->first, binding->second);
        }
        out.push_back(std::move(sigma));
        if (stop == text.size())
            break;
    }
    return out;
}

} // namespace hcif
