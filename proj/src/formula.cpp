#include "conoscope/formula.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <sstream>

namespace cono {

RelOp negate_op(RelOp op) {
    switch (op) {
        case RelOp::Lt: return RelOp::Ge;
        case RelOp::Le: return RelOp::Gt;
        case RelOp::Eq: return RelOp::Ne;
        case RelOp::Ne: return RelOp::Eq;
        case RelOp::Ge: return RelOp::Lt;
        case RelOp::Gt: return RelOp::Le;
    }
    return RelOp::Eq;
}

bool eval_op(int s, RelOp op) {
    switch (op) {
        case RelOp::Lt: return s < 0;
        case RelOp::Le: return s <= 0;
        case RelOp::Eq: return s == 0;
        case RelOp::Ne: return s != 0;
        case RelOp::Ge: return s >= 0;
        case RelOp::Gt: return s > 0;
    }
    return false;
}

std::string op_text(RelOp op) {
    switch (op) {
        case RelOp::Lt: return "<";
        case RelOp::Le: return "<=";
        case RelOp::Eq: return "=";
        case RelOp::Ne: return "!=";
        case RelOp::Ge: return ">=";
        case RelOp::Gt: return ">";
    }
    return "=";
}

NodePtr mk_true() {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::True;
    return n;
}

NodePtr mk_false() {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::False;
    return n;
}

NodePtr mk_atom(Polynomial p, RelOp op) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Atom;
    n->poly = std::move(p);
    n->op = op;
    return n;
}

NodePtr mk_rel(std::string name, std::vector<int> args) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::RelAtom;
    n->rel = std::move(name);
    n->args = std::move(args);
    return n;
}

NodePtr mk_not(NodePtr a) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Not;
    n->kids = {std::move(a)};
    return n;
}

static NodePtr mk_nary(NodeKind kind, std::vector<NodePtr> kids) {
    // flatten nested nodes of the same kind
    std::vector<NodePtr> flat;
    for (auto& k : kids) {
        if (k->kind == kind)
            flat.insert(flat.end(), k->kids.begin(), k->kids.end());
        else
            flat.push_back(k);
    }
    if (flat.size() == 1) return flat[0];
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->kids = std::move(flat);
    return n;
}

NodePtr mk_and(std::vector<NodePtr> kids) {
    if (kids.empty()) return mk_true();
    return mk_nary(NodeKind::And, std::move(kids));
}

NodePtr mk_or(std::vector<NodePtr> kids) {
    if (kids.empty()) return mk_false();
    return mk_nary(NodeKind::Or, std::move(kids));
}

NodePtr mk_implies(NodePtr a, NodePtr b) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Implies;
    n->kids = {std::move(a), std::move(b)};
    return n;
}

NodePtr mk_quant(bool forall, int var, NodePtr body) {
    auto n = std::make_shared<Node>();
    n->kind = forall ? NodeKind::Forall : NodeKind::Exists;
    n->var = var;
    n->kids = {std::move(body)};
    return n;
}

namespace {

void collect_free(const NodePtr& n, std::set<int>& bound, std::set<int>& free) {
    switch (n->kind) {
        case NodeKind::Atom:
            for (int v : n->poly.used_vars())
                if (!bound.count(v)) free.insert(v);
            break;
        case NodeKind::RelAtom:
            for (int v : n->args)
                if (!bound.count(v)) free.insert(v);
            break;
        case NodeKind::Exists:
        case NodeKind::Forall: {
            bool added = bound.insert(n->var).second;
            collect_free(n->kids[0], bound, free);
            if (added) bound.erase(n->var);
            break;
        }
        default:
            for (auto& k : n->kids) collect_free(k, bound, free);
    }
}

void collect_rels(const NodePtr& n, std::set<std::string>& out) {
    if (n->kind == NodeKind::RelAtom) out.insert(n->rel);
    for (auto& k : n->kids) collect_rels(k, out);
}

bool is_qf(const NodePtr& n) {
    if (n->kind == NodeKind::Exists || n->kind == NodeKind::Forall) return false;
    for (auto& k : n->kids)
        if (!is_qf(k)) return false;
    return true;
}

} // namespace

std::set<int> Formula::free_vars() const {
    std::set<int> bound, free;
    collect_free(root, bound, free);
    return free;
}

std::set<std::string> Formula::relation_names() const {
    std::set<std::string> out;
    collect_rels(root, out);
    return out;
}

bool Formula::quantifier_free() const { return is_qf(root); }

SetDescription SetDescription::make(int n, Formula f) {
    if (!f.relation_names().empty())
        throw std::invalid_argument("set description must not contain relation symbols");
    // Canonical variable table: slots 0..n-1 are x1..xn, bound variables after.
    std::vector<std::string> tgt;
    for (int i = 0; i < n; i++) tgt.push_back("x" + std::to_string(i + 1));
    std::set<int> frees = f.free_vars();
    std::vector<int> idx(f.vars.size(), -1);
    for (int v = 0; v < (int)f.vars.size(); v++) {
        const std::string& name = f.vars[v];
        if (frees.count(v)) {
            int slot = -1;
            if (name.size() > 1 && name[0] == 'x') {
                try {
                    slot = std::stoi(name.substr(1)) - 1;
                } catch (...) {
                }
            }
            if (slot < 0 || slot >= n)
                throw std::invalid_argument(
                    "set description over " + std::to_string(n) +
                    " variables uses free variable: " + name);
            idx[v] = slot;
        } else {
            idx[v] = (int)tgt.size();
            tgt.push_back(name);
        }
    }
    Formula g;
    g.root = remap_vars(f.root, (int)tgt.size(), idx);
    g.vars = std::move(tgt);
    SetDescription d;
    d.n = n;
    d.formula = std::move(g);
    return d;
}

NodePtr remap_vars(const NodePtr& n, int new_nvars, const std::vector<int>& idx) {
    switch (n->kind) {
    case NodeKind::True:
    case NodeKind::False:
        return n->kind == NodeKind::True ? mk_true() : mk_false();
    case NodeKind::Atom:
        return mk_atom(n->poly.remap(new_nvars, idx), n->op);
    case NodeKind::RelAtom: {
        std::vector<int> args;
        for (int a : n->args) args.push_back(idx[a]);
        return mk_rel(n->rel, std::move(args));
    }
    case NodeKind::Not:
        return mk_not(remap_vars(n->kids[0], new_nvars, idx));
    case NodeKind::And:
    case NodeKind::Or: {
        std::vector<NodePtr> kids;
        for (auto& k : n->kids) kids.push_back(remap_vars(k, new_nvars, idx));
        return n->kind == NodeKind::And ? mk_and(std::move(kids))
                                        : mk_or(std::move(kids));
    }
    case NodeKind::Implies:
        return mk_implies(remap_vars(n->kids[0], new_nvars, idx),
                          remap_vars(n->kids[1], new_nvars, idx));
    case NodeKind::Exists:
    case NodeKind::Forall:
        return mk_quant(n->kind == NodeKind::Forall, idx[n->var],
                        remap_vars(n->kids[0], new_nvars, idx));
    }
    throw std::logic_error("remap_vars: bad node");
}

// ---------------------------------------------------------------- printing

namespace {

// precedence: implies 1, or 2, and 3, not 4, atoms 5; quantifier body binds
// to the end so a quantifier is precedence 1
int node_prec(const NodePtr& n) {
    switch (n->kind) {
        case NodeKind::Implies:
        case NodeKind::Exists:
        case NodeKind::Forall: return 1;
        case NodeKind::Or: return 2;
        case NodeKind::And: return 3;
        case NodeKind::Not: return 4;
        default: return 5;
    }
}

void print_node(std::ostream& os, const NodePtr& n, const std::vector<std::string>& vars,
                int min_prec) {
    bool paren = node_prec(n) < min_prec;
    if (paren) os << "(";
    switch (n->kind) {
        case NodeKind::True: os << "0 = 0"; break;
        case NodeKind::False: os << "0 != 0"; break;
        case NodeKind::Atom:
            os << n->poly.to_string(vars) << " " << op_text(n->op) << " 0";
            break;
        case NodeKind::RelAtom: {
            os << n->rel << "(";
            for (std::size_t i = 0; i < n->args.size(); i++)
                os << (i ? "," : "") << vars[n->args[i]];
            os << ")";
            break;
        }
        case NodeKind::Not:
            os << "not ";
            print_node(os, n->kids[0], vars, 5);
            break;
        case NodeKind::And:
        case NodeKind::Or: {
            const char* word = n->kind == NodeKind::And ? " and " : " or ";
            int prec = node_prec(n);
            for (std::size_t i = 0; i < n->kids.size(); i++) {
                if (i) os << word;
                print_node(os, n->kids[i], vars, prec + 1);
            }
            break;
        }
        case NodeKind::Implies:
            print_node(os, n->kids[0], vars, 2);
            os << " -> ";
            print_node(os, n->kids[1], vars, 1);
            break;
        case NodeKind::Exists:
        case NodeKind::Forall:
            os << (n->kind == NodeKind::Exists ? "exists " : "forall ")
               << vars[n->var] << ". ";
            print_node(os, n->kids[0], vars, 1);
            break;
    }
    if (paren) os << ")";
}

} // namespace

std::string Formula::to_string() const {
    std::ostringstream os;
    print_node(os, root, vars, 1);
    return os.str();
}

// ---------------------------------------------------------------- parser

ParseError::ParseError(const std::string& msg, int line, int column)
    : std::runtime_error("parse error at " + std::to_string(line) + ":" +
                         std::to_string(column) + ": " + msg),
      line(line), column(column) {}

namespace {

struct Token {
    enum Kind { Ident, Int, Sym, End } kind;
    std::string text;
    int line, col;
};

struct Lexer {
    std::vector<Token> toks;
    std::size_t pos = 0;

    explicit Lexer(const std::string& s) {
        int line = 1, col = 1;
        std::size_t i = 0;
        auto push = [&](Token::Kind k, std::string t, int l, int c) {
            toks.push_back({k, std::move(t), l, c});
        };
        while (i < s.size()) {
            char c = s[i];
            if (c == '\n') { line++; col = 1; i++; continue; }
            if (std::isspace((unsigned char)c)) { i++; col++; continue; }
            if (c == '#') {
                while (i < s.size() && s[i] != '\n') i++;
                continue;
            }
            int l = line, co = col;
            if (std::isalpha((unsigned char)c) || c == '_') {
                std::size_t j = i;
                while (j < s.size() && (std::isalnum((unsigned char)s[j]) || s[j] == '_')) j++;
                push(Token::Ident, s.substr(i, j - i), l, co);
                col += (int)(j - i);
                i = j;
                continue;
            }
            if (std::isdigit((unsigned char)c)) {
                std::size_t j = i;
                while (j < s.size() && std::isdigit((unsigned char)s[j])) j++;
                push(Token::Int, s.substr(i, j - i), l, co);
                col += (int)(j - i);
                i = j;
                continue;
            }
            // multi-char symbols
            static const char* two[] = {"<=", ">=", "!=", "->"};
            bool matched = false;
            for (auto* t : two) {
                if (s.compare(i, 2, t) == 0) {
                    push(Token::Sym, t, l, co);
                    i += 2; col += 2; matched = true;
                    break;
                }
            }
            if (matched) continue;
            if (std::string("()+-*^<>=,./").find(c) != std::string::npos) {
                push(Token::Sym, std::string(1, c), l, co);
                i++; col++;
                continue;
            }
            throw ParseError(std::string("unexpected character '") + c + "'", l, co);
        }
        toks.push_back({Token::End, "", line, col});
    }

    const Token& peek(int ahead = 0) const {
        std::size_t p = std::min(pos + ahead, toks.size() - 1);
        return toks[p];
    }
    Token next() { return toks[std::min(pos++, toks.size() - 1)]; }
    bool accept_sym(const std::string& s) {
        if (peek().kind == Token::Sym && peek().text == s) { pos++; return true; }
        return false;
    }
    bool accept_kw(const std::string& s) {
        if (peek().kind == Token::Ident && peek().text == s) { pos++; return true; }
        return false;
    }
    void expect_sym(const std::string& s) {
        if (!accept_sym(s))
            throw ParseError("expected '" + s + "', got '" + peek().text + "'",
                             peek().line, peek().col);
    }
};

struct Parser {
    Lexer lex;
    const Schema* schema;
    std::vector<std::string> vars;
    std::vector<std::pair<std::string, int>> bindings;  // active binders
    std::map<std::string, int> free_by_name;

    Parser(const std::string& text, const Schema* schema)
        : lex(text), schema(schema) {}

    int fresh_var(const std::string& name) {
        vars.push_back(name);
        return (int)vars.size() - 1;
    }

    int resolve(const std::string& name) {
        for (auto it = bindings.rbegin(); it != bindings.rend(); ++it)
            if (it->first == name) return it->second;
        auto f = free_by_name.find(name);
        if (f != free_by_name.end()) return f->second;
        int v = fresh_var(name);
        free_by_name.emplace(name, v);
        return v;
    }

    bool is_keyword(const std::string& s) const {
        return s == "and" || s == "or" || s == "not" || s == "exists" || s == "forall";
    }

    Formula run() {
        NodePtr root = parse_formula();
        if (lex.peek().kind != Token::End)
            throw ParseError("trailing input '" + lex.peek().text + "'",
                             lex.peek().line, lex.peek().col);
        Formula f;
        f.vars = vars;
        f.root = extend_tree(root, (int)vars.size());
        return f;
    }

    // Polynomials are built while the variable table grows; re-extend all of
    // them to the final size at the end.
    NodePtr extend_tree(const NodePtr& n, int nv) {
        auto m = std::make_shared<Node>(*n);
        if (n->kind == NodeKind::Atom) m->poly = n->poly.extended(nv);
        m->kids.clear();
        for (auto& k : n->kids) m->kids.push_back(extend_tree(k, nv));
        return m;
    }

    NodePtr parse_formula() {
        if (lex.accept_kw("exists")) return parse_quant(false);
        if (lex.accept_kw("forall")) return parse_quant(true);
        NodePtr a = parse_or();
        if (lex.accept_sym("->")) {
            NodePtr b = parse_formula();
            return mk_implies(a, b);
        }
        return a;
    }

    NodePtr parse_quant(bool forall) {
        const Token& t = lex.peek();
        if (t.kind != Token::Ident || is_keyword(t.text))
            throw ParseError("expected variable after quantifier", t.line, t.col);
        std::string name = lex.next().text;
        lex.expect_sym(".");
        int v = fresh_var(name);
        bindings.emplace_back(name, v);
        NodePtr body = parse_formula();
        bindings.pop_back();
        return mk_quant(forall, v, body);
    }

    NodePtr parse_or() {
        std::vector<NodePtr> kids{parse_and()};
        while (lex.accept_kw("or")) kids.push_back(parse_and());
        return kids.size() == 1 ? kids[0] : mk_or(std::move(kids));
    }

    NodePtr parse_and() {
        std::vector<NodePtr> kids{parse_not()};
        while (lex.accept_kw("and")) kids.push_back(parse_not());
        return kids.size() == 1 ? kids[0] : mk_and(std::move(kids));
    }

    NodePtr parse_not() {
        if (lex.accept_kw("not")) return mk_not(parse_not());
        return parse_primary();
    }

    NodePtr parse_primary() {
        const Token& t = lex.peek();
        // relation atom: Name(v1,...,vk) where the idents are variables
        if (t.kind == Token::Ident && !is_keyword(t.text) &&
            lex.peek(1).kind == Token::Sym && lex.peek(1).text == "(" &&
            looks_like_relation()) {
            return parse_rel_atom();
        }
        if (t.kind == Token::Sym && t.text == "(") {
            // could be a parenthesized formula or a parenthesized polynomial
            std::size_t save = lex.pos;
            auto saved_vars = vars;
            auto saved_free = free_by_name;
            try {
                NodePtr atom = parse_atom();
                return atom;
            } catch (const ParseError&) {
                lex.pos = save;
                vars = saved_vars;
                free_by_name = saved_free;
            }
            lex.expect_sym("(");
            NodePtr inner = parse_formula();
            lex.expect_sym(")");
            return inner;
        }
        return parse_atom();
    }

    // lookahead: Name(ident,ident,...) followed by something that is not an
    // arithmetic continuation — treat as a relation atom
    bool looks_like_relation() {
        int i = 2;  // at first token after '('
        while (true) {
            if (lex.peek(i).kind != Token::Ident || is_keyword(lex.peek(i).text)) return false;
            i++;
            if (lex.peek(i).kind != Token::Sym) return false;
            if (lex.peek(i).text == ",") { i++; continue; }
            if (lex.peek(i).text == ")") break;
            return false;
        }
        i++;
        // reject S(x)^2-style arithmetic continuations
        if (lex.peek(i).kind == Token::Sym) {
            const std::string& s = lex.peek(i).text;
            if (s == "+" || s == "-" || s == "*" || s == "^" || s == "<" || s == ">" ||
                s == "=" || s == "<=" || s == ">=" || s == "!=" || s == "/")
                return false;
        }
        return true;
    }

    NodePtr parse_rel_atom() {
        Token name = lex.next();
        lex.expect_sym("(");
        std::vector<int> args;
        while (true) {
            const Token& t = lex.peek();
            if (t.kind != Token::Ident)
                throw ParseError("expected variable in relation atom", t.line, t.col);
            args.push_back(resolve(lex.next().text));
            if (lex.accept_sym(",")) continue;
            lex.expect_sym(")");
            break;
        }
        if (schema) {
            auto it = schema->find(name.text);
            if (it == schema->end())
                throw ParseError("unknown relation '" + name.text + "'", name.line, name.col);
            if (it->second != (int)args.size())
                throw ParseError("arity mismatch for '" + name.text + "': declared " +
                                     std::to_string(it->second) + ", got " +
                                     std::to_string(args.size()),
                                 name.line, name.col);
        }
        return mk_rel(name.text, std::move(args));
    }

    NodePtr parse_atom() {
        Polynomial lhs = parse_poly();
        const Token& t = lex.peek();
        RelOp op;
        if (lex.accept_sym("<")) op = RelOp::Lt;
        else if (lex.accept_sym("<=")) op = RelOp::Le;
        else if (lex.accept_sym("=")) op = RelOp::Eq;
        else if (lex.accept_sym("!=")) op = RelOp::Ne;
        else if (lex.accept_sym(">=")) op = RelOp::Ge;
        else if (lex.accept_sym(">")) op = RelOp::Gt;
        else throw ParseError("expected relational operator, got '" + t.text + "'",
                              t.line, t.col);
        Polynomial rhs = parse_poly();
        int nv = (int)vars.size();
        return mk_atom(lhs.extended(nv) - rhs.extended(nv), op);
    }

    Polynomial parse_poly() {
        Polynomial r = parse_term();
        while (true) {
            if (lex.accept_sym("+")) {
                Polynomial t = parse_term();
                int nv = (int)vars.size();
                r = r.extended(nv) + t.extended(nv);
            } else if (lex.accept_sym("-")) {
                Polynomial t = parse_term();
                int nv = (int)vars.size();
                r = r.extended(nv) - t.extended(nv);
            } else break;
        }
        return r;
    }

    Polynomial parse_term() {
        Polynomial r = parse_factor();
        while (lex.accept_sym("*")) {
            Polynomial t = parse_factor();
            int nv = (int)vars.size();
            r = r.extended(nv) * t.extended(nv);
        }
        return r;
    }

    Polynomial parse_factor() {
        Polynomial b = parse_base();
        if (lex.accept_sym("^")) {
            const Token& t = lex.peek();
            if (t.kind != Token::Int)
                throw ParseError("expected integer exponent", t.line, t.col);
            unsigned e = (unsigned)std::stoul(lex.next().text);
            b = b.pow(e);
        }
        return b;
    }

    Polynomial parse_base() {
        const Token& t = lex.peek();
        if (lex.accept_sym("(")) {
            Polynomial p = parse_poly();
            lex.expect_sym(")");
            return p;
        }
        if (lex.accept_sym("-")) return -parse_factor();
        if (t.kind == Token::Int) {
            std::string num = lex.next().text;
            if (lex.peek().kind == Token::Sym && lex.peek().text == "/" &&
                lex.peek(1).kind == Token::Int) {
                lex.next();
                std::string den = lex.next().text;
                Rational q{Integer(num), Integer(den)};
                q.canonicalize();
                return Polynomial::constant((int)vars.size(), q);
            }
            return Polynomial::constant((int)vars.size(), Rational(Integer(num)));
        }
        if (t.kind == Token::Ident && !is_keyword(t.text)) {
            int v = resolve(lex.next().text);
            return Polynomial::variable((int)vars.size(), v);
        }
        throw ParseError("expected polynomial, got '" + t.text + "'", t.line, t.col);
    }
};

} // namespace

Formula parse_formula(const std::string& text, const Schema* schema) {
    Parser p(text, schema);
    return p.run();
}

// ------------------------------------------------------ bound-variable work

namespace {

struct Renamer {
    std::vector<std::string> vars;           // output table
    std::map<std::string, int> name_count;

    std::string unique_name(const std::string& base) {
        int& c = name_count[base];
        c++;
        if (c == 1) return base;
        return base + "_" + std::to_string(c);
    }

    int add(const std::string& base) {
        vars.push_back(unique_name(base));
        return (int)vars.size() - 1;
    }
};

NodePtr rename_rec(const NodePtr& n, const std::vector<std::string>& old_vars,
                   std::vector<int>& env, Renamer& rn) {
    switch (n->kind) {
        case NodeKind::Exists:
        case NodeKind::Forall: {
            int nv = rn.add(old_vars[n->var]);
            int saved = env[n->var];
            env[n->var] = nv;
            NodePtr body = rename_rec(n->kids[0], old_vars, env, rn);
            env[n->var] = saved;
            return mk_quant(n->kind == NodeKind::Forall, nv, body);
        }
        case NodeKind::Atom: {
            auto m = std::make_shared<Node>(*n);
            // target size is not final yet; remap later
            m->args = env;  // stash environment snapshot (abuse; fixed below)
            return m;
        }
        case NodeKind::RelAtom: {
            std::vector<int> args;
            for (int a : n->args) args.push_back(env[a]);
            return mk_rel(n->rel, std::move(args));
        }
        default: {
            auto m = std::make_shared<Node>();
            m->kind = n->kind;
            m->var = -1;
            for (auto& k : n->kids) m->kids.push_back(rename_rec(k, old_vars, env, rn));
            if (m->kids.size() == 1 && n->kind == NodeKind::Not) return mk_not(m->kids[0]);
            if (n->kind == NodeKind::True || n->kind == NodeKind::False) return n;
            return m;
        }
    }
}

NodePtr fix_atoms(const NodePtr& n, int nvars) {
    if (n->kind == NodeKind::Atom) {
        // args holds the env snapshot: old var -> new var
        std::vector<int> map = n->args;
        Polynomial p = n->poly;
        std::vector<int> idx(p.nvars(), 0);
        for (int i = 0; i < p.nvars(); i++)
            idx[i] = i < (int)map.size() && map[i] >= 0 ? map[i] : 0;
        return mk_atom(p.remap(nvars, idx), n->op);
    }
    if (n->kids.empty()) return n;
    auto m = std::make_shared<Node>(*n);
    m->kids.clear();
    for (auto& k : n->kids) m->kids.push_back(fix_atoms(k, nvars));
    return m;
}

} // namespace

Formula normalize_bound(const Formula& phi) {
    Renamer rn;
    // free variables keep their identity and come first, in index order
    std::vector<int> env(phi.nvars(), -1);
    auto free = phi.free_vars();
    for (int v : free) env[v] = rn.add(phi.vars[v]);
    std::vector<int> env2 = env;
    NodePtr mid = rename_rec(phi.root, phi.vars, env2, rn);
    Formula out;
    out.vars = rn.vars;
    out.root = fix_atoms(mid, (int)rn.vars.size());
    return out;
}

bool Formula::structurally_equal(const Formula& o) const {
    return normalize_bound(*this).to_string() == normalize_bound(o).to_string();
}

// ------------------------------------------------------------------ prenex

namespace {

struct QuantEntry { bool forall; int var; };

void prenex_rec(const NodePtr& n, bool negated, std::vector<QuantEntry>& prefix,
                NodePtr& matrix);

NodePtr prenex_matrix(const NodePtr& n, bool negated, std::vector<QuantEntry>& prefix) {
    NodePtr m;
    prenex_rec(n, negated, prefix, m);
    return m;
}

void prenex_rec(const NodePtr& n, bool negated, std::vector<QuantEntry>& prefix,
                NodePtr& matrix) {
    switch (n->kind) {
        case NodeKind::Exists:
        case NodeKind::Forall: {
            bool forall = (n->kind == NodeKind::Forall) != negated;
            prefix.push_back({forall, n->var});
            matrix = prenex_matrix(n->kids[0], negated, prefix);
            if (negated) {
                // negation is being pushed inward
            }
            break;
        }
        case NodeKind::Not:
            matrix = prenex_matrix(n->kids[0], !negated, prefix);
            matrix = mk_not(matrix);
            // un-negate: we flipped quantifiers for the subtree, so wrap the
            // matrix in Not exactly once; outer callers treat matrix as the
            // non-negated body of the subtree
            break;
        case NodeKind::Implies: {
            NodePtr a = prenex_matrix(n->kids[0], !negated, prefix);
            NodePtr b = prenex_matrix(n->kids[1], negated, prefix);
            matrix = mk_implies(a, b);
            break;
        }
        case NodeKind::And:
        case NodeKind::Or: {
            std::vector<NodePtr> kids;
            for (auto& k : n->kids) kids.push_back(prenex_matrix(k, negated, prefix));
            auto m = std::make_shared<Node>();
            m->kind = n->kind;
            m->kids = std::move(kids);
            matrix = m;
            break;
        }
        default:
            matrix = n;
    }
}

void vars_in(const NodePtr& n, std::set<int>& out) {
    if (n->kind == NodeKind::Atom)
        for (int v : n->poly.used_vars()) out.insert(v);
    if (n->kind == NodeKind::RelAtom)
        for (int v : n->args) out.insert(v);
    if (n->kind == NodeKind::Exists || n->kind == NodeKind::Forall) out.insert(n->var);
    for (auto& k : n->kids) vars_in(k, out);
}

} // namespace

Formula to_prenex(const Formula& phi) {
    if (!phi.relation_names().empty())
        throw std::invalid_argument("uninstantiated relation");
    Formula f = normalize_bound(phi);
    std::vector<QuantEntry> prefix;
    NodePtr matrix = prenex_matrix(f.root, false, prefix);
    std::set<int> used;
    vars_in(matrix, used);
    NodePtr root = matrix;
    for (auto it = prefix.rbegin(); it != prefix.rend(); ++it) {
        if (!used.count(it->var)) continue;  // vacuous quantifier dropped
        root = mk_quant(it->forall, it->var, root);
    }
    Formula out;
    out.vars = f.vars;
    out.root = root;
    return out;
}

// ----------------------------------------------------- relation substitution

namespace {

struct Substituter {
    const Formula& psi;
    std::vector<int> psi_free;  // psi's free vars in index order
    std::string name;
    std::vector<std::string>* vars;

    NodePtr walk(const NodePtr& n) {
        if (n->kind == NodeKind::RelAtom && n->rel == name) {
            if (n->args.size() != psi_free.size())
                throw std::invalid_argument("arity mismatch in relation substitution");
            // fresh copies of psi's bound variables
            std::vector<int> map(psi.nvars(), -1);
            for (std::size_t i = 0; i < psi_free.size(); i++)
                map[psi_free[i]] = n->args[i];
            return instantiate(psi.root, map);
        }
        if (n->kids.empty()) return n;
        auto m = std::make_shared<Node>(*n);
        m->kids.clear();
        for (auto& k : n->kids) m->kids.push_back(walk(k));
        return m;
    }

    NodePtr instantiate(const NodePtr& n, std::vector<int>& map) {
        switch (n->kind) {
            case NodeKind::Exists:
            case NodeKind::Forall: {
                vars->push_back(psi.vars[n->var]);
                int fresh = (int)vars->size() - 1;
                int saved = map[n->var];
                map[n->var] = fresh;
                NodePtr body = instantiate(n->kids[0], map);
                map[n->var] = saved;
                return mk_quant(n->kind == NodeKind::Forall, fresh, body);
            }
            case NodeKind::Atom: {
                auto m = std::make_shared<Node>(*n);
                m->args = map;  // stash; sizes fixed by caller via fix_atoms
                return m;
            }
            case NodeKind::RelAtom: {
                std::vector<int> args;
                for (int a : n->args) {
                    if (map[a] < 0) throw std::logic_error("unbound variable in substitution");
                    args.push_back(map[a]);
                }
                return mk_rel(n->rel, std::move(args));
            }
            default: {
                if (n->kind == NodeKind::True || n->kind == NodeKind::False) return n;
                auto m = std::make_shared<Node>(*n);
                m->kids.clear();
                for (auto& k : n->kids) m->kids.push_back(instantiate(k, map));
                return m;
            }
        }
    }
};

// Extend every atom polynomial in-place to the final variable count. Atoms
// coming from psi carry a stashed remap in args.
NodePtr finalize_atoms(const NodePtr& n, int nvars) {
    if (n->kind == NodeKind::Atom) {
        Polynomial p = n->poly;
        if (!n->args.empty()) {
            std::vector<int> idx(p.nvars(), 0);
            auto used = p.used_vars();
            for (int i = 0; i < p.nvars(); i++)
                idx[i] = (i < (int)n->args.size() && n->args[i] >= 0) ? n->args[i] : 0;
            for (int u : used)
                if (idx[u] < 0 || (u < (int)n->args.size() && n->args[u] < 0))
                    throw std::logic_error("unmapped variable in substitution");
            return mk_atom(p.remap(nvars, idx), n->op);
        }
        return mk_atom(p.extended(nvars), n->op);
    }
    if (n->kids.empty()) return n;
    auto m = std::make_shared<Node>(*n);
    m->kids.clear();
    for (auto& k : n->kids) m->kids.push_back(finalize_atoms(k, nvars));
    return m;
}

} // namespace

Formula substitute_relation(const Formula& phi, const std::string& name,
                            const Formula& psi) {
    Substituter sub{psi, {}, name, nullptr};
    for (int v : psi.free_vars()) sub.psi_free.push_back(v);
    Formula out;
    out.vars = phi.vars;
    sub.vars = &out.vars;
    NodePtr mid = sub.walk(phi.root);
    out.root = finalize_atoms(mid, (int)out.vars.size());
    return normalize_bound(out);
}

// ------------------------------------------------------------------ export

namespace {

std::string smt_rational(const Rational& q) {
    std::string num = q.get_num().get_str();
    std::string den = q.get_den().get_str();
    bool neg = num[0] == '-';
    if (neg) num = num.substr(1);
    std::string base = den == "1" ? num : "(/ " + num + " " + den + ")";
    if (den == "1" && num.find('/') == std::string::npos && !neg) return num;
    if (!neg) return base;
    return "(- " + base + ")";
}

std::string smt_poly(const Polynomial& p, const std::vector<std::string>& vars) {
    if (p.is_zero()) return "0";
    std::vector<std::string> terms;
    for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
        const auto& [m, c] = *it;
        std::vector<std::string> factors;
        if (c != 1) factors.push_back(smt_rational(c));
        for (int i = 0; i < p.nvars(); i++)
            for (unsigned e = 0; e < m[i]; e++) factors.push_back(vars[i]);
        if (factors.empty()) factors.push_back("1");
        if (factors.size() == 1) terms.push_back(factors[0]);
        else {
            std::string t = "(*";
            for (auto& f : factors) t += " " + f;
            terms.push_back(t + ")");
        }
    }
    if (terms.size() == 1) return terms[0];
    std::string s = "(+";
    for (auto& t : terms) s += " " + t;
    return s + ")";
}

std::string smt_node(const NodePtr& n, const std::vector<std::string>& vars) {
    switch (n->kind) {
        case NodeKind::True: return "true";
        case NodeKind::False: return "false";
        case NodeKind::Atom: {
            std::string p = smt_poly(n->poly, vars);
            switch (n->op) {
                case RelOp::Lt: return "(< " + p + " 0)";
                case RelOp::Le: return "(<= " + p + " 0)";
                case RelOp::Eq: return "(= " + p + " 0)";
                case RelOp::Ne: return "(not (= " + p + " 0))";
                case RelOp::Ge: return "(>= " + p + " 0)";
                case RelOp::Gt: return "(> " + p + " 0)";
            }
            return "";
        }
        case NodeKind::RelAtom:
            throw std::invalid_argument("relation symbols cannot be exported to smt");
        case NodeKind::Not: return "(not " + smt_node(n->kids[0], vars) + ")";
        case NodeKind::And:
        case NodeKind::Or: {
            std::string s = n->kind == NodeKind::And ? "(and" : "(or";
            for (auto& k : n->kids) s += " " + smt_node(k, vars);
            return s + ")";
        }
        case NodeKind::Implies:
            return "(=> " + smt_node(n->kids[0], vars) + " " +
                   smt_node(n->kids[1], vars) + ")";
        case NodeKind::Exists:
        case NodeKind::Forall: {
            const char* q = n->kind == NodeKind::Exists ? "exists" : "forall";
            return std::string("(") + q + " ((" + vars[n->var] + " Real)) " +
                   smt_node(n->kids[0], vars) + ")";
        }
    }
    return "";
}

} // namespace

std::string export_formula(const Formula& phi, ExportFormat fmt) {
    if (fmt == ExportFormat::Native) return phi.to_string();
    Formula f = normalize_bound(phi);
    if (!f.relation_names().empty())
        throw std::invalid_argument("relation symbols cannot be exported to smt");
    std::ostringstream os;
    os << "(set-logic NRA)\n";
    for (int v : f.free_vars())
        os << "(declare-const " << f.vars[v] << " Real)\n";
    os << "(assert " << smt_node(f.root, f.vars) << ")\n";
    os << "(check-sat)\n";
    return os.str();
}

// ---------------------------------------------------------------- simplify

namespace {

bool node_equal(const NodePtr& a, const NodePtr& b) {
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case NodeKind::Atom: return a->op == b->op && a->poly == b->poly;
        case NodeKind::RelAtom: return a->rel == b->rel && a->args == b->args;
        case NodeKind::Exists:
        case NodeKind::Forall:
            if (a->var != b->var) return false;
            break;
        default: break;
    }
    if (a->kids.size() != b->kids.size()) return false;
    for (std::size_t i = 0; i < a->kids.size(); i++)
        if (!node_equal(a->kids[i], b->kids[i])) return false;
    return true;
}

// scale an atom's polynomial by a positive rational to integer coprime form
Polynomial atom_normal(const Polynomial& p) {
    if (p.is_zero()) return p;
    Integer num_gcd(0), den_lcm(1);
    for (auto& [m, c] : p.terms()) {
        mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), c.get_num().get_mpz_t());
        mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), c.get_den().get_mpz_t());
    }
    Rational scale(den_lcm, num_gcd);
    scale.canonicalize();
    if (sign(scale) < 0) scale = -scale;
    return p * scale;
}

} // namespace

NodePtr simplify_node(const NodePtr& n, int nvars) {
    switch (n->kind) {
        case NodeKind::Atom: {
            if (n->poly.is_constant())
                return eval_op(sign(n->poly.constant_value()), n->op) ? mk_true() : mk_false();
            return mk_atom(atom_normal(n->poly), n->op);
        }
        case NodeKind::Not: {
            NodePtr k = simplify_node(n->kids[0], nvars);
            if (k->kind == NodeKind::True) return mk_false();
            if (k->kind == NodeKind::False) return mk_true();
            if (k->kind == NodeKind::Not) return k->kids[0];
            if (k->kind == NodeKind::Atom) return mk_atom(k->poly, negate_op(k->op));
            return mk_not(k);
        }
        case NodeKind::And:
        case NodeKind::Or: {
            bool is_and = n->kind == NodeKind::And;
            std::vector<NodePtr> kids;
            for (auto& k : n->kids) {
                NodePtr s = simplify_node(k, nvars);
                if (s->kind == (is_and ? NodeKind::True : NodeKind::False)) continue;
                if (s->kind == (is_and ? NodeKind::False : NodeKind::True))
                    return is_and ? mk_false() : mk_true();
                if (s->kind == n->kind)
                    kids.insert(kids.end(), s->kids.begin(), s->kids.end());
                else
                    kids.push_back(s);
            }
            // dedup
            std::vector<NodePtr> uniq;
            for (auto& k : kids) {
                bool seen = false;
                for (auto& u : uniq)
                    if (node_equal(u, k)) { seen = true; break; }
                if (!seen) uniq.push_back(k);
            }
            if (uniq.empty()) return is_and ? mk_true() : mk_false();
            if (uniq.size() == 1) return uniq[0];
            return is_and ? mk_and(std::move(uniq)) : mk_or(std::move(uniq));
        }
        case NodeKind::Implies: {
            NodePtr a = simplify_node(n->kids[0], nvars);
            NodePtr b = simplify_node(n->kids[1], nvars);
            if (a->kind == NodeKind::False) return mk_true();
            if (a->kind == NodeKind::True) return b;
            if (b->kind == NodeKind::True) return mk_true();
            if (b->kind == NodeKind::False) return simplify_node(mk_not(a), nvars);
            return mk_implies(a, b);
        }
        case NodeKind::Exists:
        case NodeKind::Forall: {
            NodePtr k = simplify_node(n->kids[0], nvars);
            if (k->kind == NodeKind::True || k->kind == NodeKind::False) return k;
            std::set<int> used;
            vars_in(k, used);
            if (!used.count(n->var)) return k;
            return mk_quant(n->kind == NodeKind::Forall, n->var, k);
        }
        default:
            return n;
    }
}

Formula simplify(const Formula& phi) {
    Formula out;
    out.vars = phi.vars;
    out.root = simplify_node(phi.root, phi.nvars());
    return out;
}

} // namespace cono
