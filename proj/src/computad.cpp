#include <cctype>

#include "globwb/error.hpp"
#include "globwb/theory.hpp"

namespace globwb {

Computad::Computad(std::shared_ptr<const TheoryPresentation> th) : th_(std::move(th)) {
    if (!th_) throw DomainError("computad needs a theory");
}

const Generator& Computad::generator(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw DomainError("unknown generator '" + name + "'");
    return gens_[it->second];
}

CellExpr Computad::gen(const std::string& name) const {
    const Generator& g = generator(name);
    return CellExpr{g.name, true, g.dim, {}};
}

CellExpr Computad::add(const std::string& name, int dim, std::optional<CellExpr> src, std::optional<CellExpr> tgt,
                       std::string role) {
    if (name.empty() || name == "s" || name == "t") throw DomainError("invalid generator name '" + name + "'");
    for (char c : name)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''))
            throw DomainError("invalid character in generator name '" + name + "'");
    if (has(name) || th_->has(name)) throw DomainError("name '" + name + "' is already in use");
    if (dim < 0) throw DomainError("negative generator dimension");
    if (dim == 0 && (src || tgt)) throw DomainError("0-dimensional generators have no boundary");
    if (dim > 0) {
        if (!src || !tgt) throw DomainError("generator '" + name + "' needs a source and a target");
        if (src->dim != dim - 1 || tgt->dim != dim - 1)
            throw DomainError("boundary of '" + name + "' must have dimension " + std::to_string(dim - 1));
        if (dim >= 2 && (!(this->src(*src) == this->src(*tgt)) || !(this->tgt(*src) == this->tgt(*tgt))))
            throw DomainError("boundary of '" + name + "' is not parallel: " + to_string(*src) + " vs " + to_string(*tgt));
    }
    index_[name] = gens_.size();
    gens_.push_back(Generator{name, dim, std::move(src), std::move(tgt), std::move(role)});
    return gen(name);
}

CellExpr Computad::add(const std::string& name, const std::string& src, const std::string& tgt, std::string role) {
    CellExpr s = parse(src), t = parse(tgt);
    return add(name, s.dim + 1, s, t, std::move(role));
}

void Computad::check_tuple(const Tree& a, const std::vector<CellExpr>& args) const {
    const DimensionTable tbl = tree_to_table(a);
    if (args.size() != tbl.tops.size())
        throw DomainError("expected " + std::to_string(tbl.tops.size()) + " arguments, got " + std::to_string(args.size()));
    for (std::size_t l = 0; l < args.size(); ++l)
        if (args[l].dim != tbl.tops[l])
            throw DomainError("argument " + std::to_string(l + 1) + " (" + to_string(args[l]) + ") has dimension " +
                              std::to_string(args[l].dim) + ", expected " + std::to_string(tbl.tops[l]));
    for (std::size_t l = 0; l < tbl.joins.size(); ++l) {
        const int j = tbl.joins[l];
        if (!(face(args[l], 1, j) == face(args[l + 1], 0, j)))
            throw DomainError("arguments " + std::to_string(l + 1) + " and " + std::to_string(l + 2) +
                              " are not composable along their " + std::to_string(j) + "-boundary: " +
                              to_string(face(args[l], 1, j)) + " vs " + to_string(face(args[l + 1], 0, j)));
    }
}

CellExpr Computad::apply(const std::string& symbol, std::vector<CellExpr> args) const {
    const OperationSymbol& s = th_->symbol(symbol);
    if (s.equation) throw DomainError("equation '" + symbol + "' cannot be applied");
    check_tuple(s.arity, args);
    return CellExpr{symbol, false, s.k, std::move(args)};
}

CellExpr Computad::src(const CellExpr& e) const { return face(e, 0, e.dim - 1); }
CellExpr Computad::tgt(const CellExpr& e) const { return face(e, 1, e.dim - 1); }

CellExpr Computad::face(const CellExpr& e, int eps, int to_dim) const {
    if (to_dim < 0) throw DomainError("0-cells have no boundary");
    CellExpr cur = e;
    while (cur.dim > to_dim) {
        if (cur.generator) {
            const Generator& g = generator(cur.head);
            cur = eps == 0 ? *g.src : *g.tgt;
        } else {
            const OperationSymbol& s = th_->symbol(cur.head);
            cur = interpret(eps == 0 ? *s.src : *s.tgt, cur.args);
        }
    }
    return cur;
}

CellExpr Computad::interpret_entry(const Entry& e, const std::vector<CellExpr>& args) const {
    if (e.symbol.empty()) {
        CellHome h = containing_globe(e.cell->tgt, cell_of(*e.cell));
        const CellExpr& a = args.at(h.leaf);
        return h.eps < 0 ? a : face(a, h.eps, e.dim);
    }
    std::vector<CellExpr> inner;
    for (const auto& x : e.inner[0].entries) inner.push_back(interpret_entry(x, args));
    return apply(e.symbol, std::move(inner));
}

CellExpr Computad::interpret(const Term& t, const std::vector<CellExpr>& args) const {
    if (t.entries.size() != 1) throw DomainError("only terms out of a globe can be interpreted as cells");
    check_tuple(t.tgt, args);
    return interpret_entry(t.entries[0], args);
}

std::vector<int> Computad::counts() const {
    int top = -1;
    for (const auto& g : gens_) top = std::max(top, g.dim);
    std::vector<int> out(static_cast<std::size_t>(top + 1), 0);
    for (const auto& g : gens_) ++out[g.dim];
    return out;
}

void Computad::check() const {
    for (const auto& g : gens_) {
        if (g.dim == 0) continue;
        if (!g.src || !g.tgt || g.src->dim != g.dim - 1 || g.tgt->dim != g.dim - 1)
            throw DomainError("generator '" + g.name + "' has an ill-typed boundary");
        if (g.dim >= 2 && (!(src(*g.src) == src(*g.tgt)) || !(tgt(*g.src) == tgt(*g.tgt))))
            throw DomainError("generator '" + g.name + "' has a non-parallel boundary");
    }
}

namespace {

class ExprParser {
public:
    ExprParser(const Computad& c, std::string_view text) : c_(c), s_(text) {}

    CellExpr parse() {
        CellExpr e = expr();
        ws();
        if (pos_ != s_.size()) fail("unexpected trailing input");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }
    void ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    char peek() {
        ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }
    void expect(char c) {
        if (peek() != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    std::vector<CellExpr> list(char close) {
        std::vector<CellExpr> out{expr()};
        while (peek() == ',') {
            ++pos_;
            out.push_back(expr());
        }
        expect(close);
        return out;
    }

    CellExpr expr() {
        ws();
        const std::size_t start = pos_;
        while (pos_ < s_.size() &&
               (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_' || s_[pos_] == '^' || s_[pos_] == '\''))
            ++pos_;
        std::string tok(s_.substr(start, pos_ - start));
        if (tok.empty()) fail("expected a generator or an operation");
        try {
            if (tok == "s" || tok == "t") {
                expect('(');
                CellExpr e = expr();
                expect(')');
                return tok == "s" ? c_.src(e) : c_.tgt(e);
            }
            if (c_.has(tok)) return c_.gen(tok);
            if (!c_.theory().has(tok)) throw ParseError("unknown name '" + tok + "'", start);
            std::vector<CellExpr> args;
            if (peek() == '(') {
                ++pos_;
                args = list(')');
            } else if (peek() == '<') {
                ++pos_;
                args = list('>');
            } else {
                fail("operation '" + tok + "' needs arguments");
            }
            return c_.apply(tok, std::move(args));
        } catch (const ParseError&) {
            throw;
        } catch (const DomainError& e) {
            throw ParseError(e.what(), start);
        }
    }

    const Computad& c_;
    std::string_view s_;
    std::size_t pos_ = 0;
};

} // namespace

CellExpr Computad::parse(std::string_view text) const { return ExprParser(*this, text).parse(); }

std::string to_string(const CellExpr& e) {
    if (e.generator) return e.head;
    std::string s = e.head + (e.args.size() == 1 ? "(" : "<");
    for (std::size_t i = 0; i < e.args.size(); ++i) s += (i ? "," : "") + to_string(e.args[i]);
    return s + (e.args.size() == 1 ? ")" : ">");
}

nlohmann::json computad_to_json(const Computad& c) {
    nlohmann::json gens = nlohmann::json::array();
    for (const auto& g : c.generators()) {
        nlohmann::json j{{"name", g.name}, {"dim", g.dim}};
        j["src"] = g.src ? nlohmann::json(to_string(*g.src)) : nlohmann::json();
        j["tgt"] = g.tgt ? nlohmann::json(to_string(*g.tgt)) : nlohmann::json();
        if (!g.role.empty()) j["role"] = g.role;
        gens.push_back(std::move(j));
    }
    return {{"generators", gens}, {"counts", c.counts()}};
}

CellExpr vertical_composite(const Computad& c, const std::vector<CellExpr>& chain) {
    if (chain.empty()) throw DomainError("empty composite");
    const int k = chain[0].dim;
    if (k < 1) throw DomainError("0-cells cannot be composed");
    CellExpr acc = chain[0];
    for (std::size_t i = 1; i < chain.size(); ++i) {
        if (chain[i].dim != k) throw DomainError("composite mixes dimensions");
        if (!(c.tgt(acc) == c.src(chain[i])))
            throw DomainError("factor " + std::to_string(i + 1) + " does not start where the previous one ends: " +
                              to_string(c.tgt(acc)) + " vs " + to_string(c.src(chain[i])));
        acc = c.apply("c" + std::to_string(k), {acc, chain[i]});
    }
    return acc;
}

namespace {

void require(const TheoryPresentation& th, std::initializer_list<const char*> names) {
    for (const char* n : names)
        if (!th.has(n)) throw DomainError(std::string("missing operation '") + n + "'");
}

} // namespace

IntervalPresentation interval_presentation(std::shared_ptr<const TheoryPresentation> th) {
    require(*th, {"c1", "id0"});
    Computad c(th);
    c.add("0", 0);
    c.add("1", 0);
    c.add("g", "0", "1");
    c.add("f", "1", "0");
    c.add("k", "0", "1");
    c.add("eta", "id0(0)", "c1<g,f>", "left triangle");
    c.add("theta", "id0(1)", "c1<f,k>", "right triangle");
    return {std::move(c), "f"};
}

Schema division_term(std::shared_ptr<const TheoryPresentation> th, int n) {
    if (n != 1 && n != 2) throw DomainError("division schemas exist for n = 1 and n = 2");
    require(*th, {"c1", "c2", "id0", "l2", "il1", "il2", "kl2", "a1", "wr0_2", "wl0_2"});
    if (n == 2) require(*th, {"c3", "wr0_3", "wr1_2", "wl1_2"});
    Computad c(th);
    c.add("a", 0);
    c.add("b", 0);
    c.add("c", 0);
    c.add("f", "b", "c");
    auto kappa = [&](const std::string& x) {
        return vertical_composite(c, {c.parse("l2(" + x + ")"), c.parse("wl0_2<" + x + ",kl2(f)>"),
                                      c.parse("il2(a1<" + x + ",f,il1(f)>)")});
    };
    auto kappa_inv = [&](const std::string& x) {
        return vertical_composite(c, {c.parse("a1<" + x + ",f,il1(f)>"), c.parse("il2(wl0_2<" + x + ",kl2(f)>)"),
                                      c.parse("il2(l2(" + x + "))")});
    };
    Schema s{c, {}, {}, {}};
    if (n == 1) {
        c.add("A", "a", "b");
        c.add("B", "a", "b");
        c.add("H", "c1<A,f>", "c1<B,f>");
        s.factors = {kappa("A"), c.parse("wr0_2<H,il1(f)>"), kappa_inv("B")};
    } else {
        c.add("x", "a", "b");
        c.add("y", "a", "b");
        c.add("A", "x", "y");
        c.add("B", "x", "y");
        c.add("H", "wr0_2<A,f>", "wr0_2<B,f>");
        auto conj = [&](const CellExpr& mid) { return vertical_composite(c, {kappa("x"), mid, kappa_inv("y")}); };
        CellExpr ma = conj(c.parse("wr0_2<wr0_2<A,f>,il1(f)>"));
        CellExpr mb = conj(c.parse("wr0_2<wr0_2<B,f>,il1(f)>"));
        CellExpr ca = c.add("constraint_A", 3, c.gen("A"), ma, "coherence constraint");
        CellExpr cb = c.add("constraint_B", 3, mb, c.gen("B"), "coherence constraint");
        CellExpr mid = c.apply("wr1_2", {c.apply("wl1_2", {kappa("x"), c.parse("wr0_3<H,il1(f)>")}), kappa_inv("y")});
        s.factors = {ca, mid, cb};
    }
    s.chain = s.factors;
    s.composite = vertical_composite(c, s.chain);
    s.computad = std::move(c);
    return s;
}

Schema promote_inverse_term(std::shared_ptr<const TheoryPresentation> th) {
    require(*th, {"c1", "c2", "id0", "l2", "r2", "il1", "ir1", "il2", "ir2", "kl2", "kr2", "a1", "wr0_2", "wl0_2"});
    Computad c(th);
    c.add("a", 0);
    c.add("b", 0);
    c.add("f", "a", "b");
    Schema s{c, {}, {}, {}};
    CellExpr first = c.parse("wr0_2<kr2(f),il1(f)>");
    CellExpr second = c.parse("wl0_2<ir1(f),ir2(kl2(f))>");
    s.factors = {first, second};
    s.chain = {c.parse("r2(il1(f))"), first, c.parse("a1<ir1(f),f,il1(f)>"), second, c.parse("il2(l2(ir1(f)))")};
    s.composite = vertical_composite(c, s.chain);
    s.computad = std::move(c);
    return s;
}

} // namespace globwb
