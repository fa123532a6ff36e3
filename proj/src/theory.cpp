#include "globwb/theory.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <sstream>

#include "globwb/error.hpp"

namespace globwb {

bool operator==(const Entry& a, const Entry& b) {
    return a.dim == b.dim && a.symbol == b.symbol && a.cell == b.cell && a.inner == b.inner;
}

bool operator==(const Term& a, const Term& b) {
    return a.src == b.src && a.tgt == b.tgt && a.entries == b.entries;
}

const char* kind_name(TheoryKind k) { return k == TheoryKind::Groupoidal ? "groupoidal" : "categorical"; }

const OperationSymbol& TheoryPresentation::symbol(const std::string& name) const {
    auto it = index.find(name);
    if (it == index.end()) throw DomainError("unknown operation symbol '" + name + "'");
    return symbols[it->second];
}

std::vector<std::vector<std::string>> TheoryPresentation::stages() const {
    std::vector<std::vector<std::string>> out(n + 2);
    for (const auto& s : symbols) out[s.stage].push_back(s.name);
    return out;
}

TheoryPresentation base_theory(int n, TheoryKind kind) {
    if (n < 1) throw DomainError("truncation must be at least 1");
    TheoryPresentation th;
    th.n = n;
    th.kind = kind;
    return th;
}

namespace {

bool is_globe(const Tree& t) { return leaf_count(t) == 1; }

const Tree& entry_cod(const Entry& e) { return e.symbol.empty() ? e.cell->tgt : e.inner[0].tgt; }

Tree iterate_suspend(Tree t, int times) {
    for (int i = 0; i < times; ++i) t = suspend(t);
    return t;
}

bool is_cell_token(const std::string& s) {
    std::size_t i = 0;
    while (i < s.size() && (s[i] == 's' || s[i] == 't')) ++i;
    if (i >= s.size() || s[i] != 'g') return false;
    ++i;
    if (i >= s.size()) return false;
    for (; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

bool is_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '^' || c == '\'';
}

void check_symbol_name(const std::string& name) {
    if (name.empty()) throw DomainError("operation symbol needs a name");
    for (char c : name)
        if (!is_name_char(c)) throw DomainError("invalid character in symbol name '" + name + "'");
    if (is_cell_token(name) || name == "s" || name == "t")
        throw DomainError("symbol name '" + name + "' clashes with the cell syntax");
}

Entry entry_face(const TheoryPresentation& th, const Entry& e, int eps);

Entry entry_face_to(const TheoryPresentation& th, Entry e, int eps, int to) {
    while (e.dim > to) e = entry_face(th, e, eps);
    return e;
}

Entry subst_entry(const TheoryPresentation& th, const Entry& e, const Term& u) {
    if (e.symbol.empty()) {
        CellHome h = containing_globe(u.src, cell_of(*e.cell));
        Entry r = u.entries[h.leaf];
        if (h.eps >= 0) r = entry_face_to(th, r, h.eps, e.dim);
        return r;
    }
    Entry r = e;
    r.inner[0] = substitute(th, e.inner[0], u);
    return r;
}

Entry entry_face(const TheoryPresentation& th, const Entry& e, int eps) {
    if (e.dim == 0) throw DomainError("a 0-cell has no boundary");
    if (e.symbol.empty()) return cell_entry(compose(globe_face(e.dim - 1, e.dim, eps), *e.cell));
    const OperationSymbol& s = th.symbol(e.symbol);
    const Term& b = eps == 0 ? *s.src : *s.tgt;
    return subst_entry(th, b.entries[0], e.inner[0]);
}

int entry_symbols(const Entry& e) { return e.symbol.empty() ? 0 : 1 + symbol_count(e.inner[0]); }

// Equation matching: pattern entries live over the arity of the equation.
struct Match {
    std::vector<std::optional<Entry>> assign;
    struct Deferred {
        int leaf, eps, dim;
        Entry value;
    };
    std::vector<Deferred> deferred;
};

bool match_entry(const Entry& p, const Tree& pat_cod, const Entry& e, Match& m) {
    if (p.dim != e.dim) return false;
    if (p.symbol.empty()) {
        CellHome h = containing_globe(pat_cod, cell_of(*p.cell));
        if (h.eps >= 0) {
            m.deferred.push_back({h.leaf, h.eps, p.dim, e});
            return true;
        }
        auto& slot = m.assign[h.leaf];
        if (slot) return *slot == e;
        slot = e;
        return true;
    }
    if (p.symbol != e.symbol) return false;
    const Term& pi = p.inner[0];
    const Term& ei = e.inner[0];
    if (!(pi.src == ei.src)) return false;
    for (std::size_t i = 0; i < pi.entries.size(); ++i)
        if (!match_entry(pi.entries[i], pat_cod, ei.entries[i], m)) return false;
    return true;
}

Entry normalize_entry(const TheoryPresentation& th, const Entry& e, int& fuel);

std::optional<Entry> rewrite_root(const TheoryPresentation& th, const Entry& e, int& fuel) {
    if (e.symbol.empty() || e.dim != th.n) return std::nullopt;
    for (const auto& eq : th.symbols) {
        if (!eq.equation) continue;
        const Term& lhs = eq.lhs_is_src ? *eq.src : *eq.tgt;
        const Term& rhs = eq.lhs_is_src ? *eq.tgt : *eq.src;
        if (lhs.entries[0].symbol != e.symbol) continue;
        Match m;
        m.assign.resize(leaf_count(eq.arity));
        if (!match_entry(lhs.entries[0], eq.arity, e, m)) continue;
        if (std::any_of(m.assign.begin(), m.assign.end(), [](const auto& a) { return !a.has_value(); })) continue;
        bool ok = true;
        for (const auto& d : m.deferred)
            if (!(normalize_entry(th, entry_face_to(th, *m.assign[d.leaf], d.eps, d.dim), fuel) ==
                  normalize_entry(th, d.value, fuel))) {
                ok = false;
                break;
            }
        if (!ok) continue;
        std::vector<Entry> parts;
        for (auto& a : m.assign) parts.push_back(*a);
        Term u;
        try {
            u = make_term(th, eq.arity, entry_cod(e), std::move(parts));
        } catch (const DomainError&) {
            continue;
        }
        return substitute(th, rhs, u).entries[0];
    }
    return std::nullopt;
}

Entry normalize_entry(const TheoryPresentation& th, const Entry& e, int& fuel) {
    if (e.symbol.empty()) return e;
    Entry r = e;
    r.inner[0] = Term{e.inner[0].src, e.inner[0].tgt, {}};
    for (const auto& x : e.inner[0].entries) r.inner[0].entries.push_back(normalize_entry(th, x, fuel));
    while (true) {
        auto next = rewrite_root(th, r, fuel);
        if (!next) return r;
        if (--fuel < 0) throw DomainError("equation rewriting did not terminate");
        r = normalize_entry(th, *next, fuel);
    }
}

bool has_equations(const TheoryPresentation& th) {
    return std::any_of(th.symbols.begin(), th.symbols.end(), [](const auto& s) { return s.equation; });
}

Entry normalized(const TheoryPresentation& th, const Entry& e) {
    if (!has_equations(th)) return e;
    int fuel = 10000;
    return normalize_entry(th, e, fuel);
}

} // namespace

Entry cell_entry(const ThetaMap& c) {
    const int k = source_dim(c);
    if (k < 0) throw DomainError("a cell must have a globe as source");
    if (!is_globular(c)) throw DomainError("a cell entry must be globular");
    return Entry{k, {}, c, {}};
}

Entry apply_entry(const TheoryPresentation& th, const std::string& name, const Term& inner) {
    const OperationSymbol& s = th.symbol(name);
    if (s.equation) throw DomainError("equation '" + name + "' cannot be applied as an operation");
    if (!(inner.src == s.arity)) throw DomainError("argument of '" + name + "' does not start at its arity");
    return Entry{s.k, name, std::nullopt, {inner}};
}

Term make_term(const TheoryPresentation& th, const Tree& src, const Tree& tgt, std::vector<Entry> entries) {
    const DimensionTable tbl = tree_to_table(src);
    if (entries.size() != tbl.tops.size())
        throw DomainError("term needs one entry per globe of its source (" + std::to_string(tbl.tops.size()) + ")");
    for (std::size_t l = 0; l < entries.size(); ++l) {
        if (entries[l].dim != tbl.tops[l])
            throw DomainError("entry " + std::to_string(l + 1) + " has dimension " + std::to_string(entries[l].dim) +
                              " but its globe has dimension " + std::to_string(tbl.tops[l]));
        if (!(entry_cod(entries[l]) == tgt)) throw DomainError("entry " + std::to_string(l + 1) + " has the wrong codomain");
    }
    for (std::size_t l = 0; l < tbl.joins.size(); ++l) {
        const int j = tbl.joins[l];
        Entry a = normalized(th, entry_face_to(th, entries[l], 1, j));
        Entry b = normalized(th, entry_face_to(th, entries[l + 1], 0, j));
        if (!(a == b))
            throw DomainError("entries " + std::to_string(l + 1) + " and " + std::to_string(l + 2) +
                              " do not match on their shared " + std::to_string(j) + "-boundary");
    }
    return Term{src, tgt, std::move(entries)};
}

Term identity_term(const Tree& t) {
    Term r{t, t, {}};
    for (const auto& g : globe_inclusions(t)) r.entries.push_back(cell_entry(g));
    return r;
}

Term globular_term(const ThetaMap& f) {
    if (!is_globular(f)) throw DomainError("map is not globular");
    Term r{f.src, f.tgt, {}};
    for (int l = 0; l < leaf_count(f.src); ++l) r.entries.push_back(cell_entry(restrict_to_leaf(f, l)));
    return r;
}

Term symbol_term(const TheoryPresentation& th, const std::string& name) {
    const OperationSymbol& s = th.symbol(name);
    return Term{globe(s.k), s.arity, {apply_entry(th, name, identity_term(s.arity))}};
}

Term substitute(const TheoryPresentation& th, const Term& t, const Term& u) {
    if (!(t.tgt == u.src)) throw DomainError("terms are not composable: " + to_string(t.tgt) + " vs " + to_string(u.src));
    Term r{t.src, u.tgt, {}};
    for (const auto& e : t.entries) r.entries.push_back(subst_entry(th, e, u));
    return r;
}

namespace {

Term face_term(const TheoryPresentation& th, const Term& t, int eps) {
    if (!is_globe(t.src)) throw DomainError("source and target are defined for terms out of a globe");
    const int k = dim(t.src);
    if (k == 0) throw DomainError("a 0-dimensional term has no boundary");
    return Term{globe(k - 1), t.tgt, {normalized(th, entry_face(th, t.entries[0], eps))}};
}

} // namespace

Term term_src(const TheoryPresentation& th, const Term& t) { return face_term(th, t, 0); }
Term term_tgt(const TheoryPresentation& th, const Term& t) { return face_term(th, t, 1); }

Term normalize(const TheoryPresentation& th, const Term& t) {
    Term r{t.src, t.tgt, {}};
    for (const auto& e : t.entries) r.entries.push_back(normalized(th, e));
    return r;
}

bool equal_terms(const TheoryPresentation& th, const Term& a, const Term& b) {
    return normalize(th, a) == normalize(th, b);
}

bool term_parallel(const TheoryPresentation& th, const Term& a, const Term& b) {
    if (!(a.src == b.src) || !(a.tgt == b.tgt) || !is_globe(a.src)) return false;
    if (dim(a.src) == 0) return true;
    return term_src(th, a) == term_src(th, b) && term_tgt(th, a) == term_tgt(th, b);
}

int symbol_count(const Term& t) {
    int c = 0;
    for (const auto& e : t.entries) c += entry_symbols(e);
    return c;
}

bool is_evaluable(const TheoryPresentation& th, const Term& t) {
    for (const auto& e : t.entries) {
        if (e.symbol.empty()) continue;
        if (!th.symbol(e.symbol).theta_image || !is_evaluable(th, e.inner[0])) return false;
    }
    return true;
}

ThetaMap eval_theta(const TheoryPresentation& th, const Term& t) {
    std::vector<ThetaMap> parts;
    for (const auto& e : t.entries) {
        if (e.symbol.empty()) {
            parts.push_back(*e.cell);
            continue;
        }
        const OperationSymbol& s = th.symbol(e.symbol);
        if (!s.theta_image) throw DomainError("operation '" + s.name + "' has no interpretation in Theta");
        parts.push_back(compose(*s.theta_image, eval_theta(th, e.inner[0])));
    }
    return glue(t.src, t.tgt, parts);
}

// ---------------------------------------------------------------- literals

namespace {

class TermParser {
public:
    TermParser(const TheoryPresentation& th, std::string_view text) : th_(th), s_(text) {}

    Term parse(const Tree& src, const Tree& tgt) {
        Term t = term(src, tgt);
        ws();
        if (pos_ != s_.size()) fail("unexpected trailing input");
        return t;
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

    Term term(const Tree& src, const Tree& tgt) {
        const DimensionTable tbl = tree_to_table(src);
        std::vector<Entry> entries;
        const std::size_t start = pos_;
        if (peek() == '<') {
            ++pos_;
            for (std::size_t l = 0; l < tbl.tops.size(); ++l) {
                if (l > 0) expect(',');
                entries.push_back(entry(tbl.tops[l], tgt));
            }
            expect('>');
        } else {
            if (tbl.tops.size() != 1) fail("a tuple <...> is required for a source with several globes");
            entries.push_back(entry(tbl.tops[0], tgt));
        }
        try {
            return make_term(th_, src, tgt, std::move(entries));
        } catch (const DomainError& e) {
            throw ParseError(e.what(), start);
        }
    }

    Entry entry(int d, const Tree& tgt) {
        ws();
        const std::size_t start = pos_;
        while (pos_ < s_.size() && is_name_char(s_[pos_])) ++pos_;
        std::string tok(s_.substr(start, pos_ - start));
        if (tok.empty()) fail("expected a cell or an operation name");
        if (is_cell_token(tok)) {
            std::size_t m = tok.find('g');
            const int leaf = std::stoi(tok.substr(m + 1)) - 1;
            const DimensionTable tbl = tree_to_table(tgt);
            if (leaf < 0 || leaf >= static_cast<int>(tbl.tops.size()))
                throw ParseError("globe " + tok.substr(m) + " does not exist in the codomain", start);
            const int gd = tbl.tops[leaf];
            const int k = gd - static_cast<int>(m);
            if (k < 0) throw ParseError("too many faces taken of " + tok.substr(m), start);
            if (k != d)
                throw ParseError("cell " + tok + " has dimension " + std::to_string(k) + ", expected " + std::to_string(d),
                                 start);
            ThetaMap incl = globe_inclusion(tgt, leaf);
            if (m == 0) return cell_entry(incl);
            return cell_entry(compose(globe_face(k, gd, tok[0] == 's' ? 0 : 1), incl));
        }
        if (!th_.has(tok)) throw ParseError("unknown operation '" + tok + "'", start);
        const OperationSymbol& s = th_.symbol(tok);
        if (s.equation) throw ParseError("equation '" + tok + "' cannot be applied", start);
        if (s.k != d)
            throw ParseError("operation " + tok + " has dimension " + std::to_string(s.k) + ", expected " +
                                 std::to_string(d),
                             start);
        Term inner;
        if (peek() == '(') {
            ++pos_;
            inner = term(s.arity, tgt);
            expect(')');
        } else if (peek() == '<') {
            inner = term(s.arity, tgt);
        } else {
            if (!(s.arity == tgt)) throw ParseError("bare '" + tok + "' needs the codomain to be its arity", start);
            inner = identity_term(tgt);
        }
        return apply_entry(th_, tok, inner);
    }

    const TheoryPresentation& th_;
    std::string_view s_;
    std::size_t pos_ = 0;
};

std::string entry_string(const Entry& e) {
    if (e.symbol.empty()) {
        const Tree& b = e.cell->tgt;
        CellHome h = containing_globe(b, cell_of(*e.cell));
        const int gd = tree_to_table(b).tops[h.leaf];
        std::string s;
        if (h.eps >= 0) s.assign(static_cast<std::size_t>(gd - e.dim), h.eps == 0 ? 's' : 't');
        return s + "g" + std::to_string(h.leaf + 1);
    }
    const Term& in = e.inner[0];
    if (in.src == in.tgt && in == identity_term(in.src)) return e.symbol;
    std::string body = to_string(in);
    return is_globe(in.src) ? e.symbol + "(" + body + ")" : e.symbol + body;
}

} // namespace

Term parse_term(const TheoryPresentation& th, std::string_view text, const Tree& src, const Tree& tgt) {
    return normalize(th, TermParser(th, text).parse(src, tgt));
}

std::string to_string(const Term& t) {
    if (t.entries.size() == 1 && is_globe(t.src)) return entry_string(t.entries[0]);
    std::string s = "<";
    for (std::size_t i = 0; i < t.entries.size(); ++i) s += (i ? "," : "") + entry_string(t.entries[i]);
    return s + ">";
}

nlohmann::json term_to_json(const Term& t) {
    return {{"src", to_string(t.src)}, {"tgt", to_string(t.tgt)}, {"term", to_string(t)}};
}

// ---------------------------------------------------------------- towers

namespace {

std::string pair_failure(const TheoryPresentation& th, const OperationSymbol& s, TheoryKind as) {
    const int pk = s.k - 1;
    if (pk >= 1 && !term_parallel(th, *s.src, *s.tgt)) return "boundary pair is not parallel";
    if (as == TheoryKind::Groupoidal) {
        if (dim(s.arity) > pk + 1)
            return "groupoidal admissibility: dim(A) = " + std::to_string(dim(s.arity)) + " exceeds k+1 = " +
                   std::to_string(pk + 1);
        return {};
    }
    if (!is_evaluable(th, *s.src) || !is_evaluable(th, *s.tgt))
        return "categorical admissibility needs both boundary terms to evaluate in Theta";
    if (!is_admissible_categorical(eval_theta(th, *s.src), eval_theta(th, *s.tgt)))
        return "categorical admissibility: pair is neither homogeneous nor factored through the boundary";
    return {};
}

void add_symbol(TheoryPresentation& th, const BatchItem& item, TheoryKind as, int batch) {
    check_symbol_name(item.name);
    if (th.has(item.name)) throw DomainError("operation '" + item.name + "' already exists");
    if (item.k < 1) throw DomainError("operations of dimension 0 carry no boundary pair");
    if (item.k > th.n + 1) throw DomainError("operation dimension exceeds n+1");
    if (!item.src || !item.tgt) throw DomainError("operation '" + item.name + "' needs a boundary pair");
    for (const Term* b : {&*item.src, &*item.tgt})
        if (!(b->src == globe(item.k - 1)) || !(b->tgt == item.arity))
            throw DomainError("boundary of '" + item.name + "' must be a pair of terms D_" + std::to_string(item.k - 1) +
                              " -> " + to_string(item.arity));
    OperationSymbol s;
    s.name = item.name;
    s.arity = item.arity;
    s.k = item.k;
    s.src = normalize(th, *item.src);
    s.tgt = normalize(th, *item.tgt);
    s.stage = item.k;
    s.batch = batch;
    s.admitted_as = as;
    s.equation = item.k == th.n + 1;
    s.lhs_is_src = symbol_count(*s.src) >= symbol_count(*s.tgt);
    if (std::string why = pair_failure(th, s, as); !why.empty())
        throw DomainError("inadmissible pair for '" + s.name + "': " + why);
    if (is_evaluable(th, *s.src) && is_evaluable(th, *s.tgt)) {
        ThetaMap fs = eval_theta(th, *s.src), ft = eval_theta(th, *s.tgt);
        const auto& homs = hom(globe(s.k), s.arity);
        for (std::size_t i = 0; i < homs.size(); ++i) {
            if (compose(globe_face(s.k - 1, s.k, 0), homs[i]) == fs && compose(globe_face(s.k - 1, s.k, 1), homs[i]) == ft) {
                s.theta_image = homs[i];
                s.filler_index = static_cast<long long>(i);
                break;
            }
        }
    }
    if (as == TheoryKind::Categorical && !s.theta_image)
        throw DomainError("inadmissible pair for '" + s.name + "': no filler in Theta");
    th.index[s.name] = th.symbols.size();
    th.symbols.push_back(std::move(s));
}

BatchItem item_from_text(const TheoryPresentation& th, const std::string& name, const Tree& arity, int k,
                         const std::string& src, const std::string& tgt) {
    BatchItem it{name, arity, k, {}, {}};
    it.src = parse_term(th, src, globe(k - 1), arity);
    it.tgt = parse_term(th, tgt, globe(k - 1), arity);
    return it;
}

void add_text(TheoryPresentation& th, TheoryKind as, const std::string& name, const Tree& arity, int k,
              const std::string& src, const std::string& tgt) {
    add_symbol(th, item_from_text(th, name, arity, k, src, tgt), as, th.batches);
}

std::string num(int x) { return std::to_string(x); }

} // namespace

TheoryPresentation extend(const TheoryPresentation& th, const std::vector<BatchItem>& batch) {
    TheoryPresentation out = th;
    ++out.batches;
    for (const auto& it : batch) add_symbol(out, it, th.kind, out.batches);
    return out;
}

std::string whisker_right_name(int d, int k) { return "wr" + num(d) + "_" + num(k); }
std::string whisker_left_name(int d, int k) { return "wl" + num(d) + "_" + num(k); }

TheoryPresentation standard_systems(const TheoryPresentation& th) {
    if (th.systems.count("comp")) return th;
    TheoryPresentation out = th;
    ++out.batches;
    const TheoryKind as = th.kind;
    const int n = th.n;
    auto& sys = out.systems;
    for (int d = 1; d <= n + 1; ++d) {
        if (d <= n) {
            Tree a = iterate_suspend(leaf_row(2), d - 1);
            add_text(out, as, "c" + num(d), a, d, "sg1", "tg2");
            sys["comp"].push_back("c" + num(d));
            add_text(out, as, "id" + num(d - 1), globe(d - 1), d, "g1", "g1");
            sys["id"].push_back("id" + num(d - 1));
        }
        if (d >= 2) {
            const std::string c = "c" + num(d - 1), id = "id" + num(d - 2);
            add_text(out, as, "l" + num(d), globe(d - 1), d, "g1", c + "<g1," + id + "(tg1)>");
            add_text(out, as, "r" + num(d), globe(d - 1), d, "g1", c + "<" + id + "(sg1),g1>");
            sys["unit_l"].push_back("l" + num(d));
            sys["unit_r"].push_back("r" + num(d));
        }
        if (d <= n) {
            for (int k = 2; k <= d; ++k) {
                const int base = d - k;
                Tree right = iterate_suspend(Tree{{globe(k - 1), Tree{}}}, base);
                Tree left = iterate_suspend(Tree{{Tree{}, globe(k - 1)}}, base);
                const std::string pr = k == 2 ? "c" + num(base + 1) : whisker_right_name(base, k - 1);
                const std::string pl = k == 2 ? "c" + num(base + 1) : whisker_left_name(base, k - 1);
                add_text(out, as, whisker_right_name(base, k), right, d, pr + "<sg1,g2>", pr + "<tg1,g2>");
                add_text(out, as, whisker_left_name(base, k), left, d, pl + "<g1,sg2>", pl + "<g1,tg2>");
                sys["whisker_r"].push_back(whisker_right_name(base, k));
                sys["whisker_l"].push_back(whisker_left_name(base, k));
            }
        }
    }
    return out;
}

TheoryPresentation groupoidalize(const TheoryPresentation& th) {
    if (!th.systems.count("comp") || !th.systems.count("id"))
        throw DomainError("groupoidalize needs chosen composition and identity systems");
    if (th.systems.count("inv_l")) return th;
    TheoryPresentation out = th;
    out.kind = TheoryKind::Groupoidal;
    ++out.batches;
    const auto as = TheoryKind::Groupoidal;
    auto& sys = out.systems;
    for (int k = 1; k <= th.n + 1; ++k) {
        if (k <= th.n) {
            add_text(out, as, "il" + num(k), globe(k), k, "tg1", "sg1");
            add_text(out, as, "ir" + num(k), globe(k), k, "tg1", "sg1");
            sys["inv_l"].push_back("il" + num(k));
            sys["inv_r"].push_back("ir" + num(k));
        }
        if (k >= 2) {
            const std::string c = "c" + num(k - 1), id = "id" + num(k - 2);
            add_text(out, as, "kl" + num(k), globe(k - 1), k, id + "(sg1)", c + "<g1,il" + num(k - 1) + "(g1)>");
            add_text(out, as, "kr" + num(k), globe(k - 1), k, id + "(tg1)", c + "<ir" + num(k - 1) + "(g1),g1>");
            sys["cancel_l"].push_back("kl" + num(k));
            sys["cancel_r"].push_back("kr" + num(k));
        }
    }
    for (int k = 1; k <= th.n; ++k) {
        out.identified["c" + num(k)] = k == 1 ? "w" : "Sigma^" + num(k - 1) + "(w)";
        out.identified["id" + num(k - 1)] = "id" + num(k - 1);
    }
    return out;
}

namespace {

// Globes of the last (resp. first) block of a globular sum, i.e. those touching
// the final (resp. initial) 0-cell.
std::vector<bool> end_block(const Tree& a, bool last) {
    std::vector<bool> out;
    if (a.is_leaf()) return {true};
    for (std::size_t i = 0; i < a.arity(); ++i) {
        const bool in = last ? i + 1 == a.arity() : i == 0;
        for (int l = 0; l < leaf_count(a.children[i]); ++l) out.push_back(in);
    }
    return out;
}

Term whisker_tree(const TheoryPresentation& th, const Tree& a, bool right) {
    Tree b = a;
    if (a.is_leaf()) b = globe(1);
    else if (right) b.children.push_back(Tree{});
    else b.children.insert(b.children.begin(), Tree{});
    const DimensionTable ta = tree_to_table(a);
    const std::vector<bool> touch = end_block(a, right);
    const int m = static_cast<int>(ta.tops.size());
    const int shift = right ? 0 : 1;
    const int extra = right ? m : 0;  // leaf index of the new 1-cell in b
    std::vector<Entry> entries;
    for (int l = 0; l < m; ++l) {
        const int d = ta.tops[l];
        ThetaMap globe_l = globe_inclusion(b, a.is_leaf() ? 0 : l + shift);
        if (!touch[l] || d == 0) {
            if (a.is_leaf()) globe_l = globe_face(0, 1, right ? 0 : 1);
            entries.push_back(cell_entry(globe_l));
            continue;
        }
        const std::string name = d == 1 ? "c1" : (right ? whisker_right_name(0, d) : whisker_left_name(0, d));
        if (!th.has(name)) throw DomainError("whiskering operation '" + name + "' is missing");
        const OperationSymbol& s = th.symbol(name);
        std::vector<Entry> args;
        Entry edge = cell_entry(globe_inclusion(b, extra));
        if (right) args = {cell_entry(globe_l), edge};
        else args = {edge, cell_entry(globe_l)};
        entries.push_back(apply_entry(th, name, make_term(th, s.arity, b, std::move(args))));
    }
    return make_term(th, a, b, std::move(entries));
}

} // namespace

Term whisker_tree_right(const TheoryPresentation& th, const Tree& a) { return whisker_tree(th, a, true); }
Term whisker_tree_left(const TheoryPresentation& th, const Tree& a) { return whisker_tree(th, a, false); }

std::vector<AuditItem> audit(const TheoryPresentation& th) {
    std::vector<AuditItem> out;
    for (const auto& s : th.symbols) {
        AuditItem it{s.name, true, "ok"};
        auto fail = [&](const std::string& m) {
            if (it.ok) it.message = m;
            else it.message += "; " + m;
            it.ok = false;
        };
        if (s.stage != s.k) fail("stage differs from dimension");
        if (std::string why = pair_failure(th, s, s.admitted_as); !why.empty()) fail(why);
        if (s.theta_image) {
            const ThetaMap& img = *s.theta_image;
            if (!(img.src == globe(s.k)) || !(img.tgt == s.arity)) fail("theta image has the wrong type");
            else if (!(compose(globe_face(s.k - 1, s.k, 0), img) == eval_theta(th, *s.src)) ||
                     !(compose(globe_face(s.k - 1, s.k, 1), img) == eval_theta(th, *s.tgt)))
                fail("theta image is not a filler of the evaluated boundary");
        } else if (s.admitted_as == TheoryKind::Categorical) {
            fail("categorical operation without theta image");
        }
        out.push_back(std::move(it));
    }
    return out;
}

// ---------------------------------------------------------------- JSON

namespace {

Tree tree_field(const nlohmann::json& j) {
    if (j.is_string()) return parse_tree_literal(j.get<std::string>());
    return tree_from_json(j);
}

} // namespace

TheoryPresentation extend_from_json(const TheoryPresentation& th, const nlohmann::json& batch) {
    if (!batch.is_array()) throw DomainError("a batch must be a JSON array");
    TheoryPresentation out = th;
    ++out.batches;
    for (const auto& item : batch) {
        try {
            const std::string name = item.at("name").get<std::string>();
            Tree arity = tree_field(item.at("arity"));
            const int k = item.at("k").get<int>();
            add_symbol(out,
                       item_from_text(out, name, arity, k, item.at("src").get<std::string>(),
                                      item.at("tgt").get<std::string>()),
                       th.kind, out.batches);
        } catch (const nlohmann::json::exception& e) {
            throw DomainError(std::string("malformed batch item: ") + e.what());
        }
    }
    return out;
}

TheoryPresentation theory_from_json(const nlohmann::json& spec) {
    try {
        const int n = spec.at("n").get<int>();
        const std::string kind = spec.value("kind", std::string("categorical"));
        if (kind != "categorical" && kind != "groupoidal") throw DomainError("unknown theory kind '" + kind + "'");
        TheoryPresentation th =
            base_theory(n, kind == "groupoidal" ? TheoryKind::Groupoidal : TheoryKind::Categorical);
        if (spec.value("standard_systems", false)) th = standard_systems(th);
        if (spec.contains("batches"))
            for (const auto& b : spec.at("batches")) th = extend_from_json(th, b);
        if (spec.value("groupoidalize", false)) th = groupoidalize(th);
        return th;
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("malformed theory specification: ") + e.what());
    }
}

TheoryPresentation load_theory_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open theory file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DomainError("theory file '" + path + "' is not valid JSON: " + e.what());
    }
    return theory_from_json(j);
}

nlohmann::json theory_to_json(const TheoryPresentation& th) {
    nlohmann::json stages = nlohmann::json::array();
    auto names = th.stages();
    for (std::size_t k = 0; k < names.size(); ++k) {
        nlohmann::json syms = nlohmann::json::array();
        for (const auto& name : names[k]) {
            const auto& s = th.symbol(name);
            syms.push_back({{"name", s.name},
                            {"arity", to_string(s.arity)},
                            {"k", s.k},
                            {"src", to_string(*s.src)},
                            {"tgt", to_string(*s.tgt)},
                            {"theta_image", s.theta_image ? theta_to_json(*s.theta_image) : nlohmann::json()},
                            {"filler_index", s.filler_index},
                            {"batch", s.batch},
                            {"admitted_as", kind_name(s.admitted_as)},
                            {"equation", s.equation},
                            {"orientation", s.lhs_is_src ? "src->tgt" : "tgt->src"}});
        }
        stages.push_back({{"stage", k}, {"symbols", syms}});
    }
    return {{"n", th.n},
            {"kind", kind_name(th.kind)},
            {"systems", th.systems},
            {"identified", th.identified},
            {"stages", stages}};
}

// ---------------------------------------------------------------- random terms

namespace {

class TermSampler {
public:
    TermSampler(const TheoryPresentation& th, std::mt19937_64& rng, const Tree& tgt) : th_(th), rng_(rng), tgt_(tgt) {
        cells_ = realize_cells(tgt);
    }

    const std::vector<Entry>& pool(int d, int depth) {
        auto key = std::make_pair(d, depth);
        if (auto it = pools_.find(key); it != pools_.end()) return it->second;
        std::vector<Entry> out;
        if (d < static_cast<int>(cells_.size()))
            for (const auto& c : cells_[d]) out.push_back(cell_entry(globular_cell(tgt_, c)));
        if (depth > 0) {
            for (const auto& s : th_.symbols) {
                if (s.equation || s.k != d || !s.theta_image) continue;
                for (int attempt = 0; attempt < 3; ++attempt) {
                    auto inner = tuple(s.arity, depth - 1);
                    if (!inner) break;
                    Entry e = apply_entry(th_, s.name, *inner);
                    if (std::find(out.begin(), out.end(), e) == out.end()) out.push_back(std::move(e));
                }
            }
        }
        return pools_[key] = std::move(out);
    }

    std::optional<Term> tuple(const Tree& src, int depth) {
        const DimensionTable tbl = tree_to_table(src);
        std::vector<std::vector<Entry>> cand;
        for (int d : tbl.tops) {
            std::vector<Entry> c = pool(d, depth);
            std::shuffle(c.begin(), c.end(), rng_);
            cand.push_back(std::move(c));
        }
        std::vector<Entry> chosen;
        long budget = 5000;
        std::function<bool(std::size_t)> rec = [&](std::size_t l) -> bool {
            if (l == cand.size()) return true;
            for (const auto& e : cand[l]) {
                if (--budget < 0) return false;
                if (l > 0) {
                    const int j = tbl.joins[l - 1];
                    if (!(normalized(th_, entry_face_to(th_, chosen.back(), 1, j)) ==
                          normalized(th_, entry_face_to(th_, e, 0, j))))
                        continue;
                }
                chosen.push_back(e);
                if (rec(l + 1)) return true;
                chosen.pop_back();
            }
            return false;
        };
        if (!rec(0)) return std::nullopt;
        return make_term(th_, src, tgt_, chosen);
    }

private:
    const TheoryPresentation& th_;
    std::mt19937_64& rng_;
    Tree tgt_;
    std::vector<std::vector<CellRef>> cells_;
    std::map<std::pair<int, int>, std::vector<Entry>> pools_;
};

} // namespace

std::optional<Term> random_term(const TheoryPresentation& th, std::mt19937_64& rng, const Tree& src, const Tree& tgt,
                                int depth) {
    TermSampler sampler(th, rng, tgt);
    return sampler.tuple(src, depth);
}

// ---------------------------------------------------------------- cofibrations

Cofibrations generating_cofibrations(int n) {
    if (n < 0) throw DomainError("negative truncation");
    Cofibrations c;
    for (int k = 0; k <= n; ++k) c.I.push_back({"i" + num(k), pad(sphere_inclusion(k), n)});
    GlobMap collapse{sphere(n, n), realize(globe(n), n), std::vector<std::vector<int>>(n + 1)};
    for (int j = 0; j < n; ++j) collapse.f[j] = {0, 1};
    collapse.f[n] = {0, 0};
    validate(collapse);
    c.I.push_back({"i" + num(n + 1), collapse});
    for (int k = 0; k < n; ++k) c.J.push_back({"j" + num(k), pad(to_globmap(globe_face(k, k + 1, 0)), n)});
    return c;
}

} // namespace globwb
