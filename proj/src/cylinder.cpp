#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

#include "globwb/cylinder.hpp"
#include "globwb/error.hpp"

namespace globwb {

namespace {

std::string num(int i) { return std::to_string(i); }

std::shared_ptr<const TheoryPresentation> resolve(std::shared_ptr<const TheoryPresentation> th) {
    return th ? std::move(th) : cylinder_theory();
}

void check_range(const TheoryPresentation& th, int k, int hi, const char* what) {
    if (k < 0) throw DomainError(std::string(what) + ": negative dimension");
    if (k > th.n) throw DomainError(std::string(what) + ": k = " + num(k) + " exceeds the truncation n = " + num(th.n));
    if (k > hi) throw DomainError(std::string(what) + ": k = " + num(k) + " is outside the implemented range k <= " + num(hi));
}

// Glue x (dimension d + j) to the (d+1)-cell y along dimension d, x first.
CellExpr whisker_after(const Computad& c, int d, const CellExpr& x, const CellExpr& y) {
    const int j = x.dim - d;
    return j == 1 ? c.apply("c" + num(d + 1), {x, y}) : c.apply(whisker_right_name(d, j), {x, y});
}

// Glue the (d+1)-cell y to x (dimension d + j) along dimension d, y first.
CellExpr whisker_before(const Computad& c, int d, const CellExpr& y, const CellExpr& x) {
    const int j = x.dim - d;
    return j == 1 ? c.apply("c" + num(d + 1), {y, x}) : c.apply(whisker_left_name(d, j), {y, x});
}

std::string face_name(const std::string& prefix, int eps, int j) { return prefix + (eps ? "_t" : "_s") + num(j); }

void copy_generators(const Computad& from, Computad& to, const Renaming& f, const std::set<std::string>& skip = {}) {
    for (const auto& g : from.generators()) {
        if (skip.count(g.name)) continue;
        const std::string name = f.count(g.name) ? f.at(g.name) : g.name;
        if (to.has(name)) continue;
        std::optional<CellExpr> s, t;
        if (g.src) s = rename(*g.src, f);
        if (g.tgt) t = rename(*g.tgt, f);
        to.add(name, g.dim, s, t, g.role);
    }
}

CylPresentation build_cyl(std::shared_ptr<const TheoryPresentation> th, int k, int p, int q) {
    auto src_collapsed = [&](int d) { return (p != kNone && d <= p) || (q != kNone && d < q); };
    auto tgt_collapsed = [&](int d) { return (q != kNone && d <= q) || (p != kNone && d < p); };
    auto alias = [&](const std::string& prefix, int eps, int j) {
        if (prefix == "B" && (eps == 0 ? src_collapsed(j) : tgt_collapsed(j))) return face_name("A", eps, j);
        return face_name(prefix, eps, j);
    };

    Computad c(th);
    for (const std::string prefix : {"A", "B"}) {
        for (int j = 0; j < k; ++j)
            for (int eps = 0; eps < 2; ++eps) {
                const std::string name = face_name(prefix, eps, j);
                if (alias(prefix, eps, j) != name) continue;
                if (j == 0)
                    c.add(name, 0, {}, {}, "boundary");
                else
                    c.add(name, j, c.gen(alias(prefix, 0, j - 1)), c.gen(alias(prefix, 1, j - 1)), "boundary");
            }
        const std::string role = prefix == "A" ? "iota0" : "iota1";
        if (k == 0)
            c.add(prefix, 0, {}, {}, role);
        else
            c.add(prefix, k, c.gen(alias(prefix, 0, k - 1)), c.gen(alias(prefix, 1, k - 1)), role);
    }

    CylPresentation out{k, c, "A", "B", "F", p, q, {}, {}};
    Computad& cc = out.computad;
    CellExpr a = cc.gen("A"), b = cc.gen("B");
    std::vector<std::string> sides;
    for (int d = 0; d < k; ++d) {
        std::optional<CellExpr> fs, ft;
        const CellExpr as = cc.face(a, 0, d), bs = cc.face(b, 0, d);
        const CellExpr at = cc.face(a, 1, d), bt = cc.face(b, 1, d);
        if (src_collapsed(d)) {
            if (!(as == bs)) throw std::logic_error("collapsed source side with distinct endpoints");
        } else {
            fs = cc.add("Fs" + num(d), d + 1, as, bs, "side");
        }
        if (tgt_collapsed(d)) {
            if (!(at == bt)) throw std::logic_error("collapsed target side with distinct endpoints");
        } else {
            ft = cc.add("Ft" + num(d), d + 1, at, bt, "side");
        }
        if (ft) a = whisker_after(cc, d, a, *ft);
        if (fs) b = whisker_before(cc, d, *fs, b);
    }
    cc.add("F", k + 1, a, b, k + 1 > th->n ? "filler (equation)" : "filler");
    cc.check();

    if (k >= 1) {
        for (int eps = 0; eps < 2; ++eps) {
            auto& list = eps == 0 ? out.source_cylinder : out.target_cylinder;
            for (const auto& name : {alias("A", eps, k - 1), alias("B", eps, k - 1)})
                if (std::find(list.begin(), list.end(), name) == list.end()) list.push_back(name);
            for (int d = 0; d < k - 1; ++d)
                for (const auto& side : {"Fs" + num(d), "Ft" + num(d)})
                    if (cc.has(side)) list.push_back(side);
            const std::string last = (eps == 0 ? "Fs" : "Ft") + num(k - 1);
            if (cc.has(last)) list.push_back(last);
        }
    }
    return out;
}

} // namespace

std::shared_ptr<const TheoryPresentation> cylinder_theory() {
    static const std::shared_ptr<const TheoryPresentation> th =
        std::make_shared<const TheoryPresentation>(groupoidalize(standard_systems(base_theory(3))));
    return th;
}

CylPresentation cyl_presentation(int k, std::shared_ptr<const TheoryPresentation> th) {
    th = resolve(std::move(th));
    check_range(*th, k, 3, "cyl_presentation");
    return build_cyl(th, k, kNone, kNone);
}

CylPresentation degenerate_cyl(int k, int p, int q, std::shared_ptr<const TheoryPresentation> th) {
    th = resolve(std::move(th));
    check_range(*th, k, 3, "degenerate_cyl");
    for (int idx : {p, q})
        if (idx != kNone && (idx < 0 || idx >= k))
            throw DomainError("degeneracy index " + num(idx) + " out of range: need 0 <= index < k = " + num(k));
    return build_cyl(th, k, p, q);
}

BoundaryCyl boundary_cyl(int k, std::shared_ptr<const TheoryPresentation> th) {
    th = resolve(std::move(th));
    if (k == 0) throw DomainError("boundary_cyl: cyl(D_0) has no boundary cylinder (need k >= 1)");
    check_range(*th, k, 3, "boundary_cyl");
    CylPresentation full = build_cyl(th, k, kNone, kNone);
    Computad c(th);
    copy_generators(full.computad, c, {}, {full.top});
    c.check();
    BoundaryCyl out{CylPresentation{k, c, full.iota0, full.iota1, "", kNone, kNone, full.source_cylinder,
                                    full.target_cylinder},
                    {full.top}, full.source_cylinder, full.target_cylinder, full.iota0, full.iota1};
    return out;
}

CellExpr rename(const CellExpr& e, const Renaming& f) {
    CellExpr r = e;
    if (e.generator) {
        auto it = f.find(e.head);
        if (it != f.end()) r.head = it->second;
    } else {
        for (auto& a : r.args) a = rename(a, f);
    }
    return r;
}

bool is_morphism(const Computad& x, const Computad& y, const Renaming& f) {
    for (const auto& g : x.generators()) {
        auto it = f.find(g.name);
        if (it == f.end() || !y.has(it->second)) return false;
        const Generator& h = y.generator(it->second);
        if (h.dim != g.dim) return false;
        if (g.dim > 0 && (!(rename(*g.src, f) == *h.src) || !(rename(*g.tgt, f) == *h.tgt))) return false;
    }
    return true;
}

bool is_isomorphism(const Computad& x, const Computad& y, const Renaming& f) {
    if (x.generators().size() != y.generators().size() || !is_morphism(x, y, f)) return false;
    std::set<std::string> image;
    for (const auto& g : x.generators()) image.insert(f.at(g.name));
    return image.size() == y.generators().size();
}

Renaming cyl_face_map(int j, int k, int eps) {
    if (j < 0 || j > k) throw DomainError("cyl_face_map: need 0 <= j <= k");
    Renaming f;
    for (int t = 0; t < j; ++t)
        for (int e = 0; e < 2; ++e) {
            for (const std::string prefix : {"A", "B"}) f[face_name(prefix, e, t)] = face_name(prefix, e, t);
            const std::string side = (e == 0 ? "Fs" : "Ft") + num(t);
            f[side] = side;
        }
    if (j == k) {
        f["A"] = "A";
        f["B"] = "B";
        f["F"] = "F";
    } else {
        f["A"] = face_name("A", eps, j);
        f["B"] = face_name("B", eps, j);
        f["F"] = (eps == 0 ? "Fs" : "Ft") + num(j);
    }
    return f;
}

std::string cell_name(int dim, int index) {
    static const char* letters[] = {"x", "e", "E", "T"};
    if (dim < 0 || dim > 3) throw DomainError("cell names exist for dimensions 0..3");
    return letters[dim] + num(index);
}

namespace {

// Index of the cells of a globular sum and their faces.
class CellIndex {
public:
    explicit CellIndex(const Tree& a) : a_(a), cells_(realize_cells(a)) {
        for (std::size_t d = 0; d < cells_.size(); ++d)
            for (std::size_t i = 0; i < cells_[d].size(); ++i)
                index_[{static_cast<int>(d), cells_[d][i].node, cells_[d][i].gap}] = static_cast<int>(i);
    }

    int dims() const { return static_cast<int>(cells_.size()); }
    int count(int d) const { return static_cast<int>(cells_[d].size()); }
    int find(int d, const Path& node, int gap) const {
        auto it = index_.find({d, node, gap});
        if (it == index_.end()) throw std::logic_error("cell lookup failed");
        return it->second;
    }
    int of_map(const ThetaMap& cell) const {
        CellRef r = cell_of(cell);
        return find(source_dim(cell), r.node, r.gap);
    }
    ThetaMap map(int d, int i) const { return globular_cell(a_, cells_[d][i]); }
    int face(int d, int i, int eps, int j) const { return of_map(compose(globe_face(j, d, eps), map(d, i))); }
    std::string name(int d, int i) const { return cell_name(d, i); }

private:
    Tree a_;
    std::vector<std::vector<CellRef>> cells_;
    std::map<std::tuple<int, Path, int>, int> index_;
};

std::string U(const std::string& cell) { return "U_" + cell; }
std::string V(const std::string& cell) { return "V_" + cell; }
std::string C(const std::string& cell) { return "C_" + cell; }

// Names of the globes of block q (1-based) of a tree of dimension <= 2, and of its 0- and 1-cells.
struct Blocks {
    explicit Blocks(const Tree& a) : a(a), idx(a) {}

    int p() const { return static_cast<int>(a.arity()); }
    int m(int q) const { return static_cast<int>(a.children[q - 1].arity()); }
    std::string x(int g) const { return cell_name(0, idx.find(0, {}, g)); }
    std::string e(int q, int j) const { return cell_name(1, idx.find(1, {q - 1}, j)); }
    std::string E(int q, int j) const { return cell_name(2, idx.find(2, {q - 1, j - 1}, 0)); }
    std::vector<std::string> globes(int q) const {
        if (m(q) == 0) return {e(q, 0)};
        std::vector<std::string> out;
        for (int j = 1; j <= m(q); ++j) out.push_back(E(q, j));
        return out;
    }

    Tree a;
    CellIndex idx;
};

} // namespace

CylGlobSum cyl_glob_sum(const Tree& a, std::shared_ptr<const TheoryPresentation> th) {
    th = resolve(std::move(th));
    if (dim(a) > 2) throw DomainError("cyl_glob_sum: dim(A) = " + num(dim(a)) + " is outside the implemented range (<= 2)");
    const CellIndex idx(a);
    Computad c(th);
    for (int d = 0; d < idx.dims(); ++d) {
        for (int copy = 0; copy < 2; ++copy)
            for (int i = 0; i < idx.count(d); ++i) {
                const std::string n = idx.name(d, i);
                const std::string gn = copy == 0 ? U(n) : V(n);
                const char* role = copy == 0 ? "iota0" : "iota1";
                if (d == 0) {
                    c.add(gn, 0, {}, {}, role);
                } else {
                    auto side = [&](int eps) {
                        const std::string f = idx.name(d - 1, idx.face(d, i, eps, d - 1));
                        return c.gen(copy == 0 ? U(f) : V(f));
                    };
                    c.add(gn, d, side(0), side(1), role);
                }
            }
        for (int i = 0; i < idx.count(d); ++i) {
            const std::string n = idx.name(d, i);
            CellExpr x = c.gen(U(n)), y = c.gen(V(n));
            for (int j = 0; j < d; ++j) {
                const CellExpr fs = c.gen(C(idx.name(j, idx.face(d, i, 0, j))));
                const CellExpr ft = c.gen(C(idx.name(j, idx.face(d, i, 1, j))));
                x = whisker_after(c, j, x, ft);
                y = whisker_before(c, j, fs, y);
            }
            c.add(C(n), d + 1, x, y, "cylinder");
        }
    }
    c.check();

    CylGlobSum out{a, c, {}, {}};
    const DimensionTable tbl = tree_to_table(a);
    for (int l = 0; l < static_cast<int>(tbl.tops.size()); ++l) {
        const int i = tbl.tops[l];
        const ThetaMap g = globe_inclusion(a, l);
        GlobeCopy copy{l, i, {}};
        for (int j = 0; j < i; ++j)
            for (int eps = 0; eps < 2; ++eps) {
                const std::string n = idx.name(j, idx.of_map(compose(globe_face(j, i, eps), g)));
                copy.map[face_name("A", eps, j)] = U(n);
                copy.map[face_name("B", eps, j)] = V(n);
                copy.map[(eps == 0 ? "Fs" : "Ft") + num(j)] = C(n);
            }
        const std::string n = idx.name(i, idx.of_map(g));
        copy.map["A"] = U(n);
        copy.map["B"] = V(n);
        copy.map["F"] = C(n);
        out.globes.push_back(std::move(copy));
    }

    const Blocks bl(a);
    const int p = bl.p();
    auto gen = [&](const std::string& n) { return c.gen(n); };
    auto post = [&](const std::string& cell, int g) { return whisker_after(c, 0, gen(cell), gen(C(bl.x(g)))); };
    auto pre = [&](int g, const std::string& cell) { return whisker_before(c, 0, gen(C(bl.x(g))), gen(cell)); };
    auto block = [&](int q, bool u, std::vector<CellExpr>& cells) {
        for (const auto& n : bl.globes(q)) cells.push_back(gen(u ? U(n) : V(n)));
    };
    for (const auto& e : linearization(a)) {
        std::vector<CellExpr> cells;
        const int h = e.height;
        if (h == 1) {
            const int g = e.sector.gap;
            for (int q = 1; q <= g; ++q) block(q, true, cells);
            cells.push_back(gen(C(bl.x(g))));
            for (int q = g + 1; q <= p; ++q) block(q, false, cells);
        } else {
            const int q = e.sector.parent[0] + 1;
            for (int b = 1; b < q; ++b) block(b, true, cells);
            if (h == 2) {
                const int r = e.sector.gap, m = bl.m(q);
                for (int j = 1; j <= r; ++j) cells.push_back(post(U(bl.E(q, j)), q));
                cells.push_back(gen(C(bl.e(q, r))));
                for (int j = r + 1; j <= m; ++j) cells.push_back(pre(q - 1, V(bl.E(q, j))));
            } else {
                const int r = e.sector.parent[1] + 1, m = bl.m(q);
                for (int j = 1; j < r; ++j) cells.push_back(post(U(bl.E(q, j)), q));
                cells.push_back(gen(C(bl.E(q, r))));
                for (int j = r + 1; j <= m; ++j) cells.push_back(pre(q - 1, V(bl.E(q, j))));
            }
            for (int b = q + 1; b <= p; ++b) block(b, false, cells);
        }
        c.check_tuple(e.result, cells);
        out.inclusions.push_back({e, std::move(cells)});
    }
    return out;
}

const char* coherence_name(CoherenceKind k) {
    switch (k) {
    case CoherenceKind::Psi: return "Psi";
    case CoherenceKind::Phi: return "Phi";
    case CoherenceKind::Theta: return "Theta";
    }
    return "?";
}

namespace {

std::string glit(int i) { return "g" + num(i); }

std::string lit_after(int dim, const std::string& x, const std::string& g) {
    return dim == 1 ? "c1<" + x + "," + g + ">" : whisker_right_name(0, dim) + "<" + x + "," + g + ">";
}
std::string lit_before(int dim, const std::string& f, const std::string& x) {
    return dim == 1 ? "c1<" + f + "," + x + ">" : whisker_left_name(0, dim) + "<" + f + "," + x + ">";
}

// The chosen composite of 1-cells fs, a cell `core` of dimension `dim`, and 1-cells gs:
// right whiskers innermost in order, then left whiskers from the nearest outwards.
std::string gamma_lit(const std::vector<std::string>& fs, const std::string& core, int dim,
                      const std::vector<std::string>& gs) {
    std::string x = core;
    for (const auto& g : gs) x = lit_after(dim, x, g);
    for (auto it = fs.rbegin(); it != fs.rend(); ++it) x = lit_before(dim, *it, x);
    return x;
}

std::vector<std::string> glits(int from, int to) {
    std::vector<std::string> out;
    for (int i = from; i <= to; ++i) out.push_back(glit(i));
    return out;
}

Tree leaves_around(int q, const std::vector<Tree>& middle, int k) {
    Tree t;
    for (int i = 0; i < q; ++i) t.children.push_back(Tree{});
    for (const auto& m : middle) t.children.push_back(m);
    for (int i = 0; i < k; ++i) t.children.push_back(Tree{});
    return t;
}

Tree suspend_n(Tree t, int m) {
    for (int i = 0; i < m; ++i) t = suspend(t);
    return t;
}

} // namespace

CoherencePair coherence_boundary(CoherenceKind kind, const std::vector<int>& indices, int level,
                                 std::shared_ptr<const TheoryPresentation> th) {
    th = resolve(std::move(th));
    for (int i : indices)
        if (i < 0) throw DomainError("coherence indices must be non-negative");
    if (level < 0) throw DomainError("coherence level must be non-negative");
    CoherencePair out{kind, indices, level, {}, {}, {}};
    std::string first, second;
    int top = 0;
    if (kind == CoherenceKind::Psi) {
        if (indices.size() != 2) throw DomainError("Psi takes indices (m, k)");
        const int m = indices[0], k = indices[1], dim = level + 1;
        top = dim;
        if (dim > th->n) throw DomainError("Psi at level " + num(level) + " needs cells of dimension " + num(dim) +
                                           " > n = " + num(th->n));
        out.target = leaves_around(m, {globe(level)}, k);
        const std::string alpha = glit(m + 1);
        const auto fs = glits(1, m), gs = glits(m + 2, m + 1 + k);
        if (m > 0)
            first = gamma_lit({fs.begin(), fs.end() - 1}, lit_before(dim, fs.back(), alpha), dim, gs);
        else
            first = gamma_lit(fs, alpha, dim, gs);
        if (k > 0)
            second = gamma_lit(fs, lit_after(dim, alpha, gs.front()), dim, {gs.begin() + 1, gs.end()});
        else
            second = gamma_lit(fs, alpha, dim, gs);
    } else {
        if (indices.size() != 3) throw DomainError(std::string(coherence_name(kind)) + " takes indices (q, m, k)");
        const int q = indices[0], m = indices[1], k = indices[2], n = level;
        if (m < 1) throw DomainError(std::string(coherence_name(kind)) + " needs m >= 1");
        if (n < 1) throw DomainError(std::string(coherence_name(kind)) + " needs level >= 1");
        const int dim = m + n;
        top = dim;
        if (dim > th->n) throw DomainError(std::string(coherence_name(kind)) + " needs cells of dimension " + num(dim) +
                                           " > n = " + num(th->n));
        const bool phi = kind == CoherenceKind::Phi;
        Tree pair;
        pair.children = phi ? std::vector<Tree>{Tree{}, globe(n - 1)} : std::vector<Tree>{globe(n - 1), Tree{}};
        const Tree block = suspend_n(pair, m);
        out.target = leaves_around(q, block.children, k);
        const std::string b = glit(phi ? q + 1 : q + 2), alpha = glit(phi ? q + 2 : q + 1);
        const auto fs = glits(1, q), gs = glits(q + 3, q + 2 + k);
        auto glue = [&](const std::string& x, const std::string& y) {
            if (n == 1) return "c" + num(m + 1) + "<" + x + "," + y + ">";
            return (phi ? whisker_left_name(m, n) : whisker_right_name(m, n)) + "<" + x + "," + y + ">";
        };
        if (phi) {
            first = gamma_lit(fs, glue(b, alpha), dim, gs);
            second = glue(gamma_lit(fs, b, m + 1, gs), gamma_lit(fs, alpha, dim, gs));
        } else {
            first = gamma_lit(fs, glue(alpha, b), dim, gs);
            second = glue(gamma_lit(fs, alpha, dim, gs), gamma_lit(fs, b, m + 1, gs));
        }
    }
    out.first = parse_term(*th, first, globe(top), out.target);
    out.second = parse_term(*th, second, globe(top), out.target);
    return out;
}

std::string case_tag(Klass k) {
    switch (k) {
    case Klass::H1Right: return "CYL1";
    case Klass::H1Left: return "CYL2";
    case Klass::H1Mid: return "CYL3";
    case Klass::H2OverEdge: return "CYL4";
    case Klass::H2Max: return "CYL5";
    case Klass::H2Min: return "CYL6";
    case Klass::H2Mid: return "CYL7";
    case Klass::H3: return "CYL8";
    }
    return "?";
}

bool same_composite(const StackEdge& a, const StackEdge& b) {
    if (a.outer_pre != b.outer_pre || a.outer_post != b.outer_post || a.blocks.size() != b.blocks.size()) return false;
    for (std::size_t i = 0; i < a.blocks.size(); ++i) {
        std::vector<StackAtom> x, y;
        for (const auto& g : a.blocks[i]) x.insert(x.end(), g.begin(), g.end());
        for (const auto& g : b.blocks[i]) y.insert(y.end(), g.begin(), g.end());
        if (x != y) return false;
    }
    return true;
}

std::string to_string(const StackEdge& e) {
    std::string s;
    if (!e.outer_post.empty()) s += e.outer_post + " ";
    s += "rho(";
    for (std::size_t b = 0; b < e.blocks.size(); ++b) {
        if (b) s += " | ";
        for (std::size_t g = 0; g < e.blocks[b].size(); ++g) {
            if (g) s += ", ";
            const auto& grp = e.blocks[b][g];
            if (grp.size() > 1) s += "[";
            for (std::size_t i = 0; i < grp.size(); ++i) {
                if (i) s += " ; ";
                const auto& a = grp[i];
                if (!a.post.empty()) s += a.post + " ";
                s += a.cell;
                if (!a.pre.empty()) s += " " + a.pre;
            }
            if (grp.size() > 1) s += "]";
        }
    }
    s += ")";
    if (!e.outer_pre.empty()) s += " " + e.outer_pre;
    return s;
}

namespace {

CellExpr atom_expr(const Computad& c, const StackAtom& a) {
    CellExpr x = c.gen(a.cell);
    if (!a.post.empty()) x = whisker_after(c, 0, x, c.gen(a.post));
    if (!a.pre.empty()) x = whisker_before(c, 0, c.gen(a.pre), x);
    return x;
}

StackGroup one(const std::string& cell, const std::string& pre = {}, const std::string& post = {}) {
    return {StackAtom{pre, cell, post}};
}

// Sectors are moved to the surviving ancestor when their parent is absent, and clamped.
Sector transport_sector(const Tree& t, Sector s) {
    auto addressable = [&](const Path& p) {
        const Tree* cur = &t;
        for (int i : p) {
            if (i < 0 || static_cast<std::size_t>(i) >= cur->children.size()) return false;
            cur = &cur->children[i];
        }
        return true;
    };
    while (!addressable(s.parent)) {
        s.gap = s.parent.back();
        s.parent.pop_back();
    }
    s.gap = std::min(s.gap, static_cast<int>(subtree(t, s.parent).arity()));
    return s;
}

// t -> insert_leaf(t, s) sending the cell under the new vertex to its source or target.
ThetaMap insertion_face(const Tree& t, const Sector& s, int eps) {
    if (s.parent.empty()) throw DomainError("no face maps for a vertex inserted at height 1");
    std::function<ThetaMap(const Tree&, std::size_t)> rec = [&](const Tree& node, std::size_t depth) -> ThetaMap {
        if (depth == s.parent.size()) {
            if (!node.is_leaf()) throw DomainError("face maps need the new vertex to be the only one over its parent");
            return ThetaMap{node, Tree{{Tree{}}}, {eps}, {}};
        }
        ThetaMap f{node, node, {}, {}};
        Tree tgt = node;
        for (int i = 0; i <= static_cast<int>(node.arity()); ++i) f.phi.push_back(i);
        for (int i = 0; i < static_cast<int>(node.arity()); ++i) {
            if (i == s.parent[depth]) {
                ThetaMap sub = rec(node.children[i], depth + 1);
                tgt.children[i] = sub.tgt;
                f.comps.push_back(std::move(sub));
            } else {
                f.comps.push_back(identity(node.children[i]));
            }
        }
        f.tgt = tgt;
        return f;
    };
    ThetaMap f = rec(t, 0);
    validate(f);
    return f;
}

StackSide rho_star(const ThetaMap& rho, const Sector& sector, int eps, const std::string& display) {
    const HGFactorization hf = hg_factorize(compose(globe_face(1, 2, eps), rho));
    const ThetaMap& rho_e = hf.homogeneous;
    const Sector s = transport_sector(rho_e.tgt, sector);
    const ThetaMap ds = insertion_face(rho_e.tgt, s, 0), dt = insertion_face(rho_e.tgt, s, 1);
    ThetaMap bs = compose(rho_e, ds), bt = compose(rho_e, dt);
    auto ext = filler(bs, bt);
    if (!ext) throw DomainError("no extension of (d_sigma rho_e, d_tau rho_e) exists");
    return StackSide{eps == 0 ? "rho*_sigma" : "rho*_tau", display, ext, bs, bt};
}

StackSide constraint(const std::string& display) { return StackSide{"constraint", display, {}, {}, {}}; }

} // namespace

StackEdge stack_first_top(const Tree& a) {
    const Blocks bl(a);
    StackEdge e;
    e.outer_post = C(bl.x(bl.p()));
    e.pattern = "C_t rho(U)";
    if (bl.p() == 0) e.blocks.push_back({one(U(bl.x(0)))});
    for (int q = 1; q <= bl.p(); ++q) {
        e.blocks.emplace_back();
        for (const auto& n : bl.globes(q)) e.blocks.back().push_back(one(U(n)));
    }
    return e;
}

StackEdge stack_last_bottom(const Tree& a) {
    const Blocks bl(a);
    StackEdge e;
    e.outer_pre = C(bl.x(0));
    e.pattern = "rho(V) C_s";
    if (bl.p() == 0) e.blocks.push_back({one(V(bl.x(0)))});
    for (int q = 1; q <= bl.p(); ++q) {
        e.blocks.emplace_back();
        for (const auto& n : bl.globes(q)) e.blocks.back().push_back(one(V(n)));
    }
    return e;
}

void check_edge(const Computad& c, const Tree& a, const StackEdge& e) {
    const Blocks bl(a);
    const int p = bl.p();
    auto fail = [&](const std::string& what) { throw DomainError("ill-typed edge " + to_string(e) + ": " + what); };
    if (p == 0) {
        if (e.blocks.size() != 1 || e.blocks[0].size() != 1 || e.blocks[0][0].size() != 1) fail("expected one 0-cell");
        const CellExpr x = atom_expr(c, e.blocks[0][0][0]);
        if (!e.outer_pre.empty() && !(c.tgt(c.gen(e.outer_pre)) == x)) fail("outer whisker does not meet the 0-cell");
        if (!e.outer_post.empty() && !(c.src(c.gen(e.outer_post)) == x)) fail("outer whisker does not meet the 0-cell");
        return;
    }
    if (static_cast<int>(e.blocks.size()) != p) fail("wrong number of blocks");
    std::optional<CellExpr> prev_end;
    for (int q = 1; q <= p; ++q) {
        const auto& blk = e.blocks[q - 1];
        const int m = bl.m(q);
        if (static_cast<int>(blk.size()) != std::max(1, m)) fail("block " + num(q) + " is not shaped like A");
        std::vector<CellExpr> cells;
        for (const auto& g : blk) {
            if (g.empty()) fail("empty group");
            for (const auto& at : g) cells.push_back(atom_expr(c, at));
        }
        const int want = m == 0 ? 1 : 2;
        for (const auto& x : cells)
            if (x.dim != want) fail("block " + num(q) + " has a cell of dimension " + num(x.dim));
        if (m == 0 && cells.size() != 1) fail("a 1-dimensional block holds a single cell");
        for (std::size_t i = 0; i + 1 < cells.size(); ++i)
            if (!(c.tgt(cells[i]) == c.src(cells[i + 1]))) fail("block " + num(q) + " is not vertically composable");
        const CellExpr start = c.face(cells.front(), 0, 0), end = c.face(cells.back(), 1, 0);
        if (q == 1 && !e.outer_pre.empty() && !(c.tgt(c.gen(e.outer_pre)) == start)) fail("outer whisker mismatch");
        if (prev_end && !(*prev_end == start)) fail("blocks " + num(q - 1) + " and " + num(q) + " do not meet");
        prev_end = end;
    }
    if (!e.outer_post.empty() && !(c.src(c.gen(e.outer_post)) == *prev_end)) fail("outer whisker mismatch");
}

std::vector<CellExpr> edge_boundary(const Computad& c, const StackEdge& e, int eps) {
    std::vector<CellExpr> out;
    if (!e.outer_pre.empty()) out.push_back(c.gen(e.outer_pre));
    for (const auto& blk : e.blocks) {
        std::vector<CellExpr> cells;
        for (const auto& g : blk)
            for (const auto& at : g) cells.push_back(atom_expr(c, at));
        const CellExpr& x = eps == 0 ? cells.front() : cells.back();
        out.push_back(x.dim == 2 ? (eps == 0 ? c.src(x) : c.tgt(x)) : x);
    }
    if (!e.outer_post.empty()) out.push_back(c.gen(e.outer_post));
    return out;
}

Stack stack(const ThetaMap& rho, std::shared_ptr<const TheoryPresentation> th) {
    th = resolve(std::move(th));
    const int k = source_dim(rho);
    if (k != 1 && k != 2) throw DomainError("stack: rho must be a map out of D_1 or D_2");
    if (!is_homogeneous(rho)) throw DomainError("stack: rho " + to_string(rho) + " is not homogeneous");
    const Tree& a = rho.tgt;
    if (dim(a) > k) throw DomainError("stack: dim(A) exceeds k");
    const CylGlobSum cg = cyl_glob_sum(a, th);
    const Blocks bl(a);
    const int p = bl.p();
    auto cx = [&](int g) { return C(bl.x(g)); };
    auto ublock = [&](int q, const std::string& post = {}) {
        std::vector<StackGroup> out;
        for (const auto& n : bl.globes(q)) out.push_back(one(U(n), {}, post));
        return out;
    };
    auto vblock = [&](int q, const std::string& pre = {}) {
        std::vector<StackGroup> out;
        for (const auto& n : bl.globes(q)) out.push_back(one(V(n), pre));
        return out;
    };
    // U on blocks < q, V on blocks > q, `mid` in block q.
    auto edge = [&](int q, std::vector<StackGroup> mid, std::string pattern) {
        StackEdge e;
        for (int b = 1; b < q; ++b) e.blocks.push_back(ublock(b));
        e.blocks.push_back(std::move(mid));
        for (int b = q + 1; b <= p; ++b) e.blocks.push_back(vblock(b));
        e.pattern = std::move(pattern);
        return e;
    };
    Stack out{rho, k, {}};
    int index = 0;
    for (const auto& el : linearization(a)) {
        StackSquare sq;
        sq.index = index++;
        sq.case_tag = case_tag(el.klass);
        sq.element = el;
        sq.cyl_dim = k - 1;
        const bool sides = k == 2;
        switch (el.klass) {
        case Klass::H1Right:
            sq.top = stack_first_top(a);
            if (p == 0) {
                sq.bottom = stack_last_bottom(a);
            } else {
                sq.bottom = edge(p, ublock(p, cx(p)), "rho(U_<" + num(p) + ", C_t U_" + num(p) + ")");
            }
            if (sides) sq.left = sq.right = constraint("~");
            break;
        case Klass::H1Left: {
            auto mid = vblock(1, cx(0));
            sq.top = edge(1, mid, "rho(V_1 C_s, V_>1)");
            sq.bottom = stack_last_bottom(a);
            if (sides) sq.left = sq.right = constraint("~");
            break;
        }
        case Klass::H1Mid: {
            const int g = el.sector.gap;
            sq.top = edge(g + 1, vblock(g + 1, cx(g)),
                          "rho(U_<=" + num(g) + ", V_" + num(g + 1) + " a, V_>" + num(g + 1) + ")");
            sq.bottom = edge(g, ublock(g, cx(g)), "rho(U_<" + num(g) + ", a U_" + num(g) + ", V_>" + num(g) + ")");
            if (sides) sq.left = sq.right = constraint("~");
            break;
        }
        case Klass::H2OverEdge: {
            const int q = el.sector.parent[0] + 1;
            sq.top = edge(q, {one(U(bl.e(q, 0)), {}, cx(q))}, "rho(U_<" + num(q) + ", V_>" + num(q) + " s(F))");
            sq.bottom = edge(q, {one(V(bl.e(q, 0)), cx(q - 1))}, "rho(U_<" + num(q) + ", V_>" + num(q) + " t(F))");
            if (sides) {
                sq.left = rho_star(rho, el.sector, 0, "rho*_sigma(d_sigma U_<" + num(q) + ", d_sigma V_>" + num(q) + " F)");
                sq.right = rho_star(rho, el.sector, 1, "rho*_tau(d_tau U_<" + num(q) + ", d_tau V_>" + num(q) + " F)");
            }
            break;
        }
        case Klass::H2Max: {
            const int q = el.sector.parent[0] + 1, m = bl.m(q);
            sq.top = edge(q, ublock(q, cx(q)), "rho(U_<" + num(q) + ", a U_" + num(q) + ", V_>" + num(q) + ")");
            auto mid = ublock(q, cx(q));
            mid.back().push_back(StackAtom{{}, C(bl.e(q, m)), {}});
            sq.bottom = edge(q, mid, "rho(U_<" + num(q) + ", alpha U_" + num(q) + ", V_>" + num(q) + ")");
            sq.source_degenerate = true;
            sq.right = rho_star(rho, el.sector, 1,
                                "rho*_tau(d_tau U_<" + num(q) + ", alpha, d_tau V_>" + num(q) + ")");
            break;
        }
        case Klass::H2Min: {
            const int q = el.sector.parent[0] + 1;
            auto mid = vblock(q, cx(q - 1));
            mid.front().insert(mid.front().begin(), StackAtom{{}, C(bl.e(q, 0)), {}});
            sq.top = edge(q, mid, "rho(U_<" + num(q) + ", V_" + num(q) + " alpha, V_>" + num(q) + ")");
            sq.bottom = edge(q, vblock(q, cx(q - 1)), "rho(U_<" + num(q) + ", V_" + num(q) + " a, V_>" + num(q) + ")");
            sq.target_degenerate = true;
            sq.left = rho_star(rho, el.sector, 0,
                               "rho*_sigma(d_sigma U_<" + num(q) + ", alpha, d_sigma V_>" + num(q) + ")");
            break;
        }
        case Klass::H2Mid: {
            const int q = el.sector.parent[0] + 1, m = bl.m(q), r = el.sector.gap;
            std::vector<StackAtom> atoms;
            for (int j = 1; j <= r; ++j) atoms.push_back({{}, U(bl.E(q, j)), cx(q)});
            atoms.push_back({{}, C(bl.e(q, r)), {}});
            for (int j = r + 1; j <= m; ++j) atoms.push_back({cx(q - 1), V(bl.E(q, j)), {}});
            std::vector<StackGroup> top, bottom;
            for (int i = 0; i <= m; ++i) {
                if (i == r + 1) top.back().push_back(atoms[i]);
                else top.push_back({atoms[i]});
                if (i == r) bottom.back().push_back(atoms[i]);
                else bottom.push_back({atoms[i]});
            }
            const std::string rs = num(r), qn = num(q);
            sq.top = edge(q, top, "rho(U_<" + qn + ", U_" + qn + "^<=" + rs + ", V_" + qn + "^>=" + rs + " alpha, V_>" + qn + ")");
            sq.bottom = edge(q, bottom, "rho(U_<" + qn + ", alpha U_" + qn + "^<=" + rs + ", V_" + qn + "^>=" + rs + ", V_>" + qn + ")");
            sq.source_degenerate = sq.target_degenerate = true;
            break;
        }
        case Klass::H3: {
            const int q = el.sector.parent[0] + 1, m = bl.m(q), r = el.sector.parent[1] + 1;
            std::vector<StackGroup> top, bottom;
            for (int j = 1; j < r; ++j) {
                top.push_back(one(U(bl.E(q, j)), {}, cx(q)));
                bottom.push_back(one(U(bl.E(q, j)), {}, cx(q)));
            }
            top.push_back({StackAtom{{}, U(bl.E(q, r)), cx(q)}, StackAtom{{}, C(bl.e(q, r)), {}}});
            bottom.push_back({StackAtom{{}, C(bl.e(q, r - 1)), {}}, StackAtom{cx(q - 1), V(bl.E(q, r)), {}}});
            for (int j = r + 1; j <= m; ++j) {
                top.push_back(one(V(bl.E(q, j)), cx(q - 1)));
                bottom.push_back(one(V(bl.E(q, j)), cx(q - 1)));
            }
            const std::string rs = num(r), qn = num(q);
            sq.top = edge(q, top, "rho(U_<" + qn + ", U_" + qn + "^<" + rs + ", s(F), V_" + qn + "^>" + rs + " a, V_>" + qn + ")");
            sq.bottom = edge(q, bottom, "rho(U_<" + qn + ", U_" + qn + "^<" + rs + ", t(F), V_" + qn + "^>" + rs + " a, V_>" + qn + ")");
            sq.source_degenerate = sq.target_degenerate = true;
            break;
        }
        }
        check_edge(cg.computad, a, sq.top);
        check_edge(cg.computad, a, sq.bottom);
        out.squares.push_back(std::move(sq));
    }
    for (std::size_t i = 0; i + 1 < out.squares.size(); ++i)
        if (!same_composite(out.squares[i].bottom, out.squares[i + 1].top))
            throw std::logic_error("stack squares " + num(static_cast<int>(i)) + " and " + num(static_cast<int>(i + 1)) +
                                " do not share an edge");
    return out;
}

CylinderRecord record(const StackSquare& s) {
    CylinderRecord r{s.top, s.bottom, s.p(), s.q(), {}, {}, 1};
    if (s.left && !s.source_degenerate) r.source.push_back(num(s.index) + ":" + s.left->label);
    if (s.right && !s.target_degenerate) r.target.push_back(num(s.index) + ":" + s.right->label);
    return r;
}

CylinderRecord vcompose_meta(const std::vector<CylinderRecord>& parts) {
    if (parts.empty()) throw DomainError("vcompose_meta: nothing to compose");
    CylinderRecord out = parts.front();
    for (std::size_t i = 1; i < parts.size(); ++i) {
        const CylinderRecord& x = parts[i];
        if (!same_composite(out.bottom, x.top))
            throw DomainError("vcompose_meta: incompatible adjacency between parts " + num(static_cast<int>(i - 1)) +
                              " and " + num(static_cast<int>(i)) + ": " + to_string(out.bottom) + " vs " +
                              to_string(x.top));
        out.bottom = x.bottom;
        out.p = std::min(out.p, x.p);
        out.q = std::min(out.q, x.q);
        out.source.insert(out.source.end(), x.source.begin(), x.source.end());
        out.target.insert(out.target.end(), x.target.begin(), x.target.end());
        out.count += x.count;
    }
    return out;
}

CylinderRecord vcompose_meta(const std::vector<StackSquare>& squares) {
    std::vector<CylinderRecord> parts;
    for (const auto& s : squares) parts.push_back(record(s));
    return vcompose_meta(parts);
}

ModPresentation modification_presentation(int k, std::shared_ptr<const TheoryPresentation> th) {
    th = resolve(std::move(th));
    check_range(*th, k, 2, "modification_presentation");
    const CylPresentation cyl = build_cyl(th, k, kNone, kNone);
    Renaming xi0, xi1;
    for (const auto& g : cyl.computad.generators()) {
        xi0[g.name] = g.name;
        const bool shared = g.role == "boundary" || g.role == "iota0" || g.role == "iota1";
        xi1[g.name] = shared ? g.name : g.name + "'";
    }
    Computad c(th);
    copy_generators(cyl.computad, c, xi0);
    copy_generators(cyl.computad, c, xi1);
    ModPresentation out{k, c, xi0, xi1, {}, {}, {}, {}};
    Computad& m = out.computad;
    auto P = [&](const std::string& s) { return m.parse(s); };
    if (k == 0) {
        m.add("Theta", 2, m.gen("F"), m.gen("F'"), "modification filler");
        out.top = "Theta";
    } else if (k == 1) {
        m.add("Theta_s", "Fs0", "Fs0'", "modification side");
        m.add("Theta_t", "Ft0'", "Ft0", "modification side");
        const CellExpr src = vertical_composite(m, {P("wl0_2<A,Theta_t>"), m.gen("F"), P("wr0_2<Theta_s,B>")});
        m.add("Theta", 3, src, m.gen("F'"), "modification filler");
        out.top = "Theta";
    } else {
        m.add("Theta_s", "Fs0", "Fs0'", "modification side");
        m.add("Theta_t", "Ft0'", "Ft0", "modification side");
        m.add("Upsilon", "c2<wr0_2<A,Ft0'>,wl0_2<A_t1,Theta_t>>", "c2<wl0_2<A_s1,Theta_t>,wr0_2<A,Ft0>>", "chosen");
        m.add("Gamma", "c2<wl0_2<Fs0,B>,wr0_2<Theta_s,B_t1>>", "c2<wr0_2<Theta_s,B_s1>,wl0_2<Fs0',B>>", "chosen");
        const CellExpr es = vertical_composite(m, {P("wl0_2<A_s1,Theta_t>"), m.gen("Fs1"), P("wr0_2<Theta_s,B_s1>")});
        const CellExpr et = vertical_composite(m, {P("wl0_2<A_t1,Theta_t>"), m.gen("Ft1"), P("wr0_2<Theta_s,B_t1>")});
        const CellExpr a1 = P("wr0_2<A,Ft0'>"), b1 = P("wl0_2<Fs0',B>");
        m.add("Composite", 3, m.apply("c2", {a1, et}), m.apply("c2", {es, b1}), "chosen");
        m.add("Theta_s1", 3, es, m.gen("Fs1'"), "modification side");
        m.add("Theta_t1", 3, m.gen("Ft1'"), et, "modification side");
        const CellExpr src = vertical_composite(
            m, {m.apply("wl1_2", {a1, m.gen("Theta_t1")}), m.gen("Composite"), m.apply("wr1_2", {m.gen("Theta_s1"), b1})});
        m.add("Theta", 4, src, m.gen("F'"), 4 > th->n ? "modification filler (equation)" : "modification filler");
        out.top = "Theta";
        out.chosen = {"Upsilon", "Gamma", "Composite"};
    }
    if (k >= 1) {
        out.theta_s = "Theta_s";
        out.theta_t = "Theta_t";
    }
    m.check();
    return out;
}

namespace {

nlohmann::json idx_json(int v) { return v == kNone ? nlohmann::json("none") : nlohmann::json(v); }

nlohmann::json edge_json(const StackEdge& e) {
    return {{"pattern", e.pattern}, {"cells", to_string(e)}};
}

nlohmann::json side_json(const std::optional<StackSide>& s, bool degenerate) {
    if (degenerate) return "degenerate";
    if (!s) return nullptr;
    nlohmann::json j{{"label", s->label}, {"display", s->display}};
    if (s->extension) {
        j["extension"] = to_string(*s->extension);
        j["boundary"] = {to_string(*s->boundary_src), to_string(*s->boundary_tgt)};
    }
    return j;
}

} // namespace

nlohmann::json cyl_to_json(const CylPresentation& c) {
    nlohmann::json j = computad_to_json(c.computad);
    j["k"] = c.k;
    j["iota0"] = c.iota0;
    j["iota1"] = c.iota1;
    j["top"] = c.top;
    j["p"] = idx_json(c.p);
    j["q"] = idx_json(c.q);
    j["source_cylinder"] = c.source_cylinder;
    j["target_cylinder"] = c.target_cylinder;
    return j;
}

nlohmann::json glob_sum_to_json(const CylGlobSum& c) {
    nlohmann::json j = computad_to_json(c.computad);
    j["tree"] = to_string(c.a);
    nlohmann::json globes = nlohmann::json::array();
    for (const auto& g : c.globes) globes.push_back({{"leaf", g.leaf}, {"dim", g.dim}, {"map", g.map}});
    j["globes"] = globes;
    nlohmann::json inc = nlohmann::json::array();
    for (const auto& i : c.inclusions) {
        nlohmann::json cells = nlohmann::json::array();
        for (const auto& x : i.cells) cells.push_back(to_string(x));
        inc.push_back({{"tree", to_string(i.element.result)}, {"klass", klass_name(i.element.klass)}, {"cells", cells}});
    }
    j["inclusions"] = inc;
    return j;
}

nlohmann::json coherence_to_json(const CoherencePair& c) {
    return {{"kind", coherence_name(c.kind)}, {"indices", c.indices}, {"level", c.level},
            {"target", to_string(c.target)}, {"first", to_string(c.first)}, {"second", to_string(c.second)}};
}

nlohmann::json stack_to_json(const Stack& s) {
    nlohmann::json squares = nlohmann::json::array();
    for (const auto& sq : s.squares) {
        squares.push_back({{"index", sq.index},
                           {"case", sq.case_tag},
                           {"klass", klass_name(sq.element.klass)},
                           {"tree", to_string(sq.element.result)},
                           {"cylinder_dim", sq.cyl_dim},
                           {"p", idx_json(sq.p())},
                           {"q", idx_json(sq.q())},
                           {"top", edge_json(sq.top)},
                           {"bottom", edge_json(sq.bottom)},
                           {"left", side_json(sq.left, sq.source_degenerate)},
                           {"right", side_json(sq.right, sq.target_degenerate)}});
    }
    const CylinderRecord r = vcompose_meta(s.squares);
    return {{"rho", to_string(s.rho)},
            {"k", s.k},
            {"squares", squares},
            {"composite",
             {{"top", edge_json(r.top)},
              {"bottom", edge_json(r.bottom)},
              {"p", idx_json(r.p)},
              {"q", idx_json(r.q)},
              {"source", r.source},
              {"target", r.target}}}};
}

nlohmann::json modification_to_json(const ModPresentation& m) {
    nlohmann::json j = computad_to_json(m.computad);
    j["k"] = m.k;
    j["xi0"] = m.xi0;
    j["xi1"] = m.xi1;
    j["theta_s"] = m.theta_s;
    j["theta_t"] = m.theta_t;
    j["top"] = m.top;
    j["chosen"] = m.chosen;
    return j;
}

std::string stack_to_dot(const Stack& s) {
    auto esc = [](std::string x) {
        std::string out;
        for (char ch : x) {
            if (ch == '"' || ch == '\\') out += '\\';
            out += ch;
        }
        return out;
    };
    std::ostringstream os;
    os << "digraph stack {\n  rankdir=TB;\n  node [shape=box,fontname=\"monospace\"];\n";
    for (std::size_t i = 0; i <= s.squares.size(); ++i) {
        const StackEdge& e = i < s.squares.size() ? s.squares[i].top : s.squares.back().bottom;
        os << "  e" << i << " [shape=plaintext,label=\"" << esc(to_string(e)) << "\"];\n";
    }
    for (std::size_t i = 0; i < s.squares.size(); ++i) {
        const auto& sq = s.squares[i];
        std::string label = sq.case_tag + " " + klass_name(sq.element.klass);
        if (sq.source_degenerate) label += "\\nsource degenerate";
        if (sq.target_degenerate) label += "\\ntarget degenerate";
        os << "  s" << i << " [label=\"" << esc(label) << "\"];\n";
        os << "  e" << i << " -> s" << i << ";\n  s" << i << " -> e" << i + 1 << ";\n";
    }
    os << "}\n";
    return os.str();
}

} // namespace globwb
