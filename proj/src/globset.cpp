#include "globwb/globset.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>

#include "globwb/error.hpp"

namespace globwb {

FinGlobSet::FinGlobSet(int truncation) : n(truncation) {
    if (n < 0) throw DomainError("negative truncation");
    count.assign(n + 1, 0);
    src.assign(n + 1, {});
    tgt.assign(n + 1, {});
    names.assign(n + 1, {});
}

int FinGlobSet::add_cell(int k, int s, int t, std::string nm) {
    if (k < 0 || k > n) throw DomainError("cell dimension outside truncation");
    if (k > 0) {
        if (s < 0 || s >= count[k - 1] || t < 0 || t >= count[k - 1])
            throw DomainError("cell boundary out of range");
        src[k].push_back(s);
        tgt[k].push_back(t);
    }
    if (!nm.empty() || !names[k].empty()) {
        names[k].resize(count[k]);
        names[k].push_back(std::move(nm));
    }
    return count[k]++;
}

int FinGlobSet::total() const { return std::accumulate(count.begin(), count.end(), 0); }

std::string FinGlobSet::name(int k, int c) const {
    if (k <= n && c < static_cast<int>(names[k].size()) && !names[k][c].empty()) return names[k][c];
    return std::to_string(k) + ":" + std::to_string(c);
}

int FinGlobSet::src_to(int k, int c, int to) const {
    while (k > to) c = src[k--][c];
    return c;
}

int FinGlobSet::tgt_to(int k, int c, int to) const {
    while (k > to) c = tgt[k--][c];
    return c;
}

bool FinGlobSet::parallel(int k, int a, int b) const {
    if (k == 0) return true;
    return src[k][a] == src[k][b] && tgt[k][a] == tgt[k][b];
}

void validate(const FinGlobSet& x) {
    if (static_cast<int>(x.count.size()) != x.n + 1) throw DomainError("count vector size mismatch");
    for (int k = 1; k <= x.n; ++k) {
        if (static_cast<int>(x.src[k].size()) != x.count[k] || static_cast<int>(x.tgt[k].size()) != x.count[k])
            throw DomainError("source/target table size mismatch in dim " + std::to_string(k));
        for (int c = 0; c < x.count[k]; ++c) {
            if (x.src[k][c] < 0 || x.src[k][c] >= x.count[k - 1] || x.tgt[k][c] < 0 ||
                x.tgt[k][c] >= x.count[k - 1])
                throw DomainError("boundary out of range for cell " + x.name(k, c));
            if (k >= 2 && !x.parallel(k - 1, x.src[k][c], x.tgt[k][c]))
                throw DomainError("globularity fails at cell " + x.name(k, c));
        }
    }
}

FinGlobSet empty_globset(int n) { return FinGlobSet(n); }

FinGlobSet pad(const FinGlobSet& x, int n) {
    if (n < x.n) throw DomainError("cannot lower truncation by padding");
    FinGlobSet r = x;
    r.n = n;
    r.count.resize(n + 1, 0);
    r.src.resize(n + 1);
    r.tgt.resize(n + 1);
    r.names.resize(n + 1);
    return r;
}

void validate(const GlobMap& m) {
    if (m.dom.n != m.cod.n) throw DomainError("map between globular sets of different truncation");
    if (static_cast<int>(m.f.size()) != m.dom.n + 1) throw DomainError("map has wrong number of components");
    for (int k = 0; k <= m.dom.n; ++k) {
        if (static_cast<int>(m.f[k].size()) != m.dom.count[k]) throw DomainError("component size mismatch");
        for (int c = 0; c < m.dom.count[k]; ++c) {
            int y = m.f[k][c];
            if (y < 0 || y >= m.cod.count[k]) throw DomainError("map component out of range");
            if (k > 0 && (m.cod.src[k][y] != m.f[k - 1][m.dom.src[k][c]] ||
                          m.cod.tgt[k][y] != m.f[k - 1][m.dom.tgt[k][c]]))
                throw DomainError("map does not commute with boundaries at " + m.dom.name(k, c));
        }
    }
}

GlobMap identity_map(const FinGlobSet& x) {
    GlobMap m{x, x, {}};
    for (int k = 0; k <= x.n; ++k) {
        m.f.emplace_back(x.count[k]);
        std::iota(m.f[k].begin(), m.f[k].end(), 0);
    }
    return m;
}

GlobMap compose(const GlobMap& f, const GlobMap& g) {
    if (!(f.cod == g.dom)) throw DomainError("maps are not composable");
    GlobMap r{f.dom, g.cod, f.f};
    for (int k = 0; k <= f.dom.n; ++k)
        for (auto& v : r.f[k]) v = g.f[k][v];
    return r;
}

bool same_map(const GlobMap& a, const GlobMap& b) { return a.dom == b.dom && a.cod == b.cod && a.f == b.f; }

GlobMap pad(const GlobMap& m, int n) {
    GlobMap r{pad(m.dom, n), pad(m.cod, n), m.f};
    r.f.resize(n + 1);
    return r;
}

namespace {

struct Realized {
    std::vector<int> count;
    std::vector<std::vector<int>> src, tgt;
    std::vector<std::vector<CellRef>> refs;
};

Realized realize_rec(const Tree& t) {
    Realized r;
    const int arity = static_cast<int>(t.arity());
    r.count.push_back(arity + 1);
    r.src.emplace_back();
    r.tgt.emplace_back();
    r.refs.emplace_back();
    for (int g = 0; g <= arity; ++g) r.refs[0].push_back({{}, g});
    for (int i = 0; i < arity; ++i) {
        Realized c = realize_rec(t.children[i]);
        for (std::size_t d = 0; d < c.count.size(); ++d) {
            const std::size_t k = d + 1;
            if (r.count.size() <= k) {
                r.count.push_back(0);
                r.src.emplace_back();
                r.tgt.emplace_back();
                r.refs.emplace_back();
            }
            const int base_lower = (d == 0) ? 0 : r.count[k - 1] - c.count[d - 1];
            for (int x = 0; x < c.count[d]; ++x) {
                if (d == 0) {
                    r.src[k].push_back(i);
                    r.tgt[k].push_back(i + 1);
                } else {
                    r.src[k].push_back(base_lower + c.src[d][x]);
                    r.tgt[k].push_back(base_lower + c.tgt[d][x]);
                }
                CellRef ref = c.refs[d][x];
                ref.node.insert(ref.node.begin(), i);
                r.refs[k].push_back(std::move(ref));
            }
            r.count[k] += c.count[d];
        }
    }
    return r;
}

std::string ref_name(const CellRef& r) {
    std::string s = "/";
    for (std::size_t i = 0; i < r.node.size(); ++i) s += (i ? "." : "") + std::to_string(r.node[i]);
    return s + ":" + std::to_string(r.gap);
}

} // namespace

std::vector<std::vector<CellRef>> realize_cells(const Tree& t) { return realize_rec(t).refs; }

FinGlobSet realize(const Tree& t, int n) {
    Realized r = realize_rec(t);
    const int d = static_cast<int>(r.count.size()) - 1;
    if (n < 0) n = d;
    if (n < d) throw DomainError("truncation below the dimension of the tree");
    FinGlobSet x(n);
    for (int k = 0; k <= d; ++k)
        for (int c = 0; c < r.count[k]; ++c)
            x.add_cell(k, k ? r.src[k][c] : -1, k ? r.tgt[k][c] : -1, ref_name(r.refs[k][c]));
    return x;
}

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        // keep the smaller index as representative so results are reproducible
        if (a < b) parent[b] = a; else parent[a] = b;
    }
};

} // namespace

Colimit colimit(const std::vector<FinGlobSet>& objects, const std::vector<Arrow>& arrows) {
    int n = 0;
    for (const auto& o : objects) n = std::max(n, o.n);
    for (const auto& a : arrows) {
        if (a.from < 0 || a.to < 0 || a.from >= static_cast<int>(objects.size()) ||
            a.to >= static_cast<int>(objects.size()))
            throw DomainError("diagram arrow refers to a missing object");
        if (!(a.map.dom.count == objects[a.from].count) || !(a.map.cod.count == objects[a.to].count))
            throw DomainError("diagram arrow does not match its endpoints");
    }
    const std::size_t no = objects.size();
    std::vector<std::vector<int>> base(no, std::vector<int>(n + 1, 0));
    std::vector<int> total(n + 1, 0);
    for (std::size_t o = 0; o < no; ++o)
        for (int k = 0; k <= n; ++k) {
            base[o][k] = total[k];
            total[k] += objects[o].cells(k);
        }

    Colimit res;
    res.object = FinGlobSet(n);
    res.inj.resize(no);
    std::vector<std::vector<int>> cls(n + 1);
    for (int k = 0; k <= n; ++k) {
        UnionFind uf(total[k]);
        for (const auto& a : arrows) {
            if (k > a.map.dom.n) continue;
            for (int c = 0; c < a.map.dom.count[k]; ++c)
                uf.unite(base[a.from][k] + c, base[a.to][k] + a.map.f[k][c]);
        }
        // classes numbered in order of their minimal member
        std::vector<int> index(total[k], -1);
        cls[k].assign(total[k], -1);
        for (int g = 0; g < total[k]; ++g) {
            int r = uf.find(g);
            if (index[r] < 0) {
                std::size_t o = 0;
                // the last object whose block starts at or before g owns it
                while (o + 1 < no && base[o + 1][k] <= g) ++o;
                const int c = g - base[o][k];
                int s = -1, t = -1;
                if (k > 0) {
                    s = cls[k - 1][base[o][k - 1] + objects[o].src[k][c]];
                    t = cls[k - 1][base[o][k - 1] + objects[o].tgt[k][c]];
                }
                index[r] = res.object.add_cell(k, s, t, objects[o].name(k, c));
            }
            cls[k][g] = index[r];
        }
    }
    for (std::size_t o = 0; o < no; ++o) {
        GlobMap m{pad(objects[o], n), res.object, std::vector<std::vector<int>>(n + 1)};
        for (int k = 0; k <= n; ++k)
            for (int c = 0; c < objects[o].cells(k); ++c) m.f[k].push_back(cls[k][base[o][k] + c]);
        res.inj[o] = std::move(m);
    }
    validate(res.object);
    for (const auto& m : res.inj) validate(m);
    return res;
}

Colimit pushout(const GlobMap& f, const GlobMap& g) {
    if (!(f.dom == g.dom)) throw DomainError("pushout legs need a common domain");
    Colimit c = colimit({f.dom, f.cod, g.cod}, {{0, 1, f}, {0, 2, g}});
    // report only the two codomain injections
    return {c.object, {c.inj[1], c.inj[2]}};
}

GlobMap copair(const Colimit& c, const std::vector<GlobMap>& cocone) {
    if (cocone.size() != c.inj.size()) throw DomainError("cocone size mismatch");
    if (cocone.empty()) throw DomainError("empty cocone");
    const FinGlobSet& target = cocone[0].cod;
    const int n = c.object.n;
    GlobMap r{c.object, target, std::vector<std::vector<int>>(n + 1)};
    for (int k = 0; k <= n; ++k) r.f[k].assign(c.object.count[k], -1);
    for (std::size_t o = 0; o < cocone.size(); ++o) {
        if (!(cocone[o].cod == target)) throw DomainError("cocone legs have different targets");
        for (int k = 0; k <= n; ++k)
            for (int x = 0; x < c.inj[o].dom.cells(k); ++x) {
                int& slot = r.f[k][c.inj[o].f[k][x]];
                int v = cocone[o].f[k][x];
                if (slot >= 0 && slot != v) throw DomainError("cocone is not compatible");
                slot = v;
            }
    }
    validate(r);
    return r;
}

GlobMap sphere_inclusion(int k) {
    if (k < 0) throw DomainError("negative globe dimension");
    FinGlobSet s = sphere(k - 1, k);
    FinGlobSet d = realize(globe(k), k);
    GlobMap m{s, d, std::vector<std::vector<int>>(k + 1)};
    for (int j = 0; j < k; ++j) m.f[j] = {0, 1};
    validate(m);
    return m;
}

FinGlobSet sphere(int k, int n) {
    if (n < 0) n = std::max(k, 0);
    if (k > n) throw DomainError("sphere dimension above truncation");
    if (k < 0) return FinGlobSet(n);
    GlobMap incl = pad(sphere_inclusion(k), n);
    return pushout(incl, incl).object;
}

CoglobularFamily globe_family(int top, int n) {
    CoglobularFamily fam;
    for (int j = 0; j <= top; ++j) fam.objects.push_back(realize(globe(j), n));
    for (int j = 0; j < top; ++j) {
        for (int eps = 0; eps < 2; ++eps) {
            GlobMap m{fam.objects[j], fam.objects[j + 1], std::vector<std::vector<int>>(n + 1)};
            for (int d = 0; d < j; ++d) m.f[d] = {0, 1};
            m.f[j] = {eps};
            validate(m);
            (eps == 0 ? fam.sigma : fam.tau).push_back(std::move(m));
        }
    }
    return fam;
}

CoglobularFamily constant_family(const FinGlobSet& x, int top) {
    CoglobularFamily fam;
    fam.objects.assign(top + 1, x);
    fam.sigma.assign(top, identity_map(x));
    fam.tau.assign(top, identity_map(x));
    return fam;
}

FinGlobSet latching(const CoglobularFamily& fam, int m) {
    if (m < 0 || m >= static_cast<int>(fam.objects.size()))
        throw DomainError("latching degree outside the family");
    if (m == 0) return FinGlobSet(fam.objects[0].n);
    // objects (j, eps) for j < m, stored at index 2j + eps
    std::vector<FinGlobSet> objs;
    for (int j = 0; j < m; ++j)
        for (int eps = 0; eps < 2; ++eps) objs.push_back(fam.objects[j]);
    std::vector<Arrow> arrows;
    for (int j = 1; j < m; ++j)
        for (int delta = 0; delta < 2; ++delta)
            for (int eps = 0; eps < 2; ++eps)
                arrows.push_back({2 * (j - 1) + delta, 2 * j + eps,
                                  delta == 0 ? fam.sigma[j - 1] : fam.tau[j - 1]});
    return colimit(objs, arrows).object;
}

namespace {

// Backtracking over maps X -> Y. `allowed(k, c)` lists candidate images (empty
// optional = unconstrained). Stops after `limit` solutions.
struct MapSearch {
    const FinGlobSet& x;
    const FinGlobSet& y;
    std::function<std::optional<std::vector<int>>(int, int)> allowed;
    std::size_t limit;
    std::mt19937_64* rng = nullptr;
    bool injective = false;
    long budget = -1;

    std::vector<GlobMap> out{};
    std::vector<std::vector<int>> cur{};
    std::vector<std::vector<char>> used{};

    std::vector<GlobMap> run() {
        if (x.n != y.n) throw DomainError("map search between different truncations");
        cur.assign(x.n + 1, {});
        used.assign(x.n + 1, {});
        for (int k = 0; k <= x.n; ++k) {
            cur[k].assign(x.count[k], -1);
            used[k].assign(y.count[k], 0);
        }
        step(0, 0);
        return std::move(out);
    }

    bool step(int k, int c) {
        if (budget == 0) return true;
        if (budget > 0) --budget;
        if (k > x.n) {
            out.push_back({x, y, cur});
            return out.size() >= limit;
        }
        if (c == x.count[k]) return step(k + 1, 0);
        std::vector<int> cand;
        if (auto a = allowed(k, c)) {
            cand = std::move(*a);
        } else {
            cand.resize(y.count[k]);
            std::iota(cand.begin(), cand.end(), 0);
        }
        if (rng) std::shuffle(cand.begin(), cand.end(), *rng);
        for (int v : cand) {
            if (v < 0 || v >= y.count[k]) continue;
            if (injective && used[k][v]) continue;
            if (k > 0 && (y.src[k][v] != cur[k - 1][x.src[k][c]] || y.tgt[k][v] != cur[k - 1][x.tgt[k][c]]))
                continue;
            cur[k][c] = v;
            used[k][v] = 1;
            if (step(k, c + 1)) return true;
            used[k][v] = 0;
            cur[k][c] = -1;
        }
        return false;
    }
};

} // namespace

std::optional<GlobMap> find_iso(const FinGlobSet& x, const FinGlobSet& y) {
    if (x.n != y.n || x.count != y.count) return std::nullopt;
    MapSearch s{x, y, [](int, int) { return std::optional<std::vector<int>>{}; }, 1};
    s.injective = true;
    auto r = s.run();
    if (r.empty()) return std::nullopt;
    return r.front();
}

std::vector<GlobMap> all_maps(const FinGlobSet& x, const FinGlobSet& y, std::size_t limit) {
    MapSearch s{x, y, [](int, int) { return std::optional<std::vector<int>>{}; }, limit};
    return s.run();
}

bool is_m_bijective(const GlobMap& f, int m) {
    for (int k = 0; k <= std::min(m, f.dom.n); ++k) {
        if (f.dom.count[k] != f.cod.count[k]) return false;
        std::vector<char> hit(f.cod.count[k], 0);
        for (int v : f.f[k]) {
            if (hit[v]) return false;
            hit[v] = 1;
        }
    }
    return true;
}

bool is_m_fully_faithful(const GlobMap& f, int m) {
    const FinGlobSet& X = f.dom;
    const FinGlobSet& Y = f.cod;
    for (int i = std::max(m, 0); i < X.n; ++i) {
        // fibre sizes of X_{i+1} over the pullback Y_{i+1} x (parallel pairs in X_i)
        std::map<std::tuple<int, int, int>, int> fibre;
        for (int x = 0; x < X.count[i + 1]; ++x)
            ++fibre[{f.f[i + 1][x], X.src[i + 1][x], X.tgt[i + 1][x]}];
        for (int y = 0; y < Y.count[i + 1]; ++y)
            for (int a = 0; a < X.count[i]; ++a) {
                if (f.f[i][a] != Y.src[i + 1][y]) continue;
                for (int b = 0; b < X.count[i]; ++b) {
                    if (f.f[i][b] != Y.tgt[i + 1][y] || !X.parallel(i, a, b)) continue;
                    auto it = fibre.find({y, a, b});
                    if (it == fibre.end() || it->second != 1) return false;
                }
            }
        for (const auto& [key, cnt] : fibre)
            if (cnt != 1) return false;
    }
    return true;
}

MapClass classify(const GlobMap& f, int m) { return {is_m_bijective(f, m), is_m_fully_faithful(f, m)}; }

BijFF factor_bij_ff(const GlobMap& f, int m) {
    validate(f);
    const FinGlobSet& X = f.dom;
    const FinGlobSet& Y = f.cod;
    const int n = X.n;
    FinGlobSet W(n);
    GlobMap h{X, {}, std::vector<std::vector<int>>(n + 1)};
    GlobMap g{{}, Y, std::vector<std::vector<int>>(n + 1)};
    for (int k = 0; k <= n; ++k) {
        if (k <= m) {
            for (int c = 0; c < X.count[k]; ++c) {
                W.add_cell(k, k ? X.src[k][c] : -1, k ? X.tgt[k][c] : -1, X.name(k, c));
                h.f[k].push_back(c);
                g.f[k].push_back(f.f[k][c]);
            }
            continue;
        }
        std::map<std::tuple<int, int, int>, int> index;
        for (int y = 0; y < Y.count[k]; ++y)
            for (int a = 0; a < W.count[k - 1]; ++a) {
                if (g.f[k - 1][a] != Y.src[k][y]) continue;
                for (int b = 0; b < W.count[k - 1]; ++b) {
                    if (g.f[k - 1][b] != Y.tgt[k][y] || !W.parallel(k - 1, a, b)) continue;
                    index[{y, a, b}] = W.add_cell(k, a, b);
                    g.f[k].push_back(y);
                }
            }
        for (int c = 0; c < X.count[k]; ++c)
            h.f[k].push_back(index.at({f.f[k][c], h.f[k - 1][X.src[k][c]], h.f[k - 1][X.tgt[k][c]]}));
    }
    h.cod = W;
    g.dom = W;
    validate(W);
    validate(h);
    validate(g);
    return {std::move(h), std::move(g)};
}

std::vector<GlobMap> check_orthogonal(const GlobMap& i, const GlobMap& p, const GlobMap& u,
                                      const GlobMap& v, std::size_t limit) {
    if (!(u.dom == i.dom) || !(u.cod == p.dom) || !(v.dom == i.cod) || !(v.cod == p.cod))
        throw DomainError("lifting square has mismatched corners");
    if (!same_map(compose(u, p), compose(i, v))) throw DomainError("lifting square does not commute");
    const FinGlobSet& B = i.cod;
    const FinGlobSet& X = p.dom;
    // forced images from the left leg
    std::vector<std::vector<std::set<int>>> forced(B.n + 1);
    for (int k = 0; k <= B.n; ++k) {
        forced[k].resize(B.count[k]);
        for (int a = 0; a < i.dom.count[k]; ++a) forced[k][i.f[k][a]].insert(u.f[k][a]);
    }
    auto allowed = [&](int k, int b) -> std::optional<std::vector<int>> {
        std::vector<int> cand;
        if (!forced[k][b].empty()) {
            if (forced[k][b].size() == 1) {
                int x = *forced[k][b].begin();
                if (p.f[k][x] == v.f[k][b]) cand.push_back(x);
            }
            return cand;
        }
        for (int x = 0; x < X.count[k]; ++x)
            if (p.f[k][x] == v.f[k][b]) cand.push_back(x);
        return cand;
    };
    MapSearch s{B, X, allowed, limit};
    return s.run();
}

FinGlobSet loopspace(const FinGlobSet& x, int a, int b) {
    if (x.n < 1) throw DomainError("loop space needs truncation at least 1");
    if (a < 0 || b < 0 || a >= x.count[0] || b >= x.count[0]) throw DomainError("base points out of range");
    FinGlobSet r(x.n - 1);
    std::vector<std::vector<int>> index(x.n + 1);
    for (int k = 1; k <= x.n; ++k) {
        index[k].assign(x.count[k], -1);
        for (int c = 0; c < x.count[k]; ++c) {
            if (x.src_to(k, c, 0) != a || x.tgt_to(k, c, 0) != b) continue;
            int s = -1, t = -1;
            if (k >= 2) {
                s = index[k - 1][x.src[k][c]];
                t = index[k - 1][x.tgt[k][c]];
            }
            index[k][c] = r.add_cell(k - 1, s, t, x.name(k, c));
        }
    }
    validate(r);
    return r;
}

FinGlobSet random_globset(std::mt19937_64& rng, int n, int max_cells) {
    FinGlobSet x(n);
    std::uniform_int_distribution<int> cnt(1, std::max(1, max_cells));
    for (int k = 0; k <= n; ++k) {
        int c = cnt(rng);
        for (int j = 0; j < c; ++j) {
            if (k == 0) {
                x.add_cell(0);
                continue;
            }
            std::uniform_int_distribution<int> pick(0, x.count[k - 1] - 1);
            int s = pick(rng);
            std::vector<int> ts;
            for (int t = 0; t < x.count[k - 1]; ++t)
                if (x.parallel(k - 1, s, t)) ts.push_back(t);
            std::uniform_int_distribution<std::size_t> pt(0, ts.size() - 1);
            x.add_cell(k, s, ts[pt(rng)]);
        }
    }
    return x;
}

std::optional<GlobMap> random_map(std::mt19937_64& rng, const FinGlobSet& x, const FinGlobSet& y) {
    MapSearch s{x, y, [](int, int) { return std::optional<std::vector<int>>{}; }, 1};
    s.rng = &rng;
    s.budget = 100000;
    auto r = s.run();
    if (r.empty()) return std::nullopt;
    return r.front();
}

std::vector<ChiItem> chi_check(const FinGlobSet& x, const ChiStructure& st) {
    if (x.n != 2) throw DomainError("the bicategory checklist needs a 2-truncated globular set");
    auto is1 = [&](int c) { return c >= 0 && c < x.count[1]; };
    auto is2 = [&](int c) { return c >= 0 && c < x.count[2]; };
    auto s1 = [&](int f) { return x.src[1][f]; };
    auto t1 = [&](int f) { return x.tgt[1][f]; };
    auto s2 = [&](int a) { return x.src[2][a]; };
    auto t2 = [&](int a) { return x.tgt[2][a]; };

    // well-typedness of the supplied tables
    for (const auto& [key, h] : st.comp1) {
        auto [g, f] = key;
        if (!is1(g) || !is1(f) || !is1(h) || s1(g) != t1(f) || s1(h) != s1(f) || t1(h) != t1(g))
            throw DomainError("ill-typed 1-cell composite entry");
    }
    for (const auto& [key, c] : st.vcomp2) {
        auto [b, a] = key;
        if (!is2(b) || !is2(a) || !is2(c) || s2(b) != t2(a) || s2(c) != s2(a) || t2(c) != t2(b))
            throw DomainError("ill-typed vertical composite entry");
    }
    for (const auto& [a, e] : st.id1)
        if (a < 0 || a >= x.count[0] || !is1(e) || s1(e) != a || t1(e) != a)
            throw DomainError("ill-typed identity 1-cell entry");
    for (const auto& [f, e] : st.id2)
        if (!is1(f) || !is2(e) || s2(e) != f || t2(e) != f) throw DomainError("ill-typed identity 2-cell entry");
    auto comp = [&](int g, int f) -> int {
        auto it = st.comp1.find({g, f});
        return it == st.comp1.end() ? -1 : it->second;
    };
    for (const auto& [key, r] : st.whisker_r) {
        auto [a, f] = key;
        if (!is2(a) || !is1(f) || !is2(r) || s1(s2(a)) != t1(f))
            throw DomainError("ill-typed right whiskering entry");
        int gs = comp(s2(a), f), gt = comp(t2(a), f);
        if (gs < 0 || gt < 0 || s2(r) != gs || t2(r) != gt) throw DomainError("ill-typed right whiskering entry");
    }
    for (const auto& [key, r] : st.whisker_l) {
        auto [g, a] = key;
        if (!is1(g) || !is2(a) || !is2(r) || t1(s2(a)) != s1(g))
            throw DomainError("ill-typed left whiskering entry");
        int gs = comp(g, s2(a)), gt = comp(g, t2(a));
        if (gs < 0 || gt < 0 || s2(r) != gs || t2(r) != gt) throw DomainError("ill-typed left whiskering entry");
    }

    auto hom2 = [&](int f, int g) {
        for (int a = 0; a < x.count[2]; ++a)
            if (s2(a) == f && t2(a) == g) return true;
        return false;
    };
    std::vector<ChiItem> out;
    auto report = [&](int item, std::string witness) { out.push_back({item, witness.empty(), std::move(witness)}); };

    std::string w;
    for (int f = 0; f < x.count[1] && w.empty(); ++f)
        for (int g = 0; g < x.count[1] && w.empty(); ++g)
            if (s1(g) == t1(f) && comp(g, f) < 0) w = "no composite " + x.name(1, g) + "." + x.name(1, f);
    report(1, w);

    w.clear();
    for (int a = 0; a < x.count[2] && w.empty(); ++a)
        for (int b = 0; b < x.count[2] && w.empty(); ++b)
            if (s2(b) == t2(a) && !st.vcomp2.count({b, a}))
                w = "no vertical composite " + x.name(2, b) + "." + x.name(2, a);
    report(2, w);

    w.clear();
    for (int a = 0; a < x.count[2] && w.empty(); ++a)
        for (int f = 0; f < x.count[1] && w.empty(); ++f) {
            if (s1(s2(a)) == t1(f) && !st.whisker_r.count({a, f}))
                w = "no whiskering " + x.name(2, a) + " " + x.name(1, f);
            else if (t1(s2(a)) == s1(f) && !st.whisker_l.count({f, a}))
                w = "no whiskering " + x.name(1, f) + " " + x.name(2, a);
        }
    report(3, w);

    w.clear();
    for (int a = 0; a < x.count[0] && w.empty(); ++a)
        if (!st.id1.count(a)) w = "no identity on " + x.name(0, a);
    report(4, w);

    w.clear();
    for (int f = 0; f < x.count[1] && w.empty(); ++f)
        if (!st.id2.count(f)) w = "no identity on " + x.name(1, f);
    report(5, w);

    w.clear();
    for (int f = 0; f < x.count[1] && w.empty(); ++f) {
        auto is = st.id1.find(s1(f));
        auto it = st.id1.find(t1(f));
        int fl = is == st.id1.end() ? -1 : comp(f, is->second);
        int fr = it == st.id1.end() ? -1 : comp(it->second, f);
        if (fl < 0 || fr < 0) {
            w = "unit composite undefined for " + x.name(1, f);
        } else if (!hom2(fl, f) || !hom2(f, fl) || !hom2(fr, f) || !hom2(f, fr)) {
            w = "missing unit constraint for " + x.name(1, f);
        }
    }
    report(6, w);

    w.clear();
    for (int f = 0; f < x.count[1] && w.empty(); ++f)
        for (int g = 0; g < x.count[1] && w.empty(); ++g) {
            if (s1(g) != t1(f)) continue;
            for (int h = 0; h < x.count[1] && w.empty(); ++h) {
                if (s1(h) != t1(g)) continue;
                int hg = comp(h, g), gf = comp(g, f);
                int l = hg < 0 ? -1 : comp(hg, f);
                int r = gf < 0 ? -1 : comp(h, gf);
                if (l < 0 || r < 0)
                    w = "associativity composites undefined";
                else if (!hom2(l, r) || !hom2(r, l))
                    w = "missing associator for " + x.name(1, h) + "," + x.name(1, g) + "," + x.name(1, f);
            }
        }
    report(7, w);
    return out;
}

nlohmann::json globset_to_json(const FinGlobSet& x) {
    nlohmann::json j;
    j["n"] = x.n;
    j["cells"] = nlohmann::json::array();
    j["src"] = nlohmann::json::array();
    j["tgt"] = nlohmann::json::array();
    for (int k = 0; k <= x.n; ++k) {
        auto ids = nlohmann::json::array();
        for (int c = 0; c < x.count[k]; ++c) ids.push_back(x.name(k, c));
        j["cells"].push_back(ids);
        j["src"].push_back(k ? nlohmann::json(x.src[k]) : nlohmann::json::array());
        j["tgt"].push_back(k ? nlohmann::json(x.tgt[k]) : nlohmann::json::array());
    }
    return j;
}

FinGlobSet globset_from_json(const nlohmann::json& j) {
    try {
        FinGlobSet x(j.at("n").get<int>());
        const auto& cells = j.at("cells");
        if (!cells.is_array() || static_cast<int>(cells.size()) != x.n + 1)
            throw DomainError("globular set JSON needs one cell list per dimension");
        for (int k = 0; k <= x.n; ++k) {
            for (std::size_t c = 0; c < cells[k].size(); ++c) {
                std::string nm = cells[k][c].is_string() ? cells[k][c].get<std::string>() : cells[k][c].dump();
                if (k == 0)
                    x.add_cell(0, -1, -1, nm);
                else
                    x.add_cell(k, j.at("src")[k][c].get<int>(), j.at("tgt")[k][c].get<int>(), nm);
            }
        }
        validate(x);
        return x;
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("malformed globular set JSON: ") + e.what());
    }
}

nlohmann::json globmap_to_json(const GlobMap& m) {
    return {{"dom", globset_to_json(m.dom)}, {"cod", globset_to_json(m.cod)}, {"f", m.f}};
}

std::string globset_to_dot(const FinGlobSet& x) {
    std::ostringstream os;
    os << "digraph globset {\n";
    for (int c = 0; c < x.count[0]; ++c) os << "  v" << c << " [label=\"" << x.name(0, c) << "\"];\n";
    if (x.n >= 1)
        for (int c = 0; c < x.count[1]; ++c)
            os << "  v" << x.src[1][c] << " -> v" << x.tgt[1][c] << " [label=\"" << x.name(1, c) << "\"];\n";
    os << "}\n";
    return os.str();
}

} // namespace globwb
