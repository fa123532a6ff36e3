#include "globwb/theta.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>

#include "globwb/error.hpp"

namespace globwb {

namespace {

constexpr long long kCap = std::numeric_limits<long long>::max() / 4;

long long sat_add(long long a, long long b) { return std::min(kCap, a + b); }
long long sat_mul(long long a, long long b) {
    if (a == 0 || b == 0) return 0;
    if (a > kCap / b) return kCap;
    return a * b;
}

int height(const Tree& t) { return dim(t); }

bool is_chain(const Tree& t) {
    const Tree* cur = &t;
    while (!cur->is_leaf()) {
        if (cur->arity() != 1) return false;
        cur = &cur->children[0];
    }
    return true;
}

} // namespace

void validate(const ThetaMap& f) {
    const int m = static_cast<int>(f.src.arity());
    const int n = static_cast<int>(f.tgt.arity());
    if (static_cast<int>(f.phi.size()) != m + 1) throw DomainError("phi has the wrong length");
    for (int i = 0; i <= m; ++i) {
        if (f.phi[i] < 0 || f.phi[i] > n) throw DomainError("phi value out of range");
        if (i > 0 && f.phi[i] < f.phi[i - 1]) throw DomainError("phi is not monotone");
    }
    if (static_cast<int>(f.comps.size()) != f.phi[m] - f.phi[0])
        throw DomainError("wrong number of components");
    for (int i = 1; i <= m; ++i)
        for (int j = f.phi[i - 1] + 1; j <= f.phi[i]; ++j) {
            const ThetaMap& c = f.comps[j - f.phi[0] - 1];
            if (!(c.src == f.src.children[i - 1]) || !(c.tgt == f.tgt.children[j - 1]))
                throw DomainError("component has the wrong source or target");
            validate(c);
        }
}

ThetaMap identity(const Tree& t) {
    ThetaMap f{t, t, {}, {}};
    for (int i = 0; i <= static_cast<int>(t.arity()); ++i) f.phi.push_back(i);
    for (const auto& c : t.children) f.comps.push_back(identity(c));
    return f;
}

ThetaMap compose(const ThetaMap& f, const ThetaMap& g) {
    if (!(f.tgt == g.src)) throw DomainError("Theta maps are not composable");
    ThetaMap r{f.src, g.tgt, {}, {}};
    const int m = static_cast<int>(f.src.arity());
    for (int i = 0; i <= m; ++i) r.phi.push_back(g.phi[f.phi[i]]);
    for (int i = 1; i <= m; ++i) {
        int j = f.phi[i - 1] + 1;
        for (int l = r.phi[i - 1] + 1; l <= r.phi[i]; ++l) {
            // the unique j in (phi(i-1), phi(i)] whose image interval contains l
            while (g.phi[j] < l) ++j;
            r.comps.push_back(compose(f.comps[j - f.phi[0] - 1], g.comps[l - g.phi[0] - 1]));
        }
    }
    return r;
}

namespace {

std::recursive_mutex& hom_mutex() {
    static std::recursive_mutex mu;
    return mu;
}

using HomKey = std::pair<std::string, std::string>;

long long hom_count_rec(const Tree& s, const Tree& t) {
    static std::map<HomKey, long long> memo;
    HomKey key{to_string(s), to_string(t)};
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    const int m = static_cast<int>(s.arity());
    const int n = static_cast<int>(t.arity());
    std::vector<std::vector<long long>> c(m + 1, std::vector<long long>(n + 1, 0));
    for (int i = 1; i <= m; ++i)
        for (int j = 1; j <= n; ++j) c[i][j] = hom_count_rec(s.children[i - 1], t.children[j - 1]);
    // dp[v]: number of partial maps with phi(i) = v
    std::vector<long long> dp(n + 1, 1);
    for (int i = 1; i <= m; ++i) {
        std::vector<long long> nd(n + 1, 0);
        for (int u = 0; u <= n; ++u) {
            long long w = dp[u];
            for (int v = u; v <= n; ++v) {
                if (v > u) w = sat_mul(w, c[i][v]);
                if (w == 0) break;
                nd[v] = sat_add(nd[v], w);
            }
        }
        dp = std::move(nd);
    }
    long long total = 0;
    for (long long v : dp) total = sat_add(total, v);
    memo.emplace(key, total);
    return total;
}

void monotone_seqs(int len, int maxv, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
    if (static_cast<int>(cur.size()) == len) {
        out.push_back(cur);
        return;
    }
    int lo = cur.empty() ? 0 : cur.back();
    for (int v = lo; v <= maxv; ++v) {
        cur.push_back(v);
        monotone_seqs(len, maxv, cur, out);
        cur.pop_back();
    }
}

const std::vector<ThetaMap>& hom_rec(const Tree& s, const Tree& t) {
    static std::map<HomKey, std::vector<ThetaMap>> memo;
    HomKey key{to_string(s), to_string(t)};
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    const int m = static_cast<int>(s.arity());
    const int n = static_cast<int>(t.arity());
    std::vector<ThetaMap> out;
    std::vector<std::vector<int>> phis;
    std::vector<int> cur;
    monotone_seqs(m + 1, n, cur, phis);
    for (const auto& phi : phis) {
        std::vector<const std::vector<ThetaMap>*> lists;
        bool empty = false;
        for (int i = 1; i <= m && !empty; ++i)
            for (int j = phi[i - 1] + 1; j <= phi[i]; ++j) {
                lists.push_back(&hom_rec(s.children[i - 1], t.children[j - 1]));
                if (lists.back()->empty()) {
                    empty = true;
                    break;
                }
            }
        if (empty) continue;
        std::vector<std::size_t> odo(lists.size(), 0);
        for (;;) {
            ThetaMap f{s, t, phi, {}};
            f.comps.reserve(lists.size());
            for (std::size_t q = 0; q < lists.size(); ++q) f.comps.push_back((*lists[q])[odo[q]]);
            out.push_back(std::move(f));
            // last position fastest, so the first component is most significant
            int q = static_cast<int>(lists.size()) - 1;
            while (q >= 0) {
                if (++odo[q] < lists[q]->size()) break;
                odo[q] = 0;
                --q;
            }
            if (q < 0) break;
        }
    }
    return memo.emplace(key, std::move(out)).first->second;
}

} // namespace

long long hom_count(const Tree& s, const Tree& t) {
    std::lock_guard<std::recursive_mutex> lock(hom_mutex());
    return hom_count_rec(s, t);
}

const std::vector<ThetaMap>& hom(const Tree& s, const Tree& t, long long max_homs) {
    std::lock_guard<std::recursive_mutex> lock(hom_mutex());
    long long c = hom_count_rec(s, t);
    if (c > max_homs)
        throw DomainError("hom(" + to_string(s) + ", " + to_string(t) + ") has about " + std::to_string(c) +
                          " elements, above the bound " + std::to_string(max_homs));
    return hom_rec(s, t);
}

bool is_globular(const ThetaMap& f) {
    for (std::size_t i = 1; i < f.phi.size(); ++i)
        if (f.phi[i] != f.phi[i - 1] + 1) return false;
    for (const auto& c : f.comps)
        if (!is_globular(c)) return false;
    return true;
}

namespace {

CellRef image_ref(const ThetaMap& f, const CellRef& c, std::size_t depth = 0) {
    if (depth == c.node.size()) return {{}, f.phi[c.gap]};
    const int i = c.node[depth];
    const int j = f.phi[i];
    CellRef r = image_ref(f.comps[j - f.phi[0]], c, depth + 1);
    r.node.insert(r.node.begin(), j);
    return r;
}

std::map<std::pair<Path, int>, int> cell_index(const std::vector<CellRef>& refs) {
    std::map<std::pair<Path, int>, int> out;
    for (std::size_t c = 0; c < refs.size(); ++c) out[{refs[c].node, refs[c].gap}] = static_cast<int>(c);
    return out;
}

} // namespace

GlobMap to_globmap(const ThetaMap& f) {
    if (!is_globular(f)) throw DomainError("map is not globular");
    const int n = std::max(dim(f.src), dim(f.tgt));
    FinGlobSet xs = realize(f.src, n), xt = realize(f.tgt, n);
    auto rs = realize_cells(f.src), rt = realize_cells(f.tgt);
    GlobMap m{xs, xt, std::vector<std::vector<int>>(n + 1)};
    for (std::size_t k = 0; k < rs.size(); ++k) {
        auto idx = cell_index(rt[k]);
        for (const auto& c : rs[k]) {
            CellRef r = image_ref(f, c);
            m.f[k].push_back(idx.at({r.node, r.gap}));
        }
    }
    validate(m);
    return m;
}

ThetaMap embed_globular(const GlobMap& g, const Tree& s, const Tree& t) {
    auto rs = realize_cells(s), rt = realize_cells(t);
    if (static_cast<int>(rs.size()) > g.dom.n + 1 || static_cast<int>(rt.size()) > g.cod.n + 1)
        throw DomainError("map does not match the realizations of the trees");
    for (std::size_t k = 0; k < rs.size(); ++k)
        if (g.dom.count[k] != static_cast<int>(rs[k].size())) throw DomainError("domain is not the realization");
    for (std::size_t k = 0; k < rt.size(); ++k)
        if (g.cod.count[k] != static_cast<int>(rt[k].size())) throw DomainError("codomain is not the realization");
    std::vector<std::map<std::pair<Path, int>, int>> sidx;
    for (const auto& level : rs) sidx.push_back(cell_index(level));

    auto build = [&](auto&& self, const Tree& a, const Tree& b, const Path& pa, const Path& pb) -> ThetaMap {
        const std::size_t k = pa.size();
        ThetaMap f{a, b, {}, {}};
        for (int gap = 0; gap <= static_cast<int>(a.arity()); ++gap) {
            const CellRef& img = rt[k][g.f[k][sidx[k].at({pa, gap})]];
            if (img.node != pb) throw DomainError("map does not restrict to a globular map");
            f.phi.push_back(img.gap);
        }
        for (int i = 0; i < static_cast<int>(a.arity()); ++i) {
            if (f.phi[i + 1] != f.phi[i] + 1) throw DomainError("map does not restrict to a globular map");
            Path qa = pa, qb = pb;
            qa.push_back(i);
            qb.push_back(f.phi[i]);
            f.comps.push_back(self(self, a.children[i], b.children[f.phi[i]], qa, qb));
        }
        return f;
    };
    ThetaMap f = build(build, s, t, {}, {});
    validate(f);
    return f;
}

ThetaMap globular_cell(const Tree& t, const CellRef& c) {
    auto rec = [&](auto&& self, const Tree& v, std::size_t depth) -> ThetaMap {
        if (depth == c.node.size()) {
            if (c.gap < 0 || c.gap > static_cast<int>(v.arity())) throw DomainError("cell gap out of range");
            return ThetaMap{Tree{}, v, {c.gap}, {}};
        }
        const int i = c.node[depth];
        if (i < 0 || i >= static_cast<int>(v.arity())) throw DomainError("cell path out of range");
        ThetaMap sub = self(self, v.children[i], depth + 1);
        return ThetaMap{suspend(sub.src), v, {i, i + 1}, {std::move(sub)}};
    };
    return rec(rec, t, 0);
}

ThetaMap globe_face(int k, int d, int eps) {
    if (k < 0 || k > d) throw DomainError("face dimensions out of order");
    if (k == d) return identity(globe(d));
    return globular_cell(globe(d), {Path(static_cast<std::size_t>(k), 0), eps});
}

ThetaMap globe_inclusion(const Tree& t, int leaf) {
    auto lp = leaf_paths(t);
    if (leaf < 0 || leaf >= static_cast<int>(lp.size())) throw DomainError("leaf index out of range");
    return globular_cell(t, {lp[leaf], 0});
}

std::vector<ThetaMap> globe_inclusions(const Tree& t) {
    std::vector<ThetaMap> out;
    for (int l = 0; l < leaf_count(t); ++l) out.push_back(globe_inclusion(t, l));
    return out;
}

CellHome containing_globe(const Tree& t, const CellRef& c) {
    const Tree& v = subtree(t, c.node);
    const int r = static_cast<int>(v.arity());
    auto lp = leaf_paths(t);
    auto leaf_index = [&](const Path& p) {
        return static_cast<int>(std::find(lp.begin(), lp.end(), p) - lp.begin());
    };
    if (r == 0) return {leaf_index(c.node), -1};
    const int child = c.gap < r ? c.gap : r - 1;
    Path p = c.node;
    p.push_back(child);
    const Tree* cur = &v.children[child];
    while (!cur->is_leaf()) {
        p.push_back(0);
        cur = &cur->children[0];
    }
    return {leaf_index(p), c.gap < r ? 0 : 1};
}

CellRef cell_of(const ThetaMap& c) {
    if (!is_chain(c.src)) throw DomainError("cell must have a globe as source");
    if (!is_globular(c)) throw DomainError("cell is not globular");
    CellRef r;
    const ThetaMap* cur = &c;
    while (!cur->src.is_leaf()) {
        r.node.push_back(cur->phi[0]);
        cur = &cur->comps[0];
    }
    r.gap = cur->phi[0];
    return r;
}

ThetaMap restrict_to_leaf(const ThetaMap& f, int leaf) { return compose(globe_inclusion(f.src, leaf), f); }

ThetaMap glue(const Tree& t, const Tree& target, const std::vector<ThetaMap>& parts) {
    if (static_cast<int>(parts.size()) != leaf_count(t)) throw DomainError("one part per globe is required");
    for (const auto& p : parts)
        if (!(p.tgt == target)) throw DomainError("parts must share the target");
    auto rec = [&](auto&& self, const Tree& v, const Tree& tg, const std::vector<ThetaMap>& ps) -> ThetaMap {
        if (v.is_leaf()) {
            if (!ps[0].src.is_leaf()) throw DomainError("part has the wrong dimension");
            return ps[0];
        }
        ThetaMap f{v, tg, {}, {}};
        std::size_t pos = 0;
        for (int i = 0; i < static_cast<int>(v.arity()); ++i) {
            const int nl = leaf_count(v.children[i]);
            std::vector<const ThetaMap*> group;
            for (int q = 0; q < nl; ++q) group.push_back(&ps[pos + q]);
            pos += nl;
            const int a = group[0]->phi.at(0);
            const int b = group[0]->phi.at(1);
            for (const auto* g : group)
                if (g->phi.size() != 2 || g->phi[0] != a || g->phi[1] != b)
                    throw DomainError("parts do not agree on shared boundaries");
            if (i == 0) f.phi.push_back(a);
            else if (f.phi.back() != a) throw DomainError("parts do not agree on shared boundaries");
            f.phi.push_back(b);
            for (int j = a + 1; j <= b; ++j) {
                std::vector<ThetaMap> sub;
                for (const auto* g : group) sub.push_back(g->comps[j - a - 1]);
                f.comps.push_back(self(self, v.children[i], tg.children[j - 1], sub));
            }
        }
        return f;
    };
    ThetaMap f = rec(rec, t, target, parts);
    validate(f);
    for (int l = 0; l < static_cast<int>(parts.size()); ++l)
        if (!(restrict_to_leaf(f, l) == parts[l])) throw DomainError("parts do not agree on shared boundaries");
    return f;
}

HGFactorization hg_factorize(const ThetaMap& f) {
    const int m = static_cast<int>(f.src.arity());
    const int a = f.phi[0], b = f.phi[m];
    HGFactorization r;
    Tree mid;
    r.globular.tgt = f.tgt;
    r.homogeneous.src = f.src;
    for (int j = a + 1; j <= b; ++j) {
        HGFactorization sub = hg_factorize(f.comps[j - a - 1]);
        mid.children.push_back(sub.globular.src);
        r.globular.comps.push_back(std::move(sub.globular));
        r.homogeneous.comps.push_back(std::move(sub.homogeneous));
    }
    for (int j = a; j <= b; ++j) r.globular.phi.push_back(j);
    for (int v : f.phi) r.homogeneous.phi.push_back(v - a);
    r.globular.src = mid;
    r.homogeneous.tgt = mid;
    return r;
}

bool is_homogeneous(const ThetaMap& f) { return hg_factorize(f).globular == identity(f.tgt); }

Support support(const ThetaMap& c) {
    if (!is_chain(c.src)) throw DomainError("support is defined for maps out of a globe");
    HGFactorization h = hg_factorize(c);
    return {h.globular.src, std::move(h.globular), std::move(h.homogeneous)};
}

ThetaMap suspend_map(const ThetaMap& f) { return ThetaMap{suspend(f.src), suspend(f.tgt), {0, 1}, {f}}; }

namespace {

ThetaMap boundary_rec(const Tree& t, int d, int eps) {
    if (height(t) < d) return identity(t);
    const int r = static_cast<int>(t.arity());
    if (d == 1) return ThetaMap{Tree{}, t, {eps ? r : 0}, {}};
    ThetaMap f{{}, t, {}, {}};
    for (int i = 0; i <= r; ++i) f.phi.push_back(i);
    for (const auto& c : t.children) {
        f.comps.push_back(boundary_rec(c, d - 1, eps));
        f.src.children.push_back(f.comps.back().src);
    }
    return f;
}

} // namespace

std::pair<ThetaMap, ThetaMap> boundary_maps(const Tree& t) {
    const int d = dim(t);
    if (d == 0) throw DomainError("D0 has no boundary");
    return {boundary_rec(t, d, 0), boundary_rec(t, d, 1)};
}

int source_dim(const ThetaMap& f) { return is_chain(f.src) ? dim(f.src) : -1; }

bool parallel(const ThetaMap& f, const ThetaMap& g) {
    if (!(f.src == g.src) || !(f.tgt == g.tgt)) return false;
    const int k = source_dim(f);
    if (k < 0) throw DomainError("parallelism needs maps out of a globe");
    if (k == 0) return true;
    for (int eps = 0; eps < 2; ++eps) {
        ThetaMap face = globe_face(k - 1, k, eps);
        if (!(compose(face, f) == compose(face, g))) return false;
    }
    return true;
}

namespace {

int check_pair(const ThetaMap& f, const ThetaMap& g) {
    if (!(f.tgt == g.tgt)) throw DomainError("pair has mismatched targets");
    const int k = source_dim(f);
    if (k < 0 || !(f.src == g.src)) throw DomainError("pair must consist of maps out of the same globe");
    return k;
}

} // namespace

bool is_admissible_groupoidal(const ThetaMap& f, const ThetaMap& g) {
    const int k = check_pair(f, g);
    return (k == 0 || parallel(f, g)) && dim(f.tgt) <= k + 1;
}

bool is_admissible_categorical(const ThetaMap& f, const ThetaMap& g) {
    const int k = check_pair(f, g);
    if (k == 0) return true;
    if (!parallel(f, g)) return false;
    if (is_homogeneous(f) && is_homogeneous(g)) return true;
    if (dim(f.tgt) == 0) return false;
    auto [ds, dt] = boundary_maps(f.tgt);
    auto witness = [&](const ThetaMap& target, const ThetaMap& along) {
        for (const auto& h : hom(f.src, along.src))
            if (is_homogeneous(h) && compose(h, along) == target) return true;
        return false;
    };
    return witness(f, ds) && witness(g, dt);
}

std::optional<ThetaMap> filler(const ThetaMap& f, const ThetaMap& g, long long max_homs) {
    const int k = check_pair(f, g);
    ThetaMap s = globe_face(k, k + 1, 0), t = globe_face(k, k + 1, 1);
    for (const auto& h : hom(globe(k + 1), f.tgt, max_homs))
        if (compose(s, h) == f && compose(t, h) == g) return h;
    return std::nullopt;
}

std::string to_string(const ThetaMap& f) {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < f.phi.size(); ++i) os << (i ? "," : "") << f.phi[i];
    os << ')';
    if (!f.comps.empty()) {
        os << '{';
        for (std::size_t i = 0; i < f.comps.size(); ++i) os << (i ? ";" : "") << to_string(f.comps[i]);
        os << '}';
    }
    return os.str();
}

nlohmann::json theta_to_json(const ThetaMap& f) {
    nlohmann::json comps = nlohmann::json::array();
    for (const auto& c : f.comps) comps.push_back(theta_to_json(c));
    return {{"phi", f.phi}, {"components", comps}};
}

ThetaMap theta_from_json(const nlohmann::json& j, const Tree& s, const Tree& t) {
    auto rec = [&](auto&& self, const nlohmann::json& node, const Tree& a, const Tree& b) -> ThetaMap {
        ThetaMap f{a, b, {}, {}};
        try {
            f.phi = node.at("phi").get<std::vector<int>>();
        } catch (const nlohmann::json::exception& e) {
            throw DomainError(std::string("malformed map JSON: ") + e.what());
        }
        const int m = static_cast<int>(a.arity());
        if (static_cast<int>(f.phi.size()) != m + 1) throw DomainError("phi has the wrong length");
        std::vector<nlohmann::json> comps;
        if (node.contains("components")) comps = node["components"].get<std::vector<nlohmann::json>>();
        std::size_t q = 0;
        for (int i = 1; i <= m; ++i)
            for (int j = f.phi[i - 1] + 1; j <= f.phi[i]; ++j) {
                if (q >= comps.size() || j < 1 || j > static_cast<int>(b.arity()))
                    throw DomainError("component list does not match phi");
                f.comps.push_back(self(self, comps[q++], a.children[i - 1], b.children[j - 1]));
            }
        if (q != comps.size()) throw DomainError("component list does not match phi");
        return f;
    };
    ThetaMap f = rec(rec, j, s, t);
    validate(f);
    return f;
}

} // namespace globwb
