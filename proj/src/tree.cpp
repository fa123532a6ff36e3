#include "globwb/tree.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <mutex>
#include <sstream>

#include "globwb/error.hpp"

namespace globwb {

std::size_t Tree::size() const {
    std::size_t n = 1;
    for (const auto& c : children) n += c.size();
    return n;
}

std::strong_ordering operator<=>(const Tree& a, const Tree& b) {
    return std::lexicographical_compare_three_way(a.children.begin(), a.children.end(),
                                                  b.children.begin(), b.children.end());
}

namespace {

struct TreeParser {
    std::string_view s;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }

    Tree parse() {
        skip_ws();
        if (pos >= s.size() || s[pos] != '[') throw ParseError("expected '['", pos);
        ++pos;
        Tree t;
        for (;;) {
            skip_ws();
            if (pos >= s.size()) throw ParseError("unbalanced bracket", pos);
            if (s[pos] == ']') {
                ++pos;
                return t;
            }
            if (s[pos] != '[') throw ParseError(std::string("unexpected character '") + s[pos] + "'", pos);
            t.children.push_back(parse());
        }
    }
};

void write_tree(const Tree& t, std::string& out) {
    out += '[';
    for (const auto& c : t.children) write_tree(c, out);
    out += ']';
}

void collect_heights(const Tree& t, int depth, std::vector<int>& tops, std::vector<int>& joins,
                     int& pending_join) {
    if (t.is_leaf()) {
        if (!tops.empty()) joins.push_back(pending_join);
        tops.push_back(depth);
        return;
    }
    for (std::size_t i = 0; i < t.children.size(); ++i) {
        // the junction between consecutive leaves is the deepest common ancestor
        if (i > 0) pending_join = depth;
        collect_heights(t.children[i], depth + 1, tops, joins, pending_join);
    }
}

int depth_of(const Tree& t) {
    int d = 0;
    for (const auto& c : t.children) d = std::max(d, depth_of(c) + 1);
    return d;
}

Tree prune_top(const Tree& t, int d) {
    if (d <= 1) return Tree{};
    Tree r;
    r.children.reserve(t.children.size());
    for (const auto& c : t.children) r.children.push_back(prune_top(c, d - 1));
    return r;
}

Tree& subtree_mut(Tree& t, const Path& p) {
    Tree* cur = &t;
    for (int i : p) {
        if (i < 0 || static_cast<std::size_t>(i) >= cur->children.size())
            throw DomainError("path does not address a node");
        cur = &cur->children[i];
    }
    return *cur;
}

void leaf_paths_rec(const Tree& t, Path& p, std::vector<Path>& out) {
    if (t.is_leaf()) {
        out.push_back(p);
        return;
    }
    for (std::size_t i = 0; i < t.children.size(); ++i) {
        p.push_back(static_cast<int>(i));
        leaf_paths_rec(t.children[i], p, out);
        p.pop_back();
    }
}

void sectors_rec(const Tree& t, Path& p, std::vector<Sector>& out) {
    const int r = static_cast<int>(t.arity());
    out.push_back({p, r});
    for (int i = r - 1; i >= 0; --i) {
        p.push_back(i);
        sectors_rec(t.children[i], p, out);
        p.pop_back();
        out.push_back({p, i});
    }
}

} // namespace

Tree parse_tree(std::string_view text) {
    TreeParser p{text};
    Tree t = p.parse();
    p.skip_ws();
    if (p.pos != text.size()) throw ParseError("trailing characters", p.pos);
    return t;
}

Tree parse_tree_literal(std::string_view text) {
    std::size_t b = 0, e = text.size();
    while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
    auto body = text.substr(b, e - b);
    if (!body.empty() && (body[0] == 'D' || body[0] == 'd')) {
        if (body.size() < 2) throw ParseError("missing globe dimension", b + 1);
        int k = 0;
        for (std::size_t i = 1; i < body.size(); ++i) {
            if (!std::isdigit(static_cast<unsigned char>(body[i])))
                throw ParseError("bad globe dimension", b + i);
            k = k * 10 + (body[i] - '0');
            if (k > 64) throw ParseError("globe dimension too large", b + i);
        }
        return globe(k);
    }
    return parse_tree(text);
}

std::string to_string(const Tree& t) {
    std::string s;
    write_tree(t, s);
    return s;
}

Tree globe(int k) {
    if (k < 0) throw DomainError("negative globe dimension");
    Tree t;
    for (int i = 0; i < k; ++i) t = suspend(t);
    return t;
}

Tree leaf_row(int m) {
    Tree t;
    t.children.assign(static_cast<std::size_t>(std::max(m, 0)), Tree{});
    return t;
}

DimensionTable tree_to_table(const Tree& t) {
    DimensionTable tbl;
    int pending = 0;
    collect_heights(t, 0, tbl.tops, tbl.joins, pending);
    return tbl;
}

void validate_table(const DimensionTable& tbl) {
    if (tbl.tops.empty()) throw DomainError("invalid table: no tops");
    if (tbl.joins.size() + 1 != tbl.tops.size())
        throw DomainError("invalid table: need exactly one join between consecutive tops");
    for (int v : tbl.tops)
        if (v < 0) throw DomainError("invalid table: negative entry");
    for (std::size_t k = 0; k < tbl.joins.size(); ++k) {
        int j = tbl.joins[k];
        if (j < 0) throw DomainError("invalid table: negative entry");
        if (!(j < tbl.tops[k] && j < tbl.tops[k + 1]))
            throw DomainError("invalid table: join " + std::to_string(k + 1) +
                              " must be below both neighbouring tops");
    }
}

Tree table_to_tree(const DimensionTable& tbl) {
    validate_table(tbl);
    Tree root;
    // path from the root to the most recent leaf
    Path spine;
    auto grow = [&](int from, int to) {
        Tree& base = subtree_mut(root, Path(spine.begin(), spine.begin() + from));
        Tree* cur = &base;
        for (int h = from; h < to; ++h) {
            cur->children.push_back(Tree{});
            spine.push_back(static_cast<int>(cur->children.size()) - 1);
            cur = &cur->children.back();
        }
    };
    grow(0, tbl.tops[0]);
    for (std::size_t k = 1; k < tbl.tops.size(); ++k) {
        int j = tbl.joins[k - 1];
        spine.resize(static_cast<std::size_t>(j));
        grow(j, tbl.tops[k]);
    }
    return root;
}

DimensionTable parse_table(std::string_view text) {
    DimensionTable tbl;
    std::size_t pos = 0;
    auto skip = [&] {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    };
    auto expect = [&](char c) {
        skip();
        if (pos >= text.size() || text[pos] != c) throw ParseError(std::string("expected '") + c + "'", pos);
        ++pos;
    };
    auto number = [&]() {
        skip();
        if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos])))
            throw ParseError("expected number", pos);
        int v = 0;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            v = v * 10 + (text[pos++] - '0');
            if (v > 1000000) throw ParseError("number too large", pos);
        }
        return v;
    };
    expect('(');
    tbl.tops.push_back(number());
    skip();
    while (pos < text.size() && text[pos] == ',') {
        ++pos;
        tbl.tops.push_back(number());
        skip();
    }
    expect(';');
    skip();
    if (pos < text.size() && text[pos] != ')') {
        tbl.joins.push_back(number());
        skip();
        while (pos < text.size() && text[pos] == ',') {
            ++pos;
            tbl.joins.push_back(number());
            skip();
        }
    }
    expect(')');
    skip();
    if (pos != text.size()) throw ParseError("trailing characters", pos);
    validate_table(tbl);
    return tbl;
}

std::string to_string(const DimensionTable& tbl) {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < tbl.tops.size(); ++i) os << (i ? "," : "") << tbl.tops[i];
    os << ';';
    for (std::size_t i = 0; i < tbl.joins.size(); ++i) os << (i ? "," : "") << tbl.joins[i];
    os << ')';
    return os.str();
}

int dim(const Tree& t) { return depth_of(t); }

Tree boundary(const Tree& t) {
    int d = dim(t);
    if (d == 0) throw DomainError("D0 has no boundary");
    return prune_top(t, d);
}

Tree suspend(const Tree& t) {
    Tree r;
    r.children.push_back(t);
    return r;
}

std::vector<Tree> decompose(const Tree& t) { return t.children; }

Tree reassemble(const std::vector<Tree>& blocks) { return Tree{blocks}; }

const Tree& subtree(const Tree& t, const Path& p) {
    const Tree* cur = &t;
    for (int i : p) {
        if (i < 0 || static_cast<std::size_t>(i) >= cur->children.size())
            throw DomainError("path does not address a node");
        cur = &cur->children[i];
    }
    return *cur;
}

std::vector<Path> leaf_paths(const Tree& t) {
    std::vector<Path> out;
    Path p;
    leaf_paths_rec(t, p, out);
    return out;
}

int leaf_count(const Tree& t) {
    if (t.is_leaf()) return 1;
    int n = 0;
    for (const auto& c : t.children) n += leaf_count(c);
    return n;
}

namespace {

// ordered forests with a given total node count
const std::vector<std::vector<Tree>>& forests(int nodes);

const std::vector<Tree>& trees_memo(int nodes) {
    static std::map<int, std::vector<Tree>> memo;
    auto it = memo.find(nodes);
    if (it != memo.end()) return it->second;
    std::vector<Tree> out;
    if (nodes >= 1)
        for (const auto& f : forests(nodes - 1)) out.push_back(Tree{f});
    std::sort(out.begin(), out.end());
    return memo.emplace(nodes, std::move(out)).first->second;
}

const std::vector<std::vector<Tree>>& forests(int nodes) {
    static std::map<int, std::vector<std::vector<Tree>>> memo;
    auto it = memo.find(nodes);
    if (it != memo.end()) return it->second;
    std::vector<std::vector<Tree>> out;
    if (nodes == 0) {
        out.emplace_back();
    } else {
        for (int first = 1; first <= nodes; ++first)
            for (const auto& t : trees_memo(first))
                for (const auto& rest : forests(nodes - first)) {
                    std::vector<Tree> f;
                    f.reserve(rest.size() + 1);
                    f.push_back(t);
                    f.insert(f.end(), rest.begin(), rest.end());
                    out.push_back(std::move(f));
                }
    }
    return memo.emplace(nodes, std::move(out)).first->second;
}

} // namespace

std::vector<Tree> all_trees(int nodes) {
    if (nodes < 1) return {};
    if (nodes > 12) throw DomainError("tree enumeration limited to 12 nodes");
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    return trees_memo(nodes);
}

std::vector<Tree> all_trees_up_to(int nodes) {
    std::vector<Tree> out;
    for (int n = 1; n <= nodes; ++n) {
        auto v = all_trees(n);
        out.insert(out.end(), v.begin(), v.end());
    }
    return out;
}

const char* klass_name(Klass k) {
    switch (k) {
    case Klass::H1Right: return "H1-Right";
    case Klass::H1Left: return "H1-Left";
    case Klass::H1Mid: return "H1-Mid";
    case Klass::H2OverEdge: return "H2-OverEdge";
    case Klass::H2Max: return "H2-Max";
    case Klass::H2Min: return "H2-Min";
    case Klass::H2Mid: return "H2-Mid";
    case Klass::H3: return "H3";
    }
    return "?";
}

Tree insert_leaf(const Tree& t, const Sector& s) {
    Tree r = t;
    Tree& parent = subtree_mut(r, s.parent);
    if (s.gap < 0 || static_cast<std::size_t>(s.gap) > parent.children.size())
        throw DomainError("sector gap out of range");
    parent.children.insert(parent.children.begin() + s.gap, Tree{});
    return r;
}

Klass classify_sector(const Tree& t, const Sector& s) {
    const Tree& parent = subtree(t, s.parent);
    const int r = static_cast<int>(parent.arity());
    const int h = static_cast<int>(s.parent.size()) + 1;
    if (h == 1) {
        if (s.gap == r) return Klass::H1Right;
        if (s.gap == 0) return Klass::H1Left;
        return Klass::H1Mid;
    }
    if (h == 2) {
        if (r == 0) return Klass::H2OverEdge;
        if (s.gap == r) return Klass::H2Max;
        if (s.gap == 0) return Klass::H2Min;
        return Klass::H2Mid;
    }
    return Klass::H3;
}

std::vector<Sector> sector_order(const Tree& t) {
    std::vector<Sector> out;
    Path p;
    sectors_rec(t, p, out);
    return out;
}

std::vector<ExtendedTree> linearization(const Tree& t) {
    std::vector<ExtendedTree> out;
    for (const auto& s : sector_order(t)) {
        out.push_back({t, s, insert_leaf(t, s), classify_sector(t, s),
                       static_cast<int>(s.parent.size()) + 1});
    }
    return out;
}

nlohmann::json tree_to_json(const Tree& t) {
    auto j = nlohmann::json::array();
    for (const auto& c : t.children) j.push_back(tree_to_json(c));
    return j;
}

Tree tree_from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw DomainError("tree JSON must be a nested array");
    Tree t;
    for (const auto& c : j) t.children.push_back(tree_from_json(c));
    return t;
}

nlohmann::json extended_to_json(const ExtendedTree& e) {
    return {{"base", to_string(e.base)},
            {"sector", {{"parent", e.sector.parent}, {"gap", e.sector.gap}}},
            {"result", to_string(e.result)},
            {"klass", klass_name(e.klass)},
            {"height", e.height}};
}

std::string tree_to_dot(const Tree& t, const Path* highlight) {
    std::ostringstream os;
    os << "digraph tree {\n  node [shape=circle,label=\"\",width=0.2];\n";
    int next = 0;
    Path p;
    auto rec = [&](auto&& self, const Tree& n) -> int {
        int id = next++;
        os << "  n" << id;
        if (highlight && *highlight == p) os << " [style=filled,fillcolor=red]";
        os << ";\n";
        for (std::size_t i = 0; i < n.children.size(); ++i) {
            p.push_back(static_cast<int>(i));
            int c = self(self, n.children[i]);
            p.pop_back();
            os << "  n" << id << " -> n" << c << ";\n";
        }
        return id;
    };
    rec(rec, t);
    os << "}\n";
    return os.str();
}

} // namespace globwb
