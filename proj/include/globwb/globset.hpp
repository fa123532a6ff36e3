#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "globwb/tree.hpp"

namespace globwb {

// Finite n-truncated globular set. Cells of dimension k are 0..count[k]-1;
// src[k], tgt[k] are meaningful for k >= 1 (src[0], tgt[0] are empty).
struct FinGlobSet {
    int n = 0;
    std::vector<int> count;
    std::vector<std::vector<int>> src, tgt;
    std::vector<std::vector<std::string>> names;  // optional; empty or count[k] labels per dim

    FinGlobSet() : FinGlobSet(0) {}
    explicit FinGlobSet(int truncation);

    int add_cell(int k, int s = -1, int t = -1, std::string name = {});
    int cells(int k) const { return k >= 0 && k <= n ? count[k] : 0; }
    int total() const;
    std::string name(int k, int c) const;
    // iterated source/target down to dimension `to`
    int src_to(int k, int c, int to) const;
    int tgt_to(int k, int c, int to) const;
    bool parallel(int k, int a, int b) const;

    friend bool operator==(const FinGlobSet& a, const FinGlobSet& b) {
        return a.n == b.n && a.count == b.count && a.src == b.src && a.tgt == b.tgt;
    }
};

void validate(const FinGlobSet& x);  // throws DomainError on broken globularity
FinGlobSet empty_globset(int n);
FinGlobSet pad(const FinGlobSet& x, int n);  // raise truncation with empty dims

struct GlobMap {
    FinGlobSet dom, cod;
    std::vector<std::vector<int>> f;
};

void validate(const GlobMap& m);
GlobMap identity_map(const FinGlobSet& x);
GlobMap compose(const GlobMap& f, const GlobMap& g);  // g after f
bool same_map(const GlobMap& a, const GlobMap& b);
GlobMap pad(const GlobMap& m, int n);

// Realization of a globular sum. The k-cells are indexed by (node at depth k, gap);
// a cell's index is its position in depth-first node order then gap order.
FinGlobSet realize(const Tree& t, int n = -1);
struct CellRef {
    Path node;
    int gap = 0;
};
std::vector<std::vector<CellRef>> realize_cells(const Tree& t);

struct Arrow {
    int from, to;
    GlobMap map;
};

struct Colimit {
    FinGlobSet object;
    std::vector<GlobMap> inj;
};

Colimit colimit(const std::vector<FinGlobSet>& objects, const std::vector<Arrow>& arrows);
Colimit pushout(const GlobMap& f, const GlobMap& g);
// The map out of a colimit induced by a compatible cocone.
GlobMap copair(const Colimit& c, const std::vector<GlobMap>& cocone);

FinGlobSet sphere(int k, int n = -1);
GlobMap sphere_inclusion(int k);  // S^{k-1} -> D_k

struct CoglobularFamily {
    std::vector<FinGlobSet> objects;  // X_0 .. X_N
    std::vector<GlobMap> sigma, tau;  // sigma[j], tau[j]: X_j -> X_{j+1}
};
CoglobularFamily globe_family(int top, int n);
CoglobularFamily constant_family(const FinGlobSet& x, int top);
FinGlobSet latching(const CoglobularFamily& fam, int m);

std::optional<GlobMap> find_iso(const FinGlobSet& x, const FinGlobSet& y);

struct MapClass {
    bool bijective;
    bool fully_faithful;
};
bool is_m_bijective(const GlobMap& f, int m);
bool is_m_fully_faithful(const GlobMap& f, int m);
MapClass classify(const GlobMap& f, int m);

struct BijFF {
    GlobMap h;  // m-bijective part
    GlobMap g;  // m-fully faithful part
};
BijFF factor_bij_ff(const GlobMap& f, int m);

// All w : cod(i) -> dom(p) with w.i = u and p.w = v, up to `limit` of them.
std::vector<GlobMap> check_orthogonal(const GlobMap& i, const GlobMap& p, const GlobMap& u,
                                      const GlobMap& v, std::size_t limit = 2);
// All maps x -> y making the given partial assignment true; used for lifting searches.
std::vector<GlobMap> all_maps(const FinGlobSet& x, const FinGlobSet& y, std::size_t limit);

FinGlobSet loopspace(const FinGlobSet& x, int a, int b);

FinGlobSet random_globset(std::mt19937_64& rng, int n, int max_cells);
std::optional<GlobMap> random_map(std::mt19937_64& rng, const FinGlobSet& x, const FinGlobSet& y);

// Operation tables for the locally posetal bicategory checklist.
struct ChiStructure {
    std::map<std::pair<int, int>, int> comp1;     // (g, f) -> g.f on 1-cells
    std::map<std::pair<int, int>, int> vcomp2;    // (beta, alpha) -> beta.alpha on 2-cells
    std::map<std::pair<int, int>, int> whisker_r; // (alpha, f) -> alpha f
    std::map<std::pair<int, int>, int> whisker_l; // (g, alpha) -> g alpha
    std::map<int, int> id1;                       // 0-cell -> identity 1-cell
    std::map<int, int> id2;                       // 1-cell -> identity 2-cell
};

struct ChiItem {
    int item;
    bool ok;
    std::string witness;
};
std::vector<ChiItem> chi_check(const FinGlobSet& x, const ChiStructure& s);

nlohmann::json globset_to_json(const FinGlobSet& x);
FinGlobSet globset_from_json(const nlohmann::json& j);
nlohmann::json globmap_to_json(const GlobMap& m);
std::string globset_to_dot(const FinGlobSet& x);

} // namespace globwb
