#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "globwb/globset.hpp"
#include "globwb/tree.hpp"

namespace globwb {

// A morphism of Theta in wreath form. With m = arity(src), n = arity(tgt):
// phi : [m] -> [n] monotone (m+1 entries), and for i = 1..m and
// phi[i-1] < j <= phi[i] a component src.children[i-1] -> tgt.children[j-1],
// stored in comps ordered by i then j.
struct ThetaMap {
    Tree src, tgt;
    std::vector<int> phi;
    std::vector<ThetaMap> comps;

    friend bool operator==(const ThetaMap&, const ThetaMap&) = default;
};

constexpr long long kDefaultMaxHoms = 1000000;

void validate(const ThetaMap& f);
ThetaMap identity(const Tree& t);
// g after f (diagrammatic order of arguments: first f, then g)
ThetaMap compose(const ThetaMap& f, const ThetaMap& g);

long long hom_count(const Tree& s, const Tree& t);
// Canonically ordered, duplicate-free enumeration; throws DomainError when the
// count exceeds max_homs.
const std::vector<ThetaMap>& hom(const Tree& s, const Tree& t, long long max_homs = kDefaultMaxHoms);

bool is_globular(const ThetaMap& f);
ThetaMap embed_globular(const GlobMap& f, const Tree& s, const Tree& t);
GlobMap to_globmap(const ThetaMap& f);  // f must be globular

// The globular cell D_k -> t picked out by (node at depth k, gap).
ThetaMap globular_cell(const Tree& t, const CellRef& c);
// sigma (eps = 0) or tau (eps = 1) : D_k -> D_d
ThetaMap globe_face(int k, int d, int eps);
// The inclusion of the globe at the given leaf (leaves numbered left to right).
ThetaMap globe_inclusion(const Tree& t, int leaf);
std::vector<ThetaMap> globe_inclusions(const Tree& t);

// A globular cell lies in a globe: it is the iterated source (eps = 0) or target
// (eps = 1) of that globe, or the globe itself (eps = -1).
struct CellHome {
    int leaf;
    int eps;
};
CellHome containing_globe(const Tree& t, const CellRef& c);
// Locate a globular cell map D_k -> t back as a CellRef.
CellRef cell_of(const ThetaMap& c);

ThetaMap restrict_to_leaf(const ThetaMap& f, int leaf);
// Glue maps out of the globes of `t` (one per leaf) into a map t -> target.
ThetaMap glue(const Tree& t, const Tree& target, const std::vector<ThetaMap>& parts);

struct HGFactorization {
    ThetaMap homogeneous;
    ThetaMap globular;
};
HGFactorization hg_factorize(const ThetaMap& f);
bool is_homogeneous(const ThetaMap& f);

struct Support {
    Tree tree;
    ThetaMap inclusion;  // globular
    ThetaMap residue;    // homogeneous
};
Support support(const ThetaMap& c);

ThetaMap suspend_map(const ThetaMap& f);
std::pair<ThetaMap, ThetaMap> boundary_maps(const Tree& t);

bool parallel(const ThetaMap& f, const ThetaMap& g);
bool is_admissible_groupoidal(const ThetaMap& f, const ThetaMap& g);
bool is_admissible_categorical(const ThetaMap& f, const ThetaMap& g);
std::optional<ThetaMap> filler(const ThetaMap& f, const ThetaMap& g, long long max_homs = kDefaultMaxHoms);

int source_dim(const ThetaMap& f);  // k when the source is D_k, otherwise -1

std::string to_string(const ThetaMap& f);
nlohmann::json theta_to_json(const ThetaMap& f);
ThetaMap theta_from_json(const nlohmann::json& j, const Tree& s, const Tree& t);

} // namespace globwb
