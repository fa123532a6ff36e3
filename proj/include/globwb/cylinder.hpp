#pragma once

#include <climits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "globwb/theory.hpp"

namespace globwb {

// "No degeneracy" for the collapse indices of cylinders; it behaves as infinity under min.
constexpr int kNone = INT_MAX;

// The groupoidal theory used when none is given: standard systems on the n = 3 base, groupoidalized.
std::shared_ptr<const TheoryPresentation> cylinder_theory();

// Finite presentation of (possibly degenerate) cylinders. Generator names: the top cells A, B
// with boundary cells A_s<j>, A_t<j>, B_s<j>, B_t<j>; side cells Fs<d>, Ft<d> of level d; filler F.
struct CylPresentation {
    int k = 0;
    Computad computad;
    std::string iota0, iota1, top;
    int p = kNone, q = kNone;
    std::vector<std::string> source_cylinder, target_cylinder;  // top generators of s(F), t(F)
};

CylPresentation cyl_presentation(int k, std::shared_ptr<const TheoryPresentation> th = {});
CylPresentation degenerate_cyl(int k, int p, int q, std::shared_ptr<const TheoryPresentation> th = {});

struct BoundaryCyl {
    CylPresentation boundary;         // cyl(D_k) without its filler
    std::vector<std::string> added;   // generators added by the inclusion into cyl(D_k)
    std::vector<std::string> source_cylinder, target_cylinder;
    std::string cell0, cell1;         // the two k-cells
};
BoundaryCyl boundary_cyl(int k, std::shared_ptr<const TheoryPresentation> th = {});

// Generator renamings between presentations.
using Renaming = std::map<std::string, std::string>;
CellExpr rename(const CellExpr& e, const Renaming& f);
bool is_morphism(const Computad& x, const Computad& y, const Renaming& f);
bool is_isomorphism(const Computad& x, const Computad& y, const Renaming& f);
// cyl(D_j) -> cyl(D_k) onto the iterated source (eps = 0) or target (eps = 1) sub-cylinder.
Renaming cyl_face_map(int j, int k, int eps);

// cyl(A) for a globular sum A: generators U_c, V_c, C_c for every cell c of A, with
// c named x<i>, e<i>, E<i>, T<i> in dimensions 0..3 (realization order).
struct GlobeCopy {
    int leaf = 0;
    int dim = 0;
    Renaming map;  // cyl(D_dim) -> cyl(A)
};
struct StructuralInclusion {
    ExtendedTree element;
    std::vector<CellExpr> cells;  // one per globe of element.result
};
struct CylGlobSum {
    Tree a;
    Computad computad;
    std::vector<GlobeCopy> globes;
    std::vector<StructuralInclusion> inclusions;
};
CylGlobSum cyl_glob_sum(const Tree& a, std::shared_ptr<const TheoryPresentation> th = {});
std::string cell_name(int dim, int index);

// Boundary pairs of the coherence cylinders; the extensions themselves are opaque.
enum class CoherenceKind { Psi, Phi, Theta };
const char* coherence_name(CoherenceKind k);
struct CoherencePair {
    CoherenceKind kind;
    std::vector<int> indices;
    int level = 0;
    Tree target;
    Term first, second;
};
// Psi takes (m, k); Phi and Theta take (q, m, k).
CoherencePair coherence_boundary(CoherenceKind kind, const std::vector<int>& indices, int level,
                                 std::shared_ptr<const TheoryPresentation> th = {});

// Edges of stack squares: rho applied to an A-shaped tuple. A block of A holds one group per
// position, a group being a vertical composite of atoms; an atom is a cell of cyl(A) whiskered
// by 0-side cells before (pre) and after (post).
struct StackAtom {
    std::string pre, cell, post;
    friend bool operator==(const StackAtom&, const StackAtom&) = default;
};
using StackGroup = std::vector<StackAtom>;
struct StackEdge {
    std::string outer_pre, outer_post;
    std::vector<std::vector<StackGroup>> blocks;
    std::string pattern;  // the displayed shape with indices filled in
    friend bool operator==(const StackEdge& a, const StackEdge& b) {
        return a.outer_pre == b.outer_pre && a.outer_post == b.outer_post && a.blocks == b.blocks;
    }
};
// Equality up to regrouping inside blocks.
bool same_composite(const StackEdge& a, const StackEdge& b);
std::string to_string(const StackEdge& e);

struct StackSide {
    std::string label;    // "constraint", "rho*_sigma" or "rho*_tau"
    std::string display;
    std::optional<ThetaMap> extension, boundary_src, boundary_tgt;  // for rho*
};

struct StackSquare {
    int index = 0;
    std::string case_tag;  // CYL1..CYL8
    ExtendedTree element;
    int cyl_dim = 1;       // 1-cylinders for k = 2, 0-cylinders for k = 1
    bool source_degenerate = false, target_degenerate = false;
    StackEdge top, bottom;
    std::optional<StackSide> left, right;

    int p() const { return source_degenerate ? 0 : kNone; }
    int q() const { return target_degenerate ? 0 : kNone; }
};

struct Stack {
    ThetaMap rho;
    int k = 0;
    std::vector<StackSquare> squares;
};

std::string case_tag(Klass k);
Stack stack(const ThetaMap& rho, std::shared_ptr<const TheoryPresentation> th = {});
// The cells of cyl(A) an edge denotes, checked for composability; throws on ill-typed edges.
void check_edge(const Computad& cyl_a, const Tree& a, const StackEdge& e);
// The 1-cells bounding an edge on the source (eps = 0) or target (eps = 1) side.
std::vector<CellExpr> edge_boundary(const Computad& cyl_a, const StackEdge& e, int eps);
// Square-level edges the construction expects at both ends of the stack.
StackEdge stack_first_top(const Tree& a);
StackEdge stack_last_bottom(const Tree& a);

struct CylinderRecord {
    StackEdge top, bottom;
    int p = kNone, q = kNone;
    std::vector<std::string> source, target;  // non-degenerate sides, in stacking order
    std::size_t count = 1;
};
CylinderRecord record(const StackSquare& s);
CylinderRecord vcompose_meta(const std::vector<CylinderRecord>& parts);
CylinderRecord vcompose_meta(const std::vector<StackSquare>& squares);

// Modifications between k-cylinders C, D : A ~> B.
struct ModPresentation {
    int k = 0;
    Computad computad;
    Renaming xi0, xi1;                 // the two copies of cyl(D_k)
    std::string theta_s, theta_t, top;
    std::vector<std::string> chosen;   // opaque chosen cells (Gamma, Upsilon, composites)
};
ModPresentation modification_presentation(int k, std::shared_ptr<const TheoryPresentation> th = {});

nlohmann::json cyl_to_json(const CylPresentation& c);
nlohmann::json glob_sum_to_json(const CylGlobSum& c);
nlohmann::json coherence_to_json(const CoherencePair& c);
nlohmann::json stack_to_json(const Stack& s);
nlohmann::json modification_to_json(const ModPresentation& m);
std::string stack_to_dot(const Stack& s);

} // namespace globwb
