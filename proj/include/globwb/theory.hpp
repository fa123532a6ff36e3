#pragma once

#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "globwb/globset.hpp"
#include "globwb/theta.hpp"
#include "globwb/tree.hpp"

namespace globwb {

struct Term;

// One component of a term, for one globe of its source: either a globular cell
// of the codomain or a symbol applied to a term out of the symbol's arity.
struct Entry {
    int dim = 0;
    std::string symbol;            // empty for a globular cell
    std::optional<ThetaMap> cell;  // globular D_dim -> codomain
    std::vector<Term> inner;       // one element for a symbol application
};

// A morphism src -> tgt of a presented theory in normal form.
struct Term {
    Tree src, tgt;
    std::vector<Entry> entries;
};

bool operator==(const Entry& a, const Entry& b);
bool operator==(const Term& a, const Term& b);

enum class TheoryKind { Groupoidal, Categorical };
const char* kind_name(TheoryKind k);

struct OperationSymbol {
    std::string name;
    Tree arity;
    int k = 0;
    std::optional<Term> src, tgt;  // D_{k-1} -> arity
    std::optional<ThetaMap> theta_image;
    long long filler_index = -1;   // position of theta_image in the canonical hom order
    int stage = 0;                 // operations of dimension k enter at stage k
    int batch = 0;
    TheoryKind admitted_as = TheoryKind::Categorical;
    bool equation = false;         // k = n + 1
    bool lhs_is_src = true;        // orientation of an equation used for rewriting
};

struct TheoryPresentation {
    int n = 1;
    TheoryKind kind = TheoryKind::Categorical;
    std::vector<OperationSymbol> symbols;
    std::map<std::string, std::size_t> index;
    std::map<std::string, std::vector<std::string>> systems;
    std::map<std::string, std::string> identified;
    int batches = 0;

    bool has(const std::string& name) const { return index.count(name) > 0; }
    const OperationSymbol& symbol(const std::string& name) const;
    std::vector<std::vector<std::string>> stages() const;  // stage k = names of dimension k
};

TheoryPresentation base_theory(int n, TheoryKind kind = TheoryKind::Categorical);

struct BatchItem {
    std::string name;
    Tree arity;
    int k = 0;
    std::optional<Term> src, tgt;
};

// Adds a batch; every pair must pass the admissibility predicate of th.kind.
TheoryPresentation extend(const TheoryPresentation& th, const std::vector<BatchItem>& batch);

// Term construction and calculus
Term make_term(const TheoryPresentation& th, const Tree& src, const Tree& tgt, std::vector<Entry> entries);
Term identity_term(const Tree& t);
Term globular_term(const ThetaMap& f);  // f globular
Term symbol_term(const TheoryPresentation& th, const std::string& name);
Entry cell_entry(const ThetaMap& c);
Entry apply_entry(const TheoryPresentation& th, const std::string& name, const Term& inner);

Term substitute(const TheoryPresentation& th, const Term& t, const Term& u);  // u after t
Term term_src(const TheoryPresentation& th, const Term& t);
Term term_tgt(const TheoryPresentation& th, const Term& t);
Term normalize(const TheoryPresentation& th, const Term& t);
bool equal_terms(const TheoryPresentation& th, const Term& a, const Term& b);
bool is_evaluable(const TheoryPresentation& th, const Term& t);
ThetaMap eval_theta(const TheoryPresentation& th, const Term& t);
int symbol_count(const Term& t);
bool term_parallel(const TheoryPresentation& th, const Term& a, const Term& b);

// Literal syntax: a cell of the codomain is [st]*g<N> (globes numbered from 1),
// an application is name(term), name<e1,...,em> or a bare name (identity argument),
// and a term out of a non-globe is a tuple <e1,...,em>.
Term parse_term(const TheoryPresentation& th, std::string_view text, const Tree& src, const Tree& tgt);
std::string to_string(const Term& t);

// Standard structure
TheoryPresentation standard_systems(const TheoryPresentation& th);
TheoryPresentation groupoidalize(const TheoryPresentation& th);
std::string whisker_right_name(int d, int k);  // D_{k+d} -> D_{k+d} + over D_d of D_{d+1}
std::string whisker_left_name(int d, int k);   // D_{k+d} -> D_{d+1} + over D_d of D_{k+d}
Term whisker_tree_right(const TheoryPresentation& th, const Tree& a);  // A -> A + over D_0 of D_1
Term whisker_tree_left(const TheoryPresentation& th, const Tree& a);   // A -> D_1 + over D_0 of A

struct AuditItem {
    std::string name;
    bool ok;
    std::string message;
};
std::vector<AuditItem> audit(const TheoryPresentation& th);

TheoryPresentation theory_from_json(const nlohmann::json& spec);
TheoryPresentation load_theory_file(const std::string& path);
TheoryPresentation extend_from_json(const TheoryPresentation& th, const nlohmann::json& batch);
nlohmann::json theory_to_json(const TheoryPresentation& th);
nlohmann::json term_to_json(const Term& t);

// Random well-typed terms src -> tgt built from cells and symbols with a Theta image.
std::optional<Term> random_term(const TheoryPresentation& th, std::mt19937_64& rng, const Tree& src,
                                const Tree& tgt, int depth = 2);

struct NamedMap {
    std::string name;
    GlobMap map;
};
struct Cofibrations {
    std::vector<NamedMap> I, J;
};
Cofibrations generating_cofibrations(int n);

// Cells of free models on finite computads: generators, or symbols applied to
// tuples of cells indexed by the globes of the symbol's arity.
struct CellExpr {
    std::string head;
    bool generator = true;
    int dim = 0;
    std::vector<CellExpr> args;

    friend bool operator==(const CellExpr&, const CellExpr&) = default;
};

struct Generator {
    std::string name;
    int dim = 0;
    std::optional<CellExpr> src, tgt;
    std::string role;
};

class Computad {
public:
    explicit Computad(std::shared_ptr<const TheoryPresentation> th);

    const TheoryPresentation& theory() const { return *th_; }
    std::shared_ptr<const TheoryPresentation> theory_ptr() const { return th_; }
    const std::vector<Generator>& generators() const { return gens_; }
    bool has(const std::string& name) const { return index_.count(name) > 0; }
    const Generator& generator(const std::string& name) const;

    CellExpr add(const std::string& name, int dim, std::optional<CellExpr> src = {},
                 std::optional<CellExpr> tgt = {}, std::string role = {});
    CellExpr add(const std::string& name, const std::string& src, const std::string& tgt, std::string role = {});
    CellExpr gen(const std::string& name) const;
    CellExpr apply(const std::string& symbol, std::vector<CellExpr> args) const;
    // Same grammar as terms, with generator names for cells and s(...), t(...) for faces.
    CellExpr parse(std::string_view text) const;

    CellExpr src(const CellExpr& e) const;
    CellExpr tgt(const CellExpr& e) const;
    CellExpr face(const CellExpr& e, int eps, int to_dim) const;
    // Evaluate a term D_k -> A on a tuple of cells forming a map A -> this.
    CellExpr interpret(const Term& t, const std::vector<CellExpr>& args) const;
    void check_tuple(const Tree& a, const std::vector<CellExpr>& args) const;

    std::vector<int> counts() const;
    void check() const;  // every generator boundary is well typed and parallel

private:
    CellExpr interpret_entry(const Entry& e, const std::vector<CellExpr>& args) const;

    std::shared_ptr<const TheoryPresentation> th_;
    std::vector<Generator> gens_;
    std::map<std::string, std::size_t> index_;
};

std::string to_string(const CellExpr& e);
nlohmann::json computad_to_json(const Computad& c);

struct IntervalPresentation {
    Computad computad;
    std::string alpha;  // the generator picked out by alpha_1
};
IntervalPresentation interval_presentation(std::shared_ptr<const TheoryPresentation> th);

struct Schema {
    Computad computad;
    std::vector<CellExpr> factors;  // the displayed factors
    std::vector<CellExpr> chain;    // factors with bracketing and unit constraints inserted
    CellExpr composite;
};
Schema division_term(std::shared_ptr<const TheoryPresentation> th, int n);
Schema promote_inverse_term(std::shared_ptr<const TheoryPresentation> th);
// Vertical composite of a chain of k-cells (k >= 1), checking adjacency.
CellExpr vertical_composite(const Computad& c, const std::vector<CellExpr>& chain);

} // namespace globwb
