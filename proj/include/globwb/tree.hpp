#pragma once

#include <compare>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace globwb {

// A planar rooted tree; a globular sum is determined by its tree.
struct Tree {
    std::vector<Tree> children;

    bool is_leaf() const { return children.empty(); }
    std::size_t arity() const { return children.size(); }
    std::size_t size() const;

    friend bool operator==(const Tree&, const Tree&) = default;
    friend std::strong_ordering operator<=>(const Tree& a, const Tree& b);
};

using Path = std::vector<int>;  // child indices from the root, 0-based

struct DimensionTable {
    std::vector<int> tops;
    std::vector<int> joins;

    friend bool operator==(const DimensionTable&, const DimensionTable&) = default;
};

Tree parse_tree(std::string_view text);
// Accepts the bracket grammar or the globe shorthand "Dk".
Tree parse_tree_literal(std::string_view text);
std::string to_string(const Tree& t);

Tree globe(int k);
Tree leaf_row(int m);  // root with m leaf children: m composable 1-cells

DimensionTable tree_to_table(const Tree& t);
Tree table_to_tree(const DimensionTable& tbl);
void validate_table(const DimensionTable& tbl);
DimensionTable parse_table(std::string_view text);
std::string to_string(const DimensionTable& tbl);

int dim(const Tree& t);
Tree boundary(const Tree& t);
Tree suspend(const Tree& t);
std::vector<Tree> decompose(const Tree& t);
Tree reassemble(const std::vector<Tree>& blocks);

const Tree& subtree(const Tree& t, const Path& p);
std::vector<Path> leaf_paths(const Tree& t);
int leaf_count(const Tree& t);

// All trees with exactly `nodes` nodes, in canonical (operator<) order.
std::vector<Tree> all_trees(int nodes);
std::vector<Tree> all_trees_up_to(int nodes);

enum class Klass { H1Right, H1Left, H1Mid, H2OverEdge, H2Max, H2Min, H2Mid, H3 };
const char* klass_name(Klass k);

struct Sector {
    Path parent;
    int gap = 0;

    friend bool operator==(const Sector&, const Sector&) = default;
};

struct ExtendedTree {
    Tree base;
    Sector sector;
    Tree result;
    Klass klass;
    int height;  // height of the inserted vertex
};

Tree insert_leaf(const Tree& t, const Sector& s);
Klass classify_sector(const Tree& t, const Sector& s);
std::vector<Sector> sector_order(const Tree& t);
std::vector<ExtendedTree> linearization(const Tree& t);

nlohmann::json tree_to_json(const Tree& t);
Tree tree_from_json(const nlohmann::json& j);
nlohmann::json extended_to_json(const ExtendedTree& e);
std::string tree_to_dot(const Tree& t, const Path* highlight = nullptr);

} // namespace globwb
