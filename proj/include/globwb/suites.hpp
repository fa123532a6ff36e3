#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "globwb/cylinder.hpp"
#include "globwb/globset.hpp"

namespace globwb {

// Outcome of a property suite: how many instances were checked and the first failures.
struct SuiteResult {
    std::string name;
    long long checked = 0;
    std::vector<std::string> failures;

    bool ok() const { return failures.empty() && checked > 0; }
    void fail(std::string what);
};

// Associativity and unit laws on all composable triples among trees with <= max_nodes nodes.
SuiteResult suite_category_laws(int max_nodes);
// Existence and uniqueness of homogeneous/globular factorizations, by exhaustive search.
SuiteResult suite_factorization(int max_nodes);
// Factorization classes and unique orthogonal lifts on `instances` random squares per m <= max_m.
SuiteResult suite_bij_ff(std::uint64_t seed, int instances, int max_m);
// latching(D, m) is isomorphic to the (m-1)-sphere for 1 <= m <= max_m.
SuiteResult suite_latching(int max_m);
// Library audit, inverse systems, and functoriality of evaluation on random composable pairs.
SuiteResult suite_theory(const TheoryPresentation& library, std::uint64_t seed, int pairs);
// Cylinder counts, typing, boundaries, and cylinders on globes.
SuiteResult suite_cylinders();
// Stacks of every homogeneous rho : D_2 -> A over trees of dimension <= 2 with <= max_leaves leaves.
SuiteResult suite_stacks(int max_leaves);

// Trees of dimension <= max_dim with at most max_leaves leaves.
std::vector<Tree> trees_with_leaves(int max_leaves, int max_dim);
// A map is homogeneous when it factors through no non-identity globular map (search).
bool homogeneous_by_search(const ThetaMap& h);

} // namespace globwb
