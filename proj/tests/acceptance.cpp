#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "globwb/error.hpp"
#include "globwb/suites.hpp"
#include "oracles/steiner.hpp"
#include "oracles/tree_oracles.hpp"

using namespace globwb;

namespace {

const std::string kLibrary = std::string(GLOBWB_DATA_DIR) + "/standard_n3.json";

struct Criterion {
    int id;
    std::string title;
    double limit_seconds;
    std::function<SuiteResult()> run;
};

SuiteResult merge(std::string name, std::vector<SuiteResult> parts) {
    SuiteResult out{std::move(name), 0, {}};
    for (auto& p : parts) {
        out.checked += p.checked;
        if (p.checked == 0) out.fail(p.name + ": nothing checked");
        for (auto& f : p.failures) out.fail(p.name + ": " + f);
    }
    return out;
}

SuiteResult linearization_golden() {
    SuiteResult r{"linearization golden", 0, {}};
    const Tree a = parse_tree("[[[][]][]]");
    const auto lins = linearization(a);
    ++r.checked;
    if (lins.size() != 9) r.fail("expected 9 extensions, got " + std::to_string(lins.size()));
    std::vector<Klass> got, want{Klass::H1Right, Klass::H1Mid,  Klass::H1Left, Klass::H2OverEdge, Klass::H2Max,
                                 Klass::H2Min,   Klass::H2Mid,  Klass::H3,     Klass::H3};
    for (const auto& e : lins) got.push_back(e.klass);
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    ++r.checked;
    if (got != want) r.fail("klass multiset differs");
    ++r.checked;
    if (lins.empty() || lins.front().klass != Klass::H1Right || lins.back().klass != Klass::H1Left)
        r.fail("first must be height-1 rightmost and last height-1 leftmost");
    ++r.checked;
    if (static_cast<int>(lins.size()) != oracle::count_leaf_extensions(oracle::tree_word(a)))
        r.fail("extension count disagrees with the Dyck-word oracle");
    return r;
}

SuiteResult hom_oracle() {
    SuiteResult r{"hom counts", 0, {}};
    const std::vector<std::pair<std::pair<int, int>, long long>> anchored{{{1, 1}, 3}, {{1, 2}, 4}, {{2, 2}, 5}};
    for (const auto& [ks, want] : anchored) {
        ++r.checked;
        const long long got = static_cast<long long>(hom(globe(ks.first), globe(ks.second)).size());
        if (got != want)
            r.fail("hom(D" + std::to_string(ks.first) + ", D" + std::to_string(ks.second) + ") = " + std::to_string(got));
    }
    for (const auto& t : all_trees_up_to(4)) {
        const auto cells = oracle::free_cell_counts(t);
        for (int k = 0; k <= 3; ++k) {
            ++r.checked;
            const long long got = static_cast<long long>(hom(globe(k), t).size());
            if (got != cells[k] || hom_count(globe(k), t) != cells[k])
                r.fail("hom(D" + std::to_string(k) + ", " + to_string(t) + ") = " + std::to_string(got) +
                       ", oracle " + std::to_string(cells[k]));
        }
    }
    return r;
}

SuiteResult boundary_oracle() {
    SuiteResult r{"boundary by deletion", 0, {}};
    for (const auto& t : all_trees_up_to(6)) {
        if (dim(t) == 0) continue;
        ++r.checked;
        if (!(boundary(t) == table_to_tree(oracle::table_boundary(tree_to_table(t)))))
            r.fail("boundary of " + to_string(t) + " disagrees with the table oracle");
    }
    return r;
}

} // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "linearization of the nine-extension tree", 1, linearization_golden},
        {2, "hom counts agree with the free strict category oracle", 60, hom_oracle},
        {3, "category laws on trees with <= 3 nodes", 60, [] { return suite_category_laws(3); }},
        {4, "homogeneous/globular factorization on trees with <= 4 nodes", 120, [] { return suite_factorization(4); }},
        {5, "bijective / fully faithful factorization and lifting, 200 squares per m <= 3", 30,
         [] { return suite_bij_ff(0, 200, 3); }},
        {6, "latching objects are spheres; boundary matches the table oracle", 10,
         [] { return merge("spheres", {suite_latching(4), boundary_oracle()}); }},
        {7, "coherator tower: library, inverses, functoriality on 200 pairs", 60,
         [] { return suite_theory(load_theory_file(kLibrary), 0, 200); }},
        {8, "cylinder presentations", 10, [] { return suite_cylinders(); }},
        {9, "stacks over dim <= 2 trees with <= 5 leaves", 120, [] { return suite_stacks(5); }},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        SuiteResult r;
        try {
            r = c.run();
        } catch (const std::exception& e) {
            r.name = c.title;
            r.fail(std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (secs >= c.limit_seconds)
            r.fail("runtime " + std::to_string(secs) + " s exceeds the " + std::to_string(c.limit_seconds) + " s budget");
        const bool ok = r.ok();
        if (!ok) ++failed;
        std::printf("%s criterion %d: %s (%lld checks, %.3f s, limit %.0f s)\n", ok ? "PASS" : "FAIL", c.id,
                    c.title.c_str(), r.checked, secs, c.limit_seconds);
        for (const auto& f : r.failures) std::printf("    %s\n", f.c_str());
    }
    return failed == 0 ? 0 : 1;
}
