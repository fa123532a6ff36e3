#include <doctest.h>

#include <random>

#include "globwb/error.hpp"
#include "globwb/globset.hpp"

using namespace globwb;

namespace {

std::vector<int> counts(const FinGlobSet& x) { return x.count; }

// k-cells of a realized tree are (depth-k node, gap) pairs
std::vector<int> gap_counts(const Tree& t) {
    std::vector<int> out;
    std::vector<const Tree*> level{&t};
    while (!level.empty()) {
        int c = 0;
        std::vector<const Tree*> next;
        for (const Tree* v : level) {
            c += static_cast<int>(v->arity()) + 1;
            for (const auto& ch : v->children) next.push_back(&ch);
        }
        out.push_back(c);
        level = std::move(next);
    }
    return out;
}

GlobMap endpoint(int eps) {
    FinGlobSet d0 = realize(globe(0), 1);
    FinGlobSet d1 = realize(globe(1), 1);
    return GlobMap{d0, d1, {{eps}, {}}};
}

} // namespace

TEST_CASE("realization of trees") {
    CHECK(counts(realize(globe(2))) == std::vector<int>{2, 2, 1});
    Tree a = parse_tree("[[[][]][]]");
    CHECK(counts(realize(a)) == std::vector<int>{3, 4, 2});
    for (const auto& t : all_trees_up_to(6)) {
        FinGlobSet x = realize(t);
        validate(x);
        CHECK(counts(x) == gap_counts(t));
        auto sx = realize(suspend(t));
        CHECK(sx.count[0] == 2);
        for (int k = 0; k <= x.n; ++k) CHECK(sx.count[k + 1] == x.count[k]);
    }
}

TEST_CASE("the nine-extension tree as an iterated pushout") {
    // D2 +_{D1} D2, then +_{D0} D1
    const int n = 2;
    FinGlobSet d0 = realize(globe(0), n), d1 = realize(globe(1), n), d2 = realize(globe(2), n);
    GlobMap t1{d1, d2, {{0, 1}, {1}, {}}};
    GlobMap s1{d1, d2, {{0, 1}, {0}, {}}};
    Colimit p = pushout(t1, s1);
    CHECK(counts(p.object) == std::vector<int>{2, 3, 2});
    // right endpoint of the first pushout
    GlobMap end{d0, p.object, {{1}, {}, {}}};
    GlobMap start{d0, d1, {{0}, {}, {}}};
    Colimit q = pushout(end, start);
    CHECK(counts(q.object) == std::vector<int>{3, 4, 2});
    CHECK(find_iso(q.object, realize(parse_tree("[[[][]][]]"))).has_value());
}

TEST_CASE("pushouts") {
    FinGlobSet d1 = realize(globe(1));
    auto id = identity_map(d1);
    CHECK(find_iso(pushout(id, id).object, d1).has_value());
    Colimit two = pushout(endpoint(1), endpoint(0));
    CHECK(counts(two.object) == std::vector<int>{3, 2});
    CHECK(find_iso(two.object, realize(leaf_row(2))).has_value());
}

TEST_CASE("spheres and latching objects") {
    CHECK(sphere(-1).total() == 0);
    CHECK(counts(sphere(0)) == std::vector<int>{2});
    CHECK(counts(sphere(2)) == std::vector<int>{2, 2, 2});
    for (int k = 0; k <= 4; ++k) validate(sphere(k));

    auto fam = globe_family(5, 5);
    for (int m = 1; m <= 4; ++m) {
        FinGlobSet l = latching(fam, m);
        auto iso = find_iso(l, sphere(m - 1, 5));
        REQUIRE(iso.has_value());
        validate(*iso);
    }
    CHECK(latching(fam, 0).total() == 0);

    FinGlobSet c = realize(parse_tree("[[][]]"), 2);
    auto cf = constant_family(c, 4);
    for (int m = 2; m <= 4; ++m) CHECK(find_iso(latching(cf, m), c).has_value());
    // two disconnected copies at degree one
    CHECK(latching(cf, 1).count[0] == 2 * c.count[0]);
}

TEST_CASE("classification") {
    FinGlobSet d2 = realize(globe(2));
    for (int m = 0; m <= 3; ++m) {
        auto c = classify(identity_map(d2), m);
        CHECK(c.bijective);
        CHECK(c.fully_faithful);
    }
    GlobMap sigma{pad(realize(globe(1)), 2), d2, {{0, 1}, {0}, {}}};
    validate(sigma);
    CHECK(is_m_bijective(sigma, 0));
    CHECK_FALSE(is_m_bijective(sigma, 1));

    GlobMap bd = pad(sphere_inclusion(2), 2);
    CHECK(is_m_bijective(bd, 1));
    CHECK_FALSE(is_m_fully_faithful(bd, 1));
}

TEST_CASE("bijective / fully faithful factorization") {
    GlobMap bd = sphere_inclusion(2);
    auto fac = factor_bij_ff(bd, 1);
    CHECK(same_map(compose(fac.h, fac.g), bd));
    CHECK(is_m_bijective(fac.h, 1));
    CHECK(is_m_fully_faithful(fac.g, 1));
    CHECK(find_iso(fac.g.dom, realize(globe(2))).has_value());
    CHECK(is_m_bijective(fac.g, 2));  // g is an isomorphism

    FinGlobSet two(0);
    two.add_cell(0);
    two.add_cell(0);
    FinGlobSet one(0);
    one.add_cell(0);
    GlobMap fold{two, one, {{0, 0}}};
    auto ff = factor_bij_ff(fold, 0);
    CHECK(same_map(compose(ff.h, ff.g), fold));
    CHECK(is_m_bijective(ff.h, 0));
    CHECK(is_m_fully_faithful(ff.g, 0));

    // already bijective: g is an iso
    auto id = factor_bij_ff(identity_map(realize(globe(2))), 2);
    CHECK(is_m_bijective(id.g, 2));
}

TEST_CASE("orthogonality on random instances") {
    std::mt19937_64 rng(7);
    int done = 0;
    for (int attempt = 0; attempt < 2000 && done < 40; ++attempt) {
        const int m = attempt % 3;
        const int n = m + 1;
        FinGlobSet a = random_globset(rng, n, 3), b = random_globset(rng, n, 3);
        FinGlobSet x = random_globset(rng, n, 3), y = random_globset(rng, n, 3);
        auto f1 = random_map(rng, a, b);
        auto f2 = random_map(rng, x, y);
        if (!f1 || !f2) continue;
        GlobMap i = factor_bij_ff(*f1, m).h;
        GlobMap p = factor_bij_ff(*f2, m).g;
        auto v = random_map(rng, i.cod, p.cod);
        if (!v) continue;
        // find u with p.u = v.i
        GlobMap vi = compose(i, *v);
        std::optional<GlobMap> u;
        for (auto& cand : all_maps(i.dom, p.dom, 5000))
            if (same_map(compose(cand, p), vi)) {
                u = cand;
                break;
            }
        if (!u) continue;
        auto lifts = check_orthogonal(i, p, *u, *v, 2);
        CHECK(lifts.size() == 1);
        ++done;
    }
    CHECK(done >= 40);
}

TEST_CASE("loop spaces") {
    FinGlobSet d1 = realize(globe(1));
    auto l = loopspace(d1, 0, 1);
    CHECK(counts(l) == std::vector<int>{1});
    auto l2 = loopspace(realize(globe(2)), 0, 1);
    CHECK(counts(l2) == std::vector<int>{2, 1});
    CHECK(find_iso(l2, realize(globe(1))).has_value());
    CHECK(loopspace(d1, 0, 0).total() == 0);
}

TEST_CASE("bicategory checklist") {
    FinGlobSet d2 = realize(globe(2));
    auto rep = chi_check(d2, {});
    REQUIRE(rep.size() == 7);
    CHECK(rep[0].ok);  // no composable pair of 1-cells at all
    CHECK_FALSE(rep[3].ok);
    CHECK_FALSE(rep[4].ok);

    FinGlobSet e(2);
    e.add_cell(0);
    e.add_cell(1, 0, 0);
    e.add_cell(2, 0, 0);
    ChiStructure full;
    full.comp1[{0, 0}] = 0;
    full.vcomp2[{0, 0}] = 0;
    full.whisker_r[{0, 0}] = 0;
    full.whisker_l[{0, 0}] = 0;
    full.id1[0] = 0;
    full.id2[0] = 0;
    for (const auto& item : chi_check(e, full)) CHECK_MESSAGE(item.ok, item.witness);

    // an idempotent arrow with no 2-cells breaks the unit constraint
    FinGlobSet bare(2);
    bare.add_cell(0);
    bare.add_cell(1, 0, 0);
    ChiStructure partial;
    partial.comp1[{0, 0}] = 0;
    partial.id1[0] = 0;
    auto r = chi_check(bare, partial);
    CHECK_FALSE(r[5].ok);

    ChiStructure bad;
    bad.id1[0] = 5;
    CHECK_THROWS_AS(chi_check(e, bad), DomainError);
}

TEST_CASE("json round trip") {
    FinGlobSet a = realize(parse_tree("[[[][]][]]"));
    auto j = globset_to_json(a);
    CHECK(j["cells"][2].size() == 2);
    CHECK(globset_from_json(j) == a);
    CHECK(globset_to_dot(a).find("->") != std::string::npos);
}
