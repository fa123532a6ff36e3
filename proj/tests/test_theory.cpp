#include <doctest.h>

#include <memory>
#include <random>
#include <string>

#include "globwb/error.hpp"
#include "globwb/theory.hpp"

using namespace globwb;

namespace doctest {
template <>
struct StringMaker<Term> {
    static String convert(const Term& t) { return to_string(t).c_str(); }
};
} // namespace doctest

namespace {

const std::string kLibrary = std::string(GLOBWB_DATA_DIR) + "/standard_n3.json";

Tree T(const char* s) { return parse_tree_literal(s); }

int count_in_stage(const TheoryPresentation& th, const std::string& system, bool equations) {
    int c = 0;
    for (const auto& name : th.systems.at(system))
        if (th.symbol(name).equation == equations) ++c;
    return c;
}

// Boundaries of a hom-set element, computed straight from the wreath data.
int fillers_with_boundary(const ThetaMap& s, const ThetaMap& t) {
    const int k = source_dim(s);
    int c = 0;
    for (const auto& h : hom(globe(k + 1), s.tgt))
        if (compose(globe_face(k, k + 1, 0), h) == s && compose(globe_face(k, k + 1, 1), h) == t) ++c;
    return c;
}

} // namespace

TEST_CASE("base theory has only globular morphisms") {
    TheoryPresentation th = base_theory(3);
    CHECK(th.symbols.empty());
    CHECK_THROWS_AS(base_theory(0), DomainError);
    Tree a = T("[[[][]][]]");
    for (const auto& f : hom(globe(1), a)) {
        if (!is_globular(f)) continue;
        Term t = globular_term(f);
        CHECK(eval_theta(th, t) == f);
    }
    CHECK(eval_theta(th, identity_term(a)) == identity(a));
}

TEST_CASE("binary composition is admissible and evaluates to the composite cell") {
    TheoryPresentation th = base_theory(1);
    Tree a = leaf_row(2);
    BatchItem nabla{"nabla", a, 1, parse_term(th, "sg1", globe(0), a), parse_term(th, "tg2", globe(0), a)};
    TheoryPresentation ext = extend(th, {nabla});
    const auto& s = ext.symbol("nabla");
    REQUIRE(s.theta_image);
    // the composite cell spans both edges: phi = (0, 2) with trivial components
    CHECK(s.theta_image->phi == std::vector<int>{0, 2});
    CHECK(s.theta_image->comps.size() == 2);
    CHECK(eval_theta(ext, symbol_term(ext, "nabla")) == *s.theta_image);
    CHECK(fillers_with_boundary(eval_theta(ext, *s.src), eval_theta(ext, *s.tgt)) == 1);
    CHECK(s.stage == 1);
    CHECK_THROWS_AS(extend(ext, {nabla}), DomainError);
}

TEST_CASE("groupoidal inverse 2-cell and the dimension bound") {
    TheoryPresentation th = base_theory(2, TheoryKind::Groupoidal);
    Tree d2 = globe(2);
    BatchItem omega{"omega", d2, 2, parse_term(th, "tg1", globe(1), d2), parse_term(th, "sg1", globe(1), d2)};
    TheoryPresentation ext = extend(th, {omega});
    const auto& s = ext.symbol("omega");
    CHECK_FALSE(s.theta_image.has_value());
    CHECK(term_src(ext, symbol_term(ext, "omega")) == parse_term(ext, "tg1", globe(1), d2));
    CHECK_THROWS_AS(eval_theta(ext, symbol_term(ext, "omega")), DomainError);

    Tree d3 = globe(3);
    BatchItem high{"high", d3, 2, parse_term(th, "ssg1", globe(1), d3), parse_term(th, "ttg1", globe(1), d3)};
    try {
        extend(th, {high});
        FAIL("pair into a 3-dimensional arity must be rejected");
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find("dim(A)") != std::string::npos);
    }
    // the same reversed pair is not categorically admissible
    TheoryPresentation cat = base_theory(2);
    BatchItem rev{"rev", d2, 2, parse_term(cat, "tg1", globe(1), d2), parse_term(cat, "sg1", globe(1), d2)};
    CHECK_THROWS_AS(extend(cat, {rev}), DomainError);
}

TEST_CASE("non-parallel pairs are rejected") {
    TheoryPresentation th = base_theory(2, TheoryKind::Groupoidal);
    Tree a = leaf_row(2);
    BatchItem bad{"bad", a, 2, parse_term(th, "g1", globe(1), a), parse_term(th, "g2", globe(1), a)};
    CHECK_THROWS_AS(extend(th, {bad}), DomainError);
}

TEST_CASE("standard systems carry the prescribed boundary laws") {
    TheoryPresentation th = standard_systems(base_theory(3));
    CHECK(th.systems.at("comp").size() == 3);
    CHECK(th.systems.at("id").size() == 3);
    CHECK(count_in_stage(th, "unit_l", false) == 2);
    CHECK(count_in_stage(th, "unit_l", true) == 1);
    CHECK(count_in_stage(th, "unit_r", true) == 1);
    CHECK(th.systems.at("whisker_r") == std::vector<std::string>{"wr0_2", "wr1_2", "wr0_3"});
    CHECK(th.systems.at("whisker_l") == std::vector<std::string>{"wl0_2", "wl1_2", "wl0_3"});
    for (const auto& a : audit(th)) CHECK_MESSAGE(a.ok, a.name << ": " << a.message);

    for (int k = 1; k <= 3; ++k) {
        const auto& c = th.symbol("c" + std::to_string(k));
        const Tree& a = c.arity;
        CHECK(leaf_count(a) == 2);
        CHECK(tree_to_table(a) == DimensionTable{{k, k}, {k - 1}});
        // c o sigma = i1 o sigma, c o tau = i2 o tau
        Term i1s = globular_term(compose(globe_face(k - 1, k, 0), globe_inclusion(a, 0)));
        Term i2t = globular_term(compose(globe_face(k - 1, k, 1), globe_inclusion(a, 1)));
        CHECK(term_src(th, symbol_term(th, c.name)) == i1s);
        CHECK(term_tgt(th, symbol_term(th, c.name)) == i2t);
        CHECK(fillers_with_boundary(eval_theta(th, i1s), eval_theta(th, i2t)) == 1);
    }
    for (int k = 0; k < 3; ++k) {
        Term id = symbol_term(th, "id" + std::to_string(k));
        CHECK(term_src(th, id) == identity_term(globe(k)));
        CHECK(term_tgt(th, id) == identity_term(globe(k)));
    }
    for (int k = 2; k <= 3; ++k) {
        const std::string ks = std::to_string(k);
        Term l = symbol_term(th, "l" + ks), r = symbol_term(th, "r" + ks);
        CHECK(term_src(th, l) == identity_term(globe(k - 1)));
        CHECK(term_src(th, r) == identity_term(globe(k - 1)));
        // (1, tau o id_{k-2}) o c_{k-1}, assembled from its pieces
        const Tree& ca = th.symbol("c" + std::to_string(k - 1)).arity;
        Term tau_id = substitute(th, symbol_term(th, "id" + std::to_string(k - 2)),
                                 globular_term(globe_face(k - 2, k - 1, 1)));
        Term sigma_id = substitute(th, symbol_term(th, "id" + std::to_string(k - 2)),
                                   globular_term(globe_face(k - 2, k - 1, 0)));
        Term one = identity_term(globe(k - 1));
        Term pair_l = make_term(th, ca, globe(k - 1), {one.entries[0], tau_id.entries[0]});
        Term pair_r = make_term(th, ca, globe(k - 1), {sigma_id.entries[0], one.entries[0]});
        CHECK(term_tgt(th, l) == substitute(th, symbol_term(th, "c" + std::to_string(k - 1)), pair_l));
        CHECK(term_tgt(th, r) == substitute(th, symbol_term(th, "c" + std::to_string(k - 1)), pair_r));
    }
    CHECK(standard_systems(th).symbols.size() == th.symbols.size());
}

TEST_CASE("whiskering a globular sum by a 1-cell") {
    TheoryPresentation th = standard_systems(base_theory(3));
    Tree a = T("[[[][]][]]");
    Term wr = whisker_tree_right(th, a);
    CHECK(wr.entries.size() == 3);
    CHECK(wr.tgt == T("[[[][]][][]]"));
    CHECK(wr.entries[0].symbol.empty());
    CHECK(wr.entries[1].symbol.empty());
    CHECK(wr.entries[2].symbol == "c1");
    CHECK(to_string(wr) == "<g1,g2,c1<g3,g4>>");
    Term wl = whisker_tree_left(th, a);
    CHECK(wl.tgt == T("[[][[][]][]]"));
    CHECK(to_string(wl) == "<wl0_2<g1,g2>,wl0_2<g1,g3>,g4>");
    CHECK(to_string(whisker_tree_right(th, globe(2))) == "wr0_2");
    CHECK(to_string(whisker_tree_right(th, globe(0))) == "sg1");
    // evaluation: every cell lands in the whiskered sum and the new edge is reached
    ThetaMap e = eval_theta(th, wr);
    CHECK(e.src == a);
    CHECK(e.phi == std::vector<int>{0, 1, 3});
}

TEST_CASE("groupoidalization adds the inverse systems") {
    TheoryPresentation cat = standard_systems(base_theory(3));
    TheoryPresentation th = groupoidalize(cat);
    CHECK(th.kind == TheoryKind::Groupoidal);
    CHECK(th.systems.at("inv_l").size() + th.systems.at("inv_r").size() == 6);
    CHECK(count_in_stage(th, "cancel_l", false) + count_in_stage(th, "cancel_r", false) == 4);
    CHECK(count_in_stage(th, "cancel_l", true) + count_in_stage(th, "cancel_r", true) == 2);
    CHECK(th.identified.at("c1") == "w");
    CHECK(th.identified.at("c3") == "Sigma^2(w)");
    for (const auto& a : audit(th)) CHECK_MESSAGE(a.ok, a.name << ": " << a.message);

    for (int k = 1; k <= 3; ++k) {
        for (const char* side : {"il", "ir"}) {
            Term i = symbol_term(th, side + std::to_string(k));
            CHECK(term_src(th, i) == globular_term(globe_face(k - 1, k, 1)));
            CHECK(term_tgt(th, i) == globular_term(globe_face(k - 1, k, 0)));
        }
    }
    for (int k = 2; k <= 3; ++k) {
        Term id = symbol_term(th, "id" + std::to_string(k - 2));
        CHECK(term_src(th, symbol_term(th, "kl" + std::to_string(k))) ==
              substitute(th, id, globular_term(globe_face(k - 2, k - 1, 0))));
        CHECK(term_src(th, symbol_term(th, "kr" + std::to_string(k))) ==
              substitute(th, id, globular_term(globe_face(k - 2, k - 1, 1))));
    }
    TheoryPresentation again = groupoidalize(th);
    CHECK(theory_to_json(again) == theory_to_json(th));
    CHECK_THROWS_AS(groupoidalize(base_theory(3)), DomainError);
}

TEST_CASE("top-dimensional equations rewrite terms") {
    TheoryPresentation th = groupoidalize(standard_systems(base_theory(3)));
    Tree d3 = globe(3);
    CHECK(th.symbol("l4").equation);
    CHECK_FALSE(th.symbol("l4").lhs_is_src);
    Term unit = parse_term(th, "c3<g1,id2(tg1)>", d3, d3);
    CHECK(unit == identity_term(d3));
    Term cancel = parse_term(th, "c3<g1,il3(g1)>", d3, d3);
    CHECK(cancel == parse_term(th, "id2(sg1)", d3, d3));
    Tree d2 = globe(2);
    Term low = parse_term(th, "c2<g1,id1(tg1)>", d2, d2);
    CHECK_FALSE(low == identity_term(d2));
}

TEST_CASE("term literals round trip and report offsets") {
    TheoryPresentation th = load_theory_file(kLibrary);
    for (const auto& s : th.symbols) {
        for (const Term* b : {&*s.src, &*s.tgt}) {
            std::string text = to_string(*b);
            CHECK(parse_term(th, text, b->src, b->tgt) == normalize(th, *b));
            if (!s.equation) CHECK(parse_term(th, text, b->src, b->tgt) == *b);
        }
    }
    Tree a = leaf_row(3);
    try {
        parse_term(th, "c1<g1,g3>", globe(1), a);
        FAIL("non-composable pair accepted");
    } catch (const ParseError& e) {
        CHECK(e.offset() == 2);
    }
    CHECK_THROWS_AS(parse_term(th, "zz(g1)", globe(1), a), ParseError);
    CHECK_THROWS_AS(parse_term(th, "sg1", globe(1), a), ParseError);
    CHECK_THROWS_AS(parse_term(th, "g4", globe(1), a), ParseError);
}

TEST_CASE("the shipped library builds and audits clean") {
    TheoryPresentation th = load_theory_file(kLibrary);
    for (const auto& a : audit(th)) CHECK_MESSAGE(a.ok, a.name << ": " << a.message);
    for (const char* name : {"a1", "h2", "a2", "x3", "p3", "t3", "a3"}) CHECK(th.has(name));
    CHECK(th.symbol("a3").equation);
    auto stages = th.stages();
    for (std::size_t k = 0; k < stages.size(); ++k)
        for (const auto& name : stages[k]) CHECK(th.symbol(name).k == static_cast<int>(k));
    // rebuilding is bit-identical
    CHECK(theory_to_json(load_theory_file(kLibrary)).dump() == theory_to_json(th).dump());
}

TEST_CASE("evaluation is a functor on random composable terms") {
    TheoryPresentation th = load_theory_file(kLibrary);
    std::mt19937_64 rng(11);
    std::vector<Tree> shapes = all_trees_up_to(4);
    int checked = 0, with_symbols = 0;
    for (int attempt = 0; attempt < 400 && checked < 60; ++attempt) {
        const Tree& c = shapes[rng() % shapes.size()];
        const Tree& b = shapes[rng() % shapes.size()];
        const int k = static_cast<int>(rng() % 3);
        auto t = random_term(th, rng, globe(k), b, 2);
        auto u = random_term(th, rng, b, c, 1);
        if (!t || !u) continue;
        Term tu = substitute(th, *t, *u);
        CHECK(eval_theta(th, tu) == compose(eval_theta(th, *t), eval_theta(th, *u)));
        CHECK(substitute(th, *t, identity_term(b)) == *t);
        CHECK(substitute(th, identity_term(globe(k)), *t) == *t);
        if (symbol_count(tu) > 0) ++with_symbols;
        ++checked;
    }
    CHECK(checked == 60);
    CHECK(with_symbols >= 30);
}

TEST_CASE("generating cofibrations") {
    Cofibrations c = generating_cofibrations(3);
    REQUIRE(c.I.size() == 5);
    REQUIRE(c.J.size() == 3);
    CHECK(c.I[0].map.dom.total() == 0);
    CHECK(c.I[0].map.cod.total() == 1);
    const GlobMap& collapse = c.I[4].map;
    CHECK(collapse.dom.cells(3) == 2);
    CHECK(collapse.cod.cells(3) == 1);
    CHECK(collapse.f[3] == std::vector<int>{0, 0});
    for (int k = 0; k < 3; ++k) {
        CHECK(c.J[k].map.dom.cells(k) == 1);
        CHECK(c.J[k].map.cod.cells(k + 1) == 1);
        CHECK(c.J[k].map.f[k] == std::vector<int>{0});
    }
}

TEST_CASE("interval presentation") {
    auto th = std::make_shared<const TheoryPresentation>(groupoidalize(load_theory_file(kLibrary)));
    IntervalPresentation ip = interval_presentation(th);
    CHECK(ip.computad.counts() == std::vector<int>{2, 3, 2});
    CHECK(ip.alpha == "f");
    CHECK_NOTHROW(ip.computad.check());
    const Computad& c = ip.computad;
    CHECK(to_string(*c.generator("eta").tgt) == "c1<g,f>");
    CHECK(c.src(*c.generator("theta").tgt) == c.gen("1"));
}

TEST_CASE("division and inverse promotion schemas type-check") {
    auto th = std::make_shared<const TheoryPresentation>(groupoidalize(load_theory_file(kLibrary)));
    Schema d1 = division_term(th, 1);
    CHECK(d1.factors.size() == 3);
    CHECK(d1.composite.dim == 2);
    CHECK(d1.computad.src(d1.composite) == d1.computad.gen("A"));
    CHECK(d1.computad.tgt(d1.composite) == d1.computad.gen("B"));
    Schema d2 = division_term(th, 2);
    CHECK(d2.factors.size() == 3);
    CHECK(d2.composite.dim == 3);
    CHECK(d2.computad.src(d2.composite) == d2.computad.gen("A"));
    CHECK(d2.computad.tgt(d2.composite) == d2.computad.gen("B"));
    CHECK_NOTHROW(d2.computad.check());
    Schema p = promote_inverse_term(th);
    CHECK(p.factors.size() == 2);
    CHECK(p.factors[0].head == "wr0_2");
    CHECK(p.factors[0].args[0].head == "kr2");
    CHECK(p.factors[1].args[1].head == "ir2");
    CHECK(p.factors[1].args[1].args[0].head == "kl2");
    CHECK(to_string(p.computad.src(p.composite)) == "il1(f)");
    CHECK(to_string(p.computad.tgt(p.composite)) == "ir1(f)");
    CHECK_THROWS_AS(division_term(std::make_shared<const TheoryPresentation>(base_theory(3)), 1), DomainError);
}
