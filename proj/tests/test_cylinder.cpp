#include <doctest.h>

#include <algorithm>
#include <string>
#include <vector>

#include "globwb/cylinder.hpp"
#include "globwb/error.hpp"

using namespace globwb;

namespace {

const char* kNineTree = "[[[][]][]]";

Tree T(const char* s) { return parse_tree_literal(s); }

std::vector<int> padded(std::vector<int> v, std::size_t n) {
    v.resize(std::max(v.size(), n), 0);
    return v;
}

std::vector<int> plus(std::vector<int> a, std::vector<int> b, int sign = 1) {
    const std::size_t n = std::max(a.size(), b.size());
    a = padded(a, n);
    b = padded(b, n);
    for (std::size_t i = 0; i < n; ++i) a[i] += sign * b[i];
    while (!a.empty() && a.back() == 0) a.pop_back();
    return a;
}

std::vector<int> globe_counts(int k) {
    std::vector<int> c(static_cast<std::size_t>(k + 1), 2);
    c[k] = 1;
    return c;
}

std::vector<int> sphere_counts(int k) {
    if (k < 0) return {};
    std::vector<int> c(static_cast<std::size_t>(k + 1), 2);
    return c;
}

// Generator counts of cylinders by the gluing recursion: the boundary of cyl(D_k) is the
// cylinder on the sphere S^{k-1} together with the two k-cells, and cyl(D_k) adds one (k+1)-cell.
std::vector<int> cyl_sphere_counts(int k);
std::vector<int> cyl_disk_counts(int k) {
    auto c = plus(cyl_sphere_counts(k - 1), plus(globe_counts(k), globe_counts(k)));
    c = plus(c, plus(sphere_counts(k - 1), sphere_counts(k - 1)), -1);
    c = padded(c, static_cast<std::size_t>(k + 2));
    ++c[k + 1];
    return c;
}
std::vector<int> cyl_sphere_counts(int k) {
    if (k < 0) return {};
    return plus(plus(cyl_disk_counts(k), cyl_disk_counts(k)), cyl_sphere_counts(k - 1), -1);
}

ThetaMap homogeneous_into(const Tree& a, int k) {
    for (const auto& f : hom(globe(k), a))
        if (is_homogeneous(f)) return f;
    throw std::runtime_error("no homogeneous map");
}

Klass hat_klass(Klass k) { return k == Klass::H2Min || k == Klass::H2Max ? Klass::H2OverEdge : k; }

} // namespace

TEST_CASE("cylinder presentations have the expected generator counts") {
    CHECK(cyl_presentation(0).computad.counts() == std::vector<int>{2, 1});
    CHECK(cyl_presentation(1).computad.counts() == std::vector<int>{4, 4, 1});
    CHECK(cyl_presentation(2).computad.counts() == std::vector<int>{4, 6, 4, 1});
    for (int k = 0; k <= 3; ++k) {
        const auto c = cyl_presentation(k);
        CHECK(c.computad.counts() == cyl_disk_counts(k));
        CHECK_NOTHROW(c.computad.check());
        CHECK(c.computad.generator(c.top).dim == k + 1);
    }
    CHECK(cyl_presentation(3).computad.generator("F").role == "filler (equation)");
}

TEST_CASE("the filler of cyl(D_1) runs from A Ft0 to Fs0 B") {
    const auto c = cyl_presentation(1);
    const Computad& m = c.computad;
    CHECK(*m.generator("F").src == m.parse("c1<A,Ft0>"));
    CHECK(*m.generator("F").tgt == m.parse("c1<Fs0,B>"));
    const auto c2 = cyl_presentation(2);
    CHECK(*c2.computad.generator("F").src == c2.computad.parse("c2<wr0_2<A,Ft0>,Ft1>"));
    CHECK(*c2.computad.generator("F").tgt == c2.computad.parse("c2<Fs1,wl0_2<Fs0,B>>"));
    CHECK(c2.source_cylinder == std::vector<std::string>{"A_s1", "B_s1", "Fs0", "Ft0", "Fs1"});
    CHECK(c2.target_cylinder == std::vector<std::string>{"A_t1", "B_t1", "Fs0", "Ft0", "Ft1"});
}

TEST_CASE("face maps between cylinders are morphisms") {
    for (int k = 0; k <= 3; ++k)
        for (int j = 0; j <= k; ++j)
            for (int eps = 0; eps < 2; ++eps) {
                CAPTURE(k);
                CAPTURE(j);
                CHECK(is_morphism(cyl_presentation(j).computad, cyl_presentation(k).computad, cyl_face_map(j, k, eps)));
            }
    CHECK(is_isomorphism(cyl_presentation(2).computad, cyl_presentation(2).computad, cyl_face_map(2, 2, 0)));
    CHECK_FALSE(is_isomorphism(cyl_presentation(1).computad, cyl_presentation(2).computad, cyl_face_map(1, 2, 0)));
    CHECK_THROWS_AS(cyl_face_map(3, 2, 0), DomainError);
}

TEST_CASE("boundary cylinders are pushouts of lower cylinders") {
    for (int k = 1; k <= 3; ++k) {
        const auto b = boundary_cyl(k);
        auto expected = plus(cyl_sphere_counts(k - 1), plus(globe_counts(k), globe_counts(k)));
        expected = plus(expected, plus(sphere_counts(k - 1), sphere_counts(k - 1)), -1);
        CHECK(b.boundary.computad.counts() == expected);
        CHECK(b.added == std::vector<std::string>{"F"});
        CHECK_FALSE(b.boundary.computad.has("F"));
        const auto full = cyl_presentation(k);
        Renaming inc;
        for (const auto& g : b.boundary.computad.generators()) inc[g.name] = g.name;
        CHECK(is_morphism(b.boundary.computad, full.computad, inc));
        CHECK(full.computad.generators().size() == b.boundary.computad.generators().size() + 1);
    }
    CHECK_THROWS_AS(boundary_cyl(0), DomainError);
}

TEST_CASE("degenerate cylinders collapse sides") {
    const auto src = degenerate_cyl(1, 0, kNone);
    const Computad& m = src.computad;
    CHECK(m.counts() == std::vector<int>{3, 3, 1});
    CHECK_FALSE(m.has("Fs0"));
    CHECK(*m.generator("F").src == m.parse("c1<A,Ft0>"));
    CHECK(*m.generator("F").tgt == m.gen("B"));

    const auto both = degenerate_cyl(1, 0, 0);
    CHECK(both.computad.counts() == std::vector<int>{2, 2, 1});
    CHECK(*both.computad.generator("F").src == both.computad.gen("A"));
    CHECK(*both.computad.generator("F").tgt == both.computad.gen("B"));

    const auto d2 = degenerate_cyl(2, 1, kNone);
    CHECK_FALSE(d2.computad.has("Fs1"));
    CHECK_FALSE(d2.computad.has("Fs0"));
    CHECK_FALSE(d2.computad.has("Ft0"));
    CHECK(d2.computad.has("Ft1"));
    CHECK_NOTHROW(d2.computad.check());
    CHECK(degenerate_cyl(2, kNone, kNone).computad.counts() == cyl_presentation(2).computad.counts());
    CHECK_THROWS_AS(degenerate_cyl(1, 1, kNone), DomainError);
    CHECK_THROWS_AS(degenerate_cyl(2, -1, kNone), DomainError);
}

TEST_CASE("cylinders on globes agree with the cylinder on a globular sum") {
    for (int k = 0; k <= 2; ++k) {
        const auto g = cyl_glob_sum(globe(k));
        REQUIRE(g.globes.size() == 1);
        CHECK(is_isomorphism(cyl_presentation(k).computad, g.computad, g.globes[0].map));
    }
}

TEST_CASE("cyl(A) is the colimit of the cylinders on its globes") {
    for (const char* s : {kNineTree, "[[][]]", "[[[]][][[][][]]]", "[]"}) {
        const Tree a = T(s);
        const auto g = cyl_glob_sum(a);
        const DimensionTable tbl = tree_to_table(a);
        std::vector<int> expected;
        for (int top : tbl.tops) expected = plus(expected, cyl_disk_counts(top));
        for (int j : tbl.joins) expected = plus(expected, cyl_disk_counts(j), -1);
        CHECK(g.computad.counts() == expected);
        for (const auto& copy : g.globes)
            CHECK(is_morphism(cyl_presentation(copy.dim).computad, g.computad, copy.map));
        // Adjacent globes agree on their shared sub-cylinder.
        for (std::size_t i = 0; i < tbl.joins.size(); ++i) {
            const int j = tbl.joins[i];
            const auto left = cyl_face_map(j, g.globes[i].dim, 1), right = cyl_face_map(j, g.globes[i + 1].dim, 0);
            for (const auto& [name, _] : left)
                CHECK(g.globes[i].map.at(left.at(name)) == g.globes[i + 1].map.at(right.at(name)));
        }
    }
    CHECK_THROWS_AS(cyl_glob_sum(T("[[[[]]]]")), DomainError);
}

TEST_CASE("structural inclusions of the nine-extension tree") {
    const Tree a = T(kNineTree);
    const auto g = cyl_glob_sum(a);
    REQUIRE(g.inclusions.size() == 9);
    for (const auto& inc : g.inclusions) {
        CHECK(static_cast<int>(inc.cells.size()) == leaf_count(inc.element.result));
        CHECK_NOTHROW(g.computad.check_tuple(inc.element.result, inc.cells));
    }
    const auto d0 = cyl_glob_sum(Tree{});
    CHECK(d0.computad.counts() == std::vector<int>{2, 1});
    REQUIRE(d0.inclusions.size() == 1);
    CHECK(d0.inclusions[0].cells == std::vector<CellExpr>{d0.computad.gen("C_x0")});
}

TEST_CASE("coherence boundaries") {
    const auto psi = coherence_boundary(CoherenceKind::Psi, {1, 1}, 1);
    CHECK(psi.target == T("[[][[]][]]"));
    CHECK(to_string(psi.first) != to_string(psi.second));
    CHECK(to_string(psi.first).find("wl0_2<g1,g2>") != std::string::npos);
    CHECK(to_string(psi.second).find("wr0_2<g2,g3>") != std::string::npos);
    const auto id = coherence_boundary(CoherenceKind::Psi, {0, 0}, 2);
    CHECK(id.first == id.second);
    CHECK(id.target == T("[[[[]]]]"));
    const auto phi = coherence_boundary(CoherenceKind::Phi, {1, 1, 1}, 1);
    CHECK(phi.target == T("[[][[][]][]]"));
    CHECK_FALSE(phi.first == phi.second);
    const auto theta = coherence_boundary(CoherenceKind::Theta, {0, 1, 0}, 2);
    CHECK(theta.target == T("[[[[]][]]]"));
    CHECK(to_string(theta.first).find("wr1_2") != std::string::npos);
    CHECK_THROWS_AS(coherence_boundary(CoherenceKind::Phi, {0, 0, 0}, 1), DomainError);
    CHECK_THROWS_AS(coherence_boundary(CoherenceKind::Psi, {-1, 0}, 1), DomainError);
    CHECK_THROWS_AS(coherence_boundary(CoherenceKind::Psi, {0, 0}, 3), DomainError);
}

TEST_CASE("the stack of the nine-extension tree") {
    const Tree a = T(kNineTree);
    const ThetaMap rho = homogeneous_into(a, 2);
    const Stack s = stack(rho);
    REQUIRE(s.squares.size() == 9);
    std::vector<Klass> got, want{Klass::H1Right, Klass::H1Mid, Klass::H1Left, Klass::H2Max, Klass::H2Mid,
                                 Klass::H2Min, Klass::H2OverEdge, Klass::H3, Klass::H3};
    for (const auto& sq : s.squares) got.push_back(sq.element.klass);
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    CHECK(got == want);

    CHECK(s.squares.front().top == stack_first_top(a));
    CHECK(s.squares.back().bottom == stack_last_bottom(a));
    CHECK(s.squares.front().top.pattern == "C_t rho(U)");
    CHECK(s.squares.back().bottom.pattern == "rho(V) C_s");
    for (std::size_t i = 0; i + 1 < s.squares.size(); ++i)
        CHECK(same_composite(s.squares[i].bottom, s.squares[i + 1].top));

    const auto cg = cyl_glob_sum(a);
    for (const auto& sq : s.squares) {
        CAPTURE(sq.case_tag);
        CHECK(sq.case_tag == case_tag(sq.element.klass));
        const bool src_equal = edge_boundary(cg.computad, sq.top, 0) == edge_boundary(cg.computad, sq.bottom, 0);
        const bool tgt_equal = edge_boundary(cg.computad, sq.top, 1) == edge_boundary(cg.computad, sq.bottom, 1);
        CHECK(sq.source_degenerate == (src_equal && sq.element.height >= 2));
        CHECK(sq.target_degenerate == (tgt_equal && sq.element.height >= 2));
        CHECK(sq.left.has_value() != sq.source_degenerate);
        CHECK(sq.right.has_value() != sq.target_degenerate);
        for (const auto* side : {&sq.left, &sq.right}) {
            if (!*side || !(*side)->extension) continue;
            const ThetaMap& h = *(*side)->extension;
            CHECK(compose(globe_face(1, 2, 0), h) == *(*side)->boundary_src);
            CHECK(compose(globe_face(1, 2, 1), h) == *(*side)->boundary_tgt);
        }
    }

    for (int eps = 0; eps < 2; ++eps) {
        const Tree ap = hg_factorize(compose(globe_face(1, 2, eps), rho)).homogeneous.tgt;
        std::vector<Klass> sides, lin;
        for (const auto& sq : s.squares) {
            const auto& side = eps == 0 ? sq.left : sq.right;
            if (side) sides.push_back(hat_klass(sq.element.klass));
        }
        for (const auto& e : linearization(ap)) lin.push_back(e.klass);
        CHECK(sides == lin);
    }

    const CylinderRecord r = vcompose_meta(s.squares);
    CHECK(r.top == stack_first_top(a));
    CHECK(r.bottom == stack_last_bottom(a));
    CHECK(r.p == 0);
    CHECK(r.q == 0);
    CHECK(r.count == 9);
}

TEST_CASE("stacks of every small tree compose") {
    for (const auto& a : all_trees_up_to(6)) {
        if (dim(a) > 2) continue;
        CAPTURE(to_string(a));
        const Stack s = stack(homogeneous_into(a, 2));
        CHECK(s.squares.size() == linearization(a).size());
        CHECK(s.squares.front().top == stack_first_top(a));
        CHECK(s.squares.back().bottom == stack_last_bottom(a));
        CHECK_NOTHROW(vcompose_meta(s.squares));
    }
}

TEST_CASE("stacks for k = 1 consist of 0-cylinders") {
    const Stack s = stack(identity(globe(1)));
    REQUIRE(s.squares.size() == 3);
    for (const auto& sq : s.squares) {
        CHECK(sq.cyl_dim == 0);
        CHECK_FALSE(sq.left);
        CHECK_FALSE(sq.right);
        CHECK_FALSE(sq.source_degenerate);
    }
    CHECK_THROWS_AS(stack(identity(globe(3))), DomainError);
}

TEST_CASE("vertical composition keeps the least collapse index") {
    const Stack s = stack(homogeneous_into(T(kNineTree), 2));
    for (const auto& sq : s.squares) {
        const CylinderRecord one = vcompose_meta(std::vector<StackSquare>{sq});
        CHECK(one.top == sq.top);
        CHECK(one.p == sq.p());
        CHECK(one.q == sq.q());
    }
    CylinderRecord a = record(s.squares[0]), b = record(s.squares[1]);
    a.p = 2;
    b.p = kNone;
    a.q = kNone;
    b.q = kNone;
    const CylinderRecord ab = vcompose_meta({a, b});
    CHECK(ab.p == 2);
    CHECK(ab.q == kNone);
    CHECK(ab.source.size() == a.source.size() + b.source.size());
    CHECK_THROWS_AS(vcompose_meta({b, a}), DomainError);
    CHECK_THROWS_AS(vcompose_meta(std::vector<CylinderRecord>{}), DomainError);
}

TEST_CASE("modification presentations") {
    const auto m0 = modification_presentation(0);
    CHECK(m0.computad.counts() == std::vector<int>{2, 2, 1});
    const auto m1 = modification_presentation(1);
    CHECK(m1.computad.counts() == std::vector<int>{4, 6, 4, 1});
    for (int k = 0; k <= 2; ++k) {
        const auto m = modification_presentation(k);
        const auto c = cyl_presentation(k);
        CHECK(is_morphism(c.computad, m.computad, m.xi0));
        CHECK(is_morphism(c.computad, m.computad, m.xi1));
        CHECK_NOTHROW(m.computad.check());
        CHECK(m.computad.generator(m.top).dim == k + 2);
    }
    const auto m2 = modification_presentation(2);
    CHECK(m2.chosen.size() == 3);
    CHECK(m2.computad.generator("Theta").role == "modification filler (equation)");
    CHECK_THROWS_AS(modification_presentation(3), DomainError);
}

TEST_CASE("json and dot exports") {
    const Stack s = stack(homogeneous_into(T(kNineTree), 2));
    const auto j = stack_to_json(s);
    CHECK(j["squares"].size() == 9);
    CHECK(j["composite"]["p"] == 0);
    CHECK(stack_to_dot(s).find("digraph") == 0);
    CHECK(cyl_to_json(cyl_presentation(1))["counts"] == nlohmann::json({4, 4, 1}));
    CHECK(cyl_to_json(cyl_presentation(1))["p"] == "none");
}
