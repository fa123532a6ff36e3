#include "globwb/suites.hpp"

#include <map>
#include <random>

#include "globwb/error.hpp"

namespace globwb {

namespace {

constexpr std::size_t kMaxReported = 10;

std::vector<ThetaMap> globular_into(const Tree& src, const Tree& tgt) {
    std::vector<ThetaMap> out;
    for (const auto& g : hom(src, tgt))
        if (is_globular(g)) out.push_back(g);
    return out;
}

std::string map_text(const ThetaMap& f) { return to_string(f.src) + " -> " + to_string(f.tgt) + " " + to_string(f); }

} // namespace

void SuiteResult::fail(std::string what) {
    if (failures.size() < kMaxReported) failures.push_back(std::move(what));
    else if (failures.size() == kMaxReported) failures.push_back("...");
}

std::vector<Tree> trees_with_leaves(int max_leaves, int max_dim) {
    std::vector<Tree> out;
    for (const auto& t : all_trees_up_to(max_leaves * max_dim + 1))
        if (dim(t) <= max_dim && leaf_count(t) <= max_leaves) out.push_back(t);
    return out;
}

bool homogeneous_by_search(const ThetaMap& h) {
    static std::map<std::string, bool> memo;
    const std::string key = map_text(h);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    bool result = true;
    const ThetaMap id = identity(h.tgt);
    for (const auto& mid : all_trees_up_to(static_cast<int>(h.tgt.size()))) {
        for (const auto& g : globular_into(mid, h.tgt)) {
            if (g == id) continue;
            for (const auto& h2 : hom(h.src, mid))
                if (compose(h2, g) == h) {
                    result = false;
                    break;
                }
            if (!result) break;
        }
        if (!result) break;
    }
    memo[key] = result;
    return result;
}

SuiteResult suite_category_laws(int max_nodes) {
    SuiteResult r{"category laws", 0, {}};
    const auto ts = all_trees_up_to(max_nodes);
    for (const auto& a : ts)
        for (const auto& b : ts)
            for (const auto& f : hom(a, b)) {
                ++r.checked;
                if (!(compose(identity(a), f) == f) || !(compose(f, identity(b)) == f))
                    r.fail("unit law fails for " + map_text(f));
                for (const auto& c : ts)
                    for (const auto& g : hom(b, c)) {
                        const ThetaMap fg = compose(f, g);
                        for (const auto& d : ts)
                            for (const auto& h : hom(c, d)) {
                                ++r.checked;
                                if (!(compose(fg, h) == compose(f, compose(g, h))))
                                    r.fail("associativity fails at " + map_text(f) + " ; " + map_text(g) + " ; " +
                                           map_text(h));
                            }
                    }
            }
    return r;
}

SuiteResult suite_factorization(int max_nodes) {
    SuiteResult r{"homogeneous/globular factorization", 0, {}};
    const auto ts = all_trees_up_to(max_nodes);
    for (const auto& a : ts)
        for (const auto& b : ts)
            for (const auto& f : hom(a, b)) {
                ++r.checked;
                const auto hg = hg_factorize(f);
                if (!is_globular(hg.globular) || !(compose(hg.homogeneous, hg.globular) == f) ||
                    !homogeneous_by_search(hg.homogeneous))
                    r.fail("factorization of " + map_text(f) + " is not homogeneous-then-globular");
                if (is_homogeneous(f) != homogeneous_by_search(f))
                    r.fail("is_homogeneous disagrees with the search on " + map_text(f));
                int found = 0;
                for (const auto& mid : all_trees_up_to(static_cast<int>(b.size())))
                    for (const auto& g : globular_into(mid, b))
                        for (const auto& h : hom(a, mid))
                            if (compose(h, g) == f && homogeneous_by_search(h)) {
                                ++found;
                                if (!(g == hg.globular) || !(h == hg.homogeneous))
                                    r.fail("a second factorization exists for " + map_text(f));
                            }
                if (found != 1) r.fail(std::to_string(found) + " factorizations found for " + map_text(f));
            }
    return r;
}

SuiteResult suite_bij_ff(std::uint64_t seed, int instances, int max_m) {
    SuiteResult r{"bijective / fully faithful", 0, {}};
    std::mt19937_64 rng(seed);
    for (int m = 0; m <= max_m; ++m) {
        const int n = m + 1;
        int done = 0;
        for (int attempt = 0; attempt < 200 * instances && done < instances; ++attempt) {
            const FinGlobSet a = random_globset(rng, n, 3), b = random_globset(rng, n, 3);
            const FinGlobSet x = random_globset(rng, n, 3), y = random_globset(rng, n, 3);
            const auto f1 = random_map(rng, a, b), f2 = random_map(rng, x, y);
            if (!f1 || !f2) continue;
            const BijFF fa = factor_bij_ff(*f1, m), fb = factor_bij_ff(*f2, m);
            for (const auto* fac : {&fa, &fb}) {
                const GlobMap& orig = fac == &fa ? *f1 : *f2;
                if (!same_map(compose(fac->h, fac->g), orig)) r.fail("factorization does not compose back (m = " + std::to_string(m) + ")");
                if (!is_m_bijective(fac->h, m)) r.fail("left factor is not " + std::to_string(m) + "-bijective");
                if (!is_m_fully_faithful(fac->g, m)) r.fail("right factor is not " + std::to_string(m) + "-fully faithful");
            }
            const GlobMap& i = fa.h;
            const GlobMap& p = fb.g;
            const auto v = random_map(rng, i.cod, p.cod);
            if (!v) continue;
            const GlobMap vi = compose(i, *v);
            std::optional<GlobMap> u;
            for (auto& cand : all_maps(i.dom, p.dom, 5000))
                if (same_map(compose(cand, p), vi)) {
                    u = cand;
                    break;
                }
            if (!u) continue;
            const auto lifts = check_orthogonal(i, p, *u, *v, 2);
            if (lifts.size() != 1)
                r.fail(std::to_string(lifts.size()) + " lifts in a square at m = " + std::to_string(m));
            ++done;
            ++r.checked;
        }
        if (done < instances)
            r.fail("only " + std::to_string(done) + " commuting squares found at m = " + std::to_string(m));
    }
    return r;
}

SuiteResult suite_latching(int max_m) {
    SuiteResult r{"spheres and latching", 0, {}};
    const auto fam = globe_family(max_m + 1, max_m + 1);
    for (int m = 1; m <= max_m; ++m) {
        ++r.checked;
        const auto iso = find_iso(latching(fam, m), sphere(m - 1, max_m + 1));
        if (!iso) {
            r.fail("latching(D, " + std::to_string(m) + ") is not a sphere");
            continue;
        }
        try {
            validate(*iso);
        } catch (const DomainError& e) {
            r.fail(std::string("invalid isomorphism: ") + e.what());
        }
    }
    return r;
}

SuiteResult suite_theory(const TheoryPresentation& library, std::uint64_t seed, int pairs) {
    SuiteResult r{"coherator tower", 0, {}};
    for (const auto& a : audit(library)) {
        ++r.checked;
        if (!a.ok) r.fail(a.name + ": " + a.message);
    }
    for (const auto& s : library.symbols) {
        if (!s.theta_image || s.equation) continue;
        ++r.checked;
        const ThetaMap src = eval_theta(library, *s.src), tgt = eval_theta(library, *s.tgt);
        if (!(compose(globe_face(s.k - 1, s.k, 0), *s.theta_image) == src) ||
            !(compose(globe_face(s.k - 1, s.k, 1), *s.theta_image) == tgt))
            r.fail("theta image of " + s.name + " does not fill its boundary");
    }

    const TheoryPresentation cat = standard_systems(base_theory(library.n));
    const TheoryPresentation gr = groupoidalize(cat);
    std::size_t added = gr.symbols.size() - cat.symbols.size();
    std::size_t expected = 0;
    for (const char* sys : {"inv_l", "inv_r", "cancel_l", "cancel_r"})
        if (gr.systems.count(sys)) expected += gr.systems.at(sys).size();
    ++r.checked;
    if (added != expected) r.fail("groupoidalize added " + std::to_string(added) + " symbols, expected " + std::to_string(expected));
    for (int k = 1; k <= gr.n; ++k)
        for (const std::string side : {"il", "ir"}) {
            ++r.checked;
            const Term i = symbol_term(gr, side + std::to_string(k));
            if (!(term_src(gr, i) == globular_term(globe_face(k - 1, k, 1))) ||
                !(term_tgt(gr, i) == globular_term(globe_face(k - 1, k, 0))))
                r.fail(side + std::to_string(k) + " does not reverse the globe");
        }
    for (int k = 2; k <= gr.n; ++k)
        for (const std::string side : {"kl", "kr"}) {
            ++r.checked;
            const Term id = symbol_term(gr, "id" + std::to_string(k - 2));
            const int eps = side == "kl" ? 0 : 1;
            if (!(term_src(gr, symbol_term(gr, side + std::to_string(k))) ==
                  substitute(gr, id, globular_term(globe_face(k - 2, k - 1, eps)))))
                r.fail(side + std::to_string(k) + " has the wrong source");
        }

    std::mt19937_64 rng(seed);
    const std::vector<Tree> shapes = all_trees_up_to(4);
    int checked = 0;
    for (int attempt = 0; attempt < 50 * pairs && checked < pairs; ++attempt) {
        const Tree& c = shapes[rng() % shapes.size()];
        const Tree& b = shapes[rng() % shapes.size()];
        const int k = static_cast<int>(rng() % 3);
        const auto t = random_term(library, rng, globe(k), b, 2);
        const auto u = random_term(library, rng, b, c, 1);
        if (!t || !u) continue;
        ++checked;
        ++r.checked;
        if (!(eval_theta(library, substitute(library, *t, *u)) ==
              compose(eval_theta(library, *t), eval_theta(library, *u))))
            r.fail("evaluation is not functorial on " + to_string(*t) + " ; " + to_string(*u));
    }
    if (checked < pairs) r.fail("only " + std::to_string(checked) + " composable pairs drawn");
    return r;
}

SuiteResult suite_cylinders() {
    SuiteResult r{"cylinder presentations", 0, {}};
    const std::vector<std::vector<int>> expected{{2, 1}, {4, 4, 1}, {4, 6, 4, 1}};
    for (int k = 0; k <= 2; ++k) {
        ++r.checked;
        const auto c = cyl_presentation(k);
        if (c.computad.counts() != expected[k]) r.fail("wrong generator counts for cyl(D_" + std::to_string(k) + ")");
    }
    for (int k = 0; k <= 3; ++k) {
        ++r.checked;
        try {
            cyl_presentation(k).computad.check();
            if (k >= 1) boundary_cyl(k).boundary.computad.check();
            for (int p = 0; p < k; ++p) degenerate_cyl(k, p, kNone).computad.check();
        } catch (const DomainError& e) {
            r.fail("ill-typed boundary in cyl(D_" + std::to_string(k) + "): " + e.what());
        }
    }
    ++r.checked;
    auto bc = boundary_cyl(1).boundary.computad.counts();
    bc.resize(3, 0);
    if (bc != std::vector<int>{4, 4, 0}) r.fail("the boundary of cyl(D_1) has the wrong counts");
    for (int k = 0; k <= 2; ++k) {
        ++r.checked;
        const auto g = cyl_glob_sum(globe(k));
        if (g.globes.size() != 1 || !is_isomorphism(cyl_presentation(k).computad, g.computad, g.globes[0].map))
            r.fail("cyl_glob_sum(D_" + std::to_string(k) + ") is not isomorphic to cyl(D_" + std::to_string(k) + ")");
    }
    return r;
}

SuiteResult suite_stacks(int max_leaves) {
    SuiteResult r{"stacks", 0, {}};
    for (const auto& a : trees_with_leaves(max_leaves, 2)) {
        const std::string at = to_string(a);
        const auto cg = cyl_glob_sum(a);
        const StackEdge first = stack_first_top(a), last = stack_last_bottom(a);
        for (const auto& rho : hom(globe(2), a)) {
            if (!is_homogeneous(rho)) continue;
            ++r.checked;
            Stack s;
            try {
                s = stack(rho);
            } catch (const DomainError& e) {
                r.fail(at + ": " + e.what());
                continue;
            }
            if (s.squares.size() != linearization(a).size()) r.fail(at + ": wrong number of squares");
            if (s.squares.empty()) continue;
            if (!(s.squares.front().top == first) || s.squares.front().top.pattern != "C_t rho(U)")
                r.fail(at + ": the first edge is not C_t rho(U)");
            if (!(s.squares.back().bottom == last) || s.squares.back().bottom.pattern != "rho(V) C_s")
                r.fail(at + ": the last edge is not rho(V) C_s");
            int least_p = kNone, least_q = kNone;
            for (const auto& sq : s.squares) {
                const Klass k = sq.element.klass;
                const bool want_src = k == Klass::H2Max || k == Klass::H2Mid || k == Klass::H3;
                const bool want_tgt = k == Klass::H2Min || k == Klass::H2Mid || k == Klass::H3;
                if (sq.source_degenerate != want_src || sq.target_degenerate != want_tgt)
                    r.fail(at + ": degeneracy flags of square " + std::to_string(sq.index) + " do not match " +
                           sq.case_tag);
                const bool src_equal = edge_boundary(cg.computad, sq.top, 0) == edge_boundary(cg.computad, sq.bottom, 0);
                const bool tgt_equal = edge_boundary(cg.computad, sq.top, 1) == edge_boundary(cg.computad, sq.bottom, 1);
                if (want_src && !src_equal) r.fail(at + ": square " + std::to_string(sq.index) + " has distinct sources");
                if (want_tgt && !tgt_equal) r.fail(at + ": square " + std::to_string(sq.index) + " has distinct targets");
                least_p = std::min(least_p, sq.p());
                least_q = std::min(least_q, sq.q());
            }
            try {
                const CylinderRecord c = vcompose_meta(s.squares);
                if (c.p != least_p || c.q != least_q) r.fail(at + ": composite violates the min rule");
                if (!(c.top == first) || !(c.bottom == last)) r.fail(at + ": composite has the wrong endpoints");
            } catch (const DomainError& e) {
                r.fail(at + ": not vertically composable: " + e.what());
            }
        }
    }
    return r;
}

} // namespace globwb
