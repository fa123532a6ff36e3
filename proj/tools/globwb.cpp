#include <CLI11.hpp>

#include <array>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "globwb/cylinder.hpp"
#include "globwb/error.hpp"
#include "globwb/suites.hpp"

#ifndef GLOBWB_DATA_DIR
#define GLOBWB_DATA_DIR "data"
#endif

using namespace globwb;
using nlohmann::json;

namespace {

struct Options {
    bool json = false;
    bool dot = false;
    bool count = false;
    std::uint64_t seed = 0;
    long long max_homs = kDefaultMaxHoms;
    int n = 3;
    int p = kNone, q = kNone;
    int size = 0;
    std::string library = std::string(GLOBWB_DATA_DIR) + "/standard_n3.json";
};

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

Tree tree_arg(const std::string& s) { return parse_tree_literal(s); }

ThetaMap map_arg(const std::string& text, const Tree& s, const Tree& t) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw DomainError(std::string("map literal is not valid JSON: ") + e.what());
    }
    return theta_from_json(j, s, t);
}

void need(const std::vector<std::string>& args, std::size_t n, const std::string& usage) {
    if (args.size() != n) throw UsageError("usage: " + usage);
}

int run_tree(const Options& o, const std::string& op, const std::string& literal) {
    const Tree t = tree_arg(literal);
    if (op == "parse") {
        if (o.dot) std::cout << tree_to_dot(t);
        else if (o.json) emit(tree_to_json(t));
        else std::cout << to_string(t) << "\n";
    } else if (op == "table") {
        const DimensionTable tbl = tree_to_table(t);
        if (o.json) emit({{"tops", tbl.tops}, {"joins", tbl.joins}});
        else std::cout << to_string(tbl) << "\n";
    } else if (op == "dim") {
        if (o.json) emit({{"dim", dim(t)}});
        else std::cout << dim(t) << "\n";
    } else if (op == "boundary" || op == "suspend") {
        const Tree r = op == "boundary" ? boundary(t) : suspend(t);
        if (o.dot) std::cout << tree_to_dot(r);
        else if (o.json) emit(tree_to_json(r));
        else std::cout << to_string(r) << "\n";
    } else if (op == "decompose") {
        const auto blocks = decompose(t);
        if (o.json) {
            json arr = json::array();
            for (const auto& b : blocks) arr.push_back(to_string(b));
            emit(arr);
        } else {
            for (const auto& b : blocks) std::cout << to_string(b) << "\n";
        }
    } else {
        throw UsageError("unknown tree operation '" + op + "' (parse, table, dim, boundary, suspend, decompose)");
    }
    return 0;
}

int run_lins(const Options& o, const std::string& literal) {
    const Tree t = tree_arg(literal);
    const auto lins = linearization(t);
    if (o.json) {
        json arr = json::array();
        for (std::size_t i = 0; i < lins.size(); ++i) {
            json j = extended_to_json(lins[i]);
            j["index"] = i;
            j["tag"] = case_tag(lins[i].klass);
            arr.push_back(j);
        }
        emit(arr);
    } else if (o.dot) {
        for (const auto& e : lins) {
            Path p = e.sector.parent;
            std::cout << tree_to_dot(e.result, &p);
        }
    } else {
        for (std::size_t i = 0; i < lins.size(); ++i)
            std::cout << i << " " << case_tag(lins[i].klass) << " " << klass_name(lins[i].klass) << " "
                      << to_string(lins[i].result) << "\n";
    }
    return 0;
}

void print_map(const Options& o, const ThetaMap& f) {
    if (o.json) emit(theta_to_json(f));
    else std::cout << to_string(f) << "\n";
}

int run_theta(const Options& o, const std::string& op, const std::vector<std::string>& a) {
    if (op == "hom") {
        need(a, 2, "theta hom S T [--count]");
        const Tree s = tree_arg(a[0]), t = tree_arg(a[1]);
        if (o.count) {
            const long long c = hom_count(s, t);
            if (o.json) emit({{"count", c}});
            else std::cout << c << "\n";
            return 0;
        }
        const auto& hs = hom(s, t, o.max_homs);
        if (o.json) {
            json arr = json::array();
            for (const auto& f : hs) arr.push_back(theta_to_json(f));
            emit(arr);
        } else {
            for (const auto& f : hs) std::cout << to_string(f) << "\n";
        }
    } else if (op == "compose") {
        need(a, 5, "theta compose S T U F G  (F : S -> T, G : T -> U as JSON)");
        const Tree s = tree_arg(a[0]), t = tree_arg(a[1]), u = tree_arg(a[2]);
        print_map(o, compose(map_arg(a[3], s, t), map_arg(a[4], t, u)));
    } else if (op == "factor") {
        need(a, 3, "theta factor S T F");
        const auto hg = hg_factorize(map_arg(a[2], tree_arg(a[0]), tree_arg(a[1])));
        if (o.json) {
            emit({{"middle", to_string(hg.homogeneous.tgt)},
                  {"homogeneous", theta_to_json(hg.homogeneous)},
                  {"globular", theta_to_json(hg.globular)}});
        } else {
            std::cout << "middle " << to_string(hg.homogeneous.tgt) << "\nhomogeneous " << to_string(hg.homogeneous)
                      << "\nglobular " << to_string(hg.globular) << "\n";
        }
    } else if (op == "filler" || op == "admissible") {
        need(a, 4, "theta " + op + " K T F G  (F, G : D_K -> T as JSON)");
        const Tree s = globe(std::stoi(a[0])), t = tree_arg(a[1]);
        const ThetaMap f = map_arg(a[2], s, t), g = map_arg(a[3], s, t);
        if (op == "filler") {
            const auto h = filler(f, g, o.max_homs);
            if (!h) throw DomainError("no filler exists for this pair");
            print_map(o, *h);
        } else {
            const bool gr = is_admissible_groupoidal(f, g), cat = is_admissible_categorical(f, g);
            if (o.json) emit({{"groupoidal", gr}, {"categorical", cat}});
            else std::cout << "groupoidal " << (gr ? "yes" : "no") << "\ncategorical " << (cat ? "yes" : "no") << "\n";
        }
    } else {
        throw UsageError("unknown theta operation '" + op + "' (hom, compose, factor, filler, admissible)");
    }
    return 0;
}

TheoryPresentation theory_arg(const Options& o, const std::vector<std::string>& a) {
    if (a.size() > 1) throw UsageError("expected at most one theory file");
    return load_theory_file(a.empty() ? o.library : a[0]);
}

int run_theory(const Options& o, const std::string& op, const std::vector<std::string>& a) {
    if (op == "build") {
        const TheoryPresentation th = theory_arg(o, a);
        const auto stages = th.stages();
        if (o.json) {
            json st = json::array();
            for (const auto& s : stages) st.push_back(s.size());
            emit({{"n", th.n}, {"kind", kind_name(th.kind)}, {"symbols", th.symbols.size()}, {"stages", st},
                  {"batches", th.batches}});
        } else {
            std::cout << "n " << th.n << "\nkind " << kind_name(th.kind) << "\nsymbols " << th.symbols.size() << "\n";
            for (std::size_t k = 0; k < stages.size(); ++k) std::cout << "stage " << k << " " << stages[k].size() << "\n";
        }
    } else if (op == "audit") {
        const auto items = audit(theory_arg(o, a));
        bool ok = true;
        json arr = json::array();
        for (const auto& i : items) {
            ok = ok && i.ok;
            if (o.json) arr.push_back({{"name", i.name}, {"ok", i.ok}, {"message", i.message}});
            else std::cout << (i.ok ? "ok   " : "FAIL ") << i.name << (i.message.empty() ? "" : ": " + i.message) << "\n";
        }
        if (o.json) emit(arr);
        return ok ? 0 : 1;
    } else if (op == "export") {
        emit(theory_to_json(theory_arg(o, a)));
    } else if (op == "systems" || op == "groupoidalize") {
        if (!a.empty()) throw UsageError("theory " + op + " takes no positional arguments (use --n)");
        TheoryPresentation th = standard_systems(base_theory(o.n));
        if (op == "groupoidalize") th = groupoidalize(th);
        if (o.json) {
            emit(theory_to_json(th));
        } else {
            for (const auto& [name, members] : th.systems) {
                std::cout << name << ":";
                for (const auto& m : members) std::cout << " " << m;
                std::cout << "\n";
            }
        }
    } else if (op == "cofibs") {
        if (!a.empty()) throw UsageError("theory cofibs takes no positional arguments (use --n)");
        const Cofibrations c = generating_cofibrations(o.n);
        auto list = [](const std::vector<NamedMap>& v) {
            json arr = json::array();
            for (const auto& m : v) arr.push_back({{"name", m.name}, {"map", globmap_to_json(m.map)}});
            return arr;
        };
        if (o.json) {
            emit({{"I", list(c.I)}, {"J", list(c.J)}});
        } else {
            for (const auto& m : c.I) std::cout << "I " << m.name << " " << m.map.dom.total() << " -> " << m.map.cod.total() << " cells\n";
            for (const auto& m : c.J) std::cout << "J " << m.name << " " << m.map.dom.total() << " -> " << m.map.cod.total() << " cells\n";
        }
    } else {
        throw UsageError("unknown theory operation '" + op + "' (build, audit, export, systems, groupoidalize, cofibs)");
    }
    return 0;
}

void print_computad(const Computad& c) {
    std::cout << "counts";
    for (int x : c.counts()) std::cout << " " << x;
    std::cout << "\n";
    for (const auto& g : c.generators()) {
        std::cout << g.name << " : " << g.dim;
        if (g.src) std::cout << "  " << to_string(*g.src) << " -> " << to_string(*g.tgt);
        if (!g.role.empty()) std::cout << "  [" << g.role << "]";
        std::cout << "\n";
    }
}

int int_arg(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        const int v = std::stoi(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw UsageError(what + " must be an integer, got '" + s + "'");
    }
}

int run_cyl(const Options& o, const std::string& op, const std::vector<std::string>& a) {
    if (op == "present") {
        need(a, 1, "cyl present K [--p P] [--q Q]");
        const int k = int_arg(a[0], "K");
        const CylPresentation c = o.p == kNone && o.q == kNone ? cyl_presentation(k) : degenerate_cyl(k, o.p, o.q);
        if (o.json) emit(cyl_to_json(c));
        else print_computad(c.computad);
    } else if (op == "boundary") {
        need(a, 1, "cyl boundary K");
        const BoundaryCyl b = boundary_cyl(int_arg(a[0], "K"));
        if (o.json) {
            json j = cyl_to_json(b.boundary);
            j["added"] = b.added;
            emit(j);
        } else {
            print_computad(b.boundary.computad);
        }
    } else if (op == "stack") {
        need(a, 1, "cyl stack TREE");
        const Tree t = tree_arg(a[0]);
        std::optional<ThetaMap> rho;
        for (const auto& f : hom(globe(2), t, o.max_homs))
            if (is_homogeneous(f)) {
                rho = f;
                break;
            }
        if (!rho) throw DomainError("no homogeneous map D2 -> " + to_string(t) + " (stacks need dim(A) <= 2)");
        const Stack s = stack(*rho);
        if (o.dot) {
            std::cout << stack_to_dot(s);
        } else if (o.json) {
            emit(stack_to_json(s));
        } else {
            for (const auto& sq : s.squares) {
                std::cout << sq.index << " " << sq.case_tag << " " << klass_name(sq.element.klass)
                          << (sq.source_degenerate ? " [source degenerate]" : "")
                          << (sq.target_degenerate ? " [target degenerate]" : "") << "\n  top    "
                          << to_string(sq.top) << "\n  bottom " << to_string(sq.bottom) << "\n";
            }
        }
    } else if (op == "modification") {
        need(a, 1, "cyl modification K");
        const ModPresentation m = modification_presentation(int_arg(a[0], "K"));
        if (o.json) emit(modification_to_json(m));
        else print_computad(m.computad);
    } else if (op == "sum") {
        need(a, 1, "cyl sum TREE");
        const CylGlobSum g = cyl_glob_sum(tree_arg(a[0]));
        if (o.json) emit(glob_sum_to_json(g));
        else print_computad(g.computad);
    } else if (op == "coherence") {
        need(a, 3, "cyl coherence Psi|Phi|Theta INDICES LEVEL  (INDICES comma separated)");
        CoherenceKind kind;
        if (a[0] == "Psi") kind = CoherenceKind::Psi;
        else if (a[0] == "Phi") kind = CoherenceKind::Phi;
        else if (a[0] == "Theta") kind = CoherenceKind::Theta;
        else throw UsageError("unknown coherence kind '" + a[0] + "'");
        std::vector<int> idx;
        std::stringstream ss(a[1]);
        for (std::string part; std::getline(ss, part, ',');) idx.push_back(int_arg(part, "index"));
        const CoherencePair c = coherence_boundary(kind, idx, int_arg(a[2], "LEVEL"));
        if (o.json) emit(coherence_to_json(c));
        else std::cout << "target " << to_string(c.target) << "\nfirst  " << to_string(c.first) << "\nsecond " << to_string(c.second) << "\n";
    } else {
        throw UsageError("unknown cyl operation '" + op + "' (present, boundary, stack, modification, sum, coherence)");
    }
    return 0;
}

int run_check(const Options& o, const std::string& suite) {
    std::vector<SuiteResult> results;
    const bool all = suite == "all";
    auto size = [&](int d) { return o.size > 0 ? o.size : d; };
    if (all || suite == "laws") results.push_back(suite_category_laws(size(3)));
    if (all || suite == "factor") results.push_back(suite_factorization(size(4)));
    if (all || suite == "bijff") results.push_back(suite_bij_ff(o.seed, size(200), 3));
    if (all || suite == "latching") results.push_back(suite_latching(size(4)));
    if (all || suite == "theory") results.push_back(suite_theory(load_theory_file(o.library), o.seed, size(200)));
    if (all || suite == "cyl") results.push_back(suite_cylinders());
    if (all || suite == "stacks") results.push_back(suite_stacks(size(5)));
    if (results.empty())
        throw UsageError("unknown suite '" + suite + "' (laws, factor, bijff, latching, theory, cyl, stacks, all)");
    bool ok = true;
    json arr = json::array();
    for (const auto& r : results) {
        ok = ok && r.ok();
        if (o.json) {
            arr.push_back({{"suite", r.name}, {"ok", r.ok()}, {"checked", r.checked}, {"failures", r.failures}});
        } else {
            std::cout << (r.ok() ? "ok   " : "FAIL ") << r.name << " (" << r.checked << " checked)\n";
            for (const auto& f : r.failures) std::cout << "     " << f << "\n";
        }
    }
    if (o.json) emit(arr);
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Globular sums, Theta, coherators and cylinders"};
    app.require_subcommand(1);
    Options o;
    auto common = [&](CLI::App* sub) {
        sub->add_flag("--json", o.json, "JSON output");
        sub->add_flag("--dot", o.dot, "DOT output");
        sub->add_option("--seed", o.seed, "seed for randomized suites");
        sub->add_option("--max-homs", o.max_homs, "bound on enumerated hom-sets");
    };

    std::string op, literal;
    // Tree literals look like CLI11 list syntax, so operands are separate scalar positionals.
    std::array<std::string, 5> slots;
    std::array<bool, 5> given{};
    auto operands = [&](CLI::App* sub, const std::string& help) {
        for (std::size_t i = 0; i < slots.size(); ++i)
            sub->add_option_function<std::string>(
                "arg" + std::to_string(i + 1),
                [&, i](const std::string& v) {
                    slots[i] = v;
                    given[i] = true;
                },
                i == 0 ? help : "");
    };

    auto* tree = app.add_subcommand("tree", "parse/table/dim/boundary/suspend/decompose a tree");
    tree->add_option("op", op, "operation")->required();
    tree->add_option("tree", literal, "tree literal or Dk")->required();
    common(tree);

    auto* lins = app.add_subcommand("lins", "the ordered one-vertex extensions of a tree");
    lins->add_option("tree", literal, "tree literal or Dk")->required();
    common(lins);

    auto* theta = app.add_subcommand("theta", "hom/compose/factor/filler/admissible");
    theta->add_option("op", op, "operation")->required();
    operands(theta, "arguments");
    theta->add_flag("--count", o.count, "print the size of the hom-set only");
    common(theta);

    auto* theory = app.add_subcommand("theory", "build/audit/export/systems/groupoidalize/cofibs");
    theory->add_option("op", op, "operation")->required();
    operands(theory, "theory file");
    theory->add_option("--n", o.n, "truncation for generated theories");
    common(theory);

    auto* cyl = app.add_subcommand("cyl", "present/boundary/stack/modification/sum/coherence");
    cyl->add_option("op", op, "operation")->required();
    operands(cyl, "arguments");
    cyl->add_option("--p", o.p, "source collapse index");
    cyl->add_option("--q", o.q, "target collapse index");
    common(cyl);

    auto* check = app.add_subcommand("check", "property suites");
    check->add_option("suite", op, "laws, factor, bijff, latching, theory, cyl, stacks or all")->required();
    check->add_option("--count", o.size, "size bound of the suite (nodes, instances or leaves)");
    check->add_option("--library", o.library, "theory file for the theory suite");
    common(check);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    std::vector<std::string> rest;
    for (std::size_t i = 0; i < slots.size() && given[i]; ++i) rest.push_back(slots[i]);

    try {
        if (o.json && o.dot) throw UsageError("--json and --dot are exclusive");
        if (*tree) return run_tree(o, op, literal);
        if (*lins) return run_lins(o, literal);
        if (*theta) return run_theta(o, op, rest);
        if (*theory) return run_theory(o, op, rest);
        if (*cyl) return run_cyl(o, op, rest);
        if (*check) return run_check(o, op);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
