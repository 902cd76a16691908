// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
//
// Bounds are recomputed here from the input automata rather than read from
// the conversion reports, so a wrong bound formula in the library shows up as
// a disagreement.

#include <chrono>
#include <cstdint>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "support/random_automata.hpp"
#include "uta/uta.hpp"

using namespace uta;
using support::Rng;

namespace {

/// Thrown by `check` to fail the current criterion with a message.
struct Unmet {
    std::string what;
};

void check(bool ok, const std::string& what) {
    if (!ok) throw Unmet{what};
}

std::string str(const SizePair& p) { return p.str(); }

const EnumerationBounds kEnum{3, 3, 20000};

/// Equivalence on enumerated trees plus random larger trees.
void check_equivalent(const TreeAutomaton& a, const TreeAutomaton& b, Rng& rng, const std::string& label) {
    const auto v = equiv_bounded(a, b, kEnum);
    check(v.equal, label + ": differs on " + (v.counterexample ? render_tree(*v.counterexample) : std::string("?")));
    for (int i = 0; i < 50; ++i) {
        const Tree t = random_tree(a.alphabet, {5, 4, 0}, rng);
        check(accepts(a, t) == accepts(b, t), label + ": differs on " + render_tree(t));
    }
}

std::uint64_t pow2(std::uint64_t e) { return std::uint64_t{1} << e; }

std::uint64_t vertical_states(const TreeAutomaton& a) { return a.num_states() - a.leaf_states.size(); }

/// Σ_q m_{q,σ} for each σ.
std::vector<std::uint64_t> per_symbol_sizes(const TreeAutomaton& a) {
    std::vector<std::uint64_t> m(a.alphabet.size(), 0);
    for (const auto& [key, n] : a.horizontal) m[key.symbol] += n.size();
    return m;
}

/// [|Q|; |Q| · Σ_σ size(H_σ)]
SizePair sdta_to_dtadfa_bound(const TreeAutomaton& a) {
    std::uint64_t total = 0;
    for (const auto& [_, m] : a.moore) total += m.dfa.size();
    return {vertical_states(a), vertical_states(a) * total};
}

/// [|Q|; Σ_σ Π_q size(H_{q,σ})], with each DFA counted complete and an absent
/// language counted as the one-state rejecting DFA.
SizePair dtadfa_to_sdta_bound(const TreeAutomaton& a) {
    std::uint64_t sum = 0;
    for (std::size_t s = 0; s < a.alphabet.size(); ++s) {
        std::uint64_t product = 1;
        for (std::size_t q = 0; q < a.num_states(); ++q) {
            auto it = a.horizontal.find(HorizontalKey{static_cast<State>(q), static_cast<Symbol>(s)});
            if (it == a.horizontal.end()) continue;
            const Dfa d = as_dfa(it->second);
            product *= d.is_complete() ? d.size() : d.size() + 1;
        }
        sum += product;
    }
    return {vertical_states(a), sum};
}

/// [2^|Q|; Σ_σ 2^(Σ_q m_{q,σ})]
SizePair nta_to_sdta_bound(const TreeAutomaton& a) {
    std::uint64_t h = 0;
    for (auto m : per_symbol_sizes(a)) h += pow2(m);
    return {pow2(vertical_states(a)), h};
}

/// [2^|Q|; 2^|Q| · Σ_σ 2^(Σ_q m_{q,σ})]
SizePair nta_to_dtadfa_bound(const TreeAutomaton& a) {
    const auto b = nta_to_sdta_bound(a);
    return {b.vertical, b.vertical * b.horizontal};
}

/// Largest state set assigned to any node of a run.
std::size_t max_states_per_node(const StateSetAssignment& r) {
    std::size_t most = r.states.size();
    for (const auto& c : r.children) most = std::max(most, max_states_per_node(c));
    return most;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// ---------------------------------------------------------------------------

std::string criterion1() {
    const std::vector<std::size_t> k{2, 3};
    const auto w = gen_lemma34(k);
    check(size(w.automaton) == SizePair(2, 12), "generator size " + str(size(w.automaton)) + ", expected [2; 12]");
    const auto c = canonical_sdta(dtadfa_to_sdta(w.automaton).automaton);
    const auto ha = c.moore.at(c.symbol("a")).dfa.size();
    check(ha >= 6, "canonical H_a has " + std::to_string(ha) + " states, expected >= 6");
    check(size(c).vertical >= 2, "canonical SDTA has " + std::to_string(size(c).vertical) + " vertical states");
    const auto v = certify_vertical_bound(w.predicate, lemma34_vertical_fooling_set(k));
    check(v == 2, "certified vertical bound " + std::to_string(v) + ", expected 2");
    std::ostringstream os;
    os << "size [2; 12], canonical H_a " << ha << " states, vertical " << size(c).vertical << ", certified vertical 2";
    return os.str();
}

std::string criterion2() {
    const auto start = std::chrono::steady_clock::now();
    const auto s = dtadfa_to_sdta(gen_lemma34({2, 3, 5}).automaton).automaton;
    const auto ha = minimize_moore(s.moore.at(s.symbol("a"))).dfa.size();
    const double t = seconds_since(start);
    check(ha >= 30, "minimized H_a has " + std::to_string(ha) + " states, expected >= 30");
    check(t < 10.0, "took " + std::to_string(t) + " s");
    std::ostringstream os;
    os << "minimized H_a " << ha << " states in " << t << " s";
    return os.str();
}

std::string criterion3() {
    const auto w = gen_thm41(2);
    check(size(w.automaton) == SizePair(2, 9), "generator size " + str(size(w.automaton)) + ", expected [2; 9]");
    const auto grid = thm41_grid(6, 18);
    check(grid.size() == 6 * 19, "grid has " + std::to_string(grid.size()) + " trees");
    for (const auto& t : grid) check(accepts(w.automaton, t) == w.predicate(t), "generator disagrees on " + render_tree(t));
    const auto p = prune_reachable(nta_to_dtadfa(w.automaton).automaton);
    const auto sz = size(p);
    check(sz.vertical >= 3 && sz.horizontal >= 18, "pruned DTA(DFA) size " + str(sz) + ", expected >= [3; 18]");
    const auto bound = nta_to_dtadfa_bound(w.automaton);
    check(sz <= bound, "pruned size " + str(sz) + " exceeds " + str(bound));
    check(equiv_on(w.automaton, p, grid).equal, "not equivalent on the grid");
    const auto e = equiv_bounded(w.automaton, p, {4, 4, 200000});
    check(e.equal, "not equivalent on enumerated trees");
    std::ostringstream os;
    os << "size [2; 9], grid agrees, pruned DTA(DFA) " << sz << " <= " << bound << ", equivalent on grid and "
       << e.trees_checked << " enumerated trees";
    return os.str();
}

std::string criterion4() {
    Rng rng(4001);
    for (int i = 0; i < 50; ++i) {
        const auto a = support::random_sdta(rng);
        const auto c = sdta_to_dtadfa(a);
        const auto bound = sdta_to_dtadfa_bound(a);
        check(size(c.automaton) <= bound, "case " + std::to_string(i) + ": " + str(size(c.automaton)) + " > " + str(bound));
        check(c.report.bound == bound, "case " + std::to_string(i) + ": reported bound " + str(c.report.bound));
        check_equivalent(a, c.automaton, rng, "case " + std::to_string(i));
    }
    return "50 SDTAs within [|Q|; |Q|·Σ size(H_σ)] and equivalent";
}

std::string criterion5() {
    Rng rng(5001);
    for (int i = 0; i < 50; ++i) {
        const auto a = support::random_dtadfa(rng, {}, i % 2 == 0);
        check(check_semantic_determinism(a).deterministic, "generator produced a nondeterministic case");
        const auto c = dtadfa_to_sdta(a);  // throws if a product state had two accepting components
        const auto bound = dtadfa_to_sdta_bound(a);
        check(size(c.automaton) <= bound, "case " + std::to_string(i) + ": " + str(size(c.automaton)) + " > " + str(bound));
        check(size(c.automaton).vertical == size(a).vertical, "case " + std::to_string(i) + ": vertical states changed");
        check_equivalent(a, c.automaton, rng, "case " + std::to_string(i));
    }
    return "50 DTA(DFA)s within Σ_σ Π_q size(H_{q,σ}) and equivalent; product invariant held";
}

std::string criterion6() {
    Rng rng(6001);
    for (int i = 0; i < 50; ++i) {
        const auto a = support::random_ntanfa(rng);
        const std::string id = "NTA case " + std::to_string(i);
        const auto s = nta_to_sdta(a);
        check(size(s.automaton) <= nta_to_sdta_bound(a), id + ": SDTA " + str(size(s.automaton)) + " > " + str(nta_to_sdta_bound(a)));
        check_equivalent(a, s.automaton, rng, id + " (SDTA)");
        const auto d = nta_to_dtadfa(a);
        check(size(d.automaton) <= nta_to_dtadfa_bound(a),
              id + ": DTA(DFA) " + str(size(d.automaton)) + " > " + str(nta_to_dtadfa_bound(a)));
        check(check_semantic_determinism(d.automaton).deterministic, id + ": DTA(DFA) not deterministic");
        check_equivalent(a, d.automaton, rng, id + " (DTA(DFA))");
    }
    for (int i = 0; i < 20; ++i) {
        const auto a = support::random_dtanfa(rng);
        const std::string id = "DTA(NFA) case " + std::to_string(i);
        const auto q = vertical_states(a);
        const auto s = nta_to_sdta(a);
        const auto d = nta_to_dtadfa(a);
        check(size(s.automaton).vertical == q, id + ": SDTA has " + std::to_string(size(s.automaton).vertical) + " vertical states");
        check(size(d.automaton).vertical == q, id + ": DTA(DFA) has " + std::to_string(size(d.automaton).vertical) + " vertical states");
        check_equivalent(a, s.automaton, rng, id + " (SDTA)");
        check_equivalent(a, d.automaton, rng, id + " (DTA(DFA))");
    }
    return "50 NTA(NFA)s within both bounds and equivalent; 20 DTA(NFA)s keep |Q| vertical states";
}

std::string criterion7() {
    const auto mu = minimize_moore(marked_union(residue_parts(3)));
    const auto u = minimize_dfa(underlying_dfa(mu));
    check(mu.dfa.size() == 3, "Moore machine has " + std::to_string(mu.dfa.size()) + " states, expected 3");
    check(u.size() == 1, "union DFA has " + std::to_string(u.size()) + " states, expected 1");
    return "minimized Moore machine 3 states, union DFA 1 state";
}

std::string criterion8() {
    const auto start = std::chrono::steady_clock::now();
    // (a+b)* b (a+b)^7 over {a = 0, b = 1}
    Nfa n(2);
    for (int i = 0; i <= 8; ++i) n.add_state(i == 8);
    n.add_initial(0);
    n.add_transition(0, 0, 0);
    n.add_transition(0, 1, 0);
    n.add_transition(0, 1, 1);
    for (State i = 1; i < 8; ++i) {
        n.add_transition(i, 0, i + 1);
        n.add_transition(i, 1, i + 1);
    }
    check(n.size() <= 10, "NFA too large");
    const auto m = minimize_dfa(determinize(n));
    const double t = seconds_since(start);
    check(m.size() == 256, "minimal DFA has " + std::to_string(m.size()) + " states, expected 256");
    check(t < 10.0, "took " + std::to_string(t) + " s");
    std::ostringstream os;
    os << "9-state NFA, minimal DFA 256 states in " << t << " s";
    return os.str();
}

std::string criterion9() {
    Rng rng(9001);
    // parse/render round-trips: trees, contexts and documents of every kind
    for (int i = 0; i < 200; ++i) {
        const std::vector<std::string> alpha{"a", "b", "c"};
        const Tree t = random_tree(alpha, {5, 4, 0}, rng);
        check(parse_tree(render_tree(t), alpha) == t, "tree round-trip failed on " + render_tree(t));
    }
    const Context ctx = parse_context("a(b,x,c(b))", std::vector<std::string>{"a", "b", "c"});
    check(render_context(ctx) == "a(b,x,c(b))", "context round-trip failed");
    for (int i = 0; i < 20; ++i)
        for (const auto& a : {support::random_sdta(rng), support::random_dtadfa(rng), support::random_dtanfa(rng),
                              support::random_ntanfa(rng), nta_to_sdta(gen_thm41(2).automaton).automaton}) {
            const auto text = render_automaton(a);
            const auto b = parse_automaton(text);
            check(render_automaton(b) == text, "document round-trip changed a " + std::string(to_string(a.kind)));
            check(equiv_bounded(a, b, kEnum).equal, "document round-trip changed the language");
        }

    // at most one state per node for every deterministic kind, 1000 trees each
    for (int kind = 0; kind < 3; ++kind)
        for (int i = 0; i < 20; ++i) {
            const auto a = kind == 0 ? support::random_sdta(rng) : kind == 1 ? support::random_dtadfa(rng) : support::random_dtanfa(rng);
            for (int j = 0; j < 50; ++j) {
                const Tree t = random_tree(a.alphabet, {5, 4, 0}, rng);
                check(max_states_per_node(run(a, t)) <= 1,
                      std::string(to_string(a.kind)) + " assigned several states on " + render_tree(t));
            }
        }

    // pruning keeps the language and never grows
    for (int i = 0; i < 30; ++i) {
        const auto a = i % 2 ? support::random_ntanfa(rng) : support::random_deterministic(rng);
        const auto p = prune_reachable(a);
        check(size(p) <= size(a), "prune grew an automaton");
        check_equivalent(a, p, rng, "prune case " + std::to_string(i));
    }

    // canonical form is idempotent
    for (int i = 0; i < 30; ++i) {
        const auto c = canonical_sdta(support::random_sdta(rng));
        check(render_automaton(canonical_sdta(c)) == render_automaton(c), "canonical form not idempotent");
    }

    // exact and bounded equivalence agree on 30 pairs (equal and unequal mixed)
    int equal = 0;
    for (int i = 0; i < 30; ++i) {
        const auto a = support::random_sdta(rng);
        auto b = i % 2 ? canonical_sdta(a) : a;
        if (i % 2 == 0) {
            const State q = 0;  // vertical states come first in generated automata
            if (b.finals.count(q)) b.finals.erase(q); else b.finals.insert(q);
        }
        const auto exact = equiv_canonical(a, b, kEnum);
        const auto bounded = equiv_bounded(a, b, kEnum);
        check(!exact.equal || bounded.equal, "pair " + std::to_string(i) + ": exact says equal, enumeration disagrees");
        check(exact.equal || !bounded.equal || !exact.counterexample,
              "pair " + std::to_string(i) + ": exact counterexample not found by enumeration");
        equal += exact.equal;
    }
    std::ostringstream os;
    os << "round-trips, single-state runs on 3000 trees, prune, canonical idempotence, 30 equivalence pairs (" << equal
       << " equal)";
    return os.str();
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<std::string()>>> criteria{
        {"1 modular-count family, k=(2,3): sizes and vertical certificate", criterion1},
        {"2 modular-count family, k=(2,3,5): horizontal blow-up and runtime", criterion2},
        {"3 prime-period family, n=2: sizes, grid and DTA(DFA) lower bound", criterion3},
        {"4 SDTA -> DTA(DFA): bound and equivalence on 50 random inputs", criterion4},
        {"5 DTA(DFA) -> SDTA: bound and equivalence on 50 random inputs", criterion5},
        {"6 NTA conversions: bounds, equivalence and deterministic refinement", criterion6},
        {"7 marked union of mod-3 residues: 3 versus 1 states", criterion7},
        {"8 determinization touchstone: 256 states", criterion8},
        {"9 property suite", criterion9},
    };
    int failed = 0;
    for (const auto& [name, run_criterion] : criteria) {
        std::string verdict, detail;
        try {
            detail = run_criterion();
            verdict = "PASS";
        } catch (const Unmet& u) {
            verdict = "FAIL";
            detail = u.what;
        } catch (const std::exception& e) {
            verdict = "FAIL";
            detail = std::string("exception: ") + e.what();
        }
        failed += verdict == "FAIL";
        std::cout << verdict << "  criterion " << name << " -- " << detail << std::endl;
    }
    std::cout << (failed ? std::to_string(failed) + " criteria failed" : std::string("all criteria passed")) << std::endl;
    return failed ? 1 : 0;
}
