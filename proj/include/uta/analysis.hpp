#ifndef UTA_ANALYSIS_HPP
#define UTA_ANALYSIS_HPP

// Equivalence checking (bounded enumeration, exact for SDTAs via canonical
// forms) and SDTA canonicalization.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "uta/error.hpp"
#include "uta/string_automata.hpp"
#include "uta/tree_automaton.hpp"
#include "uta/trees.hpp"

namespace uta {

enum class EquivalenceMethod { BoundedEnumeration, CanonicalSdta };

inline std::string_view to_string(EquivalenceMethod m) {
    return m == EquivalenceMethod::BoundedEnumeration ? "bounded-enumeration" : "canonical-sdta";
}

struct EquivalenceVerdict {
    bool equal = true;
    std::optional<Tree> counterexample;
    EquivalenceMethod method = EquivalenceMethod::BoundedEnumeration;
    /// Trees compared by enumeration (0 when decided exactly).
    std::size_t trees_checked = 0;
    /// The enumeration hit its count cap; `equal` covers fewer trees than the bounds suggest.
    bool truncated = false;
};

/// Defaults, overridable through UTA_ENUM_BOUNDS="depth,width,count".
inline EnumerationBounds default_bounds() {
    EnumerationBounds b;
    const char* env = std::getenv("UTA_ENUM_BOUNDS");
    if (!env || !*env) return b;
    std::istringstream in(env);
    std::size_t d = 0, w = 0, c = 0;
    char s1 = 0, s2 = 0;
    if (!(in >> d >> s1 >> w >> s2 >> c) || s1 != ',' || s2 != ',' || !(in >> std::ws).eof())
        throw Error("UTA_ENUM_BOUNDS must be \"depth,width,count\"");
    return {d, w, c};
}

namespace detail {

inline void require_same_alphabet(const TreeAutomaton& a, const TreeAutomaton& b) {
    std::set<std::string> x(a.alphabet.begin(), a.alphabet.end()), y(b.alphabet.begin(), b.alphabet.end());
    if (x != y) throw AlphabetMismatch("automata have different alphabets");
}

/// Index of the first tree on which the automata disagree, or trees.size().
/// Shards are contiguous ranges; the minimum over shards is the global first.
inline std::size_t first_disagreement(const TreeAutomaton& a, const TreeAutomaton& b, const std::vector<Tree>& trees) {
    const std::size_t n = trees.size();
    const std::size_t workers = n < 256 ? 1 : std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, 8);
    std::vector<std::size_t> found(workers, n);
    auto scan = [&](std::size_t w) {
        const std::size_t lo = n * w / workers, hi = n * (w + 1) / workers;
        for (std::size_t i = lo; i < hi; ++i)
            if (accepts(a, trees[i]) != accepts(b, trees[i])) {
                found[w] = i;
                return;
            }
    };
    if (workers == 1) {
        scan(0);
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(scan, w);
    }
    return *std::min_element(found.begin(), found.end());
}

}  // namespace detail

/// Compares acceptance on an explicit list of trees; the counterexample is the
/// first disagreement in list order.
inline EquivalenceVerdict equiv_on(const TreeAutomaton& a, const TreeAutomaton& b, const std::vector<Tree>& trees) {
    detail::require_same_alphabet(a, b);
    EquivalenceVerdict v;
    v.trees_checked = trees.size();
    const std::size_t i = detail::first_disagreement(a, b, trees);
    if (i < trees.size()) {
        v.equal = false;
        v.counterexample = trees[i];
    }
    return v;
}

/// Semi-decision: `equal` means no counterexample among the enumerated trees.
inline EquivalenceVerdict equiv_bounded(const TreeAutomaton& a, const TreeAutomaton& b,
                                        const EnumerationBounds& bounds = default_bounds()) {
    detail::require_same_alphabet(a, b);
    auto e = enumerate_trees(a.alphabet, bounds);
    auto v = equiv_on(a, b, e.trees);
    v.truncated = e.truncated;
    return v;
}

// ---------------------------------------------------------------------------
// Canonical SDTA

namespace detail {

inline void require_sdta(const TreeAutomaton& a) {
    if (a.kind != Kind::Sdta) throw KindMismatch("expected an SDTA, got " + std::string(to_string(a.kind)));
}

}  // namespace detail

/// Coarsest congruence on the reachable part: vertical states are merged when
/// they agree on finality and act identically as letters of every H_σ;
/// horizontal states when they agree on output block and successors. Leaf
/// states stay apart. Never increases either size component.
inline TreeAutomaton canonical_sdta(const TreeAutomaton& input) {
    detail::require_sdta(input);
    const TreeAutomaton a = prune_reachable(input);
    const std::size_t nq = a.num_states();

    // Horizontal states of all symbols numbered globally.
    std::vector<Symbol> sigmas;
    std::vector<std::size_t> base;
    std::size_t nh = 0;
    std::map<Symbol, MooreDfa> moore;
    for (const auto& [sigma, m] : a.moore) {
        if (trim(m).dfa.empty()) continue;
        sigmas.push_back(sigma);
        base.push_back(nh);
        moore.emplace(sigma, trim(m));
        nh += moore.at(sigma).dfa.size();
    }

    std::vector<std::int64_t> vcls(nq), hcls(nh);
    for (std::size_t q = 0; q < nq; ++q) {
        if (a.is_leaf_state(static_cast<State>(q)))
            vcls[q] = static_cast<std::int64_t>(2 + q);
        else
            vcls[q] = a.is_final(static_cast<State>(q)) ? 1 : 0;
    }

    auto count = [](const std::vector<std::int64_t>& v) { return std::set<std::int64_t>(v.begin(), v.end()).size(); };
    for (;;) {
        const std::size_t before = count(vcls) + count(hcls);
        // (a) horizontal refinement against the current vertical blocks
        using HSig = std::tuple<std::int64_t, std::size_t, std::int64_t, std::vector<std::int64_t>>;
        std::map<HSig, std::int64_t> hids;
        std::vector<std::int64_t> hnext(nh);
        for (std::size_t i = 0; i < sigmas.size(); ++i) {
            const MooreDfa& m = moore.at(sigmas[i]);
            for (std::size_t s = 0; s < m.dfa.size(); ++s) {
                auto o = m.output.find(static_cast<State>(s));
                HSig sig{hcls[base[i] + s], i, o == m.output.end() ? -1 : vcls[o->second], {}};
                auto& succ = std::get<3>(sig);
                succ.assign(nq, -1);
                for (auto [q, t] : m.dfa.transitions(static_cast<State>(s))) succ[q] = hcls[base[i] + t];
                hnext[base[i] + s] = hids.emplace(std::move(sig), static_cast<std::int64_t>(hids.size())).first->second;
            }
        }
        hcls = std::move(hnext);
        // (b) vertical refinement by behaviour as letters
        using VSig = std::pair<std::int64_t, std::vector<std::int64_t>>;
        std::map<VSig, std::int64_t> vids;
        std::vector<std::int64_t> vnext(nq);
        for (std::size_t q = 0; q < nq; ++q) {
            VSig sig{vcls[q], std::vector<std::int64_t>(nh, -1)};
            for (std::size_t i = 0; i < sigmas.size(); ++i) {
                const MooreDfa& m = moore.at(sigmas[i]);
                for (std::size_t s = 0; s < m.dfa.size(); ++s)
                    if (auto t = m.dfa.step(static_cast<State>(s), static_cast<Symbol>(q)))
                        sig.second[base[i] + s] = hcls[base[i] + *t];
            }
            vnext[q] = vids.emplace(std::move(sig), static_cast<std::int64_t>(vids.size())).first->second;
        }
        vcls = std::move(vnext);
        if (count(vcls) + count(hcls) == before) break;
    }

    // Vertical classes numbered by smallest member; names and leaf roles kept.
    std::map<std::int64_t, std::int64_t> vnum;
    std::vector<std::int64_t> vmap(nq);
    TreeAutomaton out;
    out.kind = Kind::Sdta;
    out.alphabet = a.alphabet;
    for (std::size_t q = 0; q < nq; ++q) {
        auto [it, fresh] = vnum.emplace(vcls[q], static_cast<std::int64_t>(out.states.size()));
        if (fresh) {
            out.states.push_back(a.states[q]);
            if (a.is_final(static_cast<State>(q))) out.finals.insert(static_cast<State>(it->second));
        }
        vmap[q] = it->second;
    }
    for (const auto& [sigma, q] : a.leaf_states) out.leaf_states[sigma] = static_cast<State>(vmap[q]);
    const std::size_t nv = out.states.size();
    for (std::size_t i = 0; i < sigmas.size(); ++i) {
        const MooreDfa& m = moore.at(sigmas[i]);
        std::vector<std::int64_t> cls(m.dfa.size());
        for (std::size_t s = 0; s < m.dfa.size(); ++s) cls[s] = hcls[base[i] + s];
        auto [q, renum] = detail::quotient(m.dfa, cls);
        MooreDfa r{relabel(q, vmap, nv), {}};
        for (const auto& [s, o] : m.output)
            if (renum[cls[s]] >= 0) r.output[static_cast<State>(renum[cls[s]])] = static_cast<Output>(vmap[o]);
        out.moore.emplace(sigmas[i], std::move(r));
    }
    return out;
}

namespace detail {

/// An equivalent SDTA without the leaf convention: each leaf state becomes an
/// ordinary state produced by H_σ on the empty word (via a fresh initial state).
inline TreeAutomaton drop_leaf_convention(const TreeAutomaton& a) {
    TreeAutomaton out = a;
    out.leaf_states.clear();
    for (const auto& [sigma, q] : a.leaf_states) {
        MooreDfa m;
        if (auto it = a.moore.find(sigma); it != a.moore.end()) {
            const Dfa& d = it->second.dfa;
            m.dfa = Dfa(d.alphabet_size());
            m.dfa.add_state(true);
            for (std::size_t s = 0; s < d.size(); ++s) m.dfa.add_state(d.is_final(static_cast<State>(s)));
            for (std::size_t s = 0; s < d.size(); ++s)
                for (auto [x, t] : d.transitions(static_cast<State>(s))) {
                    m.dfa.set_transition(static_cast<State>(s + 1), x, t + 1);
                    if (s == 0) m.dfa.set_transition(0, x, t + 1);
                }
            for (const auto& [s, o] : it->second.output) m.output[s + 1] = o;
        } else {
            m.dfa = Dfa(a.num_states());
            m.dfa.add_state(true);
        }
        m.output[0] = q;
        out.moore[sigma] = std::move(m);
    }
    return out;
}

/// Exact isomorphism of two canonical SDTAs over the same alphabet names,
/// by propagating forced state pairings from the initial horizontal states.
inline bool isomorphic(const TreeAutomaton& a, const TreeAutomaton& b) {
    if (a.num_states() != b.num_states() || a.moore.size() != b.moore.size()) return false;
    std::vector<std::int64_t> vab(a.num_states(), -1), vba(b.num_states(), -1);
    std::map<Symbol, std::pair<std::vector<std::int64_t>, std::vector<std::int64_t>>> hmaps;
    std::deque<std::tuple<Symbol, State, State>> hwork;
    std::deque<std::pair<State, State>> vwork;
    auto pair_v = [&](State p, State q) {
        if (vab[p] == q && vba[q] == p) return true;
        if (vab[p] >= 0 || vba[q] >= 0) return false;
        if (a.is_final(p) != b.is_final(q)) return false;
        vab[p] = q;
        vba[q] = p;
        vwork.emplace_back(p, q);
        return true;
    };
    std::vector<std::pair<Symbol, Symbol>> symbols;
    for (const auto& [sa, ma] : a.moore) {
        const Symbol sb = b.symbol(a.alphabet[sa]);
        auto it = b.moore.find(sb);
        if (it == b.moore.end() || ma.dfa.size() != it->second.dfa.size()) return false;
        symbols.emplace_back(sa, sb);
        hmaps[sa] = {std::vector<std::int64_t>(ma.dfa.size(), -1), std::vector<std::int64_t>(ma.dfa.size(), -1)};
    }
    auto pair_h = [&](Symbol sa, Symbol sb, State s, State t) {
        auto& [ab, ba] = hmaps.at(sa);
        if (ab[s] == t && ba[t] == s) return true;
        if (ab[s] >= 0 || ba[t] >= 0) return false;
        const MooreDfa& ma = a.moore.at(sa);
        const MooreDfa& mb = b.moore.at(sb);
        if (ma.dfa.is_final(s) != mb.dfa.is_final(t)) return false;
        ab[s] = t;
        ba[t] = s;
        if (ma.dfa.is_final(s) && !pair_v(ma.output.at(s), mb.output.at(t))) return false;
        hwork.emplace_back(sa, s, t);
        return true;
    };
    for (auto [sa, sb] : symbols)
        if (!pair_h(sa, sb, 0, 0)) return false;
    std::map<Symbol, Symbol> sym_ab(symbols.begin(), symbols.end());
    std::vector<std::pair<State, State>> vdone;
    std::vector<std::tuple<Symbol, State, State>> hdone;
    while (!hwork.empty() || !vwork.empty()) {
        if (!vwork.empty()) {
            auto vp = vwork.front();
            vwork.pop_front();
            vdone.push_back(vp);
            for (const auto& [sa, s, t] : hdone) {
                const Symbol sb = sym_ab.at(sa);
                auto x = a.moore.at(sa).dfa.step(s, vp.first);
                auto y = b.moore.at(sb).dfa.step(t, vp.second);
                if (x.has_value() != y.has_value()) return false;
                if (x && !pair_h(sa, sb, *x, *y)) return false;
            }
        } else {
            auto hp = hwork.front();
            hwork.pop_front();
            hdone.push_back(hp);
            const auto& [sa, s, t] = hp;
            const Symbol sb = sym_ab.at(sa);
            for (const auto& [p, q] : vdone) {
                auto x = a.moore.at(sa).dfa.step(s, p);
                auto y = b.moore.at(sb).dfa.step(t, q);
                if (x.has_value() != y.has_value()) return false;
                if (x && !pair_h(sa, sb, *x, *y)) return false;
            }
        }
    }
    // Canonical forms are fully reachable, so a complete pairing must cover everything.
    if (std::find(vab.begin(), vab.end(), -1) != vab.end()) return false;
    for (const auto& [_, maps] : hmaps)
        if (std::find(maps.first.begin(), maps.first.end(), -1) != maps.first.end()) return false;
    // Transitions on pairs discovered in the same round were checked both ways above.
    return true;
}

}  // namespace detail

/// Exact equivalence of SDTAs. On inequivalence the counterexample comes from
/// bounded enumeration, if one exists within the bounds.
inline EquivalenceVerdict equiv_canonical(const TreeAutomaton& a, const TreeAutomaton& b,
                                          const EnumerationBounds& fallback = default_bounds()) {
    detail::require_sdta(a);
    detail::require_sdta(b);
    detail::require_same_alphabet(a, b);
    const auto ca = canonical_sdta(detail::drop_leaf_convention(a));
    const auto cb = canonical_sdta(detail::drop_leaf_convention(b));
    EquivalenceVerdict v;
    v.method = EquivalenceMethod::CanonicalSdta;
    if (detail::isomorphic(ca, cb)) return v;
    v.equal = false;
    auto e = equiv_bounded(a, b, fallback);
    v.counterexample = e.counterexample;
    v.trees_checked = e.trees_checked;
    v.truncated = e.truncated;
    return v;
}

}  // namespace uta

#endif  // UTA_ANALYSIS_HPP
