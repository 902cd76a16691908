#ifndef UTA_TREE_AUTOMATON_HPP
#define UTA_TREE_AUTOMATON_HPP

// Unranked bottom-up tree automata in five flavours, their runs, and the
// two-component size measure [vertical; horizontal].

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "uta/error.hpp"
#include "uta/string_automata.hpp"
#include "uta/trees.hpp"

namespace uta {

enum class Kind { NtaNfa, NtaDfa, DtaNfa, DtaDfa, Sdta };

inline std::string_view to_string(Kind k) {
    switch (k) {
        case Kind::NtaNfa: return "NTA-NFA";
        case Kind::NtaDfa: return "NTA-DFA";
        case Kind::DtaNfa: return "DTA-NFA";
        case Kind::DtaDfa: return "DTA-DFA";
        case Kind::Sdta: return "SDTA";
    }
    return "?";
}

inline Kind kind_from_string(std::string_view s) {
    for (Kind k : {Kind::NtaNfa, Kind::NtaDfa, Kind::DtaNfa, Kind::DtaDfa, Kind::Sdta})
        if (to_string(k) == s) return k;
    throw Error("unknown automaton kind '" + std::string(s) + "'");
}

/// Kinds whose bottom-up computation assigns at most one state per node.
inline bool is_deterministic_kind(Kind k) { return k == Kind::DtaNfa || k == Kind::DtaDfa || k == Kind::Sdta; }
inline bool has_dfa_horizontals(Kind k) { return k == Kind::NtaDfa || k == Kind::DtaDfa; }

/// [vertical; horizontal], compared componentwise.
struct SizePair {
    std::size_t vertical = 0;
    std::size_t horizontal = 0;

    friend bool operator==(const SizePair&, const SizePair&) = default;
    /// Componentwise; this is a partial order, so !(a <= b) does not imply b <= a.
    friend bool operator<=(const SizePair& a, const SizePair& b) {
        return a.vertical <= b.vertical && a.horizontal <= b.horizontal;
    }
    std::string str() const { return "[" + std::to_string(vertical) + "; " + std::to_string(horizontal) + "]"; }
    friend std::ostream& operator<<(std::ostream& os, const SizePair& s) { return os << s.str(); }
};

struct HorizontalKey {
    State state;
    Symbol symbol;
    friend auto operator<=>(const HorizontalKey&, const HorizontalKey&) = default;
};

/// A = (Q, Σ, δ, F). Vertical states are numbered 0..|Q|-1 and double as the
/// symbols of every horizontal acceptor. For non-SDTA kinds δ(q,σ) is given
/// by `horizontal[{q,σ}]` (absent = empty language); for SDTA by the Moore
/// machine `moore[σ]` whose outputs are vertical states.
///
/// Leaf convention: `leaf_states[σ] = σ̄` means a leaf labeled σ is assigned
/// σ̄, δ(σ̄,σ) = {ε} implicitly, and σ̄ is excluded from size().
struct TreeAutomaton {
    Kind kind = Kind::NtaNfa;
    std::vector<std::string> alphabet;
    std::vector<std::string> states;
    std::set<State> finals;
    std::map<Symbol, State> leaf_states;
    std::map<HorizontalKey, Nfa> horizontal;
    std::map<Symbol, MooreDfa> moore;

    std::size_t num_states() const noexcept { return states.size(); }

    std::optional<Symbol> find_symbol(std::string_view name) const {
        auto it = std::find(alphabet.begin(), alphabet.end(), name);
        if (it == alphabet.end()) return std::nullopt;
        return static_cast<Symbol>(it - alphabet.begin());
    }
    Symbol symbol(std::string_view name) const {
        if (auto s = find_symbol(name)) return *s;
        throw UnknownSymbol(std::string(name));
    }
    std::optional<State> find_state(std::string_view name) const {
        auto it = std::find(states.begin(), states.end(), name);
        if (it == states.end()) return std::nullopt;
        return static_cast<State>(it - states.begin());
    }
    State state(std::string_view name) const {
        if (auto s = find_state(name)) return *s;
        throw Error("unknown state '" + std::string(name) + "'");
    }
    bool is_leaf_state(State q) const {
        return std::any_of(leaf_states.begin(), leaf_states.end(), [&](const auto& e) { return e.second == q; });
    }
    bool is_final(State q) const { return finals.count(q) != 0; }

    friend bool operator==(const TreeAutomaton&, const TreeAutomaton&) = default;
};

/// The horizontal language δ(q,σ) as a (trimmed) NFA over the vertical states,
/// for any kind. For an SDTA it is H_σ with finals λ_σ⁻¹(q). The implicit
/// {ε} language of a leaf-convention state is not included.
inline std::map<HorizontalKey, Nfa> horizontal_languages(const TreeAutomaton& a) {
    if (a.kind != Kind::Sdta) return a.horizontal;
    std::map<HorizontalKey, Nfa> out;
    for (const auto& [sigma, m] : a.moore) {
        std::set<Output> outputs;
        for (const auto& [_, o] : m.output) outputs.insert(o);
        for (Output q : outputs) {
            Nfa n = trim(m.preimage(q).to_nfa());
            if (n.size()) out.emplace(HorizontalKey{q, sigma}, std::move(n));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Semantic determinism

struct DeterminismWitness {
    Symbol symbol;
    State first;
    State second;
    Word word;
};

struct DeterminismReport {
    bool deterministic = true;
    std::optional<DeterminismWitness> witness;
};

/// Raised when a construction that needs disjoint horizontal languages meets
/// an overlap.
class DeterminismViolation : public Error {
public:
    DeterminismViolation(const std::string& what, DeterminismWitness w) : Error(what), witness(std::move(w)) {}
    DeterminismWitness witness;
};

namespace detail {

inline Nfa epsilon_only(std::size_t alphabet_size) {
    Nfa n(alphabet_size);
    n.add_initial(n.add_state(true));
    return n;
}

}  // namespace detail

/// Checks δ(q1,σ) ∩ δ(q2,σ) = ∅ for every σ and q1 ≠ q2, including the
/// implicit {ε} languages of leaf-convention states.
inline DeterminismReport check_semantic_determinism(const TreeAutomaton& a) {
    auto langs = horizontal_languages(a);
    for (const auto& [sigma, leaf] : a.leaf_states) langs[HorizontalKey{leaf, sigma}] = detail::epsilon_only(a.num_states());
    std::map<Symbol, std::vector<std::pair<State, const Nfa*>>> by_symbol;
    for (const auto& [key, n] : langs) by_symbol[key.symbol].emplace_back(key.state, &n);
    for (const auto& [sigma, entries] : by_symbol)
        for (std::size_t i = 0; i < entries.size(); ++i)
            for (std::size_t j = i + 1; j < entries.size(); ++j)
                if (auto w = common_word(*entries[i].second, *entries[j].second))
                    return {false, DeterminismWitness{sigma, entries[i].first, entries[j].first, std::move(*w)}};
    return {};
}

inline std::string describe(const TreeAutomaton& a, const DeterminismWitness& w) {
    std::string word;
    for (Symbol s : w.word) word += (word.empty() ? "" : " ") + a.states.at(s);
    return "delta(" + a.states.at(w.first) + "," + a.alphabet.at(w.symbol) + ") and delta(" + a.states.at(w.second) +
           "," + a.alphabet.at(w.symbol) + ") share the word [" + word + "]";
}

// ---------------------------------------------------------------------------
// Validation and classification

namespace detail {

inline bool is_identifier(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), is_symbol_char);
}

inline void check_unique(const std::vector<std::string>& names, const char* what) {
    std::set<std::string> seen;
    for (const auto& n : names)
        if (!seen.insert(n).second) throw InvalidAutomaton(std::string("duplicate ") + what + " '" + n + "'");
}

}  // namespace detail

/// Throws InvalidAutomaton unless `a` satisfies the invariants of its kind.
inline void validate(const TreeAutomaton& a) {
    detail::check_unique(a.alphabet, "symbol");
    detail::check_unique(a.states, "state");
    for (const auto& s : a.alphabet) {
        if (!detail::is_identifier(s)) throw InvalidAutomaton("symbol '" + s + "' is not an identifier");
        if (s == kVariable) throw InvalidAutomaton("symbol 'x' is reserved for contexts");
    }
    for (const auto& q : a.states)
        if (q.empty()) throw InvalidAutomaton("empty state name");
    const std::size_t nq = a.num_states();
    for (State f : a.finals)
        if (f >= nq) throw InvalidAutomaton("final state out of range");
    std::set<State> leaves;
    for (const auto& [sigma, q] : a.leaf_states) {
        if (sigma >= a.alphabet.size() || q >= nq) throw InvalidAutomaton("leaf convention entry out of range");
        if (!leaves.insert(q).second)
            throw InvalidAutomaton("state '" + a.states[q] + "' is the leaf state of two symbols");
    }

    if (a.kind == Kind::Sdta) {
        if (!a.horizontal.empty()) throw InvalidAutomaton("SDTA must not carry per-state horizontal acceptors");
        for (const auto& [sigma, m] : a.moore) {
            if (sigma >= a.alphabet.size()) throw InvalidAutomaton("Moore machine for unknown symbol");
            if (m.dfa.alphabet_size() != nq)
                throw InvalidAutomaton("horizontal machine for '" + a.alphabet[sigma] + "' has the wrong alphabet");
            m.validate();
            for (const auto& [_, o] : m.output) {
                if (o >= nq) throw InvalidAutomaton("Moore output out of range");
                if (leaves.count(o)) throw InvalidAutomaton("Moore output is a leaf-convention state");
            }
            if (a.leaf_states.count(sigma) && !m.dfa.empty() && m.dfa.is_final(0))
                throw InvalidAutomaton("symbol '" + a.alphabet[sigma] + "' has a leaf state but H accepts the empty word");
        }
        return;
    }

    if (!a.moore.empty()) throw InvalidAutomaton("only an SDTA carries Moore machines");
    for (const auto& [key, n] : a.horizontal) {
        if (key.state >= nq || key.symbol >= a.alphabet.size()) throw InvalidAutomaton("horizontal key out of range");
        if (n.alphabet_size() != nq)
            throw InvalidAutomaton("horizontal acceptor (" + a.states[key.state] + "," + a.alphabet[key.symbol] +
                                   ") has the wrong alphabet");
        if (leaves.count(key.state))
            throw InvalidAutomaton("leaf state '" + a.states[key.state] + "' must not have horizontal acceptors");
        if (has_dfa_horizontals(a.kind) && !n.is_deterministic())
            throw InvalidAutomaton("horizontal acceptor (" + a.states[key.state] + "," + a.alphabet[key.symbol] +
                                   ") is not a DFA");
        if (a.leaf_states.count(key.symbol) && nfa_accepts(n, Word{}))
            throw InvalidAutomaton("symbol '" + a.alphabet[key.symbol] + "' has a leaf state but delta(" +
                                   a.states[key.state] + ") accepts the empty word");
    }
    if (is_deterministic_kind(a.kind)) {
        auto report = check_semantic_determinism(a);
        if (!report.deterministic)
            throw InvalidAutomaton("not semantically deterministic: " + describe(a, *report.witness));
    }
}

/// The strongest kind whose invariants `a` satisfies.
inline Kind classify(const TreeAutomaton& a) {
    if (a.kind == Kind::Sdta) return Kind::Sdta;
    const bool dfa = std::all_of(a.horizontal.begin(), a.horizontal.end(),
                                 [](const auto& e) { return e.second.is_deterministic(); });
    const bool det = check_semantic_determinism(a).deterministic;
    if (det) return dfa ? Kind::DtaDfa : Kind::DtaNfa;
    return dfa ? Kind::NtaDfa : Kind::NtaNfa;
}

// ---------------------------------------------------------------------------
// Runs

/// States assigned to each node; mirrors the shape of the input tree.
struct StateSetAssignment {
    StateSet states;
    std::vector<StateSetAssignment> children;

    /// Node at a child-index path from the root.
    const StateSetAssignment& at(std::span<const std::size_t> address) const {
        const StateSetAssignment* n = this;
        for (std::size_t i : address) n = &n->children.at(i);
        return *n;
    }
};

namespace detail {

inline StateSet node_states(const TreeAutomaton& a, Symbol sigma, const std::vector<const StateSet*>& kids) {
    StateSet out;
    if (kids.empty())
        if (auto it = a.leaf_states.find(sigma); it != a.leaf_states.end()) out.push_back(it->second);

    if (a.kind == Kind::Sdta) {
        auto it = a.moore.find(sigma);
        if (it != a.moore.end()) {
            Word w;
            bool alive = true;
            for (const StateSet* k : kids) {
                if (k->empty()) {
                    alive = false;
                    break;
                }
                if (k->size() > 1) throw InvalidAutomaton("SDTA run produced a non-singleton state set");
                w.push_back(k->front());
            }
            if (alive)
                if (auto q = it->second.evaluate(w)) out.push_back(*q);
        }
    } else {
        for (const auto& [key, h] : a.horizontal) {
            if (key.symbol != sigma) continue;
            StateSet cur = h.initial();
            for (const StateSet* k : kids) {
                if (cur.empty()) break;
                cur = step_set(h, cur, std::span<const Symbol>(*k));
            }
            if (any_final(h, cur)) out.push_back(key.state);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    if (is_deterministic_kind(a.kind) && out.size() > 1)
        throw InvalidAutomaton("deterministic automaton assigned " + std::to_string(out.size()) + " states to one node");
    return out;
}

inline StateSetAssignment run_node(const TreeAutomaton& a, const Tree& t) {
    const Symbol sigma = a.symbol(t.label);
    StateSetAssignment r;
    r.children.reserve(t.children.size());
    std::vector<const StateSet*> kids;
    for (const auto& c : t.children) r.children.push_back(run_node(a, c));
    for (const auto& c : r.children) kids.push_back(&c.states);
    r.states = node_states(a, sigma, kids);
    return r;
}

inline StateSet root_states(const TreeAutomaton& a, const Tree& t) {
    const Symbol sigma = a.symbol(t.label);
    std::vector<StateSet> sets;
    sets.reserve(t.children.size());
    for (const auto& c : t.children) sets.push_back(root_states(a, c));
    std::vector<const StateSet*> kids;
    for (const auto& s : sets) kids.push_back(&s);
    return node_states(a, sigma, kids);
}

}  // namespace detail

/// Bottom-up pass assigning to every node the set of states some computation
/// can reach there. Horizontal NFAs are simulated on sets of child states, so
/// the cost is polynomial in the tree and automaton sizes.
inline StateSetAssignment run(const TreeAutomaton& a, const Tree& t) { return detail::run_node(a, t); }

/// t^A: the states reachable at the root.
inline StateSet evaluate(const TreeAutomaton& a, const Tree& t) { return detail::root_states(a, t); }

inline bool accepts(const TreeAutomaton& a, const Tree& t) {
    const StateSet root = evaluate(a, t);
    return std::any_of(root.begin(), root.end(), [&](State q) { return a.is_final(q); });
}

// ---------------------------------------------------------------------------
// Size and pruning

/// Leaf-convention states and the implicit sinks of partial DFAs are not counted.
inline SizePair size(const TreeAutomaton& a) {
    SizePair s;
    s.vertical = a.num_states() - a.leaf_states.size();
    if (a.kind == Kind::Sdta)
        for (const auto& [_, m] : a.moore) s.horizontal += m.dfa.size();
    else
        for (const auto& [_, n] : a.horizontal) s.horizontal += n.size();
    return s;
}

namespace detail {

/// Is some word over the allowed symbols accepted?
inline bool accepts_some(const Nfa& n, const std::vector<bool>& allowed) {
    std::vector<bool> seen(n.size(), false);
    std::deque<State> queue(n.initial().begin(), n.initial().end());
    for (State s : n.initial()) seen[s] = true;
    while (!queue.empty()) {
        State s = queue.front();
        queue.pop_front();
        if (n.is_final(s)) return true;
        for (const auto& [sym, targets] : n.transitions(s)) {
            if (!allowed[sym]) continue;
            for (State t : targets)
                if (!seen[t]) {
                    seen[t] = true;
                    queue.push_back(t);
                }
        }
    }
    return false;
}

/// Outputs of final states reachable using allowed symbols only.
inline std::set<Output> reachable_outputs(const MooreDfa& m, const std::vector<bool>& allowed) {
    std::set<Output> out;
    if (m.dfa.empty()) return out;
    std::vector<bool> seen(m.dfa.size(), false);
    std::deque<State> queue{0};
    seen[0] = true;
    while (!queue.empty()) {
        State s = queue.front();
        queue.pop_front();
        if (auto it = m.output.find(s); it != m.output.end()) out.insert(it->second);
        for (auto [sym, t] : m.dfa.transitions(s))
            if (allowed[sym] && !seen[t]) {
                seen[t] = true;
                queue.push_back(t);
            }
    }
    return out;
}

}  // namespace detail

/// Vertical states that some tree evaluates to (least fixed point).
inline std::vector<bool> reachable_vertical_states(const TreeAutomaton& a) {
    std::vector<bool> reach(a.num_states(), false);
    for (const auto& [_, q] : a.leaf_states) reach[q] = true;
    for (bool changed = true; changed;) {
        changed = false;
        if (a.kind == Kind::Sdta) {
            for (const auto& [_, m] : a.moore)
                for (Output q : detail::reachable_outputs(m, reach))
                    if (!reach[q]) reach[q] = changed = true;
        } else {
            for (const auto& [key, n] : a.horizontal)
                if (!reach[key.state] && detail::accepts_some(n, reach)) reach[key.state] = changed = true;
        }
    }
    return reach;
}

/// Drops vertical states no run can assign, transitions on them, and
/// horizontal states that are unreachable or cannot reach acceptance.
inline TreeAutomaton prune_reachable(const TreeAutomaton& a) {
    const auto reach = reachable_vertical_states(a);
    std::vector<std::int64_t> renum(a.num_states(), -1);
    TreeAutomaton out;
    out.kind = a.kind;
    out.alphabet = a.alphabet;
    for (std::size_t q = 0; q < a.num_states(); ++q)
        if (reach[q]) {
            renum[q] = static_cast<std::int64_t>(out.states.size());
            out.states.push_back(a.states[q]);
        }
    const std::size_t nq = out.states.size();
    for (State f : a.finals)
        if (renum[f] >= 0) out.finals.insert(static_cast<State>(renum[f]));
    for (const auto& [sigma, q] : a.leaf_states) out.leaf_states[sigma] = static_cast<State>(renum[q]);
    if (a.kind == Kind::Sdta) {
        for (const auto& [sigma, m] : a.moore) {
            MooreDfa r{relabel(m.dfa, renum, nq), {}};
            for (const auto& [s, o] : m.output) {
                // A final state whose output is unreachable is itself unreachable.
                if (renum[o] < 0)
                    r.dfa.set_final(s, false);
                else
                    r.output[s] = static_cast<Output>(renum[o]);
            }
            r = trim(r);
            if (!r.dfa.empty()) out.moore.emplace(sigma, std::move(r));
        }
    } else {
        for (const auto& [key, n] : a.horizontal) {
            if (renum[key.state] < 0) continue;
            Nfa r = trim(relabel(n, renum, nq));
            if (r.size()) out.horizontal.emplace(HorizontalKey{static_cast<State>(renum[key.state]), key.symbol}, std::move(r));
        }
    }
    return out;
}

}  // namespace uta

#endif  // UTA_TREE_AUTOMATON_HPP
