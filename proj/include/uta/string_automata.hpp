#ifndef UTA_STRING_AUTOMATA_HPP
#define UTA_STRING_AUTOMATA_HPP

// Finite automata over dense symbol domains 0..alphabet_size-1.
//
// The same machinery serves tree alphabets, vertical states, and sets of
// vertical states; symbols are opaque. DFAs may be partial: a missing
// transition rejects, and that implicit sink is never counted by size().

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "uta/error.hpp"

namespace uta {

using Symbol = std::uint32_t;
using State = std::uint32_t;
using Word = std::vector<Symbol>;
using StateSet = std::vector<State>;  // sorted, unique

class Nfa {
public:
    explicit Nfa(std::size_t alphabet_size = 0) : alphabet_size_(alphabet_size) {}

    std::size_t alphabet_size() const noexcept { return alphabet_size_; }
    void set_alphabet_size(std::size_t n) { alphabet_size_ = n; }
    std::size_t size() const noexcept { return delta_.size(); }

    State add_state(bool final = false) {
        delta_.emplace_back();
        final_.push_back(final);
        return static_cast<State>(delta_.size() - 1);
    }

    void add_initial(State s) {
        check_state(s);
        auto it = std::lower_bound(initial_.begin(), initial_.end(), s);
        if (it == initial_.end() || *it != s) initial_.insert(it, s);
    }
    void set_final(State s, bool f = true) {
        check_state(s);
        final_[s] = f;
    }
    void add_transition(State from, Symbol a, State to) {
        check_state(from);
        check_state(to);
        check_symbol(a);
        auto& targets = delta_[from][a];
        auto it = std::lower_bound(targets.begin(), targets.end(), to);
        if (it == targets.end() || *it != to) targets.insert(it, to);
    }

    const StateSet& initial() const noexcept { return initial_; }
    bool is_final(State s) const { return final_.at(s); }
    const std::map<Symbol, StateSet>& transitions(State s) const { return delta_.at(s); }

    /// At most one initial state and at most one successor per (state, symbol).
    bool is_deterministic() const {
        if (initial_.size() > 1) return false;
        for (const auto& row : delta_)
            for (const auto& [_, targets] : row)
                if (targets.size() > 1) return false;
        return true;
    }

    void check_symbol(Symbol a) const {
        if (a >= alphabet_size_) throw UnknownSymbol("#" + std::to_string(a));
    }

    friend bool operator==(const Nfa&, const Nfa&) = default;

private:
    void check_state(State s) const {
        if (s >= delta_.size()) throw Error("state " + std::to_string(s) + " out of range");
    }

    std::size_t alphabet_size_;
    std::vector<std::map<Symbol, StateSet>> delta_;
    std::vector<bool> final_;
    StateSet initial_;
};

class Dfa {
public:
    explicit Dfa(std::size_t alphabet_size = 0) : alphabet_size_(alphabet_size) {}

    std::size_t alphabet_size() const noexcept { return alphabet_size_; }
    void set_alphabet_size(std::size_t n) { alphabet_size_ = n; }
    /// Stored states; the implicit sink of a partial DFA is not included.
    std::size_t size() const noexcept { return delta_.size(); }
    bool empty() const noexcept { return delta_.empty(); }

    /// The first state added is the initial state.
    State add_state(bool final = false) {
        delta_.emplace_back();
        final_.push_back(final);
        return static_cast<State>(delta_.size() - 1);
    }
    State initial() const {
        if (delta_.empty()) throw Error("DFA has no states");
        return 0;
    }
    void set_final(State s, bool f = true) {
        check_state(s);
        final_[s] = f;
    }
    bool is_final(State s) const { return final_.at(s); }

    void set_transition(State from, Symbol a, State to) {
        check_state(from);
        check_state(to);
        if (a >= alphabet_size_) throw UnknownSymbol("#" + std::to_string(a));
        auto [it, inserted] = delta_[from].emplace(a, to);
        if (!inserted && it->second != to) throw InvalidAutomaton("conflicting DFA transition");
    }
    const std::map<Symbol, State>& transitions(State s) const { return delta_.at(s); }

    std::optional<State> step(State s, Symbol a) const {
        const auto& row = delta_.at(s);
        auto it = row.find(a);
        if (it == row.end()) return std::nullopt;
        return it->second;
    }

    std::optional<State> run(std::span<const Symbol> word) const {
        if (delta_.empty()) return std::nullopt;
        State s = 0;
        for (Symbol a : word) {
            if (a >= alphabet_size_) throw UnknownSymbol("#" + std::to_string(a));
            auto next = step(s, a);
            if (!next) return std::nullopt;
            s = *next;
        }
        return s;
    }

    bool accepts(std::span<const Symbol> word) const {
        auto s = run(word);
        return s && final_[*s];
    }

    bool is_complete() const {
        if (delta_.empty()) return false;
        return std::all_of(delta_.begin(), delta_.end(),
                           [&](const auto& row) { return row.size() == alphabet_size_; });
    }
    /// Size of the equivalent complete DFA: the implicit sink counts when it is needed.
    std::size_t complete_size() const { return size() + (is_complete() ? 0 : 1); }

    Nfa to_nfa() const {
        Nfa n(alphabet_size_);
        for (std::size_t s = 0; s < size(); ++s) n.add_state(final_[s]);
        if (!delta_.empty()) n.add_initial(0);
        for (std::size_t s = 0; s < size(); ++s)
            for (auto [a, t] : delta_[s]) n.add_transition(static_cast<State>(s), a, t);
        return n;
    }

    friend bool operator==(const Dfa&, const Dfa&) = default;

private:
    void check_state(State s) const {
        if (s >= delta_.size()) throw Error("state " + std::to_string(s) + " out of range");
    }

    std::size_t alphabet_size_;
    std::vector<std::map<Symbol, State>> delta_;
    std::vector<bool> final_;
};

using Output = std::uint32_t;

/// A DFA whose final states carry an output value.
struct MooreDfa {
    Dfa dfa;
    std::map<State, Output> output;

    std::optional<Output> evaluate(std::span<const Symbol> word) const {
        auto s = dfa.run(word);
        if (!s || !dfa.is_final(*s)) return std::nullopt;
        return output.at(*s);
    }

    /// Output is defined exactly on the final states.
    void validate() const {
        for (std::size_t s = 0; s < dfa.size(); ++s) {
            const bool has = output.count(static_cast<State>(s)) != 0;
            if (has != dfa.is_final(static_cast<State>(s)))
                throw InvalidAutomaton("Moore output must be defined exactly on final states");
        }
        for (const auto& [s, _] : output)
            if (s >= dfa.size()) throw InvalidAutomaton("Moore output on unknown state");
    }

    /// The DFA accepting exactly the words with output `value`.
    Dfa preimage(Output value) const {
        Dfa d = dfa;
        for (std::size_t s = 0; s < d.size(); ++s) {
            auto it = output.find(static_cast<State>(s));
            d.set_final(static_cast<State>(s), it != output.end() && it->second == value);
        }
        return d;
    }

    friend bool operator==(const MooreDfa&, const MooreDfa&) = default;
};

/// Interprets an NFA as a DFA; throws unless it is deterministic.
inline Dfa as_dfa(const Nfa& n) {
    if (!n.is_deterministic()) throw KindMismatch("automaton is not deterministic");
    Dfa d(n.alphabet_size());
    if (n.initial().empty()) return d;
    // Initial state must be number 0 in a Dfa; swap it into place.
    const State init = n.initial().front();
    auto renum = [&](State s) -> State { return s == init ? 0 : (s == 0 ? init : s); };
    std::vector<State> order(n.size());
    for (std::size_t s = 0; s < n.size(); ++s) order[renum(static_cast<State>(s))] = static_cast<State>(s);
    for (std::size_t i = 0; i < n.size(); ++i) d.add_state(n.is_final(order[i]));
    for (std::size_t s = 0; s < n.size(); ++s)
        for (const auto& [a, targets] : n.transitions(static_cast<State>(s)))
            d.set_transition(renum(static_cast<State>(s)), a, renum(targets.front()));
    return d;
}

// ---------------------------------------------------------------------------
// Running NFAs

inline StateSet step_set(const Nfa& m, const StateSet& from, Symbol a) {
    StateSet out;
    for (State s : from) {
        const auto& row = m.transitions(s);
        auto it = row.find(a);
        if (it == row.end()) continue;
        out.insert(out.end(), it->second.begin(), it->second.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

/// Successors of `from` on any symbol in `symbols`.
inline StateSet step_set(const Nfa& m, const StateSet& from, std::span<const Symbol> symbols) {
    StateSet out;
    for (Symbol a : symbols) {
        StateSet part = step_set(m, from, a);
        out.insert(out.end(), part.begin(), part.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

inline bool any_final(const Nfa& m, const StateSet& states) {
    return std::any_of(states.begin(), states.end(), [&](State s) { return m.is_final(s); });
}

inline bool nfa_accepts(const Nfa& m, std::span<const Symbol> word) {
    StateSet cur = m.initial();
    for (Symbol a : word) {
        m.check_symbol(a);
        cur = step_set(m, cur, a);
    }
    return any_final(m, cur);
}

// ---------------------------------------------------------------------------
// Subset construction

struct Determinization {
    Dfa dfa;
    /// subsets[s] is the set of NFA states represented by DFA state s.
    std::vector<StateSet> subsets;
};

/// Subset construction over reachable non-empty subsets, explored breadth-first
/// in symbol order so the numbering is canonical.
inline Determinization determinize_with_subsets(const Nfa& m) {
    Determinization r{Dfa(m.alphabet_size()), {}};
    if (m.initial().empty()) return r;
    std::map<StateSet, State> index;
    std::deque<State> queue;
    auto intern = [&](StateSet s) -> State {
        auto [it, inserted] = index.emplace(s, static_cast<State>(r.subsets.size()));
        if (inserted) {
            r.dfa.add_state(any_final(m, s));
            r.subsets.push_back(std::move(s));
            queue.push_back(it->second);
        }
        return it->second;
    };
    intern(m.initial());
    while (!queue.empty()) {
        const State cur = queue.front();
        queue.pop_front();
        std::set<Symbol> symbols;
        for (State s : r.subsets[cur])
            for (const auto& [a, _] : m.transitions(s)) symbols.insert(a);
        for (Symbol a : symbols) {
            StateSet next = step_set(m, r.subsets[cur], a);
            if (next.empty()) continue;
            r.dfa.set_transition(cur, a, intern(std::move(next)));
        }
    }
    return r;
}

inline Dfa determinize(const Nfa& m) { return determinize_with_subsets(m).dfa; }

// ---------------------------------------------------------------------------
// Trimming, canonical numbering and minimization

namespace detail {

inline std::vector<bool> reachable_states(const Dfa& d) {
    std::vector<bool> seen(d.size(), false);
    if (d.empty()) return seen;
    std::deque<State> queue{0};
    seen[0] = true;
    while (!queue.empty()) {
        State s = queue.front();
        queue.pop_front();
        for (auto [_, t] : d.transitions(s))
            if (!seen[t]) {
                seen[t] = true;
                queue.push_back(t);
            }
    }
    return seen;
}

inline std::vector<bool> coreachable_states(const Dfa& d) {
    std::vector<std::vector<State>> reverse(d.size());
    for (std::size_t s = 0; s < d.size(); ++s)
        for (auto [_, t] : d.transitions(static_cast<State>(s))) reverse[t].push_back(static_cast<State>(s));
    std::vector<bool> live(d.size(), false);
    std::deque<State> queue;
    for (std::size_t s = 0; s < d.size(); ++s)
        if (d.is_final(static_cast<State>(s))) {
            live[s] = true;
            queue.push_back(static_cast<State>(s));
        }
    while (!queue.empty()) {
        State s = queue.front();
        queue.pop_front();
        for (State p : reverse[s])
            if (!live[p]) {
                live[p] = true;
                queue.push_back(p);
            }
    }
    return live;
}

/// Quotient of `d` by `cls` (class id per state, or -1 for states to drop),
/// renumbered breadth-first from the initial state's class in symbol order.
/// Returns the new automaton and the new number of each old class.
inline std::pair<Dfa, std::vector<std::int64_t>> quotient(const Dfa& d, const std::vector<std::int64_t>& cls) {
    Dfa out(d.alphabet_size());
    std::int64_t classes = 0;
    for (auto c : cls) classes = std::max(classes, c + 1);
    std::vector<std::int64_t> renum(static_cast<std::size_t>(classes), -1);
    if (d.empty() || cls[0] < 0) return {out, renum};
    std::vector<State> rep(static_cast<std::size_t>(classes), 0);
    std::vector<bool> has_rep(static_cast<std::size_t>(classes), false);
    for (std::size_t s = 0; s < d.size(); ++s)
        if (cls[s] >= 0 && !has_rep[cls[s]]) {
            has_rep[cls[s]] = true;
            rep[cls[s]] = static_cast<State>(s);
        }
    std::deque<std::int64_t> queue{cls[0]};
    renum[cls[0]] = 0;
    out.add_state(d.is_final(rep[cls[0]]));
    while (!queue.empty()) {
        const std::int64_t c = queue.front();
        queue.pop_front();
        for (auto [a, t] : d.transitions(rep[c])) {
            const std::int64_t tc = cls[t];
            if (tc < 0) continue;
            if (renum[tc] < 0) {
                renum[tc] = static_cast<std::int64_t>(out.size());
                out.add_state(d.is_final(rep[tc]));
                queue.push_back(tc);
            }
            out.set_transition(static_cast<State>(renum[c]), a, static_cast<State>(renum[tc]));
        }
    }
    return {out, renum};
}

/// Coarsest partition of the useful states of `d` that refines `seed` and is
/// compatible with the transition function. Useless states (unreachable or
/// unable to reach a final state) get class -1 and behave like the sink.
inline std::vector<std::int64_t> refine(const Dfa& d, const std::vector<std::int64_t>& seed) {
    const auto reach = reachable_states(d);
    const auto live = coreachable_states(d);
    std::vector<std::int64_t> cls(d.size(), -1);
    {
        std::map<std::int64_t, std::int64_t> ids;
        for (std::size_t s = 0; s < d.size(); ++s)
            if (reach[s] && live[s]) cls[s] = ids.emplace(seed[s], static_cast<std::int64_t>(ids.size())).first->second;
    }
    for (;;) {
        using Signature = std::pair<std::int64_t, std::vector<std::pair<Symbol, std::int64_t>>>;
        std::map<Signature, std::int64_t> ids;
        std::vector<std::int64_t> next(d.size(), -1);
        for (std::size_t s = 0; s < d.size(); ++s) {
            if (cls[s] < 0) continue;
            Signature sig{cls[s], {}};
            for (auto [a, t] : d.transitions(static_cast<State>(s)))
                if (cls[t] >= 0) sig.second.emplace_back(a, cls[t]);
            next[s] = ids.emplace(std::move(sig), static_cast<std::int64_t>(ids.size())).first->second;
        }
        std::size_t before = 0, after = ids.size();
        {
            std::set<std::int64_t> distinct(cls.begin(), cls.end());
            distinct.erase(-1);
            before = distinct.size();
        }
        cls = std::move(next);
        if (after == before) return cls;
    }
}

}  // namespace detail

/// Removes unreachable and dead states; renumbers canonically.
inline Dfa trim(const Dfa& d) {
    const auto reach = detail::reachable_states(d);
    const auto live = detail::coreachable_states(d);
    std::vector<std::int64_t> cls(d.size(), -1);
    for (std::size_t s = 0; s < d.size(); ++s)
        if (reach[s] && live[s]) cls[s] = static_cast<std::int64_t>(s);
    return detail::quotient(d, cls).first;
}

inline Dfa minimize_dfa(const Dfa& d) {
    std::vector<std::int64_t> seed(d.size());
    for (std::size_t s = 0; s < d.size(); ++s) seed[s] = d.is_final(static_cast<State>(s)) ? 1 : 0;
    return detail::quotient(d, detail::refine(d, seed)).first;
}

/// Minimal Moore machine for the same partial word-to-output function; the
/// initial partition separates states by (final, output).
inline MooreDfa minimize_moore(const MooreDfa& m) {
    const Dfa& d = m.dfa;
    std::vector<std::int64_t> seed(d.size());
    for (std::size_t s = 0; s < d.size(); ++s) {
        auto it = m.output.find(static_cast<State>(s));
        seed[s] = it == m.output.end() ? -2 : static_cast<std::int64_t>(it->second);
    }
    const auto cls = detail::refine(d, seed);
    auto [q, renum] = detail::quotient(d, cls);
    MooreDfa out{std::move(q), {}};
    for (std::size_t s = 0; s < d.size(); ++s) {
        if (cls[s] < 0 || renum[cls[s]] < 0) continue;
        if (auto it = m.output.find(static_cast<State>(s)); it != m.output.end())
            out.output[static_cast<State>(renum[cls[s]])] = it->second;
    }
    return out;
}

/// Removes unreachable and dead states of an NFA, keeping the relative order
/// of the surviving states.
inline Nfa trim(const Nfa& m) {
    std::vector<bool> reach(m.size(), false);
    std::deque<State> queue(m.initial().begin(), m.initial().end());
    for (State s : m.initial()) reach[s] = true;
    std::vector<std::vector<State>> reverse(m.size());
    while (!queue.empty()) {
        State s = queue.front();
        queue.pop_front();
        for (const auto& [_, targets] : m.transitions(s))
            for (State t : targets) {
                reverse[t].push_back(s);
                if (!reach[t]) {
                    reach[t] = true;
                    queue.push_back(t);
                }
            }
    }
    std::vector<bool> live(m.size(), false);
    for (std::size_t s = 0; s < m.size(); ++s)
        if (reach[s] && m.is_final(static_cast<State>(s))) {
            live[s] = true;
            queue.push_back(static_cast<State>(s));
        }
    while (!queue.empty()) {
        State s = queue.front();
        queue.pop_front();
        for (State p : reverse[s])
            if (!live[p]) {
                live[p] = true;
                queue.push_back(p);
            }
    }
    std::vector<std::int64_t> renum(m.size(), -1);
    Nfa out(m.alphabet_size());
    for (std::size_t s = 0; s < m.size(); ++s)
        if (live[s]) renum[s] = out.add_state(m.is_final(static_cast<State>(s)));
    for (State s : m.initial())
        if (renum[s] >= 0) out.add_initial(static_cast<State>(renum[s]));
    for (std::size_t s = 0; s < m.size(); ++s) {
        if (renum[s] < 0) continue;
        for (const auto& [a, targets] : m.transitions(static_cast<State>(s)))
            for (State t : targets)
                if (renum[t] >= 0) out.add_transition(static_cast<State>(renum[s]), a, static_cast<State>(renum[t]));
    }
    return out;
}

/// Trims a Moore machine (unreachable and dead states go), keeping outputs.
inline MooreDfa trim(const MooreDfa& m) {
    const auto reach = detail::reachable_states(m.dfa);
    const auto live = detail::coreachable_states(m.dfa);
    std::vector<std::int64_t> cls(m.dfa.size(), -1);
    for (std::size_t s = 0; s < m.dfa.size(); ++s)
        if (reach[s] && live[s]) cls[s] = static_cast<std::int64_t>(s);
    auto [d, renum] = detail::quotient(m.dfa, cls);
    MooreDfa out{std::move(d), {}};
    for (const auto& [s, o] : m.output)
        if (cls[s] >= 0 && renum[cls[s]] >= 0) out.output[static_cast<State>(renum[cls[s]])] = o;
    return out;
}

/// Renames symbols through `symbol_map` (old symbol -> new symbol, or -1 to
/// delete every transition on it).
inline Nfa relabel(const Nfa& m, std::span<const std::int64_t> symbol_map, std::size_t new_alphabet_size) {
    Nfa out(new_alphabet_size);
    for (std::size_t s = 0; s < m.size(); ++s) out.add_state(m.is_final(static_cast<State>(s)));
    for (State s : m.initial()) out.add_initial(s);
    for (std::size_t s = 0; s < m.size(); ++s)
        for (const auto& [a, targets] : m.transitions(static_cast<State>(s))) {
            if (a >= symbol_map.size() || symbol_map[a] < 0) continue;
            for (State t : targets) out.add_transition(static_cast<State>(s), static_cast<Symbol>(symbol_map[a]), t);
        }
    return out;
}

/// As for NFAs; several old symbols may map to one new symbol only if they
/// lead to the same state everywhere.
inline Dfa relabel(const Dfa& m, std::span<const std::int64_t> symbol_map, std::size_t new_alphabet_size) {
    Dfa out(new_alphabet_size);
    for (std::size_t s = 0; s < m.size(); ++s) out.add_state(m.is_final(static_cast<State>(s)));
    for (std::size_t s = 0; s < m.size(); ++s)
        for (auto [a, t] : m.transitions(static_cast<State>(s))) {
            if (a >= symbol_map.size() || symbol_map[a] < 0) continue;
            out.set_transition(static_cast<State>(s), static_cast<Symbol>(symbol_map[a]), t);
        }
    return out;
}

// ---------------------------------------------------------------------------
// Products

/// A shortest word in L(a) ∩ L(b), found by breadth-first search of the product.
inline std::optional<Word> common_word(const Nfa& a, const Nfa& b) {
    if (a.alphabet_size() != b.alphabet_size())
        throw AlphabetMismatch("alphabet sizes differ: " + std::to_string(a.alphabet_size()) + " vs " +
                               std::to_string(b.alphabet_size()));
    using Pair = std::pair<State, State>;
    std::map<Pair, std::pair<Pair, Symbol>> parent;
    std::deque<Pair> queue;
    std::set<Pair> seen;
    for (State p : a.initial())
        for (State q : b.initial()) {
            seen.insert({p, q});
            queue.push_back({p, q});
        }
    while (!queue.empty()) {
        Pair cur = queue.front();
        queue.pop_front();
        if (a.is_final(cur.first) && b.is_final(cur.second)) {
            Word w;
            while (parent.count(cur)) {
                w.push_back(parent[cur].second);
                cur = parent[cur].first;
            }
            std::reverse(w.begin(), w.end());
            return w;
        }
        const auto& rb = b.transitions(cur.second);
        for (const auto& [sym, ta] : a.transitions(cur.first)) {
            auto it = rb.find(sym);
            if (it == rb.end()) continue;
            for (State p : ta)
                for (State q : it->second)
                    if (seen.insert({p, q}).second) {
                        parent[{p, q}] = {cur, sym};
                        queue.push_back({p, q});
                    }
        }
    }
    return std::nullopt;
}

inline std::optional<Word> common_word(const Dfa& a, const Dfa& b) { return common_word(a.to_nfa(), b.to_nfa()); }

/// True iff L(a) ∩ L(b) = ∅.
inline bool product_disjoint(const Nfa& a, const Nfa& b) { return !common_word(a, b).has_value(); }
inline bool product_disjoint(const Dfa& a, const Dfa& b) { return !common_word(a, b).has_value(); }

inline bool language_empty(const Nfa& m) {
    std::vector<bool> seen(m.size(), false);
    std::deque<State> queue(m.initial().begin(), m.initial().end());
    for (State s : m.initial()) seen[s] = true;
    while (!queue.empty()) {
        State s = queue.front();
        queue.pop_front();
        if (m.is_final(s)) return false;
        for (const auto& [_, targets] : m.transitions(s))
            for (State t : targets)
                if (!seen[t]) {
                    seen[t] = true;
                    queue.push_back(t);
                }
    }
    return true;
}

/// Two parts of a marked union share a word.
class DisjointnessViolation : public Error {
public:
    DisjointnessViolation(std::size_t i, std::size_t j, Word witness)
        : Error("parts " + std::to_string(i) + " and " + std::to_string(j) + " overlap"),
          first(i), second(j), witness(std::move(witness)) {}
    std::size_t first, second;
    Word witness;
};

/// Moore machine whose output on w is the index of the part containing w.
/// Built as the reachable product of the parts; states where every
/// component is dead are the implicit sink and are not stored.
inline MooreDfa marked_union(std::span<const Dfa> parts) {
    if (parts.empty()) throw Error("marked union needs at least one part");
    const std::size_t sigma = parts.front().alphabet_size();
    for (const auto& p : parts)
        if (p.alphabet_size() != sigma) throw AlphabetMismatch("marked union parts use different alphabets");
    for (std::size_t i = 0; i < parts.size(); ++i)
        for (std::size_t j = i + 1; j < parts.size(); ++j)
            if (auto w = common_word(parts[i], parts[j])) throw DisjointnessViolation(i, j, *w);

    constexpr std::int64_t kDead = -1;
    using Tuple = std::vector<std::int64_t>;
    MooreDfa out{Dfa(sigma), {}};
    std::map<Tuple, State> index;
    std::vector<Tuple> tuples;
    std::deque<State> queue;
    auto intern = [&](Tuple t) -> std::optional<State> {
        if (std::all_of(t.begin(), t.end(), [](auto c) { return c == kDead; })) return std::nullopt;
        auto [it, inserted] = index.emplace(t, static_cast<State>(tuples.size()));
        if (inserted) {
            std::optional<Output> accepting;
            for (std::size_t i = 0; i < t.size(); ++i)
                if (t[i] != kDead && parts[i].is_final(static_cast<State>(t[i]))) {
                    if (accepting) throw Error("marked union: two accepting components in one product state");
                    accepting = static_cast<Output>(i);
                }
            out.dfa.add_state(accepting.has_value());
            if (accepting) out.output[it->second] = *accepting;
            tuples.push_back(std::move(t));
            queue.push_back(it->second);
        }
        return it->second;
    };
    Tuple start;
    for (const auto& p : parts) start.push_back(p.empty() ? kDead : 0);
    if (!intern(start)) return out;
    while (!queue.empty()) {
        const State cur = queue.front();
        queue.pop_front();
        std::set<Symbol> symbols;
        for (std::size_t i = 0; i < parts.size(); ++i)
            if (tuples[cur][i] != kDead)
                for (const auto& [a, _] : parts[i].transitions(static_cast<State>(tuples[cur][i]))) symbols.insert(a);
        for (Symbol a : symbols) {
            Tuple next(parts.size(), kDead);
            for (std::size_t i = 0; i < parts.size(); ++i)
                if (tuples[cur][i] != kDead)
                    if (auto t = parts[i].step(static_cast<State>(tuples[cur][i]), a)) next[i] = *t;
            if (auto t = intern(std::move(next))) out.dfa.set_transition(cur, a, *t);
        }
    }
    return out;
}

/// Drops the output function.
inline Dfa underlying_dfa(const MooreDfa& m) { return m.dfa; }

}  // namespace uta

#endif  // UTA_STRING_AUTOMATA_HPP
