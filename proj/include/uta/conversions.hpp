#ifndef UTA_CONVERSIONS_HPP
#define UTA_CONVERSIONS_HPP

// Conversions between the automaton kinds. Every construction explores only
// reachable parts and reports its measured size next to the worst-case bound
// for the input.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "uta/string_automata.hpp"
#include "uta/tree_automaton.hpp"

namespace uta {

struct ConversionReport {
    std::string conversion;
    /// "general", or "deterministic-input" for the refinements that apply
    /// when the input is already semantically deterministic.
    std::string construction = "general";
    Kind input_kind = Kind::NtaNfa;
    Kind output_kind = Kind::NtaNfa;
    SizePair input_size;
    SizePair output_size;
    SizePair bound;
    bool bound_satisfied = false;
};

struct Conversion {
    TreeAutomaton automaton;
    ConversionReport report;
};

/// The report as a block of `key: value` lines.
inline std::string render_report(const ConversionReport& r) {
    std::string out;
    out += "conversion: " + r.conversion + "\n";
    out += "construction: " + r.construction + "\n";
    out += "input_kind: " + std::string(to_string(r.input_kind)) + "\n";
    out += "output_kind: " + std::string(to_string(r.output_kind)) + "\n";
    out += "input_size: " + r.input_size.str() + "\n";
    out += "output_size: " + r.output_size.str() + "\n";
    out += "bound: " + r.bound.str() + "\n";
    out += std::string("bound_satisfied: ") + (r.bound_satisfied ? "true" : "false") + "\n";
    return out;
}

struct ConversionOptions {
    /// Use the general subset construction even for deterministic inputs.
    bool force_general = false;
};

namespace detail {

inline constexpr std::uint64_t kBoundCap = std::numeric_limits<std::uint64_t>::max();

inline std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) { return a > kBoundCap - b ? kBoundCap : a + b; }
inline std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
    if (a == 0 || b == 0) return 0;
    return a > kBoundCap / b ? kBoundCap : a * b;
}
inline std::uint64_t sat_pow2(std::uint64_t e) { return e >= 64 ? kBoundCap : std::uint64_t{1} << e; }

inline Conversion finish(std::string name, const TreeAutomaton& in, TreeAutomaton out, SizePair bound,
                         std::string construction = "general") {
    Conversion c{std::move(out), {}};
    c.report.conversion = std::move(name);
    c.report.construction = std::move(construction);
    c.report.input_kind = in.kind;
    c.report.output_kind = c.automaton.kind;
    c.report.input_size = size(in);
    c.report.output_size = size(c.automaton);
    c.report.bound = bound;
    c.report.bound_satisfied = c.report.output_size <= bound;
    return c;
}

inline std::size_t vertical_count(const TreeAutomaton& a) { return a.num_states() - a.leaf_states.size(); }

/// m_{q,σ} summed over q, per σ.
inline std::map<Symbol, std::uint64_t> horizontal_sizes_per_symbol(const TreeAutomaton& a) {
    std::map<Symbol, std::uint64_t> out;
    for (std::size_t s = 0; s < a.alphabet.size(); ++s) out[static_cast<Symbol>(s)] = 0;
    for (const auto& [key, n] : a.horizontal) out[key.symbol] += n.size();
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// SDTA -> DTA(DFA)

/// Splits each H_σ into one DFA per output value: δ'(q,σ) is H_σ with final
/// states λ_σ⁻¹(q). Vertical states are unchanged.
/// Bound: [|Q|; |Q| · Σ_σ size(H_σ)].
inline Conversion sdta_to_dtadfa(const TreeAutomaton& a) {
    if (a.kind != Kind::Sdta) throw KindMismatch("sdta_to_dtadfa expects an SDTA, got " + std::string(to_string(a.kind)));
    TreeAutomaton out;
    out.kind = Kind::DtaDfa;
    out.alphabet = a.alphabet;
    out.states = a.states;
    out.finals = a.finals;
    out.leaf_states = a.leaf_states;
    std::uint64_t total = 0;
    for (const auto& [sigma, m] : a.moore) {
        total += m.dfa.size();
        std::set<Output> outputs;
        for (const auto& [_, o] : m.output) outputs.insert(o);
        for (Output q : outputs) {
            Dfa d = trim(m.preimage(q));
            if (!d.empty()) out.horizontal.emplace(HorizontalKey{q, sigma}, d.to_nfa());
        }
    }
    const std::uint64_t v = detail::vertical_count(a);
    return detail::finish("sdta_to_dtadfa", a, std::move(out), {v, detail::sat_mul(v, total)});
}

// ---------------------------------------------------------------------------
// DTA(DFA) -> SDTA

/// H_σ is the reachable product of the DFAs H_{q,σ}; a product state is final
/// when exactly one component accepts and outputs that component's q.
///
/// Bound: [|Q|; Σ_σ Π_q size(H_{q,σ})], with each factor the size of the
/// complete DFA (a partial DFA pays for its sink, an empty language counts 1).
/// Product states whose components are all dead are the implicit sink and
/// are not stored.
inline Conversion dtadfa_to_sdta(const TreeAutomaton& a) {
    if (a.kind == Kind::Sdta) throw KindMismatch("dtadfa_to_sdta expects a DTA-DFA, got SDTA");
    for (const auto& [key, n] : a.horizontal)
        if (!n.is_deterministic())
            throw KindMismatch("dtadfa_to_sdta expects DFA horizontal acceptors; (" + a.states[key.state] + "," +
                               a.alphabet[key.symbol] + ") is nondeterministic");
    if (auto report = check_semantic_determinism(a); !report.deterministic)
        throw DeterminismViolation("input is not semantically deterministic: " + describe(a, *report.witness),
                                   *report.witness);

    const std::size_t nq = a.num_states();
    TreeAutomaton out;
    out.kind = Kind::Sdta;
    out.alphabet = a.alphabet;
    out.states = a.states;
    out.finals = a.finals;
    out.leaf_states = a.leaf_states;

    std::uint64_t bound_h = 0;
    for (std::size_t si = 0; si < a.alphabet.size(); ++si) {
        const Symbol sigma = static_cast<Symbol>(si);
        std::vector<State> owners;
        std::vector<Dfa> parts;
        for (const auto& [key, n] : a.horizontal)
            if (key.symbol == sigma) {
                owners.push_back(key.state);
                parts.push_back(as_dfa(n));
            }
        std::uint64_t factor = 1;
        for (const auto& d : parts) factor = detail::sat_mul(factor, d.complete_size());
        bound_h = detail::sat_add(bound_h, factor);
        if (parts.empty()) continue;

        constexpr std::int64_t kDead = -1;
        using Tuple = std::vector<std::int64_t>;
        MooreDfa m{Dfa(nq), {}};
        std::map<Tuple, State> index;
        std::vector<Tuple> tuples;
        std::deque<State> queue;
        auto intern = [&](Tuple t) -> std::optional<State> {
            if (std::all_of(t.begin(), t.end(), [](auto c) { return c == kDead; })) return std::nullopt;
            auto [it, inserted] = index.emplace(t, static_cast<State>(tuples.size()));
            if (inserted) {
                std::optional<std::size_t> accepting;
                for (std::size_t i = 0; i < t.size(); ++i)
                    if (t[i] != kDead && parts[i].is_final(static_cast<State>(t[i]))) {
                        if (accepting) {
                            // Unreachable after the determinism check above.
                            throw DeterminismViolation("two accepting components in one product state",
                                                       {sigma, owners[*accepting], owners[i], {}});
                        }
                        accepting = i;
                    }
                m.dfa.add_state(accepting.has_value());
                if (accepting) m.output[it->second] = owners[*accepting];
                tuples.push_back(std::move(t));
                queue.push_back(it->second);
            }
            return it->second;
        };
        Tuple start;
        for (const auto& d : parts) start.push_back(d.empty() ? kDead : 0);
        if (!intern(start)) continue;
        while (!queue.empty()) {
            const State cur = queue.front();
            queue.pop_front();
            std::set<Symbol> symbols;
            for (std::size_t i = 0; i < parts.size(); ++i)
                if (tuples[cur][i] != kDead)
                    for (const auto& [sym, _] : parts[i].transitions(static_cast<State>(tuples[cur][i])))
                        symbols.insert(sym);
            for (Symbol sym : symbols) {
                Tuple next(parts.size(), kDead);
                for (std::size_t i = 0; i < parts.size(); ++i)
                    if (tuples[cur][i] != kDead)
                        if (auto t = parts[i].step(static_cast<State>(tuples[cur][i]), sym)) next[i] = *t;
                if (auto t = intern(std::move(next))) m.dfa.set_transition(cur, sym, *t);
            }
        }
        out.moore.emplace(sigma, std::move(m));
    }
    return detail::finish("dtadfa_to_sdta", a, std::move(out), {detail::vertical_count(a), bound_h});
}

// ---------------------------------------------------------------------------
// Nondeterministic -> SDTA / DTA(DFA)

namespace detail {

inline std::string subset_name(const TreeAutomaton& a, const StateSet& subset) {
    std::vector<std::string> names;
    for (State q : subset) names.push_back(a.states[q]);
    std::sort(names.begin(), names.end());
    std::string out = "{";
    for (std::size_t i = 0; i < names.size(); ++i) out += (i ? "," : "") + names[i];
    return out + "}";
}

/// Subset construction shared by the nondeterministic conversions. New
/// vertical states are sets of old ones; for each σ the Moore machine runs all
/// H_{q,σ} in parallel, its state being a set of (q, horizontal state) pairs.
class SubsetSimulation {
public:
    SubsetSimulation(const TreeAutomaton& a, bool keep_singletons) : a_(a), singletons_(keep_singletons) {
        for (const auto& [sigma, leaf] : a.leaf_states) intern_vertical({leaf});
        if (singletons_)
            for (std::size_t q = 0; q < a.num_states(); ++q)
                if (!a.is_leaf_state(static_cast<State>(q))) intern_vertical({static_cast<State>(q)});
        for (std::size_t s = 0; s < a.alphabet.size(); ++s) {
            Component c;
            for (const auto& [key, n] : a.horizontal)
                if (key.symbol == s) {
                    c.offsets.push_back(c.total);
                    c.owners.push_back(key.state);
                    c.acceptors.push_back(&n);
                    c.total += n.size();
                }
            components_.push_back(std::move(c));
        }
        // The vertical alphabet grows while the machines are explored; repeat
        // until no machine produces a new subset.
        std::size_t before = 0;
        do {
            before = vertical_.size();
            for (std::size_t s = 0; s < components_.size(); ++s) explore(static_cast<Symbol>(s), false);
        } while (before != vertical_.size());
        for (std::size_t s = 0; s < components_.size(); ++s) explore(static_cast<Symbol>(s), true);
    }

    TreeAutomaton build() const {
        TreeAutomaton out;
        out.kind = Kind::Sdta;
        out.alphabet = a_.alphabet;
        for (std::size_t v = 0; v < vertical_.size(); ++v) {
            const StateSet& subset = vertical_[v];
            const bool keep_name = subset.size() == 1 && (singletons_ || a_.is_leaf_state(subset.front()));
            out.states.push_back(keep_name ? a_.states[subset.front()] : subset_name(a_, subset));
            if (std::any_of(subset.begin(), subset.end(), [&](State q) { return a_.is_final(q); }))
                out.finals.insert(static_cast<State>(v));
        }
        for (const auto& [sigma, leaf] : a_.leaf_states) out.leaf_states[sigma] = vertical_index_.at({leaf});
        for (const auto& [sigma, m] : machines_) {
            MooreDfa copy = m;
            copy.dfa.set_alphabet_size(vertical_.size());
            out.moore.emplace(sigma, std::move(copy));
        }
        return out;
    }

private:
    struct Component {
        std::vector<std::size_t> offsets;
        std::vector<State> owners;
        std::vector<const Nfa*> acceptors;
        std::size_t total = 0;
    };

    State intern_vertical(const StateSet& subset) {
        auto [it, inserted] = vertical_index_.emplace(subset, static_cast<State>(vertical_.size()));
        if (inserted) vertical_.push_back(subset);
        return it->second;
    }

    /// Combined-state set -> owners whose acceptor is in a final state.
    StateSet output_of(const Component& c, const StateSet& combined) const {
        StateSet out;
        std::size_t k = 0;
        for (State x : combined) {
            while (k + 1 < c.offsets.size() && x >= c.offsets[k + 1]) ++k;
            if (c.acceptors[k]->is_final(static_cast<State>(x - c.offsets[k]))) out.push_back(c.owners[k]);
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    StateSet step(const Component& c, const StateSet& combined, const StateSet& letter) const {
        StateSet out;
        std::size_t k = 0;
        for (State x : combined) {
            while (k + 1 < c.offsets.size() && x >= c.offsets[k + 1]) ++k;
            const auto& row = c.acceptors[k]->transitions(static_cast<State>(x - c.offsets[k]));
            for (State p : letter)
                if (auto it = row.find(p); it != row.end())
                    for (State t : it->second) out.push_back(static_cast<State>(t + c.offsets[k]));
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    void explore(Symbol sigma, bool record) {
        const Component& c = components_[sigma];
        if (c.acceptors.empty()) return;
        StateSet start;
        for (std::size_t k = 0; k < c.acceptors.size(); ++k)
            for (State s : c.acceptors[k]->initial()) start.push_back(static_cast<State>(s + c.offsets[k]));
        std::sort(start.begin(), start.end());
        if (start.empty()) return;

        MooreDfa m{Dfa(0), {}};
        std::map<StateSet, State> index;
        std::vector<StateSet> states;
        std::deque<State> queue;
        auto intern = [&](StateSet t) -> State {
            auto [it, inserted] = index.emplace(t, static_cast<State>(states.size()));
            if (inserted) {
                StateSet out = output_of(c, t);
                if (singletons_ && out.size() > 1)
                    throw DeterminismViolation("deterministic input produced a non-singleton subset",
                                               {sigma, out[0], out[1], {}});
                m.dfa.add_state(!out.empty());
                if (!out.empty()) m.output[it->second] = intern_vertical(out);
                states.push_back(std::move(t));
                queue.push_back(it->second);
            }
            return it->second;
        };
        intern(start);
        while (!queue.empty()) {
            const State cur = queue.front();
            queue.pop_front();
            // vertical_ may grow inside the loop; newly added letters are
            // picked up by the next round of the fixed point.
            const std::size_t letters = vertical_.size();
            if (record) m.dfa.set_alphabet_size(letters);
            for (std::size_t v = 0; v < letters; ++v) {
                StateSet next = step(c, states[cur], vertical_[v]);
                if (next.empty()) continue;
                const State t = intern(std::move(next));
                if (record) m.dfa.set_transition(cur, static_cast<Symbol>(v), t);
            }
        }
        if (record) machines_[sigma] = std::move(m);
    }

    const TreeAutomaton& a_;
    bool singletons_;
    std::vector<StateSet> vertical_;
    std::map<StateSet, State> vertical_index_;
    std::vector<Component> components_;
    std::map<Symbol, MooreDfa> machines_;
};

inline void require_nondeterministic_input(const TreeAutomaton& a, const char* name) {
    if (a.kind == Kind::Sdta) throw KindMismatch(std::string(name) + " expects an NTA or DTA(NFA), got SDTA");
}

}  // namespace detail

/// Subset construction to an SDTA. Vertical states are the reachable
/// non-empty sets of old states; the empty set is never a state.
///
/// Bound: [2^|Q|; Σ_σ 2^(Σ_q m_{q,σ})]. When the input is semantically
/// deterministic (and `force_general` is off) every old state is kept as a
/// singleton and the vertical bound is |Q|.
inline Conversion nta_to_sdta(const TreeAutomaton& a, ConversionOptions opts = {}) {
    detail::require_nondeterministic_input(a, "nta_to_sdta");
    const bool refine = !opts.force_general && check_semantic_determinism(a).deterministic;
    detail::SubsetSimulation sim(a, refine);
    TreeAutomaton out = sim.build();

    std::uint64_t bound_h = 0;
    for (auto [_, m] : detail::horizontal_sizes_per_symbol(a)) bound_h = detail::sat_add(bound_h, detail::sat_pow2(m));
    const std::uint64_t v = detail::vertical_count(a);
    const SizePair bound{refine ? v : detail::sat_pow2(v), bound_h};
    return detail::finish("nta_to_sdta", a, std::move(out), bound, refine ? "deterministic-input" : "general");
}

/// Conversion to a DTA(DFA).
///
/// General: the subset construction of nta_to_sdta, with δ(P,σ) given by the
/// σ-machine whose finals are the states with output P.
/// Bound: [2^|Q|; 2^|Q| · Σ_σ 2^(Σ_q m_{q,σ})].
///
/// Semantically deterministic input: each H_{q,σ} is determinized on its own,
/// keeping Q and the disjointness of the horizontal languages.
/// Bound: [|Q|; Σ_q Σ_σ 2^(m_{q,σ})].
inline Conversion nta_to_dtadfa(const TreeAutomaton& a, ConversionOptions opts = {}) {
    detail::require_nondeterministic_input(a, "nta_to_dtadfa");
    const std::uint64_t v = detail::vertical_count(a);
    if (!opts.force_general && check_semantic_determinism(a).deterministic) {
        TreeAutomaton out = a;
        out.kind = Kind::DtaDfa;
        out.horizontal.clear();
        std::uint64_t bound_h = 0;
        for (const auto& [key, n] : a.horizontal) {
            bound_h = detail::sat_add(bound_h, detail::sat_pow2(n.size()));
            Dfa d = determinize(n);
            if (!d.empty()) out.horizontal.emplace(key, d.to_nfa());
        }
        return detail::finish("nta_to_dtadfa", a, std::move(out), {v, bound_h}, "deterministic-input");
    }
    detail::SubsetSimulation sim(a, false);
    TreeAutomaton out = sdta_to_dtadfa(sim.build()).automaton;
    std::uint64_t per_symbol = 0;
    for (auto [_, m] : detail::horizontal_sizes_per_symbol(a)) per_symbol = detail::sat_add(per_symbol, detail::sat_pow2(m));
    return detail::finish("nta_to_dtadfa", a, std::move(out),
                          {detail::sat_pow2(v), detail::sat_mul(detail::sat_pow2(v), per_symbol)});
}

}  // namespace uta

#endif  // UTA_CONVERSIONS_HPP
