#ifndef UTA_TESTS_RANDOM_AUTOMATA_HPP
#define UTA_TESTS_RANDOM_AUTOMATA_HPP

// Small random automata for property tests. All draws go through one
// std::mt19937_64 so a seed reproduces a case.

#include <random>
#include <string>
#include <vector>

#include "uta/uta.hpp"

namespace uta::support {

using Rng = std::mt19937_64;

inline std::size_t draw(Rng& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}
inline bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

struct Shape {
    std::size_t max_symbols = 3;
    std::size_t max_vertical = 4;
    std::size_t max_horizontal = 6;
    double leaf_probability = 0.5;
};

namespace detail {

/// Alphabet a, b, ...; vertical states q0, q1, ...; leaf states named after
/// their symbol with a trailing underscore. Returns the number of vertical states.
inline std::size_t skeleton(TreeAutomaton& a, const Shape& shape, Rng& rng) {
    const std::size_t ns = draw(rng, 1, shape.max_symbols);
    const std::size_t nv = draw(rng, 1, shape.max_vertical);
    for (std::size_t i = 0; i < ns; ++i) a.alphabet.push_back(std::string(1, static_cast<char>('a' + i)));
    for (std::size_t i = 0; i < nv; ++i) {
        a.states.push_back("q" + std::to_string(i));
        if (coin(rng)) a.finals.insert(static_cast<State>(i));
    }
    for (std::size_t s = 0; s < ns; ++s)
        if (coin(rng, shape.leaf_probability)) {
            a.leaf_states[static_cast<Symbol>(s)] = static_cast<State>(a.states.size());
            a.states.push_back(a.alphabet[s] + "_");
        }
    return nv;
}

/// Random partial Moore DFA over all states of `a`, outputs among the first
/// `nv` (vertical) states. With `no_epsilon` the initial state is not final.
inline MooreDfa random_moore(const TreeAutomaton& a, std::size_t nv, std::size_t max_states, bool no_epsilon, Rng& rng) {
    const std::size_t nq = a.num_states();
    const std::size_t n = draw(rng, 1, max_states);
    MooreDfa m{Dfa(nq), {}};
    for (std::size_t s = 0; s < n; ++s) {
        const bool final = coin(rng, 0.5) && !(no_epsilon && s == 0);
        m.dfa.add_state(final);
        if (final) m.output[static_cast<State>(s)] = static_cast<Output>(draw(rng, 0, nv - 1));
    }
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t q = 0; q < nq; ++q)
            if (coin(rng, 0.6)) m.dfa.set_transition(static_cast<State>(s), static_cast<Symbol>(q), static_cast<State>(draw(rng, 0, n - 1)));
    return m;
}

inline Nfa random_nfa(std::size_t alphabet, std::size_t max_states, bool no_epsilon, Rng& rng) {
    const std::size_t n = draw(rng, 1, max_states);
    Nfa m(alphabet);
    for (std::size_t s = 0; s < n; ++s) m.add_state(coin(rng) && !(no_epsilon && s == 0));
    m.add_initial(0);
    if (!no_epsilon && n > 1 && coin(rng, 0.2)) m.add_initial(1);
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t q = 0; q < alphabet; ++q)
            for (std::size_t t = 0; t < n; ++t)
                if (coin(rng, 0.35)) m.add_transition(static_cast<State>(s), static_cast<Symbol>(q), static_cast<State>(t));
    return m;
}

}  // namespace detail

/// SDTA with ≤ max_vertical vertical states and ≤ max_horizontal states per H_σ.
inline TreeAutomaton random_sdta(Rng& rng, const Shape& shape = {}) {
    TreeAutomaton a;
    a.kind = Kind::Sdta;
    const std::size_t nv = detail::skeleton(a, shape, rng);
    for (std::size_t s = 0; s < a.alphabet.size(); ++s) {
        const bool leaf = a.leaf_states.count(static_cast<Symbol>(s)) != 0;
        a.moore.emplace(static_cast<Symbol>(s), detail::random_moore(a, nv, shape.max_horizontal, leaf, rng));
    }
    validate(a);
    return a;
}

/// Semantically deterministic DTA(DFA): per σ a random Moore machine split by
/// output value, so the languages δ(q,σ) are disjoint by construction.
inline TreeAutomaton random_dtadfa(Rng& rng, const Shape& shape = {}, bool minimize = true) {
    TreeAutomaton a;
    a.kind = Kind::DtaDfa;
    const std::size_t nv = detail::skeleton(a, shape, rng);
    for (std::size_t s = 0; s < a.alphabet.size(); ++s) {
        const bool leaf = a.leaf_states.count(static_cast<Symbol>(s)) != 0;
        const MooreDfa m = detail::random_moore(a, nv, shape.max_horizontal, leaf, rng);
        for (std::size_t q = 0; q < nv; ++q) {
            Dfa d = m.preimage(static_cast<Output>(q));
            d = minimize ? minimize_dfa(d) : trim(d);
            if (!d.empty()) a.horizontal.emplace(HorizontalKey{static_cast<State>(q), static_cast<Symbol>(s)}, d.to_nfa());
        }
    }
    validate(a);
    return a;
}

/// NTA(NFA) with ≤ 3 vertical states and horizontal NFAs of ≤ 3 states.
inline TreeAutomaton random_ntanfa(Rng& rng, Shape shape = {3, 3, 3, 0.5}) {
    TreeAutomaton a;
    a.kind = Kind::NtaNfa;
    const std::size_t nv = detail::skeleton(a, shape, rng);
    for (std::size_t s = 0; s < a.alphabet.size(); ++s) {
        const bool leaf = a.leaf_states.count(static_cast<Symbol>(s)) != 0;
        for (std::size_t q = 0; q < nv; ++q)
            if (coin(rng, 0.75))
                a.horizontal.emplace(HorizontalKey{static_cast<State>(q), static_cast<Symbol>(s)},
                                     detail::random_nfa(a.num_states(), shape.max_horizontal, leaf, rng));
    }
    validate(a);
    return a;
}

/// DTA(NFA): every symbol uses the leaf convention, and δ(q,σ) only accepts
/// nonempty words ending in q (its final states are entered on q alone), so
/// the languages for different q are disjoint.
inline TreeAutomaton random_dtanfa(Rng& rng, Shape shape = {3, 3, 3, 1.0}) {
    shape.leaf_probability = 1.0;
    TreeAutomaton a;
    a.kind = Kind::DtaNfa;
    const std::size_t nv = detail::skeleton(a, shape, rng);
    const std::size_t nq = a.num_states();
    for (std::size_t s = 0; s < a.alphabet.size(); ++s)
        for (std::size_t q = 0; q < nv; ++q) {
            if (!coin(rng, 0.8)) continue;
            const std::size_t n = draw(rng, 2, std::max<std::size_t>(2, shape.max_horizontal));
            Nfa m(nq);
            for (std::size_t i = 0; i < n; ++i) m.add_state(i + 1 == n);
            m.add_initial(0);
            const State fin = static_cast<State>(n - 1);
            for (std::size_t i = 0; i + 1 < n; ++i) {
                for (std::size_t x = 0; x < nq; ++x)
                    for (std::size_t t = 0; t + 1 < n; ++t)
                        if (coin(rng, 0.3)) m.add_transition(static_cast<State>(i), static_cast<Symbol>(x), static_cast<State>(t));
                if (coin(rng, 0.7)) m.add_transition(static_cast<State>(i), static_cast<Symbol>(q), fin);
            }
            a.horizontal.emplace(HorizontalKey{static_cast<State>(q), static_cast<Symbol>(s)}, std::move(m));
        }
    validate(a);
    return a;
}

/// A random SDTA, DTA(DFA) or DTA(NFA).
inline TreeAutomaton random_deterministic(Rng& rng) {
    switch (draw(rng, 0, 2)) {
        case 0: return random_sdta(rng);
        case 1: return random_dtadfa(rng);
        default: return random_dtanfa(rng);
    }
}

}  // namespace uta::support

#endif  // UTA_TESTS_RANDOM_AUTOMATA_HPP
