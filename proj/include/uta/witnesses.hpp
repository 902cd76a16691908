#ifndef UTA_WITNESSES_HPP
#define UTA_WITNESSES_HPP

// Lower-bound witness families with independent membership predicates, and
// certifiers that turn fooling sets into state-count lower bounds.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "uta/error.hpp"
#include "uta/string_automata.hpp"
#include "uta/tree_automaton.hpp"
#include "uta/trees.hpp"

namespace uta {

/// Ground-truth membership test for a tree language, independent of any automaton.
struct LangPredicate {
    std::vector<std::string> alphabet;
    std::function<bool(const Tree&)> decide;
    std::string description;

    bool operator()(const Tree& t) const { return decide(t); }
};

struct Witness {
    TreeAutomaton automaton;
    LangPredicate predicate;
};

inline std::vector<std::size_t> first_primes(std::size_t n) {
    std::vector<std::size_t> out;
    for (std::size_t c = 2; out.size() < n; ++c)
        if (std::all_of(out.begin(), out.end(), [&](std::size_t p) { return c % p != 0; })) out.push_back(c);
    return out;
}

/// Most-significant-bit-first binary representation without leading zeros.
inline std::string binary(std::size_t i) {
    if (i == 0) return "0";
    std::string out;
    for (; i; i >>= 1) out.insert(out.begin(), static_cast<char>('0' + (i & 1)));
    return out;
}

inline std::size_t floor_log2(std::size_t i) {
    std::size_t r = 0;
    while (i >>= 1) ++r;
    return r;
}

namespace detail {

/// Descends a chain of unary a-nodes: returns (i, bottom) where bottom is the
/// lowest a-node of the chain, or nullopt if the root is not labeled a.
/// A node counts as part of the chain while its only child is an a-node that
/// is not itself the bottom of a flat word.
struct ChainShape {
    std::size_t height;
    std::vector<std::string> word;
};

inline std::optional<ChainShape> chain_shape(const Tree& t, const std::string& a,
                                             const std::set<std::string>& letters) {
    const Tree* node = &t;
    std::size_t height = 0;
    for (;;) {
        if (node->label != a) return std::nullopt;
        ++height;
        const bool flat = std::all_of(node->children.begin(), node->children.end(), [&](const Tree& c) {
            return c.is_leaf() && letters.count(c.label);
        });
        if (flat) {
            ChainShape s{height, {}};
            for (const auto& c : node->children) s.word.push_back(c.label);
            return s;
        }
        if (node->children.size() != 1) return std::nullopt;
        node = &node->children.front();
    }
}

inline void check_coprime_increasing(const std::vector<std::size_t>& k) {
    if (k.empty()) throw Error("need at least one modulus");
    for (std::size_t i = 0; i < k.size(); ++i) {
        if (k[i] < 2) throw Error("moduli must be at least 2");
        if (i && k[i] <= k[i - 1]) throw Error("moduli must be strictly increasing");
        for (std::size_t j = 0; j < i; ++j)
            if (std::gcd(k[i], k[j]) != 1)
                throw Error("moduli " + std::to_string(k[j]) + " and " + std::to_string(k[i]) +
                            " are not relatively prime");
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// L = ⋃_i a^i((b^{k_i})* y_i), recognized by a DTA(DFA) with
// δ(q_i, a) = (b^{k_i})* y_i + q_{i+1}.

inline LangPredicate lemma34_predicate(std::vector<std::size_t> k) {
    detail::check_coprime_increasing(k);
    LangPredicate p;
    p.alphabet = {"a", "b", "0", "1"};
    p.description = "union over i of a^i((b^k_i)* y_i), y_i = binary(i)";
    p.decide = [k](const Tree& t) {
        auto shape = detail::chain_shape(t, "a", {"b", "0", "1"});
        if (!shape) return false;
        const std::size_t i = shape->height;
        if (i > k.size()) return false;
        const std::string y = binary(i);
        const auto& w = shape->word;
        if (w.size() < y.size()) return false;
        const std::size_t bs = w.size() - y.size();
        for (std::size_t j = 0; j < bs; ++j)
            if (w[j] != "b") return false;
        for (std::size_t j = 0; j < y.size(); ++j)
            if (w[bs + j] != std::string(1, y[j])) return false;
        return bs % k[i - 1] == 0;
    };
    return p;
}

/// The DTA(DFA) for lemma34_predicate(k). Every horizontal DFA is built from
/// one template: an initial state, a k_i-cycle on b, a path reading y_i into
/// the accepting state (also entered from the initial state on q_{i+1}), and a
/// sink making the DFA complete over the vertical states. That is
/// k_i + ⌊log i⌋ + 3 states each; for i = m the initial state duplicates the
/// cycle's base state. Leaf symbols use the leaf convention.
inline Witness gen_lemma34(const std::vector<std::size_t>& k) {
    detail::check_coprime_increasing(k);
    const std::size_t m = k.size();
    TreeAutomaton a;
    a.kind = Kind::DtaDfa;
    a.alphabet = {"a", "b", "0", "1"};
    for (std::size_t i = 1; i <= m; ++i) a.states.push_back("q" + std::to_string(i));
    for (const auto& s : a.alphabet) {
        a.leaf_states[a.symbol(s)] = static_cast<State>(a.states.size());
        a.states.push_back(s);
    }
    a.finals = {0};
    const std::size_t nq = a.states.size();
    const Symbol a_sym = a.symbol("a");
    const State b = a.state("b");

    for (std::size_t i = 1; i <= m; ++i) {
        const std::size_t ki = k[i - 1];
        const std::string y = binary(i);
        Dfa d(nq);
        const State start = d.add_state();
        std::vector<State> cycle(ki);
        for (std::size_t j = 1; j < ki; ++j) cycle[j] = d.add_state();
        cycle[0] = d.add_state();
        std::vector<State> path;
        for (std::size_t j = 0; j < y.size(); ++j) path.push_back(d.add_state(j + 1 == y.size()));
        const State sink = d.add_state();

        d.set_transition(start, b, cycle[1 % ki]);
        for (std::size_t j = 0; j < ki; ++j) d.set_transition(cycle[j], b, cycle[(j + 1) % ki]);
        const State first_bit = a.state(std::string(1, y[0]));
        d.set_transition(start, first_bit, path[0]);
        d.set_transition(cycle[0], first_bit, path[0]);
        for (std::size_t j = 1; j < y.size(); ++j) d.set_transition(path[j - 1], a.state(std::string(1, y[j])), path[j]);
        if (i < m) d.set_transition(start, static_cast<Symbol>(i), path.back());  // reads q_{i+1}
        for (std::size_t s = 0; s < d.size(); ++s)
            for (std::size_t q = 0; q < nq; ++q)
                if (!d.step(static_cast<State>(s), static_cast<Symbol>(q)))
                    d.set_transition(static_cast<State>(s), static_cast<Symbol>(q), sink);
        a.horizontal.emplace(HorizontalKey{static_cast<State>(i - 1), a_sym}, d.to_nfa());
    }
    return {std::move(a), lemma34_predicate(k)};
}

/// a^i(b^c y_j) for 1 ≤ i, j ≤ m+1 and c ≤ max_b, plus the same with b-only words.
inline std::vector<Tree> lemma34_grid(std::size_t m, std::size_t max_b) {
    std::vector<Tree> out;
    for (std::size_t i = 1; i <= m + 1; ++i)
        for (std::size_t c = 0; c <= max_b; ++c) {
            std::vector<std::string> bs(c, "b");
            out.push_back(chain("a", i - 1, spine("a", bs)));
            for (std::size_t j = 1; j <= m + 1; ++j) {
                std::vector<std::string> w = bs;
                for (char bit : binary(j)) w.emplace_back(1, bit);
                out.push_back(chain("a", i - 1, spine("a", w)));
            }
        }
    return out;
}

// ---------------------------------------------------------------------------
// T_n = { a^i(b^k) : ∃ j ≤ n. k ≡ 0 (mod p_j) ∧ i ≡ j (mod n) }, p_j the j-th prime.

/// Direct membership of a^i(b^k) in T_n.
inline bool thm41_member(std::size_t n, const std::vector<std::size_t>& primes, std::size_t i, std::size_t k) {
    if (i == 0) return false;
    for (std::size_t j = 1; j <= n; ++j)
        if (k % primes[j - 1] == 0 && i % n == j % n) return true;
    return false;
}

inline LangPredicate thm41_predicate(std::size_t n) {
    if (n == 0) throw Error("n must be at least 1");
    const auto primes = first_primes(n);
    LangPredicate p;
    p.alphabet = {"a", "b"};
    p.description = "a^i(b^k) with k = 0 mod p_j and i = j mod n for some j <= " + std::to_string(n);
    p.decide = [n, primes](const Tree& t) {
        auto shape = detail::chain_shape(t, "a", {"b"});
        if (!shape) return false;
        return thm41_member(n, primes, shape->height, shape->word.size());
    };
    return p;
}

/// NTA(DFA) for T_n with n vertical states. The bottom a-node guesses j with
/// p_j | k; each step up the chain moves q_j to q_{j-1} (cyclically), and q_1
/// is final, so the root is q_1 exactly when i ≡ j (mod n).
/// δ(q_j, a) = (b^{p_j})* + q_{j+1}, a DFA with p_j + 2 states.
inline Witness gen_thm41(std::size_t n) {
    if (n == 0) throw Error("n must be at least 1");
    const auto primes = first_primes(n);
    TreeAutomaton a;
    a.kind = Kind::NtaDfa;
    a.alphabet = {"a", "b"};
    for (std::size_t j = 1; j <= n; ++j) a.states.push_back("q" + std::to_string(j));
    a.states.push_back("b");
    a.leaf_states[a.symbol("b")] = static_cast<State>(n);
    a.finals = {0};
    const std::size_t nq = a.states.size();
    const State b = static_cast<State>(n);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t p = primes[j];
        Dfa d(nq);
        const State start = d.add_state(true);
        std::vector<State> cycle(p);
        for (std::size_t c = 1; c < p; ++c) cycle[c] = d.add_state();
        cycle[0] = d.add_state(true);
        const State chained = d.add_state(true);
        d.set_transition(start, b, cycle[1 % p]);
        for (std::size_t c = 0; c < p; ++c) d.set_transition(cycle[c], b, cycle[(c + 1) % p]);
        d.set_transition(start, static_cast<Symbol>((j + 1) % n), chained);
        a.horizontal.emplace(HorizontalKey{static_cast<State>(j), a.symbol("a")}, d.to_nfa());
    }
    return {std::move(a), thm41_predicate(n)};
}

/// a^i(b^k) for 1 ≤ i ≤ max_i, 0 ≤ k ≤ max_k.
inline std::vector<Tree> thm41_grid(std::size_t max_i, std::size_t max_k) {
    std::vector<Tree> out;
    for (std::size_t i = 1; i <= max_i; ++i)
        for (std::size_t k = 0; k <= max_k; ++k) out.push_back(chain("a", i - 1, spine("a", std::vector<std::string>(k, "b"))));
    return out;
}

// ---------------------------------------------------------------------------
// Marked union of unary residue classes

/// Parts L_i = { a^j : j ≡ i (mod m) }, i = 1..m, over the one-letter alphabet {0}.
inline std::vector<Dfa> residue_parts(std::size_t m) {
    if (m == 0) throw Error("m must be at least 1");
    std::vector<Dfa> parts;
    for (std::size_t i = 1; i <= m; ++i) {
        Dfa d(1);
        for (std::size_t r = 0; r < m; ++r) d.add_state(r == i % m);
        for (std::size_t r = 0; r < m; ++r) d.set_transition(static_cast<State>(r), 0, static_cast<State>((r + 1) % m));
        parts.push_back(std::move(d));
    }
    return parts;
}

// ---------------------------------------------------------------------------
// Fooling sets

using IndexPair = std::pair<std::size_t, std::size_t>;

/// Trees R pairwise separated by contexts: for i < j, exactly one of
/// c(x <- t_i), c(x <- t_j) is in the language.
struct FoolingSetVertical {
    std::vector<Tree> trees;
    std::map<IndexPair, Context> separators;
};

/// Child tuples S separated under a symbol: for i < j there is a context c
/// and padding u_1..u_k with exactly one of c(x <- sym(r_i, u)), c(x <- sym(s_j, u))
/// in the language.
struct FoolingSetHorizontal {
    std::string symbol;
    std::vector<std::vector<Tree>> tuples;
    struct Separator {
        Context context;
        std::vector<Tree> padding;
    };
    std::map<IndexPair, Separator> separators;
};

class SeparationFailure : public Error {
public:
    SeparationFailure(const std::string& what, IndexPair p) : Error(what), pair(p) {}
    IndexPair pair;
};

struct SeparatorSearch {
    EnumerationBounds contexts{3, 2, 400};
    EnumerationBounds padding_trees{2, 1, 12};
    std::size_t max_padding = 3;
};

/// Identity context first, then every enumerated tree with one leaf replaced by x.
inline std::vector<Context> enumerate_contexts(std::span<const std::string> alphabet, const EnumerationBounds& bounds) {
    std::vector<Context> out{Context::hole()};
    std::set<std::string> seen{std::string(kVariable)};
    auto trees = enumerate_trees(alphabet, bounds).trees;
    for (const auto& t : trees) {
        std::vector<std::vector<std::size_t>> leaves;
        auto collect = [&](auto&& self, const Tree& n, std::vector<std::size_t>& path) -> void {
            if (n.is_leaf()) leaves.push_back(path);
            for (std::size_t i = 0; i < n.children.size(); ++i) {
                path.push_back(i);
                self(self, n.children[i], path);
                path.pop_back();
            }
        };
        std::vector<std::size_t> path;
        collect(collect, t, path);
        for (const auto& leaf : leaves) {
            Tree c = t;
            Tree* n = &c;
            for (std::size_t i : leaf) n = &n->children[i];
            n->label = std::string(kVariable);
            if (seen.insert(render_tree(c)).second) out.emplace_back(std::move(c));
            if (out.size() >= bounds.max_count) return out;
        }
    }
    return out;
}

inline bool separates(const LangPredicate& pred, const Context& c, const Tree& t1, const Tree& t2) {
    return pred(substitute(c, t1)) != pred(substitute(c, t2));
}

namespace detail {

inline Tree under(const std::string& symbol, const std::vector<Tree>& tuple, const std::vector<Tree>& padding) {
    Tree t(symbol, tuple);
    t.children.insert(t.children.end(), padding.begin(), padding.end());
    return t;
}

}  // namespace detail

inline bool separates(const LangPredicate& pred, const std::string& symbol, const FoolingSetHorizontal::Separator& s,
                      const std::vector<Tree>& r, const std::vector<Tree>& u) {
    return pred(substitute(s.context, detail::under(symbol, r, s.padding))) !=
           pred(substitute(s.context, detail::under(symbol, u, s.padding)));
}

/// Lower bound |R| - 1 on the vertical states of any SDTA or DTA(NFA) for the
/// language. Supplied separators must work; missing ones are searched for
/// within `search`. Any pair left unseparated raises SeparationFailure.
inline std::size_t certify_vertical_bound(const LangPredicate& pred, const FoolingSetVertical& fs,
                                          const SeparatorSearch& search = {}) {
    const auto& R = fs.trees;
    std::optional<std::vector<Context>> candidates;
    for (std::size_t i = 0; i < R.size(); ++i)
        for (std::size_t j = i + 1; j < R.size(); ++j) {
            if (auto it = fs.separators.find({i, j}); it != fs.separators.end()) {
                if (!separates(pred, it->second, R[i], R[j]))
                    throw SeparationFailure("context " + render_context(it->second) + " does not separate " +
                                                render_tree(R[i]) + " and " + render_tree(R[j]),
                                            {i, j});
                continue;
            }
            if (!candidates) candidates = enumerate_contexts(pred.alphabet, search.contexts);
            const bool found = std::any_of(candidates->begin(), candidates->end(),
                                           [&](const Context& c) { return separates(pred, c, R[i], R[j]); });
            if (!found)
                throw SeparationFailure("no context within the search bounds separates " + render_tree(R[i]) +
                                            " and " + render_tree(R[j]),
                                        {i, j});
        }
    return R.empty() ? 0 : R.size() - 1;
}

/// Lower bound |S| - 1 on the states of H_symbol in any SDTA for the language.
/// Separator handling as for certify_vertical_bound.
inline std::size_t certify_horizontal_bound(const LangPredicate& pred, const FoolingSetHorizontal& fs,
                                            const SeparatorSearch& search = {}) {
    const auto& S = fs.tuples;
    std::optional<std::vector<Context>> contexts;
    std::vector<std::vector<Tree>> paddings;
    for (std::size_t i = 0; i < S.size(); ++i)
        for (std::size_t j = i + 1; j < S.size(); ++j) {
            if (auto it = fs.separators.find({i, j}); it != fs.separators.end()) {
                if (!separates(pred, fs.symbol, it->second, S[i], S[j]))
                    throw SeparationFailure("separator " + render_context(it->second.context) +
                                                " does not distinguish tuples " + std::to_string(i) + " and " +
                                                std::to_string(j),
                                            {i, j});
                continue;
            }
            if (!contexts) {
                contexts = enumerate_contexts(pred.alphabet, search.contexts);
                auto small = enumerate_trees(pred.alphabet, search.padding_trees).trees;
                paddings.push_back({});
                for (std::size_t len = 1; len <= search.max_padding; ++len) {
                    const std::size_t start = paddings.size();
                    for (std::size_t p = 0; p < start; ++p) {
                        if (paddings[p].size() != len - 1) continue;
                        for (const auto& t : small) {
                            auto next = paddings[p];
                            next.push_back(t);
                            paddings.push_back(std::move(next));
                        }
                    }
                }
            }
            bool found = false;
            for (const auto& c : *contexts) {
                for (const auto& u : paddings)
                    if (separates(pred, fs.symbol, {c, u}, S[i], S[j])) {
                        found = true;
                        break;
                    }
                if (found) break;
            }
            if (!found)
                throw SeparationFailure("no context and padding within the search bounds separate tuples " +
                                            std::to_string(i) + " and " + std::to_string(j),
                                        {i, j});
        }
    return S.empty() ? 0 : S.size() - 1;
}

/// R = { a(b^{k_i} y_i) } ∪ { a(b) }, separated by chain contexts a^{i-1}(x).
inline FoolingSetVertical lemma34_vertical_fooling_set(const std::vector<std::size_t>& k) {
    detail::check_coprime_increasing(k);
    FoolingSetVertical fs;
    for (std::size_t i = 1; i <= k.size(); ++i) {
        std::vector<std::string> w(k[i - 1], "b");
        for (char bit : binary(i)) w.emplace_back(1, bit);
        fs.trees.push_back(spine("a", w));
    }
    fs.trees.push_back(spine("a", std::vector<std::string>{"b"}));
    for (std::size_t i = 0; i < k.size(); ++i)
        for (std::size_t j = i + 1; j < fs.trees.size(); ++j)
            fs.separators.emplace(IndexPair{i, j}, Context(chain("a", i, Tree(std::string(kVariable)))));
    return fs;
}

/// S = { (b^r) : 0 ≤ r < Π k_i } under symbol a. For r1 < r2 pick i with
/// k_i ∤ r2 - r1 and pad both with b^(z - r1) y_i, z the next multiple of k_i
/// after r1, inside the context a^{i-1}(x): exactly one word has a b-count
/// divisible by k_i.
inline FoolingSetHorizontal lemma34_horizontal_fooling_set(const std::vector<std::size_t>& k) {
    detail::check_coprime_increasing(k);
    std::size_t product = 1;
    for (auto v : k) product *= v;
    FoolingSetHorizontal fs;
    fs.symbol = "a";
    for (std::size_t r = 0; r < product; ++r) fs.tuples.emplace_back(r, Tree("b"));
    for (std::size_t r1 = 0; r1 < product; ++r1)
        for (std::size_t r2 = r1 + 1; r2 < product; ++r2) {
            std::size_t i = 0;
            while ((r2 - r1) % k[i] == 0) ++i;
            const std::size_t ki = k[i];
            const std::size_t z = r1 + (ki - r1 % ki);
            std::vector<Tree> padding(z - r1, Tree("b"));
            for (char bit : binary(i + 1)) padding.emplace_back(std::string(1, bit));
            fs.separators.emplace(IndexPair{r1, r2},
                                  FoolingSetHorizontal::Separator{Context(chain("a", i, Tree(std::string(kVariable)))),
                                                                  std::move(padding)});
        }
    return fs;
}

}  // namespace uta

#endif  // UTA_WITNESSES_HPP
