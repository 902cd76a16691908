#ifndef UTA_TREES_HPP
#define UTA_TREES_HPP

// Labeled ordered unranked trees, one-hole contexts, term syntax and
// bounded enumeration.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "uta/error.hpp"

namespace uta {

/// Label reserved for the hole of a context. Never a member of an alphabet.
inline constexpr std::string_view kVariable = "x";

/// An ordered unranked tree. Node addresses are child-index paths from the root.
struct Tree {
    std::string label;
    std::vector<Tree> children;

    Tree() = default;
    explicit Tree(std::string l, std::vector<Tree> c = {}) : label(std::move(l)), children(std::move(c)) {}

    bool is_leaf() const noexcept { return children.empty(); }

    friend bool operator==(const Tree&, const Tree&) = default;
};

inline std::size_t node_count(const Tree& t) {
    std::size_t n = 1;
    for (const auto& c : t.children) n += node_count(c);
    return n;
}

/// Depth of a single leaf is 1.
inline std::size_t depth(const Tree& t) {
    std::size_t d = 0;
    for (const auto& c : t.children) d = std::max(d, depth(c));
    return d + 1;
}

inline void render_tree(const Tree& t, std::string& out) {
    out += t.label;
    if (t.children.empty()) return;
    out += '(';
    for (std::size_t i = 0; i < t.children.size(); ++i) {
        if (i) out += ',';
        render_tree(t.children[i], out);
    }
    out += ')';
}

inline std::string render_tree(const Tree& t) {
    std::string out;
    render_tree(t, out);
    return out;
}

/// a^i(t): a chain of `count` nodes labeled `label` above `bottom`.
inline Tree chain(const std::string& label, std::size_t count, Tree bottom) {
    for (std::size_t i = 0; i < count; ++i) bottom = Tree(label, {std::move(bottom)});
    return bottom;
}

/// a(w): a root labeled `label` whose children are leaves spelling `word`.
inline Tree spine(const std::string& label, std::span<const std::string> word) {
    Tree t(label);
    for (const auto& s : word) t.children.emplace_back(s);
    return t;
}

namespace detail {

inline bool is_symbol_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

class TermParser {
public:
    TermParser(std::string_view text, std::span<const std::string> alphabet, bool allow_variable)
        : text_(text), alphabet_(alphabet), allow_variable_(allow_variable) {}

    Tree parse() {
        Tree t = parse_tree();
        skip_ws();
        if (pos_ != text_.size()) throw ParseError("trailing input", pos_);
        return t;
    }

    std::size_t variables() const noexcept { return variables_; }

private:
    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    Tree parse_tree() {
        skip_ws();
        const std::size_t start = pos_;
        while (pos_ < text_.size() && is_symbol_char(text_[pos_])) ++pos_;
        if (start == pos_) {
            if (pos_ == text_.size()) throw ParseError("expected symbol, found end of input", pos_);
            throw ParseError(std::string("expected symbol, found '") + text_[pos_] + "'", pos_);
        }
        std::string label(text_.substr(start, pos_ - start));
        if (label == kVariable) {
            if (!allow_variable_) throw ParseError("variable 'x' is not allowed in a plain tree", start);
            ++variables_;
        } else if (std::find(alphabet_.begin(), alphabet_.end(), label) == alphabet_.end()) {
            throw UnknownSymbol(label);
        }
        Tree t(std::move(label));
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == '(') {
            if (t.label == kVariable) throw ParseError("variable 'x' must be a leaf", pos_);
            ++pos_;
            t.children.push_back(parse_tree());
            skip_ws();
            while (pos_ < text_.size() && text_[pos_] == ',') {
                ++pos_;
                t.children.push_back(parse_tree());
                skip_ws();
            }
            if (pos_ >= text_.size()) throw ParseError("expected ')', found end of input", pos_);
            if (text_[pos_] != ')') throw ParseError(std::string("expected ')', found '") + text_[pos_] + "'", pos_);
            ++pos_;
        }
        return t;
    }

    std::string_view text_;
    std::span<const std::string> alphabet_;
    bool allow_variable_;
    std::size_t pos_ = 0;
    std::size_t variables_ = 0;
};

inline std::size_t count_label(const Tree& t, std::string_view label) {
    std::size_t n = t.label == label ? 1 : 0;
    for (const auto& c : t.children) n += count_label(c, label);
    return n;
}

}  // namespace detail

/// Parses `symbol [ '(' tree (',' tree)* ')' ]`, ignoring whitespace.
inline Tree parse_tree(std::string_view text, std::span<const std::string> alphabet) {
    detail::TermParser p(text, alphabet, false);
    return p.parse();
}

/// A tree with exactly one leaf labeled x.
class Context {
public:
    explicit Context(Tree skeleton) : skeleton_(std::move(skeleton)) {
        if (detail::count_label(skeleton_, kVariable) != 1)
            throw Error("context must contain exactly one occurrence of x");
        if (!variable_is_leaf(skeleton_)) throw Error("variable x must label a leaf");
    }

    /// The identity context x.
    static Context hole() { return Context(Tree(std::string(kVariable))); }

    const Tree& skeleton() const noexcept { return skeleton_; }

    friend bool operator==(const Context&, const Context&) = default;

private:
    static bool variable_is_leaf(const Tree& t) {
        if (t.label == kVariable) return t.children.empty();
        return std::all_of(t.children.begin(), t.children.end(), variable_is_leaf);
    }

    Tree skeleton_;
};

inline Context parse_context(std::string_view text, std::span<const std::string> alphabet) {
    detail::TermParser p(text, alphabet, true);
    Tree t = p.parse();
    if (p.variables() != 1) throw ParseError("context must contain exactly one x", 0);
    return Context(std::move(t));
}

inline std::string render_context(const Context& c) { return render_tree(c.skeleton()); }

namespace detail {

inline bool substitute_into(Tree& t, const Tree& replacement) {
    if (t.label == kVariable && t.children.empty()) {
        t = replacement;
        return true;
    }
    for (auto& c : t.children)
        if (substitute_into(c, replacement)) return true;
    return false;
}

}  // namespace detail

/// t(x <- replacement).
inline Tree substitute(const Context& c, const Tree& replacement) {
    Tree out = c.skeleton();
    detail::substitute_into(out, replacement);
    return out;
}

/// Wraps a context around another: outer(x <- inner).
inline Context compose(const Context& outer, const Context& inner) {
    return Context(substitute(outer, inner.skeleton()));
}

struct EnumerationBounds {
    std::size_t max_depth = 4;
    std::size_t max_width = 5;
    std::size_t max_count = 200000;
};

struct Enumeration {
    std::vector<Tree> trees;
    /// Set when a size class was dropped because it would exceed `max_count`.
    bool truncated = false;
};

namespace detail {

class TreeEnumerator {
public:
    TreeEnumerator(std::vector<std::string> alphabet, std::size_t max_width)
        : alphabet_(std::move(alphabet)), width_(max_width) {}

    static constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max() / 4;

    static std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) { return std::min(kSaturated, a + b); }
    static std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
        if (a == 0 || b == 0) return 0;
        if (a > kSaturated / b) return kSaturated;
        return a * b;
    }

    /// Number of trees with exactly `n` nodes and depth at most `d`.
    std::uint64_t count_trees(std::size_t n, std::size_t d) {
        if (n == 0 || d == 0) return 0;
        auto key = std::make_pair(n, d);
        if (auto it = tree_counts_.find(key); it != tree_counts_.end()) return it->second;
        std::uint64_t forests = 0;
        for (std::size_t len = 0; len <= width_; ++len) forests = sat_add(forests, count_forests(n - 1, d - 1, len));
        std::uint64_t r = sat_mul(alphabet_.size(), forests);
        tree_counts_[key] = r;
        return r;
    }

    const std::vector<Tree>& trees(std::size_t n, std::size_t d) {
        auto key = std::make_pair(n, d);
        if (auto it = tree_cache_.find(key); it != tree_cache_.end()) return it->second;
        std::vector<Tree> out;
        if (n >= 1 && d >= 1) {
            std::vector<std::vector<Tree>> forests;
            for (std::size_t len = 0; len <= width_; ++len) append_forests(n - 1, d - 1, len, forests);
            for (const auto& label : alphabet_)
                for (const auto& f : forests) out.emplace_back(label, f);
        }
        return tree_cache_.emplace(key, std::move(out)).first->second;
    }

private:
    std::uint64_t count_forests(std::size_t m, std::size_t d, std::size_t len) {
        if (len == 0) return m == 0 ? 1 : 0;
        if (m < len || d == 0) return 0;
        auto key = std::make_tuple(m, d, len);
        if (auto it = forest_counts_.find(key); it != forest_counts_.end()) return it->second;
        std::uint64_t r = 0;
        for (std::size_t s = 1; s + (len - 1) <= m; ++s)
            r = sat_add(r, sat_mul(count_trees(s, d), count_forests(m - s, d, len - 1)));
        forest_counts_[key] = r;
        return r;
    }

    void append_forests(std::size_t m, std::size_t d, std::size_t len, std::vector<std::vector<Tree>>& out) {
        if (len == 0) {
            if (m == 0) out.emplace_back();
            return;
        }
        if (m < len || d == 0) return;
        for (std::size_t s = 1; s + (len - 1) <= m; ++s) {
            const auto& heads = trees(s, d);
            if (heads.empty()) continue;
            std::vector<std::vector<Tree>> tails;
            append_forests(m - s, d, len - 1, tails);
            for (const auto& h : heads)
                for (const auto& tail : tails) {
                    std::vector<Tree> f;
                    f.reserve(len);
                    f.push_back(h);
                    f.insert(f.end(), tail.begin(), tail.end());
                    out.push_back(std::move(f));
                }
        }
    }

    std::vector<std::string> alphabet_;
    std::size_t width_;
    std::map<std::pair<std::size_t, std::size_t>, std::uint64_t> tree_counts_;
    std::map<std::tuple<std::size_t, std::size_t, std::size_t>, std::uint64_t> forest_counts_;
    std::map<std::pair<std::size_t, std::size_t>, std::vector<Tree>> tree_cache_;
};

}  // namespace detail

/// Every tree over `alphabet` within `bounds`, ordered by node count and then by
/// rendered string. Whole size classes are emitted; the first class that would
/// push the total past `max_count` is dropped and `truncated` is set.
inline Enumeration enumerate_trees(std::span<const std::string> alphabet, const EnumerationBounds& bounds) {
    if (bounds.max_depth == 0) throw Error("enumeration depth bound must be positive");
    if (bounds.max_count == 0) throw Error("enumeration count bound must be positive");
    std::vector<std::string> symbols(alphabet.begin(), alphabet.end());
    std::sort(symbols.begin(), symbols.end());
    symbols.erase(std::unique(symbols.begin(), symbols.end()), symbols.end());

    Enumeration result;
    if (symbols.empty()) return result;
    detail::TreeEnumerator gen(symbols, bounds.max_width);

    // Largest node count admitted by the depth and width bounds.
    std::uint64_t max_nodes = 0, level = 1;
    for (std::size_t d = 0; d < bounds.max_depth; ++d) {
        max_nodes = detail::TreeEnumerator::sat_add(max_nodes, level);
        level = detail::TreeEnumerator::sat_mul(level, bounds.max_width);
        if (level == 0) break;
    }

    for (std::uint64_t n = 1; n <= max_nodes; ++n) {
        const std::uint64_t count = gen.count_trees(n, bounds.max_depth);
        if (count == 0) continue;
        if (result.trees.size() + count > bounds.max_count) {
            result.truncated = true;
            break;
        }
        std::vector<std::pair<std::string, Tree>> cls;
        for (const auto& t : gen.trees(n, bounds.max_depth)) cls.emplace_back(render_tree(t), t);
        std::sort(cls.begin(), cls.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        for (auto& [_, t] : cls) result.trees.push_back(std::move(t));
    }
    return result;
}

/// A random tree within the depth and width bounds (`max_count` is ignored).
template <class Rng>
Tree random_tree(std::span<const std::string> alphabet, const EnumerationBounds& bounds, Rng& rng) {
    if (alphabet.empty()) throw Error("cannot draw a tree over an empty alphabet");
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    std::uniform_int_distribution<std::size_t> arity(0, bounds.max_width);
    auto build = [&](auto&& self, std::size_t remaining) -> Tree {
        Tree t(alphabet[pick(rng)]);
        if (remaining > 1) {
            const std::size_t k = arity(rng);
            for (std::size_t i = 0; i < k; ++i) t.children.push_back(self(self, remaining - 1));
        }
        return t;
    };
    return build(build, std::max<std::size_t>(bounds.max_depth, 1));
}

}  // namespace uta

#endif  // UTA_TREES_HPP
