#ifndef UTA_DOCUMENT_HPP
#define UTA_DOCUMENT_HPP

// JSON documents for tree automata and standalone string automata.
//
//   { "kind": "DTA-DFA", "alphabet": [...], "states": [...], "finals": [...],
//     "leaf_convention": { "b": "b" },
//     "horizontal": [ { "state": "q1", "symbol": "a", "acceptor": A } ] }
//
// For an SDTA each horizontal entry has no "state" and carries
// "outputs": [[acceptor-state, vertical-state], ...]. An acceptor is
//   { "states": N, "initial": [...], "finals": [...], "transitions": [[src, input, dst], ...] }
// with numbered states and inputs named by vertical state.

#include <cstddef>
#include <algorithm>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "uta/error.hpp"
#include "uta/string_automata.hpp"
#include "uta/tree_automaton.hpp"
#include "uta/trees.hpp"
#include "uta/witnesses.hpp"

namespace uta {

using Json = nlohmann::ordered_json;

/// Malformed or invalid document. `field` is a path such as "horizontal[2].acceptor.finals[0]".
class DocumentError : public Error {
public:
    DocumentError(const std::string& field, const std::string& what)
        : Error(field.empty() ? what : field + ": " + what), field_(field) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

namespace detail {

inline Json acceptor_json(const Nfa& n, const std::vector<std::string>& inputs) {
    Json j;
    j["states"] = n.size();
    j["initial"] = n.initial();
    Json finals = Json::array();
    for (std::size_t s = 0; s < n.size(); ++s)
        if (n.is_final(static_cast<State>(s))) finals.push_back(s);
    j["finals"] = std::move(finals);
    Json tr = Json::array();
    for (std::size_t s = 0; s < n.size(); ++s)
        for (const auto& [a, targets] : n.transitions(static_cast<State>(s)))
            for (State t : targets) tr.push_back(Json::array({s, inputs.at(a), t}));
    j["transitions"] = std::move(tr);
    return j;
}

class Reader {
public:
    const Json& field(const Json& obj, const std::string& path, const char* key) const {
        if (!obj.is_object()) fail(path, "expected an object");
        auto it = obj.find(key);
        if (it == obj.end()) fail(join(path, key), "missing field");
        return *it;
    }
    const Json& array(const Json& obj, const std::string& path, const char* key) const {
        const Json& v = field(obj, path, key);
        if (!v.is_array()) fail(join(path, key), "expected an array");
        return v;
    }
    std::string string(const Json& v, const std::string& path) const {
        if (!v.is_string()) fail(path, "expected a string");
        return v.get<std::string>();
    }
    std::size_t index(const Json& v, const std::string& path, std::size_t limit) const {
        if (!v.is_number_unsigned()) fail(path, "expected a non-negative integer");
        const auto x = v.get<std::size_t>();
        if (x >= limit) fail(path, "index " + std::to_string(x) + " out of range");
        return x;
    }
    std::vector<std::string> strings(const Json& obj, const std::string& path, const char* key) const {
        const Json& arr = array(obj, path, key);
        std::vector<std::string> out;
        for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(string(arr[i], item(join(path, key), i)));
        return out;
    }
    State lookup(const std::vector<std::string>& names, const std::string& name, const std::string& path,
                 const char* what) const {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return static_cast<State>(i);
        fail(path, std::string("unknown ") + what + " '" + name + "'");
    }

    Nfa acceptor(const Json& j, const std::string& path, const std::vector<std::string>& inputs) const {
        const Json& count = field(j, path, "states");
        if (!count.is_number_unsigned()) fail(join(path, "states"), "expected a state count");
        const std::size_t n = count.get<std::size_t>();
        Nfa out(inputs.size());
        for (std::size_t s = 0; s < n; ++s) out.add_state();
        const Json& init = array(j, path, "initial");
        for (std::size_t i = 0; i < init.size(); ++i)
            out.add_initial(static_cast<State>(index(init[i], item(join(path, "initial"), i), n)));
        const Json& finals = array(j, path, "finals");
        for (std::size_t i = 0; i < finals.size(); ++i)
            out.set_final(static_cast<State>(index(finals[i], item(join(path, "finals"), i), n)));
        const Json& tr = array(j, path, "transitions");
        for (std::size_t i = 0; i < tr.size(); ++i) {
            const std::string p = item(join(path, "transitions"), i);
            if (!tr[i].is_array() || tr[i].size() != 3) fail(p, "expected [src, input, dst]");
            const auto src = index(tr[i][0], item(p, 0), n);
            const auto a = lookup(inputs, string(tr[i][1], item(p, 1)), item(p, 1), "input");
            const auto dst = index(tr[i][2], item(p, 2), n);
            out.add_transition(static_cast<State>(src), a, static_cast<State>(dst));
        }
        return out;
    }

    [[noreturn]] void fail(const std::string& path, const std::string& what) const { throw DocumentError(path, what); }

    static std::string join(const std::string& path, const char* key) {
        return path.empty() ? std::string(key) : path + "." + key;
    }
    static std::string item(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }
};

inline Json parse_json(std::string_view text) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        // nlohmann's message already carries "line L, column C".
        throw DocumentError("", std::string("malformed JSON: ") + e.what());
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Tree automata

inline Json to_json(const TreeAutomaton& a) {
    Json j;
    j["kind"] = std::string(to_string(a.kind));
    j["alphabet"] = a.alphabet;
    j["states"] = a.states;
    Json finals = Json::array();
    for (State f : a.finals) finals.push_back(a.states.at(f));
    j["finals"] = std::move(finals);
    if (!a.leaf_states.empty()) {
        Json leaf = Json::object();
        for (const auto& [sigma, q] : a.leaf_states) leaf[a.alphabet.at(sigma)] = a.states.at(q);
        j["leaf_convention"] = std::move(leaf);
    }
    Json h = Json::array();
    if (a.kind == Kind::Sdta) {
        for (const auto& [sigma, m] : a.moore) {
            Json e;
            e["symbol"] = a.alphabet.at(sigma);
            e["acceptor"] = detail::acceptor_json(m.dfa.to_nfa(), a.states);
            Json out = Json::array();
            for (const auto& [s, o] : m.output) out.push_back(Json::array({s, a.states.at(o)}));
            e["outputs"] = std::move(out);
            h.push_back(std::move(e));
        }
    } else {
        for (const auto& [key, n] : a.horizontal) {
            Json e;
            e["state"] = a.states.at(key.state);
            e["symbol"] = a.alphabet.at(key.symbol);
            e["acceptor"] = detail::acceptor_json(n, a.states);
            h.push_back(std::move(e));
        }
    }
    j["horizontal"] = std::move(h);
    return j;
}

inline std::string render_automaton(const TreeAutomaton& a) { return to_json(a).dump(2) + "\n"; }

/// Parses and validates against the declared kind.
inline TreeAutomaton from_json(const Json& j) {
    detail::Reader r;
    TreeAutomaton a;
    const std::string kind = r.string(r.field(j, "", "kind"), "kind");
    try {
        a.kind = kind_from_string(kind);
    } catch (const Error&) {
        r.fail("kind", "unknown kind '" + kind + "'");
    }
    a.alphabet = r.strings(j, "", "alphabet");
    a.states = r.strings(j, "", "states");
    const auto finals = r.strings(j, "", "finals");
    for (std::size_t i = 0; i < finals.size(); ++i)
        a.finals.insert(r.lookup(a.states, finals[i], detail::Reader::item("finals", i), "state"));
    if (auto it = j.find("leaf_convention"); it != j.end()) {
        if (!it->is_object()) r.fail("leaf_convention", "expected an object");
        for (const auto& [sym, st] : it->items()) {
            const std::string p = "leaf_convention." + sym;
            const Symbol sigma = r.lookup(a.alphabet, sym, p, "symbol");
            a.leaf_states[sigma] = r.lookup(a.states, r.string(st, p), p, "state");
        }
    }
    const Json& h = r.array(j, "", "horizontal");
    for (std::size_t i = 0; i < h.size(); ++i) {
        const std::string p = detail::Reader::item("horizontal", i);
        const Symbol sigma = r.lookup(a.alphabet, r.string(r.field(h[i], p, "symbol"), p + ".symbol"), p + ".symbol", "symbol");
        Nfa n = r.acceptor(r.field(h[i], p, "acceptor"), p + ".acceptor", a.states);
        if (a.kind == Kind::Sdta) {
            if (h[i].contains("state")) r.fail(p + ".state", "SDTA horizontal entries are per symbol");
            if (n.initial().size() > 1 || !n.is_deterministic()) r.fail(p + ".acceptor", "SDTA horizontal machine must be a DFA");
            if (n.size() && n.initial().empty()) r.fail(p + ".acceptor.initial", "missing initial state");
            // as_dfa renumbers the initial state to 0; track where the others go.
            const State init = n.size() ? n.initial().front() : 0;
            auto renum = [&](std::size_t s) -> State {
                return static_cast<State>(s == init ? 0 : (s == 0 ? init : s));
            };
            MooreDfa m{as_dfa(n), {}};
            const Json& outs = r.array(h[i], p, "outputs");
            for (std::size_t k = 0; k < outs.size(); ++k) {
                const std::string op = detail::Reader::item(p + ".outputs", k);
                if (!outs[k].is_array() || outs[k].size() != 2) r.fail(op, "expected [acceptor-state, vertical-state]");
                const auto s = r.index(outs[k][0], op + "[0]", n.size());
                const auto q = r.lookup(a.states, r.string(outs[k][1], op + "[1]"), op + "[1]", "state");
                if (!m.output.emplace(renum(s), q).second) r.fail(op, "duplicate output");
            }
            if (!a.moore.emplace(sigma, std::move(m)).second) r.fail(p + ".symbol", "duplicate symbol");
        } else {
            const std::string sp = p + ".state";
            const State q = r.lookup(a.states, r.string(r.field(h[i], p, "state"), sp), sp, "state");
            if (!a.horizontal.emplace(HorizontalKey{q, sigma}, std::move(n)).second)
                r.fail(p, "duplicate (state, symbol) entry");
        }
    }
    try {
        validate(a);
    } catch (const InvalidAutomaton& e) {
        r.fail("kind", std::string("document violates ") + kind + " invariants: " + e.what());
    }
    return a;
}

inline TreeAutomaton parse_automaton(std::string_view text) { return from_json(detail::parse_json(text)); }

// ---------------------------------------------------------------------------
// Standalone string automata: { "kind": "NFA" | "DFA" | "Moore", "alphabet": [...], <acceptor fields> }
// A Moore document adds "outputs": [[state, value], ...] with integer values.

inline Json to_json(const Nfa& n, const std::vector<std::string>& alphabet, bool as_dfa_kind = false) {
    Json j;
    j["kind"] = as_dfa_kind ? "DFA" : "NFA";
    j["alphabet"] = alphabet;
    const Json acceptor = detail::acceptor_json(n, alphabet);
    for (const auto& [k, v] : acceptor.items()) j[k] = v;
    return j;
}

inline Json to_json(const Dfa& d, const std::vector<std::string>& alphabet) { return to_json(d.to_nfa(), alphabet, true); }

inline Json to_json(const MooreDfa& m, const std::vector<std::string>& alphabet) {
    Json j = to_json(m.dfa, alphabet);
    j["kind"] = "Moore";
    Json out = Json::array();
    for (const auto& [s, o] : m.output) out.push_back(Json::array({s, o}));
    j["outputs"] = std::move(out);
    return j;
}

struct StringAutomatonDocument {
    std::vector<std::string> alphabet;
    Nfa nfa;
    bool deterministic = false;
    std::optional<std::map<State, Output>> outputs;

    Dfa dfa() const { return as_dfa(nfa); }
};

inline StringAutomatonDocument parse_string_automaton(std::string_view text) {
    const Json j = detail::parse_json(text);
    detail::Reader r;
    const std::string kind = r.string(r.field(j, "", "kind"), "kind");
    if (kind != "NFA" && kind != "DFA" && kind != "Moore") r.fail("kind", "expected NFA, DFA or Moore, got '" + kind + "'");
    StringAutomatonDocument doc;
    doc.alphabet = r.strings(j, "", "alphabet");
    doc.nfa = r.acceptor(j, "", doc.alphabet);
    doc.deterministic = kind != "NFA";
    if (doc.deterministic && !doc.nfa.is_deterministic()) r.fail("transitions", "deterministic document has a choice");
    if (kind == "Moore") {
        if (!doc.nfa.initial().empty() && doc.nfa.initial().front() != 0) r.fail("initial", "Moore initial state must be 0");
        doc.outputs.emplace();
        const Json& outs = r.array(j, "", "outputs");
        for (std::size_t k = 0; k < outs.size(); ++k) {
            const std::string op = detail::Reader::item("outputs", k);
            if (!outs[k].is_array() || outs[k].size() != 2 || !outs[k][1].is_number_unsigned())
                r.fail(op, "expected [state, value]");
            const auto s = r.index(outs[k][0], op + "[0]", doc.nfa.size());
            (*doc.outputs)[static_cast<State>(s)] = outs[k][1].get<Output>();
        }
    }
    return doc;
}

// ---------------------------------------------------------------------------
// Fooling sets
//
//   vertical:   { "trees": ["a(b)", ...], "separators": [[i, j, "a(x)"], ...] }
//   horizontal: { "symbol": "a", "tuples": [["b", "b"], [], ...],
//                 "separators": [[i, j, "a(x)", ["b", "1"]], ...] }
// Separators are optional; missing pairs are searched for.

inline Json to_json(const FoolingSetVertical& fs) {
    Json j;
    Json trees = Json::array();
    for (const auto& t : fs.trees) trees.push_back(render_tree(t));
    j["trees"] = std::move(trees);
    Json seps = Json::array();
    for (const auto& [p, c] : fs.separators) seps.push_back(Json::array({p.first, p.second, render_context(c)}));
    j["separators"] = std::move(seps);
    return j;
}

inline Json to_json(const FoolingSetHorizontal& fs) {
    Json j;
    j["symbol"] = fs.symbol;
    Json tuples = Json::array();
    for (const auto& tuple : fs.tuples) {
        Json row = Json::array();
        for (const auto& t : tuple) row.push_back(render_tree(t));
        tuples.push_back(std::move(row));
    }
    j["tuples"] = std::move(tuples);
    Json seps = Json::array();
    for (const auto& [p, s] : fs.separators) {
        Json pad = Json::array();
        for (const auto& t : s.padding) pad.push_back(render_tree(t));
        seps.push_back(Json::array({p.first, p.second, render_context(s.context), std::move(pad)}));
    }
    j["separators"] = std::move(seps);
    return j;
}

namespace detail {

template <class F>
auto with_path(const std::string& path, F&& f) {
    try {
        return f();
    } catch (const DocumentError&) {
        throw;
    } catch (const Error& e) {
        throw DocumentError(path, e.what());
    }
}

inline IndexPair separator_pair(const Reader& r, const Json& sep, const std::string& p, std::size_t n, std::size_t arity) {
    if (!sep.is_array() || sep.size() != arity) r.fail(p, "expected a separator entry of length " + std::to_string(arity));
    const auto i = r.index(sep[0], p + "[0]", n);
    const auto k = r.index(sep[1], p + "[1]", n);
    if (i >= k) r.fail(p, "separator indices must satisfy i < j");
    return {i, k};
}

}  // namespace detail

inline FoolingSetVertical vertical_fooling_set_from_json(const Json& j, std::span<const std::string> alphabet) {
    detail::Reader r;
    FoolingSetVertical fs;
    const auto trees = r.strings(j, "", "trees");
    for (std::size_t i = 0; i < trees.size(); ++i)
        fs.trees.push_back(detail::with_path(detail::Reader::item("trees", i), [&] { return parse_tree(trees[i], alphabet); }));
    if (j.contains("separators")) {
        const Json& seps = r.array(j, "", "separators");
        for (std::size_t k = 0; k < seps.size(); ++k) {
            const std::string p = detail::Reader::item("separators", k);
            const auto pair = detail::separator_pair(r, seps[k], p, fs.trees.size(), 3);
            const std::string text = r.string(seps[k][2], p + "[2]");
            fs.separators.insert_or_assign(pair, detail::with_path(p + "[2]", [&] { return parse_context(text, alphabet); }));
        }
    }
    return fs;
}

inline FoolingSetHorizontal horizontal_fooling_set_from_json(const Json& j, std::span<const std::string> alphabet) {
    detail::Reader r;
    FoolingSetHorizontal fs;
    fs.symbol = r.string(r.field(j, "", "symbol"), "symbol");
    if (std::find(alphabet.begin(), alphabet.end(), fs.symbol) == alphabet.end()) r.fail("symbol", "unknown symbol '" + fs.symbol + "'");
    auto forest = [&](const Json& arr, const std::string& p) {
        if (!arr.is_array()) r.fail(p, "expected an array of trees");
        std::vector<Tree> out;
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string ip = detail::Reader::item(p, i);
            const std::string text = r.string(arr[i], ip);
            out.push_back(detail::with_path(ip, [&] { return parse_tree(text, alphabet); }));
        }
        return out;
    };
    const Json& tuples = r.array(j, "", "tuples");
    for (std::size_t i = 0; i < tuples.size(); ++i) fs.tuples.push_back(forest(tuples[i], detail::Reader::item("tuples", i)));
    if (j.contains("separators")) {
        const Json& seps = r.array(j, "", "separators");
        for (std::size_t k = 0; k < seps.size(); ++k) {
            const std::string p = detail::Reader::item("separators", k);
            const auto pair = detail::separator_pair(r, seps[k], p, fs.tuples.size(), 4);
            const std::string text = r.string(seps[k][2], p + "[2]");
            FoolingSetHorizontal::Separator sep{
                detail::with_path(p + "[2]", [&] { return parse_context(text, alphabet); }), forest(seps[k][3], p + "[3]")};
            fs.separators.insert_or_assign(pair, std::move(sep));
        }
    }
    return fs;
}

}  // namespace uta

#endif  // UTA_DOCUMENT_HPP
