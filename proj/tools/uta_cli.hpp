#ifndef UTA_TOOLS_CLI_HPP
#define UTA_TOOLS_CLI_HPP

// The `uta` command line. cli_main is separate from main() so tests can run
// commands in-process and inspect both streams and the exit status.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "uta/uta.hpp"

namespace uta::cli {

enum Status : int { kOk = 0, kViolation = 1, kUsage = 2 };

namespace detail {

inline std::string read_file(const std::string& path) {
    if (path == "-") return {std::istreambuf_iterator<char>(std::cin), {}};
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read '" + path + "'");
    return {std::istreambuf_iterator<char>(in), {}};
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) throw Error("cannot write '" + path + "'");
}

inline TreeAutomaton load(const std::string& path) {
    try {
        return parse_automaton(read_file(path));
    } catch (const DocumentError& e) {
        throw DocumentError(e.field(), path + ": " + e.what());
    }
}

/// `dest` empty means the primary stream.
inline void emit(std::ostream& primary, const std::string& dest, const std::string& text) {
    if (dest.empty())
        primary << text;
    else
        write_file(dest, text);
}

inline std::vector<std::size_t> parse_list(const std::string& text) {
    std::vector<std::size_t> out;
    std::stringstream in(text);
    for (std::string item; std::getline(in, item, ',');) {
        std::size_t pos = 0;
        unsigned long v = 0;
        try {
            v = std::stoul(item, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos == 0 || pos != item.size()) throw CLI::ValidationError("--k", "expected a comma-separated list of integers");
        out.push_back(v);
    }
    return out;
}

inline std::string render_states(const TreeAutomaton& a, const StateSet& s) {
    std::string out = "{";
    for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + a.states.at(s[i]);
    return out + "}";
}

/// "lemma34:2,3" or "thm41:2", otherwise a document whose language is used.
inline LangPredicate predicate_source(const std::string& source) {
    if (source.rfind("lemma34:", 0) == 0) return lemma34_predicate(parse_list(source.substr(8)));
    if (source.rfind("thm41:", 0) == 0) {
        const auto n = parse_list(source.substr(6));
        if (n.size() != 1) throw CLI::ValidationError("SOURCE", "thm41 takes a single n");
        return thm41_predicate(n[0]);
    }
    auto a = std::make_shared<TreeAutomaton>(load(source));
    return {a->alphabet, [a](const Tree& t) { return accepts(*a, t); }, "language of " + source};
}

inline Json fooling_section(const Json& doc, const char* key) {
    if (doc.is_object() && doc.contains(key)) return doc.at(key);
    return doc;
}

}  // namespace detail

inline int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Unranked tree automata: runs, conversions, witnesses and bounds", "uta"};
    app.require_subcommand(1);

    std::string file, file2, tree_text, target, output, manifest, fooling, family, k_text, source, kind_arg;
    bool force_general = false;
    std::size_t depth = 0, width = 0, count = 0, n = 2, m = 3;

    auto* run = app.add_subcommand("run", "Run an automaton on a tree");
    run->add_option("FILE", file, "Automaton document")->required();
    run->add_option("--tree", tree_text, "Tree in term syntax, e.g. a(b,b)")->required();

    auto* convert = app.add_subcommand("convert", "Convert between automaton kinds");
    convert->add_option("FILE", file)->required();
    convert->add_option("--to", target)->required()->check(CLI::IsMember({"sdta", "dtadfa"}));
    convert->add_flag("--force-general", force_general, "Skip the deterministic-input refinement");
    convert->add_option("-o,--output", output, "Write the document here (report goes to stdout)");

    auto* size_cmd = app.add_subcommand("size", "Print the size pair [vertical; horizontal]");
    size_cmd->add_option("FILE", file)->required();

    auto* equiv = app.add_subcommand("equiv", "Compare the languages of two automata");
    equiv->add_option("FILE1", file)->required();
    equiv->add_option("FILE2", file2)->required();
    equiv->add_option("--depth", depth, "Enumeration depth bound");
    equiv->add_option("--width", width, "Enumeration arity bound");
    equiv->add_option("--count", count, "Enumeration tree cap");

    auto* check_det = app.add_subcommand("check-det", "Check semantic determinism");
    check_det->add_option("FILE", file)->required();

    auto* prune = app.add_subcommand("prune", "Remove unreachable and useless states");
    prune->add_option("FILE", file)->required();
    prune->add_option("-o,--output", output);

    auto* witness = app.add_subcommand("witness", "Generate a lower-bound witness family");
    witness->add_option("FAMILY", family)->required()->check(CLI::IsMember({"lemma34", "thm41", "marked-union"}));
    witness->add_option("--k", k_text, "Moduli for lemma34, e.g. 2,3");
    witness->add_option("--n", n, "Parameter for thm41");
    witness->add_option("--m", m, "Number of residue classes for marked-union");
    witness->add_option("-o,--output", output);
    witness->add_option("--manifest", manifest, "Write the manifest here instead of stderr");
    witness->add_option("--fooling-set", fooling, "lemma34: also write its fooling sets here");

    auto* certify = app.add_subcommand("certify", "Certify a state lower bound from a fooling set");
    certify->add_option("KIND", kind_arg)->required()->check(CLI::IsMember({"vertical", "horizontal"}));
    certify->add_option("SOURCE", source, "Automaton document, or lemma34:K1,K2,... / thm41:N")->required();
    certify->add_option("--fooling-set", fooling)->required();

    auto* canon = app.add_subcommand("canon", "Canonical form of an SDTA");
    canon->add_option("FILE", file)->required();
    canon->add_option("-o,--output", output);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*run) {
            const auto a = detail::load(file);
            const Tree t = parse_tree(tree_text, a.alphabet);
            const StateSet root = evaluate(a, t);
            out << (accepts(a, t) ? "accept" : "reject") << "\n";
            out << "root states: " << detail::render_states(a, root) << "\n";
            return kOk;
        }
        if (*convert) {
            const auto a = detail::load(file);
            Conversion c;
            if (target == "sdta") {
                if (a.kind == Kind::Sdta) throw KindMismatch("input is already an SDTA");
                c = a.kind == Kind::DtaDfa ? dtadfa_to_sdta(a) : nta_to_sdta(a, {force_general});
            } else {
                if (a.kind == Kind::DtaDfa) throw KindMismatch("input is already a DTA-DFA");
                c = a.kind == Kind::Sdta ? sdta_to_dtadfa(a) : nta_to_dtadfa(a, {force_general});
            }
            const std::string doc = render_automaton(c.automaton);
            const std::string report = render_report(c.report);
            if (output.empty()) {
                out << doc;
                err << report;
            } else {
                detail::write_file(output, doc);
                out << report;
            }
            return c.report.bound_satisfied ? kOk : kViolation;
        }
        if (*size_cmd) {
            out << size(detail::load(file)).str() << "\n";
            return kOk;
        }
        if (*equiv) {
            const auto a = detail::load(file);
            const auto b = detail::load(file2);
            EnumerationBounds bounds = default_bounds();
            if (depth) bounds.max_depth = depth;
            if (width) bounds.max_width = width;
            if (count) bounds.max_count = count;
            const auto v = a.kind == Kind::Sdta && b.kind == Kind::Sdta ? equiv_canonical(a, b, bounds)
                                                                        : equiv_bounded(a, b, bounds);
            out << (v.equal ? "equal" : "not equal") << " (" << to_string(v.method);
            if (v.method == EquivalenceMethod::BoundedEnumeration)
                out << ", " << v.trees_checked << " trees" << (v.truncated ? ", truncated" : "");
            out << ")\n";
            if (v.counterexample)
                out << "counterexample: " << render_tree(*v.counterexample) << " (accepted by "
                    << (accepts(a, *v.counterexample) ? file : file2) << " only)\n";
            return v.equal ? kOk : kViolation;
        }
        if (*check_det) {
            const auto a = detail::load(file);
            const auto r = check_semantic_determinism(a);
            if (r.deterministic) {
                out << "deterministic\n";
                return kOk;
            }
            out << "not deterministic: " << describe(a, *r.witness) << "\n";
            return kViolation;
        }
        if (*prune) {
            detail::emit(out, output, render_automaton(prune_reachable(detail::load(file))));
            return kOk;
        }
        if (*witness) {
            Json man;
            man["family"] = family;
            std::string doc;
            if (family == "marked-union") {
                const auto parts = residue_parts(m);
                const MooreDfa mu = minimize_moore(marked_union(parts));
                doc = to_json(mu, {"a"}).dump(2) + "\n";
                man["parameters"] = {{"m", m}};
                man["moore_states"] = mu.dfa.size();
                man["union_dfa_states"] = minimize_dfa(underlying_dfa(mu)).size();
            } else {
                Witness w;
                if (family == "lemma34") {
                    const auto k = k_text.empty() ? std::vector<std::size_t>{2, 3} : detail::parse_list(k_text);
                    w = gen_lemma34(k);
                    man["parameters"] = {{"k", k}};
                    std::size_t sum = 0, product = 1;
                    for (std::size_t i = 0; i < k.size(); ++i) sum += k[i] + floor_log2(i + 1) + 3, product *= k[i];
                    man["expected_size"] = "[" + std::to_string(k.size()) + "; " + std::to_string(sum) + "]";
                    man["horizontal_lower_bound"] = product;
                    if (!fooling.empty()) {
                        Json fs;
                        fs["vertical"] = to_json(lemma34_vertical_fooling_set(k));
                        fs["horizontal"] = to_json(lemma34_horizontal_fooling_set(k));
                        detail::write_file(fooling, fs.dump(2) + "\n");
                    }
                } else {
                    w = gen_thm41(n);
                    man["parameters"] = {{"n", n}};
                    const auto primes = first_primes(n);
                    std::size_t sum = 0, product = 1;
                    for (auto p : primes) sum += p, product *= p;
                    man["expected_size"] = "[" + std::to_string(n) + "; " + std::to_string(sum + 2 * n) + "]";
                    man["dta_vertical_lower_bound"] = (std::size_t{1} << n) - 1;
                    man["dta_horizontal_lower_bound"] = ((std::size_t{1} << n) - 1) * product;
                }
                doc = render_automaton(w.automaton);
                man["kind"] = std::string(to_string(w.automaton.kind));
                man["size"] = size(w.automaton).str();
                man["language"] = w.predicate.description;
            }
            detail::emit(out, output, doc);
            detail::emit(err, manifest, man.dump(2) + "\n");
            return kOk;
        }
        if (*certify) {
            const LangPredicate pred = detail::predicate_source(source);
            const Json fs_doc = uta::detail::parse_json(detail::read_file(fooling));
            std::size_t bound = 0;
            if (kind_arg == "vertical") {
                bound = certify_vertical_bound(pred, vertical_fooling_set_from_json(detail::fooling_section(fs_doc, "vertical"), pred.alphabet));
                out << "certified lower bound: " << bound << " vertical states (any SDTA or DTA(NFA))\n";
            } else {
                const auto fs = horizontal_fooling_set_from_json(detail::fooling_section(fs_doc, "horizontal"), pred.alphabet);
                bound = certify_horizontal_bound(pred, fs);
                out << "certified lower bound: " << bound << " states of H_" << fs.symbol << " (any SDTA)\n";
            }
            return kOk;
        }
        if (*canon) {
            const auto a = detail::load(file);
            if (a.kind != Kind::Sdta) throw KindMismatch("canon takes an SDTA, got " + std::string(to_string(a.kind)));
            detail::emit(out, output, render_automaton(canonical_sdta(a)));
            return kOk;
        }
    } catch (const DeterminismViolation& e) {
        err << "error: " << e.what() << "\n";
        return kViolation;
    } catch (const SeparationFailure& e) {
        err << "error: " << e.what() << "\n";
        return kViolation;
    } catch (const DisjointnessViolation& e) {
        err << "error: " << e.what() << "\n";
        return kViolation;
    } catch (const CLI::ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}

}  // namespace uta::cli

#endif  // UTA_TOOLS_CLI_HPP
