// Command line surface over the ik4 library: formula parsing, model
// checking, validity, bounded countermodel search, saturation and proof
// checking, with line-oriented human output or a single JSON record.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "ik4/clip.hpp"
#include "ik4/enumeration.hpp"
#include "ik4/hilbert.hpp"

using json = nlohmann::ordered_json;
using namespace ik4;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitFile = 3;
constexpr int kExitInvariant = 4;

struct Output {
    bool as_json = false;
    json record;
    std::ostringstream human;

    void flush() {
        if (as_json)
            std::cout << record.dump(2) << "\n";
        else
            std::cout << human.str();
    }
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in.good()) throw FileFormatError("cannot open '" + path + "'", 0);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

Variant variant_arg(const std::string& name) {
    auto v = variant_from_name(name);
    if (!v) throw std::invalid_argument("unknown variant '" + name + "'");
    return *v;
}

FrameFilter filter_arg(const std::string& list) {
    FrameFilter f;
    std::istringstream in(list);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty()) continue;
        if (item == "transitive")
            f.transitive = true;
        else if (item == "upward")
            f.upward = true;
        else if (item == "downward")
            f.downward = true;
        else if (item == "forward")
            f.forward = true;
        else
            throw std::invalid_argument("unknown condition '" + item + "'");
    }
    return f;
}

std::string ast_text(Formula f) {
    switch (f.kind()) {
        case Kind::Atom: return f.atom_name();
        case Kind::Top: return "T";
        case Kind::Bot: return "F";
        case Kind::Implies: return "(-> " + ast_text(f.lhs()) + " " + ast_text(f.rhs()) + ")";
        case Kind::And: return "(& " + ast_text(f.lhs()) + " " + ast_text(f.rhs()) + ")";
        case Kind::Or: return "(| " + ast_text(f.lhs()) + " " + ast_text(f.rhs()) + ")";
        case Kind::Box: return "([] " + ast_text(f.body()) + ")";
        case Kind::Dia: return "(<> " + ast_text(f.body()) + ")";
    }
    return "?";
}

json condition_json(const Frame& frame, FrameCondition c) {
    ConditionCheck check = check_frame_condition(frame, c);
    json j;
    j["condition"] = frame_condition_name(c);
    j["holds"] = check.holds;
    if (!check.holds) j["witness"] = {check.witness[0], check.witness[1], check.witness[2]};
    return j;
}

void report_conditions(Output& out, const Frame& frame, json& into) {
    json conditions = json::array();
    for (FrameCondition c : {FrameCondition::Transitive, FrameCondition::Upward,
                             FrameCondition::Downward, FrameCondition::Forward}) {
        json j = condition_json(frame, c);
        out.human << "  " << j["condition"].get<std::string>() << ": "
                  << (j["holds"].get<bool>() ? "holds" : "fails");
        if (!j["holds"].get<bool>()) {
            const auto& w = j["witness"];
            out.human << " (witness " << w[0] << "," << w[1] << "," << w[2] << ")";
        }
        out.human << "\n";
        conditions.push_back(std::move(j));
    }
    into["conditions"] = std::move(conditions);
}

json saturation_json(Output& out, const SaturationResult& r, const SaturatedModel& sm,
                     const WorldOracle& oracle, bool emit_model, bool show_trace) {
    json j;
    j["tips"] = r.clip.size();
    j["alpha_f"] = r.alpha_f;
    j["beta_f"] = r.beta_f;
    j["repairs"] = r.stats.repairs;
    json ranks = json::array();
    for (std::size_t rank = 0; rank <= r.clip.max_rank(); ++rank) {
        std::size_t count = 0;
        for (const Tip& t : r.clip.tips())
            if (t.rank == rank) ++count;
        ranks.push_back(count);
    }
    j["tips_per_rank"] = ranks;

    out.human << "SATURATED tips=" << r.clip.size() << " alpha_f=" << r.alpha_f
              << " beta_f=" << r.beta_f << " repairs=" << r.stats.repairs << "\n";
    for (std::size_t rank = 0; rank < ranks.size(); ++rank)
        out.human << "  rank " << rank << ": " << ranks[rank].get<std::size_t>() << " tip(s)\n";

    if (show_trace) {
        json trace = json::array();
        for (const RepairEvent& e : r.stats.trace) {
            trace.push_back({{"procedure", procedure_name(e.procedure)},
                             {"defect", e.defect.describe()},
                             {"new_tip", e.new_tip}});
            out.human << "  repair [" << procedure_name(e.procedure) << "] "
                      << e.defect.describe() << " -> tip " << e.new_tip << "\n";
        }
        j["trace"] = std::move(trace);
    }

    auto violations = check_truth_lemma(r, sm, oracle);
    j["truth_lemma_violations"] = violations.size();
    out.human << "truth-lemma: "
              << (violations.empty() ? std::string("OK")
                                     : "VIOLATIONS " + std::to_string(violations.size()))
              << "\n";

    if (emit_model) {
        std::string body = format_model(sm.model);
        j["saturated_model"] = body;
        out.human << "saturated model:\n" << body;
    }
    return j;
}

int run(int argc, char** argv) {
    CLI::App app{"decision machinery for the intuitionistic modal logic IK4"};
    app.require_subcommand(1);
    Output out;
    app.add_flag("--json", out.as_json, "emit one machine-parseable JSON record");

    auto* parse_cmd = app.add_subcommand("parse", "parse a formula and print its canonical form");
    std::string parse_formula_text;
    bool parse_ast = false, parse_closure = false;
    parse_cmd->add_option("formula", parse_formula_text, "formula text")->required();
    parse_cmd->add_flag("--ast", parse_ast, "also print the syntax tree");
    parse_cmd->add_flag("--closure", parse_closure, "also print the subformula closure");

    auto* check_cmd =
        app.add_subcommand("check-model", "load a model file and check the frame conditions");
    std::string check_file;
    check_cmd->add_option("file", check_file, "model file")->required();

    auto* eval_cmd = app.add_subcommand("eval", "evaluate a formula in a model");
    std::string eval_file, eval_formula_text, eval_variant = "BD";
    long eval_world = -1;
    eval_cmd->add_option("file", eval_file, "model file")->required();
    eval_cmd->add_option("formula", eval_formula_text, "formula text")->required();
    eval_cmd->add_option("--variant", eval_variant, "BD, FS, P or W");
    eval_cmd->add_option("--world", eval_world, "evaluate at one world only");

    auto* valid_cmd = app.add_subcommand("valid", "check validity in a model file's frame");
    std::string valid_file, valid_formula_text, valid_variant = "BD";
    valid_cmd->add_option("file", valid_file, "model file")->required();
    valid_cmd->add_option("formula", valid_formula_text, "formula text")->required();
    valid_cmd->add_option("--variant", valid_variant, "BD, FS, P or W");

    auto* decide_cmd = app.add_subcommand("decide", "bounded countermodel search");
    std::string decide_formula_text, decide_conditions = "transitive,downward,forward";
    std::string decide_variant = "BD";
    std::size_t decide_bound = 0;
    unsigned decide_threads = 0;
    bool decide_saturate = false;
    decide_cmd->add_option("formula", decide_formula_text, "formula text")->required();
    decide_cmd->add_option("--bound", decide_bound, "maximum frame size")->required();
    decide_cmd->add_option("--conditions", decide_conditions, "comma list of frame conditions");
    decide_cmd->add_option("--variant", decide_variant, "BD, FS, P or W");
    decide_cmd->add_option("--threads", decide_threads, "worker threads (0 = auto)");
    decide_cmd->add_flag("--saturate", decide_saturate,
                         "on a hit, saturate the countermodel and check the truth lemma");

    auto* sat_cmd = app.add_subcommand("saturate", "run the saturation procedure over a model");
    std::string sat_file, sat_formula_text;
    std::size_t sat_world = 0, sat_budget = 100000;
    bool sat_trace = false, sat_emit = false;
    sat_cmd->add_option("--model", sat_file, "model file (transitive + confluent)")->required();
    sat_cmd->add_option("--formula", sat_formula_text, "seed formula")->required();
    sat_cmd->add_option("--world", sat_world, "start world")->required();
    sat_cmd->add_option("--budget", sat_budget, "repair budget");
    sat_cmd->add_flag("--trace", sat_trace, "print each repair");
    sat_cmd->add_flag("--emit-model", sat_emit, "print the saturated model");

    auto* trees_cmd = app.add_subcommand("trees", "labelled tree operations");
    trees_cmd->require_subcommand(1);
    std::size_t tree_width = 1;
    std::string tree_a, tree_b;
    auto add_tree_common = [&](CLI::App* sub, bool two) {
        sub->add_option("--width", tree_width, "label bitmask width");
        sub->add_option("tree", tree_a, "tree expression")->required();
        if (two) sub->add_option("other", tree_b, "second tree expression")->required();
    };
    add_tree_common(trees_cmd->add_subcommand("strictify", "contract duplicate edges"), false);
    add_tree_common(trees_cmd->add_subcommand("nicify", "prune isomorphic siblings"), false);
    add_tree_common(trees_cmd->add_subcommand("canon", "print the canonical code"), false);
    add_tree_common(trees_cmd->add_subcommand("embed", "find an embedding"), true);
    add_tree_common(trees_cmd->add_subcommand("equiv", "mutual embeddability"), true);
    auto* trees_enum = trees_cmd->add_subcommand("enumerate", "nice trees up to a height");
    std::size_t enum_height = 1, enum_limit = 1000;
    trees_enum->add_option("--width", tree_width, "label bitmask width");
    trees_enum->add_option("--max-height", enum_height, "height bound");
    trees_enum->add_option("--limit", enum_limit, "stop after this many trees");
    auto* trees_bound = trees_cmd->add_subcommand("bound", "the tree-count recurrence");
    std::size_t bound_height = 0;
    std::uint64_t bound_card = 1;
    trees_bound->add_option("--height", bound_height, "height")->required();
    trees_bound->add_option("--card-p", bound_card, "label universe cardinality")->required();

    auto* proof_cmd = app.add_subcommand("check-proof", "check a derivation file");
    std::string proof_file;
    proof_cmd->add_option("file", proof_file, "proof file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {  // --help
            app.exit(e);
            return kExitOk;
        }
        std::cerr << e.what() << "\n";
        return kExitUsage;
    }

    if (parse_cmd->parsed()) {
        Formula f = parse_formula(parse_formula_text);
        out.record["command"] = "parse";
        out.record["canonical"] = render(f);
        out.record["length"] = symbol_length(f);
        out.human << render(f) << "\n";
        if (parse_ast) {
            out.record["ast"] = ast_text(f);
            out.human << "ast: " << ast_text(f) << "\n";
        }
        if (parse_closure) {
            ClosureSet sigma = closure(f);
            json members = json::array();
            out.human << "closure (" << sigma.size() << " member(s), length " << symbol_length(f)
                      << "):\n";
            for (std::size_t i = 0; i < sigma.size(); ++i) {
                members.push_back(render(sigma.member(i)));
                out.human << "  " << i << ": " << render(sigma.member(i)) << "\n";
            }
            out.record["closure"] = std::move(members);
        }
    } else if (check_cmd->parsed()) {
        Model m = parse_model(read_file(check_file));
        out.record["command"] = "check-model";
        out.record["worlds"] = m.size();
        out.human << "worlds: " << m.size() << "\n";
        report_conditions(out, m.frame(), out.record);
    } else if (eval_cmd->parsed()) {
        Model m = parse_model(read_file(eval_file));
        Formula f = parse_formula(eval_formula_text);
        Variant v = variant_arg(eval_variant);
        out.record["command"] = "eval";
        out.record["variant"] = variant_name(v);
        out.record["formula"] = render(f);
        if (eval_world >= 0) {
            bool holds = forces(m, static_cast<std::size_t>(eval_world), f, v);
            out.record["world"] = eval_world;
            out.record["forces"] = holds;
            out.human << "world " << eval_world << ": " << (holds ? "forces" : "refutes") << " "
                      << render(f) << "\n";
        } else {
            json worlds = json::array();
            for (std::size_t w = 0; w < m.size(); ++w) {
                bool holds = forces(m, w, f, v);
                worlds.push_back(holds);
                out.human << "world " << w << ": " << (holds ? "forces" : "refutes") << "\n";
            }
            out.record["worlds"] = std::move(worlds);
            bool all = true_in_model(m, f, v);
            out.record["true_in_model"] = all;
            out.human << (all ? "TRUE" : "NOT-TRUE") << " in model\n";
        }
    } else if (valid_cmd->parsed()) {
        Model m = parse_model(read_file(valid_file));
        Formula f = parse_formula(valid_formula_text);
        Variant v = variant_arg(valid_variant);
        ValidityCheck check = valid_in_frame(m.frame(), f, v);
        out.record["command"] = "valid";
        out.record["variant"] = variant_name(v);
        out.record["formula"] = render(f);
        out.record["valid"] = check.valid;
        if (check.valid) {
            out.human << "VALID in frame\n";
        } else {
            out.record["world"] = check.world;
            Model falsifying(m.frame(), *check.valuation);
            out.record["falsifying_model"] = format_model(falsifying);
            out.human << "INVALID at world " << check.world << " under:\n"
                      << format_model(falsifying);
        }
    } else if (decide_cmd->parsed()) {
        Formula f = parse_formula(decide_formula_text);
        FrameFilter filter = filter_arg(decide_conditions);
        Variant v = variant_arg(decide_variant);
        SearchOutcome outcome = countermodel_search(f, decide_bound, filter, decide_threads, v);
        out.record["command"] = "decide";
        out.record["formula"] = render(f);
        out.record["bound"] = decide_bound;
        out.record["conditions"] = filter.to_string();
        out.record["variant"] = variant_name(v);
        out.record["countermodel"] = outcome.found();
        if (outcome.found()) {
            out.human << "COUNTERMODEL size=" << outcome.model->size()
                      << " world=" << outcome.world << "\n";
            out.record["world"] = outcome.world;
            out.record["model"] = format_model(*outcome.model);
            out.human << format_model(*outcome.model);
            if (decide_saturate) {
                FiniteModelOracle oracle(*outcome.model, closure(f));
                SaturationResult r = saturate(oracle, outcome.world);
                SaturatedModel sm = build_saturated_model(r, oracle);
                out.record["saturation"] = saturation_json(out, r, sm, oracle, true, false);
                report_conditions(out, sm.model.frame(), out.record["saturation"]);
            }
        } else {
            out.human << "NO-COUNTERMODEL bound=" << decide_bound << "\n";
        }
    } else if (sat_cmd->parsed()) {
        Model m = parse_model(read_file(sat_file));
        Formula f = parse_formula(sat_formula_text);
        std::optional<FiniteModelOracle> oracle;
        try {
            oracle.emplace(m, closure(f));
        } catch (const std::invalid_argument& e) {
            std::cerr << "unsuitable model: " << e.what() << "\n";
            return kExitFile;
        }
        SaturationOptions options;
        options.repair_budget = sat_budget;
        options.record_trace = sat_trace;
        SaturationResult r = saturate(*oracle, sat_world, options);
        SaturatedModel sm = build_saturated_model(r, *oracle);
        out.record["command"] = "saturate";
        out.record["formula"] = render(f);
        out.record["start_world"] = sat_world;
        out.record["saturation"] = saturation_json(out, r, sm, *oracle, sat_emit, sat_trace);
    } else if (trees_cmd->parsed()) {
        CLI::App* sub = trees_cmd->get_subcommands().front();
        const std::string& name = sub->get_name();
        out.record["command"] = "trees " + name;
        if (name == "strictify" || name == "nicify") {
            LabelledTree t = parse_tree(tree_a, tree_width);
            Reduction r = name == "strictify" ? strictify(t) : nicify(t);
            out.record["input_nodes"] = t.size();
            out.record["result_nodes"] = r.tree.size();
            out.record["tree"] = format_tree(r.tree);
            out.human << format_tree(r.tree) << "\n";
        } else if (name == "canon") {
            out.record["code"] = canonical_code(parse_tree(tree_a, tree_width));
            out.human << out.record["code"].get<std::string>() << "\n";
        } else if (name == "embed") {
            auto emb = embeds_into(parse_tree(tree_a, tree_width), parse_tree(tree_b, tree_width));
            out.record["embeds"] = emb.has_value();
            if (emb) {
                json map = json::array();
                out.human << "EMBEDDING";
                for (std::size_t i = 0; i < emb->size(); ++i) {
                    map.push_back((*emb)[i]);
                    out.human << " " << i << "->" << (*emb)[i];
                }
                out.human << "\n";
                out.record["map"] = std::move(map);
            } else {
                out.human << "NO-EMBEDDING\n";
            }
        } else if (name == "equiv") {
            bool eq = equivalent_sim(parse_tree(tree_a, tree_width), parse_tree(tree_b, tree_width))
                          .has_value();
            out.record["equivalent"] = eq;
            out.human << (eq ? "EQUIVALENT" : "INEQUIVALENT") << "\n";
        } else if (name == "enumerate") {
            json items = json::array();
            std::size_t count = 0;
            bool truncated = false;
            enumerate_nice_trees(tree_width, enum_height, [&](const LabelledTree& t) {
                if (count >= enum_limit) {
                    truncated = true;
                    return false;
                }
                ++count;
                items.push_back(format_tree(t));
                out.human << format_tree(t) << "\n";
                return true;
            });
            out.record["trees"] = std::move(items);
            out.record["count"] = count;
            out.record["truncated"] = truncated;
            std::uint64_t card = 1 + (std::uint64_t{1} << tree_width);
            std::string bound = nlt_bound(enum_height, card).to_string();
            out.record["recurrence_bound"] = bound;
            out.human << "count=" << count << (truncated ? "+ (truncated)" : "")
                      << " recurrence-bound=" << bound << "\n";
        } else if (name == "bound") {
            std::string value = nlt_bound(bound_height, bound_card).to_string();
            out.record["height"] = bound_height;
            out.record["card_p"] = bound_card;
            out.record["bound"] = value;
            out.human << value << "\n";
        }
    } else if (proof_cmd->parsed()) {
        Proof proof = parse_proof(read_file(proof_file));
        ProofCheck check = check_proof(proof);
        out.record["command"] = "check-proof";
        out.record["lines"] = proof.lines.size();
        out.record["ok"] = check.ok;
        if (check.ok) {
            out.human << "OK (" << proof.lines.size() << " line(s))\n";
        } else {
            out.record["first_bad_line"] = check.first_bad_line;
            out.record["reason"] = check.reason;
            out.human << "FAIL line=" << check.first_bad_line << " reason=" << check.reason
                      << "\n";
        }
    }

    out.flush();
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ParseError& e) {
        std::cerr << "syntax error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const FileFormatError& e) {
        std::cerr << "file error: " << e.what() << "\n";
        return kExitFile;
    } catch (const InvariantError& e) {
        std::cerr << "internal invariant violated: " << e.what() << "\n";
        return kExitInvariant;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::overflow_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}
