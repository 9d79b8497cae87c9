// Python bindings for the main operations: formula handling, model
// evaluation, bounded countermodel search, saturation and proof checking.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ik4/clip.hpp"
#include "ik4/enumeration.hpp"
#include "ik4/hilbert.hpp"

namespace py = pybind11;
using namespace ik4;

namespace {

Variant variant_arg(const std::string& name) {
    auto v = variant_from_name(name);
    if (!v) throw std::invalid_argument("unknown variant '" + name + "'");
    return *v;
}

FrameFilter filter_arg(const std::vector<std::string>& conditions) {
    FrameFilter f;
    for (const std::string& c : conditions) {
        if (c == "transitive")
            f.transitive = true;
        else if (c == "upward")
            f.upward = true;
        else if (c == "downward")
            f.downward = true;
        else if (c == "forward")
            f.forward = true;
        else
            throw std::invalid_argument("unknown condition '" + c + "'");
    }
    return f;
}

const char* kind_name(Kind k) {
    switch (k) {
        case Kind::Atom: return "atom";
        case Kind::Top: return "top";
        case Kind::Bot: return "bot";
        case Kind::Implies: return "implies";
        case Kind::And: return "and";
        case Kind::Or: return "or";
        case Kind::Box: return "box";
        case Kind::Dia: return "dia";
    }
    return "?";
}

struct SearchResult {
    std::optional<Model> model;
    std::size_t world = 0;
    std::size_t bound = 0;
};

struct SaturationSummary {
    std::size_t tips = 0;
    std::size_t alpha_f = 0;
    std::size_t beta_f = 0;
    std::size_t repairs = 0;
    std::vector<std::size_t> tips_per_rank;
    Model saturated_model;
    std::size_t truth_lemma_violations = 0;
};

SaturationSummary run_saturation(const Model& model, Formula seed, std::size_t world,
                                 std::size_t budget) {
    FiniteModelOracle oracle(model, closure(seed));
    SaturationOptions options;
    options.repair_budget = budget;
    SaturationResult r = saturate(oracle, world, options);
    SaturatedModel sm = build_saturated_model(r, oracle);
    SaturationSummary summary{r.clip.size(), r.alpha_f, r.beta_f, r.stats.repairs,
                              {},            sm.model,  0};
    for (std::size_t rank = 0; rank <= r.clip.max_rank(); ++rank) {
        std::size_t count = 0;
        for (const Tip& t : r.clip.tips())
            if (t.rank == rank) ++count;
        summary.tips_per_rank.push_back(count);
    }
    summary.truth_lemma_violations = check_truth_lemma(r, sm, oracle).size();
    return summary;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "decision machinery for the intuitionistic modal logic IK4";

    py::register_exception<ParseError>(m, "FormulaSyntaxError", PyExc_ValueError);
    py::register_exception<FileFormatError>(m, "FileFormatError", PyExc_ValueError);
    py::register_exception<InvariantError>(m, "InvariantError", PyExc_RuntimeError);

    py::class_<Formula>(m, "Formula")
        .def_static("atom", &Formula::atom)
        .def_static("top", &Formula::top)
        .def_static("bot", &Formula::bot)
        .def_static("implies", &Formula::implies)
        .def_static("conj", &Formula::conj)
        .def_static("disj", &Formula::disj)
        .def_static("box", &Formula::box)
        .def_static("dia", &Formula::dia)
        .def_static("neg", &Formula::neg)
        .def_property_readonly("kind", [](const Formula& f) { return kind_name(f.kind()); })
        .def("__str__", [](const Formula& f) { return render(f); })
        .def("__repr__", [](const Formula& f) { return "Formula(\"" + render(f) + "\")"; })
        .def("__eq__", [](const Formula& a, const Formula& b) { return a == b; })
        .def("__hash__", [](const Formula& f) { return f.id(); });

    m.def("parse", &parse_formula, py::arg("text"), "parse a formula from its text form");
    m.def("render", &render, py::arg("formula"));
    m.def("length", &symbol_length, py::arg("formula"),
          "symbol count of the fully parenthesised word");
    m.def("atoms", &atoms_of, py::arg("formula"));
    m.def(
        "closure_members",
        [](Formula f) { return closure(f).members(); }, py::arg("formula"),
        "members of the least subformula-closed set containing the formula");

    py::class_<Model>(m, "Model")
        .def_static("load", [](const std::string& text) { return parse_model(text); },
                    py::arg("text"), "parse the line-oriented model format")
        .def_property_readonly("worlds", &Model::size)
        .def("to_text", [](const Model& m) { return format_model(m); })
        .def("__eq__", [](const Model& a, const Model& b) { return a == b; })
        .def("__repr__",
             [](const Model& m) { return "<Model with " + std::to_string(m.size()) + " world(s)>"; });

    m.def(
        "forces",
        [](const Model& model, std::size_t world, Formula f, const std::string& variant) {
            return forces(model, world, f, variant_arg(variant));
        },
        py::arg("model"), py::arg("world"), py::arg("formula"), py::arg("variant") = "BD");
    m.def(
        "true_in_model",
        [](const Model& model, Formula f, const std::string& variant) {
            return true_in_model(model, f, variant_arg(variant));
        },
        py::arg("model"), py::arg("formula"), py::arg("variant") = "BD");
    m.def(
        "check_condition",
        [](const Model& model, const std::string& name) -> py::object {
            FrameCondition c;
            if (name == "transitive")
                c = FrameCondition::Transitive;
            else if (name == "upward")
                c = FrameCondition::Upward;
            else if (name == "downward")
                c = FrameCondition::Downward;
            else if (name == "forward")
                c = FrameCondition::Forward;
            else
                throw std::invalid_argument("unknown condition '" + name + "'");
            ConditionCheck check = check_frame_condition(model.frame(), c);
            if (check.holds) return py::make_tuple(true, py::none());
            return py::make_tuple(false, py::make_tuple(check.witness[0], check.witness[1],
                                                        check.witness[2]));
        },
        py::arg("model"), py::arg("condition"),
        "returns (holds, witness-triple-or-None)");
    m.def(
        "valid_in_frame",
        [](const Model& model, Formula f, const std::string& variant) -> py::object {
            ValidityCheck check = valid_in_frame(model.frame(), f, variant_arg(variant));
            if (check.valid) return py::make_tuple(true, py::none(), py::none());
            Model falsifying(model.frame(), *check.valuation);
            return py::make_tuple(false, falsifying, check.world);
        },
        py::arg("model"), py::arg("formula"), py::arg("variant") = "BD",
        "returns (valid, falsifying-model-or-None, world-or-None)");
    m.def(
        "heredity_violations",
        [](const Model& model, const std::vector<Formula>& pool) {
            std::vector<py::tuple> out;
            for (const HeredityViolation& v : check_heredity(model, pool))
                out.push_back(py::make_tuple(v.formula, v.from, v.to));
            return out;
        },
        py::arg("model"), py::arg("pool"));

    py::class_<SearchResult>(m, "SearchResult")
        .def_property_readonly("found", [](const SearchResult& r) { return r.model.has_value(); })
        .def_property_readonly("model",
                               [](const SearchResult& r) -> py::object {
                                   if (!r.model) return py::none();
                                   return py::cast(*r.model);
                               })
        .def_readonly("world", &SearchResult::world)
        .def_readonly("bound", &SearchResult::bound)
        .def("__repr__", [](const SearchResult& r) {
            return r.model ? "<SearchResult countermodel>" : "<SearchResult exhausted>";
        });

    m.def(
        "countermodel_search",
        [](Formula f, std::size_t bound, const std::vector<std::string>& conditions,
           const std::string& variant, unsigned threads) {
            SearchOutcome outcome =
                countermodel_search(f, bound, filter_arg(conditions), threads, variant_arg(variant));
            return SearchResult{std::move(outcome.model), outcome.world, outcome.bound};
        },
        py::arg("formula"), py::arg("bound"),
        py::arg("conditions") = std::vector<std::string>{"transitive", "downward", "forward"},
        py::arg("variant") = "BD", py::arg("threads") = 0,
        "bounded countermodel search over filtered frames");

    py::class_<SaturationSummary>(m, "SaturationSummary")
        .def_readonly("tips", &SaturationSummary::tips)
        .def_readonly("alpha_f", &SaturationSummary::alpha_f)
        .def_readonly("beta_f", &SaturationSummary::beta_f)
        .def_readonly("repairs", &SaturationSummary::repairs)
        .def_readonly("tips_per_rank", &SaturationSummary::tips_per_rank)
        .def_readonly("saturated_model", &SaturationSummary::saturated_model)
        .def_readonly("truth_lemma_violations", &SaturationSummary::truth_lemma_violations)
        .def("__repr__", [](const SaturationSummary& s) {
            return "<SaturationSummary tips=" + std::to_string(s.tips) +
                   " alpha_f=" + std::to_string(s.alpha_f) + " beta_f=" + std::to_string(s.beta_f) +
                   ">";
        });

    m.def("saturate", &run_saturation, py::arg("model"), py::arg("formula"), py::arg("world"),
          py::arg("budget") = 100000,
          "saturation from a start world over a transitive confluent model");

    m.def("ipl_valid", &ipl_valid, py::arg("formula"),
          "intuitionistic propositional validity (modal-free input)");
    m.def("freeze_modal", &freeze_modal, py::arg("formula"),
          "replace maximal modal subformulas by fresh shared atoms");

    m.def(
        "check_proof",
        [](const std::string& text) {
            ProofCheck check = check_proof(parse_proof(text));
            return py::make_tuple(check.ok, check.first_bad_line, check.reason);
        },
        py::arg("text"), "returns (ok, first_bad_line, reason)");

    m.def(
        "strictify_tree",
        [](const std::string& text, std::size_t width) {
            return format_tree(strictify(parse_tree(text, width)).tree);
        },
        py::arg("tree"), py::arg("width") = 1);
    m.def(
        "nicify_tree",
        [](const std::string& text, std::size_t width) {
            return format_tree(nicify(parse_tree(text, width)).tree);
        },
        py::arg("tree"), py::arg("width") = 1);
    m.def(
        "tree_equivalent",
        [](const std::string& a, const std::string& b, std::size_t width) {
            return equivalent_sim(parse_tree(a, width), parse_tree(b, width)).has_value();
        },
        py::arg("a"), py::arg("b"), py::arg("width") = 1);
    m.def(
        "nlt_bound",
        [](std::size_t height, std::uint64_t card_p) {
            return py::module_::import("builtins").attr("int")(nlt_bound(height, card_p).to_string());
        },
        py::arg("height"), py::arg("card_p"), "the exact tree-count recurrence value");
}
