#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ik4/semantics.hpp"

namespace ik4 {

/// Which frame conditions an enumerated or searched frame must satisfy.
struct FrameFilter {
    bool transitive = false;
    bool upward = false;
    bool downward = false;
    bool forward = false;

    /// transitive + downward + forward: the class the logic is sound for.
    static FrameFilter logic_class() { return {true, false, true, true}; }
    static FrameFilter none() { return {}; }

    bool passes(const Frame& f) const;
    std::string to_string() const;
};

/// All distinct preorders on n worlds, enumerated as reflexive-transitive
/// closures of every digraph on n nodes, deduplicated, in first-occurrence
/// (generator-mask ascending) order. Return false from the callback to stop.
void enumerate_preorders(std::size_t n, const std::function<bool(const Relation&)>& yield);

/// Every frame with exactly n worlds passing the filter: preorders in
/// enumeration order, modal relations in ascending bitmask order.
void enumerate_frames(std::size_t n, const FrameFilter& filter,
                      const std::function<bool(const Frame&)>& yield);

/// All valuations of the given atoms over the frame's up-closed subsets.
std::vector<Valuation> enumerate_valuations(const Frame& f, std::span<const std::string> atoms);

struct SearchOutcome {
    std::optional<Model> model;  // engaged iff a countermodel was found
    std::size_t world = 0;
    std::size_t bound = 0;

    bool found() const { return model.has_value(); }
};

/// Scans frame sizes 1..bound for the first (model, world) refuting the
/// formula. Only the formula's own atoms are valued. The scan is partitioned
/// over candidate preorders for concurrent evaluation; the merge keeps the
/// lexicographically least hit, so results are deterministic. `threads` 0
/// means use the hardware count.
SearchOutcome countermodel_search(Formula a, std::size_t bound, const FrameFilter& filter,
                                  unsigned threads = 0, Variant variant = Variant::BD);

}  // namespace ik4
