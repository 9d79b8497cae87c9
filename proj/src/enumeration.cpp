#include "ik4/enumeration.hpp"

#include <atomic>
#include <limits>
#include <mutex>
#include <thread>
#include <unordered_set>

#include "ik4/errors.hpp"

namespace ik4 {

bool FrameFilter::passes(const Frame& f) const {
    if (transitive && !check_frame_condition(f, FrameCondition::Transitive).holds) return false;
    if (upward && !check_frame_condition(f, FrameCondition::Upward).holds) return false;
    if (downward && !check_frame_condition(f, FrameCondition::Downward).holds) return false;
    if (forward && !check_frame_condition(f, FrameCondition::Forward).holds) return false;
    return true;
}

std::string FrameFilter::to_string() const {
    std::string s;
    auto add = [&](bool on, const char* name) {
        if (!on) return;
        if (!s.empty()) s += ",";
        s += name;
    };
    add(transitive, "transitive");
    add(upward, "upward");
    add(downward, "downward");
    add(forward, "forward");
    return s.empty() ? "none" : s;
}

namespace {

Relation relation_from_mask(std::size_t n, std::uint64_t mask) {
    Relation r(n);
    std::size_t bit = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j, ++bit)
            if ((mask >> bit) & 1) r.set(i, j);
    return r;
}

std::vector<Relation> preorder_list(std::size_t n) {
    if (n == 0 || n > 4) throw std::invalid_argument("preorder enumeration supports 1..4 worlds");
    std::vector<Relation> out;
    std::unordered_set<Relation, RelationHash> seen;
    std::uint64_t total = std::uint64_t{1} << (n * n);
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        Relation closed = relation_from_mask(n, mask).reflexive_transitive_closure();
        if (seen.insert(closed).second) out.push_back(std::move(closed));
    }
    return out;
}

}  // namespace

void enumerate_preorders(std::size_t n, const std::function<bool(const Relation&)>& yield) {
    for (const Relation& p : preorder_list(n))
        if (!yield(p)) return;
}

void enumerate_frames(std::size_t n, const FrameFilter& filter,
                      const std::function<bool(const Frame&)>& yield) {
    std::uint64_t rel_total = std::uint64_t{1} << (n * n);
    for (const Relation& leq : preorder_list(n)) {
        for (std::uint64_t mask = 0; mask < rel_total; ++mask) {
            Frame f(leq, relation_from_mask(n, mask));
            if (!filter.passes(f)) continue;
            if (!yield(f)) return;
        }
    }
}

std::vector<Valuation> enumerate_valuations(const Frame& f, std::span<const std::string> atoms) {
    std::vector<Bitset> upsets = upward_closed_subsets(f.leq());
    std::vector<Valuation> out;
    std::vector<std::size_t> choice(atoms.size(), 0);
    while (true) {
        Valuation v;
        for (std::size_t k = 0; k < atoms.size(); ++k) v.assign(atoms[k], upsets[choice[k]]);
        out.push_back(std::move(v));
        std::size_t k = 0;
        for (; k < atoms.size(); ++k) {
            if (++choice[k] < upsets.size()) break;
            choice[k] = 0;
        }
        if (k == atoms.size()) break;
    }
    return out;
}

namespace {

struct Hit {
    std::size_t preorder_index;
    std::uint64_t rel_mask;
    Model model;
    std::size_t world;
};

/// First countermodel within one (preorder, R-mask) candidate, scanning
/// valuations then worlds in order.
std::optional<Hit> scan_frame(std::size_t preorder_index, const Relation& leq, std::uint64_t mask,
                              std::size_t n, const FrameFilter& filter, Formula a,
                              std::span<const std::string> atoms,
                              const std::vector<Bitset>& upsets, Variant variant) {
    Frame frame(leq, relation_from_mask(n, mask));
    if (!filter.passes(frame)) return std::nullopt;
    std::vector<std::size_t> choice(atoms.size(), 0);
    while (true) {
        Valuation val;
        for (std::size_t k = 0; k < atoms.size(); ++k) val.assign(atoms[k], upsets[choice[k]]);
        Model m(frame, val);
        Evaluator ev(m, variant);
        const Bitset& sat = ev.satisfied(a);
        for (std::size_t w = 0; w < n; ++w)
            if (!sat.test(w)) return Hit{preorder_index, mask, std::move(m), w};
        std::size_t k = 0;
        for (; k < atoms.size(); ++k) {
            if (++choice[k] < upsets.size()) break;
            choice[k] = 0;
        }
        if (k == atoms.size()) break;
    }
    return std::nullopt;
}

}  // namespace

SearchOutcome countermodel_search(Formula a, std::size_t bound, const FrameFilter& filter,
                                  unsigned threads, Variant variant) {
    if (bound < 1) throw std::invalid_argument("search bound must be at least 1");
    std::vector<std::string> atoms = atoms_of(a);
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());

    for (std::size_t n = 1; n <= bound; ++n) {
        std::vector<Relation> preorders = preorder_list(n);
        std::vector<std::vector<Bitset>> upsets(preorders.size());
        for (std::size_t p = 0; p < preorders.size(); ++p)
            upsets[p] = upward_closed_subsets(preorders[p]);

        std::uint64_t rel_total = std::uint64_t{1} << (n * n);
        std::mutex mutex;
        std::optional<Hit> best;
        auto best_key = std::make_pair(std::numeric_limits<std::size_t>::max(),
                                       std::numeric_limits<std::uint64_t>::max());
        // Work is handed out per preorder; a worker skips preorders past the
        // best hit so far, and the merge keeps the least (preorder, mask).
        std::atomic<std::size_t> next{0};
        std::atomic<std::size_t> best_preorder{preorders.size()};

        auto worker = [&]() {
            while (true) {
                std::size_t p = next.fetch_add(1);
                if (p >= preorders.size()) return;
                if (p > best_preorder.load()) continue;
                for (std::uint64_t mask = 0; mask < rel_total; ++mask) {
                    auto hit = scan_frame(p, preorders[p], mask, n, filter, a, atoms, upsets[p],
                                          variant);
                    if (!hit) continue;
                    std::lock_guard lock(mutex);
                    auto key = std::make_pair(hit->preorder_index, hit->rel_mask);
                    if (key < best_key) {
                        best_key = key;
                        best = std::move(hit);
                        best_preorder.store(key.first);
                    }
                    break;  // later masks in this preorder cannot beat this hit
                }
            }
        };

        unsigned nthreads = std::min<unsigned>(threads, static_cast<unsigned>(preorders.size()));
        if (nthreads <= 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
            for (auto& t : pool) t.join();
        }

        if (best) {
            // Re-verify before returning: the reported world must refute the
            // formula and the frame must pass the filter.
            if (!filter.passes(best->model.frame()) ||
                forces(best->model, best->world, a, variant))
                throw InvariantError("countermodel failed re-verification");
            return SearchOutcome{std::move(best->model), best->world, bound};
        }
    }
    return SearchOutcome{std::nullopt, 0, bound};
}

}  // namespace ik4
