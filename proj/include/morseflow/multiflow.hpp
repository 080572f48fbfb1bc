#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "morseflow/errors.hpp"

namespace morseflow {

/// Finite state set with a total one-step multivalued transition relation:
/// the discrete realization of a strict m-semiflow. G(t,x) is exact-length-t
/// reachability, so the concatenation law G(t+s,x) = G(t,G(s,x)) holds by
/// construction and shift invariance gives the translation law.
struct MultiflowGraph {
    std::vector<std::string> state_names;
    std::vector<std::vector<int>> step;      // sorted successor lists, each nonempty
    std::vector<std::vector<int>> neighbors; // optional undirected adjacency (may be empty)

    int size() const { return static_cast<int>(step.size()); }

    void validate() const {
        if (state_names.size() != step.size())
            throw std::domain_error("multiflow: state/step size mismatch");
        for (int x = 0; x < size(); ++x) {
            if (step[static_cast<std::size_t>(x)].empty())
                throw std::domain_error("multiflow: state '" +
                                        state_names[static_cast<std::size_t>(x)] +
                                        "' has no successor");
            for (int y : step[static_cast<std::size_t>(x)])
                if (y < 0 || y >= size())
                    throw std::domain_error("multiflow: successor index out of range");
        }
        if (!neighbors.empty() && neighbors.size() != step.size())
            throw std::domain_error("multiflow: neighbors size mismatch");
    }

    int index_of(const std::string &name) const {
        for (int i = 0; i < size(); ++i)
            if (state_names[static_cast<std::size_t>(i)] == name)
                return i;
        throw std::domain_error("multiflow: unknown state '" + name + "'");
    }

    static MultiflowGraph from_lists(std::vector<std::string> names,
                                     std::vector<std::vector<int>> step_rel,
                                     std::vector<std::vector<int>> nbrs = {}) {
        MultiflowGraph g;
        g.state_names = std::move(names);
        g.step = std::move(step_rel);
        g.neighbors = std::move(nbrs);
        for (auto &succ : g.step) {
            std::sort(succ.begin(), succ.end());
            succ.erase(std::unique(succ.begin(), succ.end()), succ.end());
        }
        g.validate();
        return g;
    }
};

using StateSet = std::vector<int>; // sorted, unique

namespace setops {

inline StateSet normalize(StateSet s) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return s;
}

inline bool contains(const StateSet &s, int x) {
    return std::binary_search(s.begin(), s.end(), x);
}

inline bool subset(const StateSet &a, const StateSet &b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

inline StateSet unite(const StateSet &a, const StateSet &b) {
    StateSet out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline StateSet intersect(const StateSet &a, const StateSet &b) {
    StateSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline StateSet minus(const StateSet &a, const StateSet &b) {
    StateSet out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline StateSet full(int n) {
    StateSet s(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        s[static_cast<std::size_t>(i)] = i;
    return s;
}

} // namespace setops

namespace detail {

inline std::vector<std::vector<int>> reverse_step(const MultiflowGraph &g) {
    std::vector<std::vector<int>> rev(static_cast<std::size_t>(g.size()));
    for (int x = 0; x < g.size(); ++x)
        for (int y : g.step[static_cast<std::size_t>(x)])
            rev[static_cast<std::size_t>(y)].push_back(x);
    for (auto &v : rev) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    return rev;
}

inline StateSet forward_closure(const std::vector<std::vector<int>> &adj, const StateSet &seed) {
    std::vector<char> seen(adj.size(), 0);
    std::vector<int> stack(seed.begin(), seed.end());
    for (int x : seed)
        seen[static_cast<std::size_t>(x)] = 1;
    while (!stack.empty()) {
        const int x = stack.back();
        stack.pop_back();
        for (int y : adj[static_cast<std::size_t>(x)])
            if (!seen[static_cast<std::size_t>(y)]) {
                seen[static_cast<std::size_t>(y)] = 1;
                stack.push_back(y);
            }
    }
    StateSet out;
    for (std::size_t i = 0; i < seen.size(); ++i)
        if (seen[i])
            out.push_back(static_cast<int>(i));
    return out;
}

/// Tarjan strongly connected components, iterative. Components come out in
/// reverse topological order; we sort them by smallest member for stable
/// output.
inline std::vector<StateSet> strongly_connected_components(const MultiflowGraph &g) {
    const int n = g.size();
    std::vector<int> index(static_cast<std::size_t>(n), -1), low(static_cast<std::size_t>(n), 0),
        on_stack(static_cast<std::size_t>(n), 0);
    std::vector<int> stack;
    std::vector<StateSet> comps;
    int counter = 0;

    struct Frame {
        int v;
        std::size_t child;
    };
    for (int root = 0; root < n; ++root) {
        if (index[static_cast<std::size_t>(root)] != -1)
            continue;
        std::vector<Frame> call;
        call.push_back({root, 0});
        index[static_cast<std::size_t>(root)] = low[static_cast<std::size_t>(root)] = counter++;
        stack.push_back(root);
        on_stack[static_cast<std::size_t>(root)] = 1;
        while (!call.empty()) {
            Frame &f = call.back();
            const auto &succ = g.step[static_cast<std::size_t>(f.v)];
            if (f.child < succ.size()) {
                const int w = succ[f.child++];
                if (index[static_cast<std::size_t>(w)] == -1) {
                    index[static_cast<std::size_t>(w)] = low[static_cast<std::size_t>(w)] =
                        counter++;
                    stack.push_back(w);
                    on_stack[static_cast<std::size_t>(w)] = 1;
                    call.push_back({w, 0});
                } else if (on_stack[static_cast<std::size_t>(w)]) {
                    low[static_cast<std::size_t>(f.v)] =
                        std::min(low[static_cast<std::size_t>(f.v)],
                                 index[static_cast<std::size_t>(w)]);
                }
            } else {
                if (low[static_cast<std::size_t>(f.v)] == index[static_cast<std::size_t>(f.v)]) {
                    StateSet comp;
                    for (;;) {
                        const int w = stack.back();
                        stack.pop_back();
                        on_stack[static_cast<std::size_t>(w)] = 0;
                        comp.push_back(w);
                        if (w == f.v)
                            break;
                    }
                    comps.push_back(setops::normalize(std::move(comp)));
                }
                const int v = f.v;
                call.pop_back();
                if (!call.empty())
                    low[static_cast<std::size_t>(call.back().v)] =
                        std::min(low[static_cast<std::size_t>(call.back().v)],
                                 low[static_cast<std::size_t>(v)]);
            }
        }
    }
    std::sort(comps.begin(), comps.end(),
              [](const StateSet &a, const StateSet &b) { return a.front() < b.front(); });
    return comps;
}

inline bool has_self_loop(const MultiflowGraph &g, int x) {
    return setops::contains(g.step[static_cast<std::size_t>(x)], x);
}

/// States lying on at least one cycle: members of a nontrivial SCC or states
/// with a self-loop.
inline StateSet recurrent_states(const MultiflowGraph &g) {
    StateSet rec;
    for (const StateSet &c : strongly_connected_components(g)) {
        if (c.size() > 1) {
            for (int x : c)
                rec.push_back(x);
        } else if (has_self_loop(g, c.front())) {
            rec.push_back(c.front());
        }
    }
    return setops::normalize(std::move(rec));
}

/// Recurrent classes: the SCCs that carry a cycle.
inline std::vector<StateSet> recurrent_classes(const MultiflowGraph &g) {
    std::vector<StateSet> out;
    for (const StateSet &c : strongly_connected_components(g))
        if (c.size() > 1 || has_self_loop(g, c.front()))
            out.push_back(c);
    return out;
}

struct Subgraph {
    MultiflowGraph graph;
    std::vector<int> to_parent; // new index -> old index
};

/// Induced subgraph on `keep`, successor lists intersected with `keep`.
inline Subgraph induced_subgraph(const MultiflowGraph &g, const StateSet &keep) {
    Subgraph sub;
    std::vector<int> to_child(static_cast<std::size_t>(g.size()), -1);
    for (std::size_t i = 0; i < keep.size(); ++i) {
        to_child[static_cast<std::size_t>(keep[i])] = static_cast<int>(i);
        sub.to_parent.push_back(keep[i]);
        sub.graph.state_names.push_back(g.state_names[static_cast<std::size_t>(keep[i])]);
    }
    sub.graph.step.resize(keep.size());
    for (std::size_t i = 0; i < keep.size(); ++i) {
        for (int y : g.step[static_cast<std::size_t>(keep[i])]) {
            const int ny = to_child[static_cast<std::size_t>(y)];
            if (ny >= 0)
                sub.graph.step[i].push_back(ny);
        }
    }
    return sub;
}

} // namespace detail

/// G(t,x): the set of states reachable by walks of exactly length t. The
/// image-set sequence is eventually periodic, so large t is folded through
/// the detected cycle instead of iterated literally.
inline StateSet reach_exact(const MultiflowGraph &g, long long t, int x) {
    if (x < 0 || x >= g.size())
        throw std::domain_error("reach_exact: unknown state id");
    if (t < 0)
        throw std::domain_error("reach_exact: negative time");
    std::vector<char> cur(static_cast<std::size_t>(g.size()), 0);
    cur[static_cast<std::size_t>(x)] = 1;
    std::map<std::vector<char>, long long> seen;
    std::vector<std::vector<char>> history;
    long long step_count = 0;
    while (step_count < t) {
        auto [it, fresh] = seen.emplace(cur, step_count);
        if (!fresh) {
            const long long start = it->second;
            const long long period = step_count - start;
            const long long idx = start + (t - start) % period;
            cur = history[static_cast<std::size_t>(idx)];
            break;
        }
        history.push_back(cur);
        std::vector<char> next(static_cast<std::size_t>(g.size()), 0);
        for (int v = 0; v < g.size(); ++v)
            if (cur[static_cast<std::size_t>(v)])
                for (int w : g.step[static_cast<std::size_t>(v)])
                    next[static_cast<std::size_t>(w)] = 1;
        cur = std::move(next);
        ++step_count;
    }
    StateSet out;
    for (int v = 0; v < g.size(); ++v)
        if (cur[static_cast<std::size_t>(v)])
            out.push_back(v);
    return out;
}

/// omega(x) = { y : y in G(t,x) for infinitely many t }. On a finite graph
/// that is exactly the forward closure of the recurrent states reachable
/// from x: pumping the cycle realizes infinitely many exact lengths, and a
/// state hit at infinitely many exact times must sit behind a cycle.
inline StateSet omega_limit(const MultiflowGraph &g, int x) {
    if (x < 0 || x >= g.size())
        throw std::domain_error("omega_limit: unknown state id");
    const StateSet fwd = detail::forward_closure(g.step, {x});
    const StateSet rec = setops::intersect(fwd, detail::recurrent_states(g));
    return detail::forward_closure(g.step, rec);
}

inline StateSet omega_limit_set(const MultiflowGraph &g, const StateSet &B) {
    StateSet out;
    for (int x : B)
        out = setops::unite(out, omega_limit(g, x));
    return out;
}

/// alpha-limit over bi-infinite paths arriving at x: omega_limit in the
/// reversed graph. Recurrence is direction-independent, so the reversal only
/// needs the (possibly non-total) predecessor closure.
inline StateSet alpha_limit(const MultiflowGraph &g, int x) {
    if (x < 0 || x >= g.size())
        throw std::domain_error("alpha_limit: unknown state id");
    const auto rev = detail::reverse_step(g);
    const StateSet bwd = detail::forward_closure(rev, {x});
    const StateSet rec = setops::intersect(bwd, detail::recurrent_states(g));
    return detail::forward_closure(rev, rec);
}

/// Largest M inside U through every point of which a bi-infinite path runs
/// without leaving M. Iterated pruning of states missing an in- or
/// out-neighbor inside the current set, to fixpoint.
inline StateSet maximal_weakly_invariant(const MultiflowGraph &g, const StateSet &U) {
    for (int x : U)
        if (x < 0 || x >= g.size())
            throw std::domain_error("maximal_weakly_invariant: state id out of range");
    const auto rev = detail::reverse_step(g);
    std::vector<char> in(static_cast<std::size_t>(g.size()), 0);
    for (int x : U)
        in[static_cast<std::size_t>(x)] = 1;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int x : U) {
            if (!in[static_cast<std::size_t>(x)])
                continue;
            bool has_out = false, has_in = false;
            for (int y : g.step[static_cast<std::size_t>(x)])
                if (in[static_cast<std::size_t>(y)]) {
                    has_out = true;
                    break;
                }
            for (int y : rev[static_cast<std::size_t>(x)])
                if (in[static_cast<std::size_t>(y)]) {
                    has_in = true;
                    break;
                }
            if (!has_out || !has_in) {
                in[static_cast<std::size_t>(x)] = 0;
                changed = true;
            }
        }
    }
    StateSet out;
    for (int x : U)
        if (in[static_cast<std::size_t>(x)])
            out.push_back(x);
    return setops::normalize(std::move(out));
}

/// Global attractor: omega of the whole space = forward closure of all
/// recurrent states = the maximal weakly invariant subset of X.
inline StateSet attractor(const MultiflowGraph &g) {
    return detail::forward_closure(g.step, detail::recurrent_states(g));
}

/// All local attractors. With the discrete metric (neighborhood radius < 1)
/// these are exactly the sets A with omega(A) = A, i.e. the forward closures
/// of downward-closed collections of recurrent classes in the condensation.
inline std::vector<StateSet> local_attractors(const MultiflowGraph &g) {
    const std::vector<StateSet> classes = detail::recurrent_classes(g);
    const int k = static_cast<int>(classes.size());
    if (k > 22)
        throw std::domain_error("local_attractors: too many recurrent classes to enumerate");

    // class-level reachability (through arbitrary states)
    std::vector<StateSet> closures;
    closures.reserve(classes.size());
    for (const StateSet &c : classes)
        closures.push_back(detail::forward_closure(g.step, c));
    std::vector<unsigned> reaches(static_cast<std::size_t>(k), 0);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            if (i != j && setops::subset(classes[static_cast<std::size_t>(j)],
                                         closures[static_cast<std::size_t>(i)]))
                reaches[static_cast<std::size_t>(i)] |= 1u << j;

    std::vector<StateSet> out;
    for (unsigned mask = 1; mask < (1u << k); ++mask) {
        bool closed = true;
        for (int i = 0; closed && i < k; ++i)
            if (mask & (1u << i))
                closed = (reaches[static_cast<std::size_t>(i)] & ~mask) == 0;
        if (!closed)
            continue;
        StateSet seed;
        for (int i = 0; i < k; ++i)
            if (mask & (1u << i))
                for (int x : classes[static_cast<std::size_t>(i)])
                    seed.push_back(x);
        out.push_back(detail::forward_closure(g.step, setops::normalize(std::move(seed))));
    }
    std::sort(out.begin(), out.end(), [](const StateSet &a, const StateSet &b) {
        if (a.size() != b.size())
            return a.size() < b.size();
        return a < b;
    });
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

inline bool is_local_attractor(const MultiflowGraph &g, const StateSet &A) {
    for (const StateSet &cand : local_attractors(g))
        if (cand == A)
            return true;
    return false;
}

/// A* = { x in the global attractor : omega(x) \ A is nonempty }.
inline StateSet repeller(const MultiflowGraph &g, const StateSet &A) {
    if (!is_local_attractor(g, A))
        throw std::domain_error("repeller: argument is not a local attractor");
    StateSet out;
    for (int x : attractor(g))
        if (!setops::minus(omega_limit(g, x), A).empty())
            out.push_back(x);
    return out;
}

struct InvariantFamily {
    std::vector<StateSet> sets;
    std::vector<std::string> labels;
};

struct FamilyDiagnostics {
    bool disjoint = true;
    bool all_weakly_invariant = true;
    std::vector<int> not_invariant; // indices with mwi(set) != set
};

inline FamilyDiagnostics family_diagnostics(const MultiflowGraph &g, const InvariantFamily &fam) {
    FamilyDiagnostics d;
    for (std::size_t i = 0; i < fam.sets.size(); ++i)
        for (std::size_t j = i + 1; j < fam.sets.size(); ++j)
            if (!setops::intersect(fam.sets[i], fam.sets[j]).empty())
                d.disjoint = false;
    for (std::size_t i = 0; i < fam.sets.size(); ++i)
        if (maximal_weakly_invariant(g, fam.sets[i]) != fam.sets[i]) {
            d.all_weakly_invariant = false;
            d.not_invariant.push_back(static_cast<int>(i));
        }
    return d;
}

struct HomoclinicWitness {
    std::vector<int> cycle; // family indices, cyclic order (a self-loop is one entry)
    std::string description;
};

namespace detail {

/// Connection relation between family sets: R(i,j) holds when a bi-infinite
/// path exists whose alpha-limit meets set i, whose omega-limit meets set j,
/// and which visits a state outside both. The backward tail is a cycle
/// through a recurrent p in set i, the forward tail a cycle through a
/// recurrent q in set j; the outside state may sit on either cycle or the
/// connecting walk.
inline std::vector<std::vector<char>> connection_relation(const MultiflowGraph &g,
                                                          const InvariantFamily &fam) {
    const int nsets = static_cast<int>(fam.sets.size());
    const StateSet rec = detail::recurrent_states(g);
    const std::vector<StateSet> sccs = detail::strongly_connected_components(g);
    std::vector<int> scc_of(static_cast<std::size_t>(g.size()), -1);
    for (std::size_t c = 0; c < sccs.size(); ++c)
        for (int x : sccs[c])
            scc_of[static_cast<std::size_t>(x)] = static_cast<int>(c);

    std::vector<StateSet> fwd(static_cast<std::size_t>(g.size()));
    for (int x = 0; x < g.size(); ++x)
        fwd[static_cast<std::size_t>(x)] = detail::forward_closure(g.step, {x});

    std::vector<std::vector<char>> rel(static_cast<std::size_t>(nsets),
                                       std::vector<char>(static_cast<std::size_t>(nsets), 0));
    for (int i = 0; i < nsets; ++i) {
        const StateSet rec_i = setops::intersect(fam.sets[static_cast<std::size_t>(i)], rec);
        for (int j = 0; j < nsets; ++j) {
            const StateSet rec_j = setops::intersect(fam.sets[static_cast<std::size_t>(j)], rec);
            if (rec_i.empty() || rec_j.empty())
                continue;
            const StateSet both = setops::unite(fam.sets[static_cast<std::size_t>(i)],
                                                fam.sets[static_cast<std::size_t>(j)]);
            bool found = false;
            for (int p : rec_i) {
                if (found)
                    break;
                for (int q : rec_j) {
                    if (!setops::contains(fwd[static_cast<std::size_t>(p)], q))
                        continue;
                    // outside state on p's or q's own cycle (same SCC)
                    const auto scc_leaves = [&](int s) {
                        const StateSet &comp = sccs[static_cast<std::size_t>(
                            scc_of[static_cast<std::size_t>(s)])];
                        if (comp.size() == 1 && !detail::has_self_loop(g, s))
                            return false; // no cycle at all; cannot happen for recurrent s
                        return !setops::minus(comp, both).empty();
                    };
                    if (scc_leaves(p) || scc_leaves(q)) {
                        found = true;
                        break;
                    }
                    // outside state on some connecting walk p -> o -> q
                    for (int o : setops::minus(fwd[static_cast<std::size_t>(p)], both)) {
                        if (setops::contains(fwd[static_cast<std::size_t>(o)], q)) {
                            found = true;
                            break;
                        }
                    }
                    if (found)
                        break;
                }
            }
            rel[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = found ? 1 : 0;
        }
    }
    return rel;
}

inline std::optional<std::vector<int>> find_cycle(const std::vector<std::vector<char>> &rel) {
    const int n = static_cast<int>(rel.size());
    for (int i = 0; i < n; ++i)
        if (rel[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)])
            return std::vector<int>{i};
    // DFS with path recovery
    std::vector<int> color(static_cast<std::size_t>(n), 0), parent(static_cast<std::size_t>(n), -1);
    for (int root = 0; root < n; ++root) {
        if (color[static_cast<std::size_t>(root)] != 0)
            continue;
        std::vector<int> stack = {root};
        while (!stack.empty()) {
            const int v = stack.back();
            if (color[static_cast<std::size_t>(v)] == 0)
                color[static_cast<std::size_t>(v)] = 1;
            bool descended = false;
            for (int w = 0; w < n; ++w) {
                if (!rel[static_cast<std::size_t>(v)][static_cast<std::size_t>(w)])
                    continue;
                if (color[static_cast<std::size_t>(w)] == 1) {
                    std::vector<int> cyc = {w};
                    for (int u = v; u != w && u != -1; u = parent[static_cast<std::size_t>(u)])
                        cyc.push_back(u);
                    std::reverse(cyc.begin() + 1, cyc.end());
                    return cyc;
                }
                if (color[static_cast<std::size_t>(w)] == 0) {
                    parent[static_cast<std::size_t>(w)] = v;
                    stack.push_back(w);
                    descended = true;
                    break;
                }
            }
            if (!descended) {
                color[static_cast<std::size_t>(v)] = 2;
                stack.pop_back();
            }
        }
    }
    return std::nullopt;
}

} // namespace detail

/// Quotient connection digraph + cycle search. A returned witness is a
/// cyclic chain of family indices joined by outside-visiting connections.
inline std::optional<HomoclinicWitness> detect_homoclinic(const MultiflowGraph &g,
                                                          const InvariantFamily &fam) {
    if (fam.sets.empty())
        return std::nullopt;
    for (std::size_t i = 0; i < fam.sets.size(); ++i)
        for (std::size_t j = i + 1; j < fam.sets.size(); ++j)
            if (!setops::intersect(fam.sets[i], fam.sets[j]).empty())
                throw std::domain_error("detect_homoclinic: family sets must be disjoint");
    const auto rel = detail::connection_relation(g, fam);
    const auto cyc = detail::find_cycle(rel);
    if (!cyc)
        return std::nullopt;
    HomoclinicWitness w;
    w.cycle = *cyc;
    std::ostringstream os;
    os << "homoclinic chain through family sets:";
    for (int i : w.cycle)
        os << " "
           << (i < static_cast<int>(fam.labels.size()) ? fam.labels[static_cast<std::size_t>(i)]
                                                       : std::to_string(i));
    os << " -> back";
    w.description = os.str();
    return w;
}

struct GradientDiagnostics {
    bool gradient = false;
    std::vector<StateSet> uncovered_recurrent_classes; // (G1) failures
    std::optional<HomoclinicWitness> homoclinic;       // (G2) failure
};

/// (G1): every recurrent class lies inside one family set — on a finite
/// graph this is equivalent to every bi-infinite path's alpha and omega
/// limits settling into family sets. (G2): no homoclinic chain.
inline GradientDiagnostics is_dynamically_gradient(const MultiflowGraph &g,
                                                   const InvariantFamily &fam) {
    GradientDiagnostics diag;
    for (const StateSet &cls : detail::recurrent_classes(g)) {
        bool covered = false;
        for (const StateSet &s : fam.sets)
            if (setops::subset(cls, s)) {
                covered = true;
                break;
            }
        if (!covered)
            diag.uncovered_recurrent_classes.push_back(cls);
    }
    diag.homoclinic = detect_homoclinic(g, fam);
    diag.gradient = diag.uncovered_recurrent_classes.empty() && !diag.homoclinic;
    return diag;
}

struct ReorderFailure {
    int stage = 0;
    std::string reason;
    std::vector<StateSet> attractors_found;  // local attractors of the stage dynamics
    std::vector<StateSet> remaining_members; // family sets still unplaced
};

struct ReorderResult {
    bool ok = false;
    std::vector<int> order; // original family indices, attractor first
    InvariantFamily reordered;
    std::optional<ReorderFailure> failure;
};

/// Reorders a dynamically gradient family so connections only run from
/// higher to strictly lower index: emit a member that is a local attractor
/// of the current dynamics, restrict the dynamics to its repeller (deleting
/// states outside it), recurse. A stage with no attractor among the members
/// is surfaced as a structured failure witness.
inline ReorderResult reorder_morse(const MultiflowGraph &g, const InvariantFamily &fam) {
    {
        const GradientDiagnostics diag = is_dynamically_gradient(g, fam);
        if (!diag.gradient)
            throw std::domain_error("reorder_morse: family is not dynamically gradient");
    }
    ReorderResult result;
    MultiflowGraph cur = g;
    std::vector<int> to_parent; // current index -> original index
    for (int i = 0; i < g.size(); ++i)
        to_parent.push_back(i);
    std::vector<int> remaining;
    for (std::size_t i = 0; i < fam.sets.size(); ++i)
        remaining.push_back(static_cast<int>(i));

    int stage = 0;
    while (!remaining.empty()) {
        // translate family sets into current coordinates
        std::vector<int> to_child(static_cast<std::size_t>(g.size()), -1);
        for (std::size_t i = 0; i < to_parent.size(); ++i)
            to_child[static_cast<std::size_t>(to_parent[i])] = static_cast<int>(i);
        const auto translate = [&](const StateSet &s) {
            StateSet out;
            for (int x : s) {
                const int nx = to_child[static_cast<std::size_t>(x)];
                if (nx >= 0)
                    out.push_back(nx);
            }
            return setops::normalize(std::move(out));
        };

        const std::vector<StateSet> atts = local_attractors(cur);
        int found = -1;
        StateSet found_set;
        for (int idx : remaining) {
            const StateSet local = translate(fam.sets[static_cast<std::size_t>(idx)]);
            for (const StateSet &a : atts)
                if (a == local) {
                    found = idx;
                    found_set = local;
                    break;
                }
            if (found >= 0)
                break;
        }
        if (found < 0) {
            ReorderFailure fail;
            fail.stage = stage;
            fail.reason = "no family member is a local attractor of the stage dynamics; "
                          "the family is not an isolated weakly invariant collection";
            for (const StateSet &a : atts) {
                StateSet orig;
                for (int x : a)
                    orig.push_back(to_parent[static_cast<std::size_t>(x)]);
                fail.attractors_found.push_back(setops::normalize(std::move(orig)));
            }
            for (int idx : remaining)
                fail.remaining_members.push_back(fam.sets[static_cast<std::size_t>(idx)]);
            result.failure = std::move(fail);
            return result;
        }

        result.order.push_back(found);
        result.reordered.sets.push_back(fam.sets[static_cast<std::size_t>(found)]);
        result.reordered.labels.push_back(
            static_cast<std::size_t>(found) < fam.labels.size()
                ? fam.labels[static_cast<std::size_t>(found)]
                : std::to_string(found));
        remaining.erase(std::find(remaining.begin(), remaining.end(), found));
        if (remaining.empty())
            break;

        const StateSet rep = repeller(cur, found_set);
        const detail::Subgraph sub = detail::induced_subgraph(cur, rep);
        std::vector<int> new_to_parent;
        for (int x : sub.to_parent)
            new_to_parent.push_back(to_parent[static_cast<std::size_t>(x)]);
        cur = sub.graph;
        cur.validate();
        to_parent = std::move(new_to_parent);
        ++stage;
    }
    result.ok = true;
    return result;
}

struct MorseChain {
    std::vector<StateSet> attractors;      // A_1 c A_2 c ... c A_n
    std::vector<StateSet> repellers;       // A_k^*
    std::vector<StateSet> morse_sets;      // M_k = A_k n A_{k-1}^*
    bool nested = false;
    bool all_local_attractors = false;
    bool identity_ok = false; // M_k equals the k-th reordered family set
};

/// Nested attractor chain induced by a reordered family:
/// A_k = forward closure of the recurrent states of the first k sets,
/// M_k = A_k n A_{k-1}^* with A_0^* = the global attractor.
inline MorseChain morse_decomposition_chain(const MultiflowGraph &g,
                                            const InvariantFamily &reordered) {
    MorseChain chain;
    const StateSet rec = detail::recurrent_states(g);
    StateSet seed;
    for (const StateSet &s : reordered.sets) {
        seed = setops::unite(seed, setops::intersect(s, rec));
        chain.attractors.push_back(detail::forward_closure(g.step, seed));
    }
    chain.nested = true;
    for (std::size_t k = 0; k + 1 < chain.attractors.size(); ++k)
        if (!setops::subset(chain.attractors[k], chain.attractors[k + 1]))
            chain.nested = false;
    chain.all_local_attractors = true;
    for (const StateSet &A : chain.attractors)
        if (!is_local_attractor(g, A))
            chain.all_local_attractors = false;
    if (!chain.all_local_attractors)
        return chain;

    chain.repellers.push_back(attractor(g)); // A_0^* over the empty attractor
    for (const StateSet &A : chain.attractors)
        chain.repellers.push_back(repeller(g, A));
    chain.identity_ok = true;
    for (std::size_t k = 0; k < chain.attractors.size(); ++k) {
        chain.morse_sets.push_back(setops::intersect(chain.attractors[k], chain.repellers[k]));
        if (chain.morse_sets.back() != reordered.sets[k])
            chain.identity_ok = false;
    }
    return chain;
}

struct EtaGraph {
    double eta = 0.0;
    MultiflowGraph graph;
};

struct EtaVerdict {
    double eta = 0.0;
    bool gradient = false;
    GradientDiagnostics diagnostics;
    std::vector<StateSet> derived_sets;
    std::vector<int> derived_empty;               // family indices with empty derived set
    std::vector<std::pair<int, int>> derived_overlap;
    std::vector<int> derived_disjoint_from_base;  // derived set misses its base set entirely
};

struct RobustnessReport {
    std::vector<EtaVerdict> verdicts; // in input (descending eta) order
    std::optional<double> eta0;       // largest eta below which all graphs are gradient
    std::optional<double> first_bad_eta;
    std::optional<double> stabilized_from_eta; // edge-set stabilization, the (H4) stand-in
    std::string note = "(H4) has no finite-graph analogue; edge-set stabilization "
                       "toward the base graph is reported as its stand-in";
};

/// Empirical robustness harness: per eta derives the perturbed family as the
/// maximal weakly invariant subset of each base set's discrete neighborhood
/// (the set itself, widened by the optional undirected adjacency), checks the
/// dynamically-gradient property, and reports the stable range.
inline RobustnessReport robustness_sweep(const std::vector<EtaGraph> &graphs,
                                         const InvariantFamily &base_family) {
    if (graphs.empty())
        throw std::domain_error("robustness_sweep: no graphs");
    for (std::size_t i = 0; i + 1 < graphs.size(); ++i)
        if (!(graphs[i].eta > graphs[i + 1].eta))
            throw std::domain_error("robustness_sweep: graphs must be ordered by eta descending");
    for (const EtaGraph &eg : graphs) {
        eg.graph.validate();
        if (eg.graph.size() != graphs.front().graph.size())
            throw std::domain_error("robustness_sweep: graphs must share the state set");
    }
    const MultiflowGraph &base = graphs.back().graph;
    {
        const GradientDiagnostics diag = is_dynamically_gradient(base, base_family);
        if (!diag.gradient)
            throw std::domain_error(
                "robustness_sweep: base family is not dynamically gradient for the base graph");
    }

    const auto neighborhood = [&](const MultiflowGraph &g, const StateSet &s) {
        if (g.neighbors.empty())
            return s; // radius < 1 ball in the discrete metric
        StateSet out = s;
        for (int x : s)
            for (int y : g.neighbors[static_cast<std::size_t>(x)])
                out.push_back(y);
        return setops::normalize(std::move(out));
    };

    RobustnessReport report;
    for (std::size_t k = 0; k < graphs.size(); ++k) {
        const MultiflowGraph &g = graphs[k].graph;
        EtaVerdict v;
        v.eta = graphs[k].eta;
        InvariantFamily derived;
        derived.labels = base_family.labels;
        const bool is_base = (k + 1 == graphs.size());
        for (std::size_t i = 0; i < base_family.sets.size(); ++i) {
            StateSet d = is_base ? base_family.sets[i]
                                 : maximal_weakly_invariant(g, neighborhood(g, base_family.sets[i]));
            if (d.empty())
                v.derived_empty.push_back(static_cast<int>(i));
            if (setops::intersect(d, base_family.sets[i]).empty() && !d.empty())
                v.derived_disjoint_from_base.push_back(static_cast<int>(i));
            derived.sets.push_back(std::move(d));
        }
        for (std::size_t i = 0; i < derived.sets.size(); ++i)
            for (std::size_t j = i + 1; j < derived.sets.size(); ++j)
                if (!setops::intersect(derived.sets[i], derived.sets[j]).empty())
                    v.derived_overlap.emplace_back(static_cast<int>(i), static_cast<int>(j));

        if (!v.derived_overlap.empty()) {
            v.gradient = false;
            v.diagnostics.gradient = false;
        } else {
            v.diagnostics = is_dynamically_gradient(g, derived);
            v.gradient = v.diagnostics.gradient;
        }
        v.derived_sets = derived.sets;
        report.verdicts.push_back(std::move(v));
    }

    // largest all-gradient suffix in the descending order = the stable range
    std::size_t first_good = report.verdicts.size();
    for (std::size_t k = report.verdicts.size(); k-- > 0;) {
        if (!report.verdicts[k].gradient)
            break;
        first_good = k;
    }
    if (first_good < report.verdicts.size())
        report.eta0 = report.verdicts[first_good].eta;
    for (const EtaVerdict &v : report.verdicts)
        if (!v.gradient) {
            report.first_bad_eta = v.eta;
            break;
        }

    std::size_t stable_from = graphs.size();
    for (std::size_t k = graphs.size(); k-- > 0;) {
        if (graphs[k].graph.step != base.step)
            break;
        stable_from = k;
    }
    if (stable_from < graphs.size())
        report.stabilized_from_eta = graphs[stable_from].eta;
    return report;
}

} // namespace morseflow
