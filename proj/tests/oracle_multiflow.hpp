#pragma once

// Brute-force reference implementations for tiny multivalued graphs. All
// answers are derived from explicit walk and image-set enumeration: the
// image-set orbit of the powerset map for omega-limits, and walk existence
// up to the pigeonhole length for cycles and bi-infinite paths. Nothing here
// shares code with the production engine.

#include <map>
#include <vector>

#include "morseflow/multiflow.hpp"

namespace oracle {

using morseflow::InvariantFamily;
using morseflow::MultiflowGraph;
using morseflow::StateSet;
namespace setops = morseflow::setops;

using Mask = unsigned;

inline Mask to_mask(const StateSet &s) {
    Mask m = 0;
    for (int x : s)
        m |= 1u << x;
    return m;
}

inline StateSet to_set(Mask m, int n) {
    StateSet s;
    for (int i = 0; i < n; ++i)
        if (m & (1u << i))
            s.push_back(i);
    return s;
}

inline Mask image(const MultiflowGraph &g, Mask m) {
    Mask out = 0;
    for (int x = 0; x < g.size(); ++x)
        if (m & (1u << x))
            for (int y : g.step[static_cast<std::size_t>(x)])
                out |= 1u << y;
    return out;
}

/// omega(B) = states contained in image^t(B) for infinitely many t: detect
/// the cycle of the image-set orbit and union the masks on the cycle.
inline StateSet omega_of_mask(const MultiflowGraph &g, Mask start) {
    std::map<Mask, int> first_seen;
    std::vector<Mask> orbit;
    Mask cur = start;
    for (;;) {
        auto [it, fresh] = first_seen.emplace(cur, static_cast<int>(orbit.size()));
        if (!fresh) {
            Mask acc = 0;
            for (std::size_t t = static_cast<std::size_t>(it->second); t < orbit.size(); ++t)
                acc |= orbit[t];
            return to_set(acc, g.size());
        }
        orbit.push_back(cur);
        cur = image(g, cur);
    }
}

inline StateSet omega(const MultiflowGraph &g, int x) { return omega_of_mask(g, 1u << x); }

inline StateSet omega_set(const MultiflowGraph &g, const StateSet &B) {
    return omega_of_mask(g, to_mask(B));
}

inline StateSet attractor(const MultiflowGraph &g) {
    return omega_of_mask(g, (1u << g.size()) - 1u);
}

/// exact-length reachability by literal iteration (no cycle folding)
inline StateSet reach_exact(const MultiflowGraph &g, int t, int x) {
    Mask m = 1u << x;
    for (int i = 0; i < t; ++i)
        m = image(g, m);
    return to_set(m, g.size());
}

/// x -> y by a walk of length in [1, cap]; cap defaults to |states|
inline bool reaches(const MultiflowGraph &g, int x, int y, int cap = -1) {
    if (cap < 0)
        cap = g.size();
    Mask m = 1u << x;
    for (int t = 1; t <= cap; ++t) {
        m = image(g, m);
        if (m & (1u << y))
            return true;
    }
    return false;
}

inline bool recurrent(const MultiflowGraph &g, int x) { return reaches(g, x, x); }

/// local attractors straight from the definition: nonempty A with
/// omega(A n attractor) = A, enumerated over every subset of the states
inline std::vector<StateSet> local_attractors(const MultiflowGraph &g) {
    const Mask amask = to_mask(oracle::attractor(g));
    std::vector<StateSet> out;
    for (Mask m = 1; m < (1u << g.size()); ++m) {
        const StateSet w = omega_of_mask(g, m & amask);
        if (to_mask(w) == m)
            out.push_back(w);
    }
    std::sort(out.begin(), out.end(), [](const StateSet &a, const StateSet &b) {
        if (a.size() != b.size())
            return a.size() < b.size();
        return a < b;
    });
    return out;
}

inline StateSet repeller(const MultiflowGraph &g, const StateSet &A) {
    StateSet out;
    for (int x : oracle::attractor(g))
        if (!setops::minus(omega(g, x), A).empty())
            out.push_back(x);
    return out;
}

/// bi-infinite path through x inside U: a forward walk of length |U| and a
/// backward walk of length |U| both confined to U (pigeonhole closes both
/// tails into cycles)
inline StateSet maximal_weakly_invariant(const MultiflowGraph &g, const StateSet &U) {
    const Mask umask = to_mask(U);
    const auto image_in = [&](Mask m, bool forward) {
        Mask out = 0;
        for (int x = 0; x < g.size(); ++x) {
            if (!(m & (1u << x)))
                continue;
            for (int y = 0; y < g.size(); ++y) {
                const bool edge = forward
                                      ? setops::contains(g.step[static_cast<std::size_t>(x)], y)
                                      : setops::contains(g.step[static_cast<std::size_t>(y)], x);
                if (edge)
                    out |= 1u << y;
            }
        }
        return out & umask;
    };
    StateSet out;
    for (int x : U) {
        Mask fwd = (1u << x) & umask;
        Mask bwd = fwd;
        for (std::size_t t = 0; t < U.size(); ++t) {
            fwd = image_in(fwd, true);
            bwd = image_in(bwd, false);
        }
        if (fwd != 0 && bwd != 0)
            out.push_back(x);
    }
    return out;
}

/// connection from family set i to family set j: recurrent p in set i (the
/// backward cycle), recurrent q in set j (the forward cycle), a walk p -> q,
/// and a state outside both sets on the walk or on either cycle
inline bool connects(const MultiflowGraph &g, const InvariantFamily &fam, int i, int j) {
    const StateSet both = setops::unite(fam.sets[static_cast<std::size_t>(i)],
                                        fam.sets[static_cast<std::size_t>(j)]);
    for (int p : fam.sets[static_cast<std::size_t>(i)]) {
        if (!recurrent(g, p))
            continue;
        for (int q : fam.sets[static_cast<std::size_t>(j)]) {
            if (!recurrent(g, q))
                continue;
            if (p != q && !reaches(g, p, q))
                continue;
            for (int o = 0; o < g.size(); ++o) {
                if (setops::contains(both, o))
                    continue;
                const bool on_walk = reaches(g, p, o) && reaches(g, o, q);
                const bool on_p_cycle = reaches(g, p, o) && reaches(g, o, p);
                const bool on_q_cycle = reaches(g, q, o) && reaches(g, o, q);
                if (on_walk || on_p_cycle || on_q_cycle)
                    return true;
            }
        }
    }
    return false;
}

inline bool has_homoclinic(const MultiflowGraph &g, const InvariantFamily &fam) {
    const int n = static_cast<int>(fam.sets.size());
    std::vector<std::vector<char>> rel(static_cast<std::size_t>(n),
                                       std::vector<char>(static_cast<std::size_t>(n), 0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            rel[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                connects(g, fam, i, j) ? 1 : 0;
    // cycle search by repeated squaring of the boolean relation
    std::vector<std::vector<char>> closure = rel;
    for (int pass = 0; pass < n; ++pass)
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k)
                if (closure[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)])
                    for (int j = 0; j < n; ++j)
                        if (rel[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)])
                            closure[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = 1;
    for (int i = 0; i < n; ++i)
        if (closure[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)])
            return true;
    return false;
}

/// the mutual-reachability class of a recurrent state
inline StateSet recurrence_class(const MultiflowGraph &g, int x) {
    StateSet cls = {x};
    for (int y = 0; y < g.size(); ++y)
        if (y != x && reaches(g, x, y) && reaches(g, y, x))
            cls.push_back(y);
    return setops::normalize(std::move(cls));
}

inline bool dynamically_gradient(const MultiflowGraph &g, const InvariantFamily &fam) {
    for (int x = 0; x < g.size(); ++x) {
        if (!recurrent(g, x))
            continue;
        const StateSet cls = recurrence_class(g, x);
        bool covered = false;
        for (const StateSet &s : fam.sets)
            if (setops::subset(cls, s)) {
                covered = true;
                break;
            }
        if (!covered)
            return false;
    }
    return !has_homoclinic(g, fam);
}

} // namespace oracle
