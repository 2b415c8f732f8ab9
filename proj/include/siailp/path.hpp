#pragma once

#include <vector>

#include "siailp/kg.hpp"

namespace siailp {

// A path is identified by its relation sequence alone; on-path entities are
// not part of the value. The empty sequence is reserved for the
// zero-embedding pseudo-path used when an entity has no out-reaching paths.
using Path = std::vector<RelationId>;

// Reverses the sequence and maps every relation through its inverse;
// an involution that maps s->t paths onto t->s paths.
inline Path inverse_path(const Path& p, const RelationVocab& relations) {
    Path out;
    out.reserve(p.size());
    for (auto it = p.rbegin(); it != p.rend(); ++it)
        out.push_back(relations.inverse_of(*it));
    return out;
}

}  // namespace siailp
