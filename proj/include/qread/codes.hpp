#pragma once

#include "qread/bch.hpp"
#include "qread/code.hpp"
#include "qread/rm.hpp"
#include "qread/rs.hpp"

namespace qread {

//! Defining set of a cyclic code; non-cyclic families are rejected.
inline std::set<unsigned> defining_set(const BlockCode& code) {
    if (const auto* rs = dynamic_cast<const ReedSolomonCode*>(&code))
        return rs->defining_set();
    if (const auto* bch = dynamic_cast<const BchCode*>(&code))
        return bch->defining_set();
    throw std::invalid_argument(code.name() +
                                " is not cyclic in this construction; "
                                "it has no defining set");
}

}  // namespace qread
