// Umbrella header: the whole dead-core profile solver.
//
// Pipeline: params (exponent bookkeeping) -> fields (the two phase-plane
// vector fields and their critical points) -> seeds (manifold departure
// points) -> integrate (adaptive tracing with event detection) -> shoot
// (threshold couplings K0, KInf and the connection K*) -> profile (physical
// reconstruction, boundary laws, residuals, the independent oracle) ->
// certify (end-to-end solves and the certificate suite) -> io (deterministic
// serialization).

#pragma once

#include "params.hpp"     // IWYU pragma: export
#include "fields.hpp"     // IWYU pragma: export
#include "seeds.hpp"      // IWYU pragma: export
#include "integrate.hpp"  // IWYU pragma: export
#include "shoot.hpp"      // IWYU pragma: export
#include "profile.hpp"    // IWYU pragma: export
#include "certify.hpp"    // IWYU pragma: export
#include "io.hpp"         // IWYU pragma: export
