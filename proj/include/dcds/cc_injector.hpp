#pragma once

#include <string>

#include "dcds/analysis.hpp"
#include "dcds/ir.hpp"

namespace dcds {

/// Injects strict two-phase locking with NO_WAIT semantics into a
/// serial spec: shared/exclusive acquires before first access per
/// record, upgrades when a write follows a shared hold, nascent-target
/// elision, and one ReleaseAll on every path right before Return.
/// The rw table must have been computed for exactly this spec (analyze()),
/// including const and nascent flags.
SpecPtr inject_cc(const SpecPtr& spec, const RWSetTable& rw);

/// Removes every lock statement; inverse of inject_cc.
SpecPtr strip_cc(const SpecPtr& spec);

/// Static protocol checks over an injected spec. Returns an empty
/// string when all checks pass, otherwise a description of the first
/// violation. Verifies, per function and per path:
///   - two-phase: no Acquire/Upgrade after ReleaseAll,
///   - strictness: exactly one ReleaseAll, immediately before Return,
///   - coverage: every attribute access / non-nascent call is dominated
///     by a sufficient lock on its target,
///   - upgrades only after a shared hold on every incoming path.
std::string check_cc_protocol(const SpecPtr& spec);

}  // namespace dcds
