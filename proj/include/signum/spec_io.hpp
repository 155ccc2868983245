#pragma once

#include <json.hpp>

#include <span>
#include <string>
#include <vector>

#include "signum/dimension.hpp"
#include "signum/sequence.hpp"
#include "signum/sign.hpp"

namespace signum {

using Json = nlohmann::ordered_json;

/// ---- sequence-spec files ----
///
/// Plain-text, one "key = value" per line; '#' starts a comment; keys are
/// dotted paths. Every spec block takes:
///
///   family = explicit | power_decay | geometric | alternating |
///            interleaved | liouville
///   start  = <integer>            index of the first term
///   dim    = <integer>            required for explicit, else derived and
///                                 only validated when present
///
/// family parameters (vectors are comma-separated; scalars accept "p",
/// "p/q", or finite decimals):
///
///   power_decay   coeff = c1, ..., cd      a_n[i] = c_i * n^(-alpha_i)
///                 alpha = a1, ..., ad
///   geometric     coeff = c1, ..., cd      a_n[i] = c_i * ratio^n
///                 ratio = p/q              kept exact, |ratio| < 1
///   explicit      term.0 = x1, ..., xd     consecutive from 0; terms beyond
///                 term.1 = ...             the list are zero
///                 divergent = true|false   author-certified non-summability
///   alternating   inner.family = ...       nested block; a_n = (-1)^n inner(n)
///   interleaved   sub.0.family = ...       nested blocks, round-robin by
///                 sub.1.family = ...       index, evaluated at global n
///   log_decay     angle_seed = <integer>   seeded spinning unit directions
///                                          over 1/log(n+2) magnitudes
///   liouville     growth = tower | desk    g(k) = 10^(k^2) or k^2
///
/// Top level only:
///
///   levy_direction.0 = u1, ..., ud         declared unit directions, in
///   levy_direction.1 = ...                 declaration order
///
/// Unknown, duplicate, or misplaced keys fail with the offending line
/// number. Vector components are read exactly and then rounded once to
/// binary64; `ratio` alone stays an exact rational because it gets powered.

/// Parses spec text; `origin` names the source in diagnostics.
SequenceSpec parse_spec_text(const std::string& text, const std::string& origin);

/// Reads and parses a spec file. ParseError on I/O or syntax problems.
SequenceSpec load_spec_file(const std::string& path);

/// Canonical text form; parse_spec_text(spec_to_text(s)) reproduces every
/// term exactly. Doubles are written as exact rationals, so the output is
/// lossless but not pretty.
std::string spec_to_text(const SequenceSpec& spec);

/// ---- JSON artifacts ----
/// All artifacts carry schema_version "1" and are emitted with sorted-free
/// (insertion-ordered) keys and 2-space indentation, so equal inputs give
/// byte-identical files.

std::string json_to_text(const Json& artifact);
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

/// Cylinder measures round-trip through JSON so certificates can be checked
/// out-of-process. Omega atoms render as sign words; Theta atoms render as
/// '|'-joined canonical class representatives.
Json measure_to_json(const CylinderMeasure& mu);
CylinderMeasure measure_from_json(const Json& j);
CylinderMeasure load_measure_file(const std::string& path);

Json certificate_to_json(const DimensionCertificate& cert);

}  // namespace signum
