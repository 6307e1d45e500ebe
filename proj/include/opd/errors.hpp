// Error taxonomy. Everything is a std::runtime_error subtype so call sites can
// catch broadly; the distinct types matter for tests and for CLI exit codes.
#pragma once

#include <stdexcept>
#include <string>

namespace opd {

struct Error : std::runtime_error {
  explicit Error(const std::string& m) : std::runtime_error(m) {}
};

// shape/object mismatches in category operations
struct DomainMismatch : Error {
  explicit DomainMismatch(const std::string& m) : Error("DomainMismatch: " + m) {}
};

// legs handed to a colimit do not satisfy the required compatibility squares
struct IncompatibleLegs : Error {
  explicit IncompatibleLegs(const std::string& m) : Error("IncompatibleLegs: " + m) {}
};

// operadic arity constraints violated (bad i, arity overflow, ...)
struct ArityMismatch : Error {
  explicit ArityMismatch(const std::string& m) : Error("ArityMismatch: " + m) {}
};

// tree surgery applied to an edge that is not inner
struct NotInnerEdge : Error {
  explicit NotInnerEdge(const std::string& m) : Error("NotInnerEdge: " + m) {}
};

// star/extended star requested at a vertex whose star touches the root edge
struct RootInStar : Error {
  explicit RootInStar(const std::string& m) : Error("RootInStar: " + m) {}
};

// requested value is not available at the configured truncation bounds
struct TruncationRequired : Error {
  explicit TruncationRequired(const std::string& m) : Error("TruncationRequired: " + m) {}
};

// internal consistency failure while gluing cube/cell legs; never expected on
// valid input, always indicates an implementation bug, so it is loud
struct NonCompatibleCube : Error {
  explicit NonCompatibleCube(const std::string& m) : Error("NonCompatibleCube: " + m) {}
};

// a cocone handed to an induced-morphism solver does not commute
struct IncompatibleCocone : Error {
  explicit IncompatibleCocone(const std::string& m) : Error("IncompatibleCocone: " + m) {}
};

// graphs over different object sets combined
struct ObjectSetMismatch : Error {
  explicit ObjectSetMismatch(const std::string& m) : Error("ObjectSetMismatch: " + m) {}
};

// an operation needed presentation data (cells) that the value does not carry
struct MissingPresentation : Error {
  explicit MissingPresentation(const std::string& m) : Error("MissingPresentation: " + m) {}
};

// malformed input file / CLI arguments
struct ParseError : Error {
  explicit ParseError(const std::string& m) : Error("ParseError: " + m) {}
};

}  // namespace opd
