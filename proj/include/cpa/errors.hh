/* errors.hh -- exception taxonomy shared by the whole library */
#pragma once

#include <stdexcept>
#include <string>

namespace cpa {

/// Root of every error raised by this library.  Catching `cpa::Error`
/// is sufficient to intercept any anticipated failure.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed textual input (model or relation files).  Carries a
/// 1-based line number; `col` is 0 when the whole line is at fault.
struct ParseError : Error {
  int line;
  int col;
  ParseError(int line_, int col_, const std::string& what)
      : Error("parse error at line " + std::to_string(line_) +
              (col_ > 0 ? ", column " + std::to_string(col_) : "") + ": " +
              what),
        line(line_),
        col(col_) {}
};

/// Structurally well-formed input that violates a semantic requirement
/// (bad mass, negative cost, duplicate declaration, ...).
struct ValidationError : Error {
  using Error::Error;
};

/// A candidate weighting function violates one of its defining
/// constraints.
struct WeightError : ValidationError {
  using ValidationError::ValidationError;
};

/// A relation file mixes `pair` and `class` records.
struct MixedRelationKinds : ValidationError {
  using ValidationError::ValidationError;
};

/// strong_combined_cost was given transitions that do not share source
/// and action.
struct MixedTransitions : ValidationError {
  using ValidationError::ValidationError;
};

/// A binary operation over two automata found an action that is
/// external on one side and internal on the other.
struct AlphabetClash : ValidationError {
  using ValidationError::ValidationError;
};

/// An automaton was expected to be an MDP (at most one transition per
/// state/action pair) but is not.
struct NotAnMdp : ValidationError {
  using ValidationError::ValidationError;
};

/// Two automata cannot be composed because an external action of one
/// is internal to the other.
struct Incompatible : ValidationError {
  using ValidationError::ValidationError;
};

/// Two automata passed to a binary operation declare incompatible
/// universes (e.g. a relation refers to states outside the union).
struct UniverseMismatch : ValidationError {
  using ValidationError::ValidationError;
};

struct UnknownState : ValidationError {
  using ValidationError::ValidationError;
};

struct UnknownAction : ValidationError {
  using ValidationError::ValidationError;
};

/// A scheduler or cost query names a (state, action) pair with no
/// outgoing transitions.
struct NoSuchTransitions : ValidationError {
  using ValidationError::ValidationError;
};

/// Vector/matrix dimensions disagree in the LP layer.
struct DimensionMismatch : ValidationError {
  using ValidationError::ValidationError;
};

/// Internal invariant failure: the simplex engine produced a result
/// that fails its own exact self-check.
struct NotOptimal : Error {
  using Error::Error;
};

/// A scheduler does not terminate with probability one, so its target
/// distribution or cost is undefined.
struct NonTerminating : ValidationError {
  using ValidationError::ValidationError;
};

/// An operation that requires an acyclic reachable structure met a
/// cycle.
struct CyclicModel : ValidationError {
  using ValidationError::ValidationError;
};

/// refine() was asked to split a class by a transition that does not
/// actually split it.
struct DegenerateSplit : Error {
  using Error::Error;
};

}  // namespace cpa
