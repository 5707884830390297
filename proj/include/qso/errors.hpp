#pragma once

#include <stdexcept>
#include <string>

namespace qso {

/// Input does not describe a valid label, pattern, weight or configuration.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A q-number in a denominator vanished while its numerator did not.
class SingularityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An internal numerical invariant failed (e.g. a coefficient that must vanish
/// on the lattice boundary did not).
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No auxiliary weight with a usable denominator could be found.
class AuxSearchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Matrix shapes or generator counts disagree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace qso
