#pragma once

#include <stdexcept>
#include <string>

namespace maxcon {

// Base class for every error raised by this library. Each condition gets its
// own type so callers can catch precisely; the what() string carries context
// (node ids, offending values).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// graph
class DisconnectedGraph : public Error { public: using Error::Error; };
class SelfLoop : public Error { public: using Error::Error; };
class DuplicateEdge : public Error { public: using Error::Error; };
class InvalidEdge : public Error { public: using Error::Error; };
class EigensolverFailure : public Error { public: using Error::Error; };
class CouldNotConnect : public Error { public: using Error::Error; };

// nonlin
class InvalidShapeParameter : public Error { public: using Error::Error; };

// mapping
class EmptyVector : public Error { public: using Error::Error; };
class OverflowRisk : public Error { public: using Error::Error; };
class NonpositiveState : public Error { public: using Error::Error; };

// engine
class NonFiniteState : public Error { public: using Error::Error; };

// analysis
class StabilityViolated : public Error { public: using Error::Error; };
class DegenerateDerivative : public Error { public: using Error::Error; };
class InvalidErrorTarget : public Error { public: using Error::Error; };

// experiment specs / CLI
class SpecParse : public Error { public: using Error::Error; };

// generic precondition violation not covered by a named condition above
class InvalidParameter : public Error { public: using Error::Error; };

}  // namespace maxcon
