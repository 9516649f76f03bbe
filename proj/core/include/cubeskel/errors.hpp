#pragma once

#include <stdexcept>
#include <string>

namespace cubeskel {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error { public: using Error::Error; };
class ParameterError : public Error { public: using Error::Error; };
class DomainError : public Error { public: using Error::Error; };
class SingularityError : public Error { public: using Error::Error; };
class PreconditionError : public Error { public: using Error::Error; };
class ProjectionError : public Error { public: using Error::Error; };
class ShapeError : public Error { public: using Error::Error; };
class FitError : public Error { public: using Error::Error; };
class SearchError : public Error { public: using Error::Error; };
class NonIntegrableError : public Error { public: using Error::Error; };
class IllConditionedError : public Error { public: using Error::Error; };
class NonIntegralError : public Error { public: using Error::Error; };
class UnsupportedError : public Error { public: using Error::Error; };
class RegularValueError : public Error { public: using Error::Error; };

} // namespace cubeskel
