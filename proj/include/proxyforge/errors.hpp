#pragma once

#include <stdexcept>
#include <string>

namespace proxyforge {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define PROXYFORGE_DEFINE_ERROR(NAME)                                   \
    class NAME : public Error {                                         \
    public:                                                             \
        explicit NAME(const std::string& msg) : Error(msg) {}           \
    }

PROXYFORGE_DEFINE_ERROR(ZeroVectorError);          // vector with zero Euclidean norm
PROXYFORGE_DEFINE_ERROR(DimensionMismatchError);   // vectors of different dimension compared
PROXYFORGE_DEFINE_ERROR(UnknownClassError);        // class name outside the declared label set
PROXYFORGE_DEFINE_ERROR(EmptyBatchError);          // batch holds no item with a positive class
PROXYFORGE_DEFINE_ERROR(CountMismatchError);       // paired lists of different length
PROXYFORGE_DEFINE_ERROR(InvalidThresholdsError);   // alpha1 > alpha2
PROXYFORGE_DEFINE_ERROR(InsufficientClassesError); // fewer classes than the sampler needs
PROXYFORGE_DEFINE_ERROR(EmptyClassError);          // class with no samples
PROXYFORGE_DEFINE_ERROR(EmptySetError);            // empty item set where one is required
PROXYFORGE_DEFINE_ERROR(EmptyReferenceError);      // retrieval reference set empty after self-exclusion
PROXYFORGE_DEFINE_ERROR(InvalidFractionsError);    // split fractions invalid or not summing to 1
PROXYFORGE_DEFINE_ERROR(EmptyNameError);           // class name normalizes to the empty string
PROXYFORGE_DEFINE_ERROR(ValidationError);          // config, manifest or label-space invariant violated
PROXYFORGE_DEFINE_ERROR(IoError);                  // file could not be read or written

#undef PROXYFORGE_DEFINE_ERROR

} // namespace proxyforge
