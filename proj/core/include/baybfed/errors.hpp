#pragma once

#include <stdexcept>
#include <string>

namespace baybfed {

// Base class for every failure raised by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A precondition on operation inputs was violated (sizes, counts, ranges).
struct InvalidInputError : Error {
    using Error::Error;
};

// The initial global model is constant; no usable baseline statistics exist.
struct DegenerateModelError : Error {
    using Error::Error;
};

// A scale parameter (standard deviation) was zero or negative.
struct InvalidScaleError : Error {
    using Error::Error;
};

// A vector could not be normalized into a probability distribution.
struct DegenerateDistributionError : Error {
    using Error::Error;
};

// A zero-norm vector reached a cosine or direction computation.
struct ZeroVectorError : Error {
    using Error::Error;
};

// An operation was called on a state that cannot support it.
struct InvalidStateError : Error {
    using Error::Error;
};

// Aggregation over an empty update set.
struct EmptyAggregationError : Error {
    using Error::Error;
};

// A configuration field failed validation; message names the field path.
struct ValidationError : Error {
    using Error::Error;
};

// Filesystem or serialization failure.
struct IoError : Error {
    using Error::Error;
};

}  // namespace baybfed
