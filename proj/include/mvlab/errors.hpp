#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mvlab {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define MVLAB_ERROR(Name)                   \
    struct Name : Error {                   \
        using Error::Error;                 \
    }

MVLAB_ERROR(CarrierError);
MVLAB_ERROR(AxiomError);
MVLAB_ERROR(NotAFilter);
MVLAB_ERROR(ProperFilterRequired);
MVLAB_ERROR(NonMaximalFilter);
MVLAB_ERROR(IndexSetMismatch);
MVLAB_ERROR(IndexOutOfRange);
MVLAB_ERROR(ScopeError);
MVLAB_ERROR(LanguageError);
MVLAB_ERROR(MissingTable);
MVLAB_ERROR(SearchTooLarge);
MVLAB_ERROR(TruncationError);
MVLAB_ERROR(SignatureError);
MVLAB_ERROR(InsufficientSpareIndices);
MVLAB_ERROR(ZeroElement);
MVLAB_ERROR(PremiseNotEntailed);

#undef MVLAB_ERROR

struct ParseError : Error {
    ParseError(const std::string& what, std::size_t pos)
        : Error(what + " at position " + std::to_string(pos)), position(pos) {}
    std::size_t position;
};

struct NotASubuniverse : Error {
    NotASubuniverse(const std::string& op, std::size_t element)
        : Error("not a subuniverse: " + op + " leaves the set at element " + std::to_string(element)),
          operation(op),
          witness(element) {}
    std::string operation;
    std::size_t witness;
};

}  // namespace mvlab
