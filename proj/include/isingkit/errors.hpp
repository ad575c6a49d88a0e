#pragma once

#include <stdexcept>
#include <string>

namespace isingkit {

// Every library failure derives from Error; kind() is the stable name used in
// the CLI's JSON error output.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}
    const std::string& kind() const { return kind_; }

private:
    std::string kind_;
};

#define ISINGKIT_ERROR(Name)                                                  \
    class Name : public Error {                                               \
    public:                                                                   \
        explicit Name(const std::string& what) : Error(#Name, what) {}        \
    }

ISINGKIT_ERROR(InputError);
ISINGKIT_ERROR(EmbeddingError);
ISINGKIT_ERROR(BoundaryError);
ISINGKIT_ERROR(GeometryError);
ISINGKIT_ERROR(SizeError);
ISINGKIT_ERROR(ShapeError);
ISINGKIT_ERROR(DegenerateLineError);
ISINGKIT_ERROR(SheetError);
ISINGKIT_ERROR(NonIntegrableError);
ISINGKIT_ERROR(DomainError);
ISINGKIT_ERROR(DegenerateSpinorError);
ISINGKIT_ERROR(MCBudgetError);

#undef ISINGKIT_ERROR

} // namespace isingkit
