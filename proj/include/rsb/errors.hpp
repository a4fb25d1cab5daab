#pragma once

#include <stdexcept>
#include <string>

namespace rsb {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define RSB_ERROR(Name)                  \
  struct Name : Error {                  \
    explicit Name(const std::string& m)  \
        : Error(#Name ": " + m) {}       \
  }

RSB_ERROR(InvalidTree);
RSB_ERROR(NoiseClash);
RSB_ERROR(UnknownLabel);
RSB_ERROR(NotSubcritical);
RSB_ERROR(MalformedLeft);
RSB_ERROR(IncompatiblePreparationMap);
RSB_ERROR(TheoremMismatch);
RSB_ERROR(StencilExceeded);
RSB_ERROR(DegenerateSamples);
RSB_ERROR(OrderTooLarge);
RSB_ERROR(SpecError);

#undef RSB_ERROR

}  // namespace rsb
