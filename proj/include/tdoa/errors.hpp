#pragma once

#include <stdexcept>
#include <string>

namespace tdoa {

struct TdoaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define TDOA_DEFINE_ERROR(Name)            \
  struct Name : TdoaError {                \
    using TdoaError::TdoaError;            \
  }

TDOA_DEFINE_ERROR(DegenerateConfig);
TDOA_DEFINE_ERROR(AtSensorError);
TDOA_DEFINE_ERROR(DependentForms);
TDOA_DEFINE_ERROR(DependentPlanes);
TDOA_DEFINE_ERROR(CoincidentPlanes);
TDOA_DEFINE_ERROR(NoRealRoots);
TDOA_DEFINE_ERROR(AmbiguousComponent);
TDOA_DEFINE_ERROR(IllConditioned);
TDOA_DEFINE_ERROR(OffPlane);

#undef TDOA_DEFINE_ERROR

}  // namespace tdoa
