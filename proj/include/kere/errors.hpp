#pragma once

#include <stdexcept>
#include <string>

namespace kere {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define KERE_DEFINE_ERROR(Name)                                        \
    struct Name : Error {                                              \
        explicit Name(const std::string& msg) : Error(#Name ": " + msg) {} \
    }

KERE_DEFINE_ERROR(SurfaceMismatch);
KERE_DEFINE_ERROR(EmptyInput);
KERE_DEFINE_ERROR(NoLift);
KERE_DEFINE_ERROR(NonIntegerHolonomy);
KERE_DEFINE_ERROR(NonTrivialHomology);
KERE_DEFINE_ERROR(NotDegreeOne);
KERE_DEFINE_ERROR(DivergenceToPole);
KERE_DEFINE_ERROR(NotStationary);
KERE_DEFINE_ERROR(ChainStuck);
KERE_DEFINE_ERROR(ResidualTooLarge);
KERE_DEFINE_ERROR(ContinuityGapAtHalf);
KERE_DEFINE_ERROR(ThetaCommutationFailure);
KERE_DEFINE_ERROR(NormalFormError);
KERE_DEFINE_ERROR(BudgetExceeded);
KERE_DEFINE_ERROR(ConfigError);

#undef KERE_DEFINE_ERROR

}  // namespace kere
