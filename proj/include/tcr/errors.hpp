#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tcr {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotImplementable : Error { using Error::Error; };
struct AgentMismatch : Error { using Error::Error; };
struct InvalidContext : Error { using Error::Error; };
struct ScheduleViolation : Error { using Error::Error; };
struct EventNotInRun : Error { using Error::Error; };
struct TriggerAbsent : Error { using Error::Error; };
struct InvalidPath : Error { using Error::Error; };
struct GroupOverlap : Error { using Error::Error; };
struct NotSolvable : Error { using Error::Error; };
struct PreconditionViolated : Error { using Error::Error; };
struct BudgetInsufficient : Error { using Error::Error; };
struct SpaceMismatch : Error { using Error::Error; };
struct DeltaNegInf : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };

struct CapExceeded : Error {
    CapExceeded(std::size_t reached, std::size_t cap)
        : Error("run enumeration needs " + std::to_string(reached) +
                " runs, cap is " + std::to_string(cap)),
          count(reached) {}
    std::size_t count;
};

} // namespace tcr
