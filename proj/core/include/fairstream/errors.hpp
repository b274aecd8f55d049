#pragma once

#include <stdexcept>

namespace fairstream {

#define FAIRSTREAM_ERROR(Name) \
  struct Name : std::runtime_error { using std::runtime_error::runtime_error; }

FAIRSTREAM_ERROR(IllegalDecision);
FAIRSTREAM_ERROR(OutOfRange);
FAIRSTREAM_ERROR(UnknownItem);
FAIRSTREAM_ERROR(BudgetExceeded);
FAIRSTREAM_ERROR(ClassMismatch);
FAIRSTREAM_ERROR(WrongAgentCount);
FAIRSTREAM_ERROR(DeadlineUnsupported);
FAIRSTREAM_ERROR(NotMonotone);
FAIRSTREAM_ERROR(UnknownAdversary);
FAIRSTREAM_ERROR(UnknownAlgorithm);
FAIRSTREAM_ERROR(ConfigError);
FAIRSTREAM_ERROR(ProtocolError);
FAIRSTREAM_ERROR(Timeout);

#undef FAIRSTREAM_ERROR

}  // namespace fairstream
