#include "smt/errors.hpp"

namespace smt {

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Syntax:
    case ErrorKind::Reference:
    case ErrorKind::Duplicate:
    case ErrorKind::Validation:
    case ErrorKind::Characterization:
    case ErrorKind::Contract:
      return 2;
    case ErrorKind::InfeasibleTiming:
      return 3;
    case ErrorKind::InfeasibleClustering:
      return 4;
    case ErrorKind::Io:
      return 5;
    case ErrorKind::Internal:
      return 1;
  }
  return 1;
}

}  // namespace smt
