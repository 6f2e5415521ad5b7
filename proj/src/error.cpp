#include "psr/error.hpp"

#include <sstream>

namespace psr {

namespace {
std::string numerical_message(const std::string& what, double residual, int sweep) {
  std::ostringstream os;
  os << what;
  if (sweep >= 0) os << " (sweep " << sweep << ")";
  if (residual != 0.0) os << " [residual " << residual << "]";
  return os.str();
}
}  // namespace

NumericalError::NumericalError(const std::string& what, double residual, int sweep)
    : Error(ErrorKind::Numerical, numerical_message(what, residual, sweep)),
      residual_(residual),
      sweep_(sweep) {}

}  // namespace psr
