#include "aerial/error.hpp"

namespace aerial {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Usage:
      return "usage";
    case ErrorKind::Parse:
      return "parse";
    case ErrorKind::Integrity:
      return "integrity";
    case ErrorKind::Data:
      return "data";
    case ErrorKind::Internal:
      return "internal";
  }
  return "internal";
}

}  // namespace aerial
