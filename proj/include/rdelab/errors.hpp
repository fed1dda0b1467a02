#pragma once

#include <stdexcept>
#include <string>

namespace rdelab {

// A computed object broke one of its proven structural properties. This is a
// numerical defect, not a user error; `invariant` names the property.
class InvariantViolation : public std::runtime_error {
 public:
  InvariantViolation(std::string invariant, const std::string& detail)
      : std::runtime_error(invariant + ": " + detail), invariant_(std::move(invariant)) {}

  const std::string& invariant() const { return invariant_; }

 private:
  std::string invariant_;
};

}  // namespace rdelab
