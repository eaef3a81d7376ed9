#pragma once
#include <stdexcept>
#include <string>

namespace kzc {

// A prime at which a construction degenerates (a structural denominator or a
// Gram determinant vanishes mod p). Reported eagerly, never silently skipped.
struct ExceptionalPrime : std::runtime_error {
  unsigned long long p;
  std::string reason;
  ExceptionalPrime(unsigned long long prime, const std::string& why)
      : std::runtime_error("exceptional prime p=" + std::to_string(prime) + ": " + why),
        p(prime),
        reason(why) {}
};

} // namespace kzc
