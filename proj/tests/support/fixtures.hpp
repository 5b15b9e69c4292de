#pragma once

#include "torelli/torelli.hpp"

namespace fixture {

// Derived once per test binary.
inline const torelli::MonodromyCertificate& certificate() {
  static const torelli::MonodromyCertificate cert = torelli::derive_certificate();
  return cert;
}

inline const torelli::EisensteinMatrix& generator(int i) { return certificate().generators[i - 1].exact; }

}  // namespace fixture
