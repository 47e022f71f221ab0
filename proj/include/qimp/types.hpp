#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace qimp {

using cplx = std::complex<double>;

inline constexpr cplx I_UNIT{0.0, 1.0};

// Basis-state index into a statevector. Qubit 0 is the least significant bit.
using basis_t = std::uint64_t;

} // namespace qimp
