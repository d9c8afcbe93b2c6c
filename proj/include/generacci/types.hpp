#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <vector>

namespace generacci {

using BigInt = mpz_class;
using Rational = mpq_class;

// Decreasing index list, largest first.
using IndexList = std::vector<std::size_t>;

enum class Family { generacci, quilt };

}  // namespace generacci
