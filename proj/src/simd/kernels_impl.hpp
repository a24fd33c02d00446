#pragma once

#include "oeprop/simd.hpp"

namespace oeprop::simd::detail {

extern const KernelTable kScalarTable;
#if defined(OEPROP_HAVE_AVX2)
extern const KernelTable kAvx2Table;
#endif
#if defined(OEPROP_HAVE_NEON)
extern const KernelTable kNeonTable;
#endif

}  // namespace oeprop::simd::detail
