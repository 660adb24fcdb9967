#pragma once

#include <complex>

namespace fkac {

using Complex = std::complex<double>;

}  // namespace fkac
