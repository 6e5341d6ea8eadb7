#pragma once

#include <string>

namespace cssdual {

// Locale-independent decimal rendering with 17 significant digits
// (round-trip exact for binary64). All CSV/report writers go through this
// so identical runs produce identical bytes.
std::string fmt17(double v);

}  // namespace cssdual
