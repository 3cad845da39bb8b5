#include "evade/errors.hpp"

namespace evade {

// implementation follows

} // namespace evade
