#pragma once

// Quick property suite behind `autoint selftest`.

#include <string>
#include <vector>

namespace autoint {

struct SelfCheck {
    std::string name;
    double value = 0.0;     ///< measured error
    double threshold = 0.0; ///< pass when value < threshold

    bool pass() const { return value < threshold; }
};

std::vector<SelfCheck> run_selftest();

} // namespace autoint
