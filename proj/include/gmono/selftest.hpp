#pragma once

#include <string>
#include <vector>

namespace gmono {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0;
};

// The acceptance criteria, one result per criterion, in order.
std::vector<CriterionResult> run_acceptance(unsigned seed = 20240601);

// Criteria whose literal statement contradicts an exact computation; they are
// reported as FAIL but do not make the suite exit nonzero under --allow-known.
const std::vector<int>& known_deviations();

}  // namespace gmono
