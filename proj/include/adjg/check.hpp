#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace adjg::check {

struct CheckRow {
    std::string name;
    double measure = 0.0;    // worst case observed over the row's trials
    double threshold = 0.0;  // pass iff measure <= threshold
    bool pass = false;
};

// The correctness battery: transpose identities for every tangent/adjoint
// pair shipped here, forward-vs-reverse gradient equality, and the
// finite-difference and complex-step cross checks.
std::vector<CheckRow> standard_battery();

void print_table(const std::vector<CheckRow>& rows, std::ostream& os);

bool all_pass(const std::vector<CheckRow>& rows);

}  // namespace adjg::check
