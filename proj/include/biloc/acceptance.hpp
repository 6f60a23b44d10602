#ifndef BILOC_ACCEPTANCE_HPP
#define BILOC_ACCEPTANCE_HPP

#include <iosfwd>

namespace biloc {

// Runs the full acceptance suite, one pass/fail line per criterion.
// Returns the number of failed criteria.
int run_acceptance(std::ostream& out);

}  // namespace biloc

#endif
