#include <iostream>

#include "biloc/acceptance.hpp"

int main() {
    const int failures = biloc::run_acceptance(std::cout);
    return failures == 0 ? 0 : 1;
}
