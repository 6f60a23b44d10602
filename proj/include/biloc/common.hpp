#ifndef BILOC_COMMON_HPP
#define BILOC_COMMON_HPP

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace biloc {

// Error taxonomy mirrored by the CLI exit codes.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SizeCapError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
// Internal invariant violations (not user errors).
struct InternalError : std::logic_error {
    using std::logic_error::logic_error;
};

// Worker count for parallel kernels. BILOC_THREADS=0 or unset picks the
// hardware count. Results are bitwise identical for any thread count: all
// parallel kernels write disjoint outputs and never reduce across threads.
int thread_count();

// Shortest decimal form that parses back to the identical double. Always
// contains '.' or an exponent so the text is unambiguous as a real literal.
std::string format_double(double v);

// Exact inverse of format_double; also accepts general decimal literals.
// Returns false on trailing garbage or empty input.
bool parse_double(std::string_view text, double& out);

// Deterministic RNG. The mt19937_64 engine sequence is pinned by the
// standard; the <random> distributions are not, so the mappings here are
// hand-rolled to keep seeded outputs identical across platforms.
class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t next_u64() { return engine_(); }

    // uniform in [0, 1), 53-bit resolution
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // uniform in {0, ..., bound-1}, bound >= 1 (rejection-free modulo is
    // fine here: bounds are tiny against 2^64)
    uint64_t next_below(uint64_t bound) { return next_u64() % bound; }

    // standard normal via Box-Muller
    double next_gaussian();

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace biloc

#endif
