#include "biloc/common.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <thread>

namespace biloc {

int thread_count() {
    static const int cached = [] {
        long v = 0;
        if (const char* env = std::getenv("BILOC_THREADS")) {
            char* end = nullptr;
            v = std::strtol(env, &end, 10);
            if (end == env || v < 0) v = 0;
        }
        if (v == 0) v = static_cast<long>(std::thread::hardware_concurrency());
        if (v < 1) v = 1;
        if (v > 64) v = 64;
        return static_cast<int>(v);
    }();
    return cached;
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    std::string s(buf, res.ptr);
    if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
        s.find("inf") == std::string::npos && s.find("nan") == std::string::npos) {
        s += ".0";
    }
    return s;
}

bool parse_double(std::string_view text, double& out) {
    if (text.empty()) return false;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto res = std::from_chars(first, last, out);
    return res.ec == std::errc{} && res.ptr == last;
}

double Rng::next_gaussian() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u = 0.0, v = 0.0, s = 0.0;
    do {
        u = 2.0 * next_double() - 1.0;
        v = 2.0 * next_double() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
}

}  // namespace biloc
