#include "isingkit/parallel.hpp"

namespace isingkit {

int thread_count() {
    if (const char* s = std::getenv("ISING_SEMBED_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(s, &end, 10);
        if (end != s && *end == '\0' && v > 0) return static_cast<int>(std::min(v, 256L));
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

} // namespace isingkit
