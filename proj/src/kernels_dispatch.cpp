#include "kgnr/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace kgnr::kernels {
namespace {

const Backend& pick() {
    const char* wanted = std::getenv("KGNR_SIMD");
    if (wanted != nullptr) {
        if (std::strcmp(wanted, "scalar") == 0) return scalar_backend();
        if (std::strcmp(wanted, "avx2") == 0) {
            if (const Backend* b = avx2_backend_if_available()) return *b;
            return scalar_backend();
        }
    }
    if (const Backend* b = avx2_backend_if_available()) return *b;
    return scalar_backend();
}

}  // namespace

const Backend& active() {
    static const Backend& chosen = pick();
    return chosen;
}

}  // namespace kgnr::kernels
