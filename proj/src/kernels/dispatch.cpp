#include <atomic>
#include <cstdlib>
#include <string>

#include "gazekit/error.hpp"
#include "gazekit/kernels.hpp"

namespace gazekit::kernels {
namespace {

bool cpu_supports(Isa isa) {
    switch (isa) {
        case Isa::scalar:
            return true;
        case Isa::avx2:
#if defined(GAZEKIT_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
        case Isa::neon:
#if defined(GAZEKIT_HAVE_NEON)
            return true;
#else
            return false;
#endif
    }
    return false;
}

const KernelTable* pick_initial() {
    if (const char* env = std::getenv("GAZEKIT_SIMD")) {
        const std::string want(env);
        for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
            if (want == isa_name(isa) && cpu_supports(isa)) return &table_for(isa);
        }
    }
    auto isas = available_isas();
    return &table_for(isas.back());
}

std::atomic<const KernelTable*>& current() {
    static std::atomic<const KernelTable*> ptr{pick_initial()};
    return ptr;
}

}  // namespace

std::string_view isa_name(Isa isa) {
    switch (isa) {
        case Isa::scalar:
            return "scalar";
        case Isa::avx2:
            return "avx2";
        case Isa::neon:
            return "neon";
    }
    return "unknown";
}

std::vector<Isa> available_isas() {
    std::vector<Isa> out{Isa::scalar};
    for (Isa isa : {Isa::avx2, Isa::neon}) {
        if (cpu_supports(isa)) out.push_back(isa);
    }
    return out;
}

bool isa_available(Isa isa) { return cpu_supports(isa); }

const KernelTable& table_for(Isa isa) {
    if (!cpu_supports(isa)) {
        throw ConfigError("SIMD variant '" + std::string(isa_name(isa)) + "' is not available on this CPU");
    }
    switch (isa) {
#if defined(GAZEKIT_HAVE_AVX2)
        case Isa::avx2:
            return avx2::table();
#endif
#if defined(GAZEKIT_HAVE_NEON)
        case Isa::neon:
            return neon::table();
#endif
        default:
            return scalar::table();
    }
}

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

void set_active(Isa isa) { current().store(&table_for(isa), std::memory_order_release); }

}  // namespace gazekit::kernels
