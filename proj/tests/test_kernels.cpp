#include <doctest.h>

#include <cmath>
#include <random>

#include "gazekit/kernels.hpp"

using namespace gazekit;
using kernels::Isa;

namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

// Reductions are reassociated by the vector variants; the bound scales with
// the sum of magnitudes.
double reduction_tolerance(std::span<const double> terms) {
    double mag = 0.0;
    for (double t : terms) mag += std::abs(t);
    return 1e-13 * (mag + 1.0);
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("scalar variant is always available and active can be switched") {
    const auto isas = kernels::available_isas();
    REQUIRE_FALSE(isas.empty());
    CHECK(isas.front() == Isa::scalar);
    CHECK(kernels::isa_available(Isa::scalar));
    const Isa before = kernels::active().isa;
    kernels::set_active(Isa::scalar);
    CHECK(kernels::active().isa == Isa::scalar);
    kernels::set_active(before);
    CHECK(kernels::isa_name(Isa::avx2) == "avx2");
}

TEST_CASE("every available variant matches the scalar reference") {
    const auto& ref = kernels::table_for(Isa::scalar);
    std::mt19937_64 rng(11);
    for (Isa isa : kernels::available_isas()) {
        CAPTURE(kernels::isa_name(isa));
        const auto& t = kernels::table_for(isa);
        for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 15u, 16u, 17u, 33u, 257u, 1000u}) {
            CAPTURE(n);
            const auto a = random_vector(rng, n, -2.0, 2.0);
            const auto b = random_vector(rng, n, -2.0, 2.0);

            std::vector<double> prods(n);
            for (std::size_t i = 0; i < n; ++i) prods[i] = a[i] * b[i];
            CHECK(std::abs(t.dot(a.data(), b.data(), n) - ref.dot(a.data(), b.data(), n)) <=
                  reduction_tolerance(prods));
            CHECK(std::abs(t.sum(a.data(), n) - ref.sum(a.data(), n)) <= reduction_tolerance(a));
            CHECK(std::abs(t.min_sum(a.data(), b.data(), n) - ref.min_sum(a.data(), b.data(), n)) <=
                  reduction_tolerance(a) + reduction_tolerance(b));

            // Elementwise kernels are bit-identical across variants.
            std::vector<double> y1 = b;
            std::vector<double> y2 = b;
            t.axpy(0.37, a.data(), y1.data(), n);
            ref.axpy(0.37, a.data(), y2.data(), n);
            CHECK(y1 == y2);

            std::vector<double> m1(n);
            std::vector<double> m2(n);
            t.mul(a.data(), b.data(), m1.data(), n);
            ref.mul(a.data(), b.data(), m2.data(), n);
            CHECK(m1 == m2);

            std::vector<double> s1 = a;
            std::vector<double> s2 = a;
            t.scale(-1.5, s1.data(), n);
            ref.scale(-1.5, s2.data(), n);
            CHECK(s1 == s2);
        }
    }
}

TEST_CASE("scalar reference values") {
    const auto& t = kernels::table_for(Isa::scalar);
    const std::vector<double> a{1, 2, 3};
    const std::vector<double> b{4, -5, 6};
    CHECK(t.dot(a.data(), b.data(), 3) == 12.0);
    CHECK(t.sum(b.data(), 3) == 5.0);
    CHECK(t.min_sum(a.data(), b.data(), 3) == 1.0 - 5.0 + 3.0);
}

TEST_CASE("integer-valued reductions agree exactly") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> d(0, 255);
    std::vector<double> v(999);
    for (auto& x : v) x = d(rng);
    const double ref = kernels::table_for(Isa::scalar).sum(v.data(), v.size());
    for (Isa isa : kernels::available_isas()) CHECK(kernels::table_for(isa).sum(v.data(), v.size()) == ref);
}

}
