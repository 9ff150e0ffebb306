#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sqz/kernels.hpp"
#include "sqz/rng.hpp"

#include <cmath>
#include <vector>

using namespace sqz;
namespace k = sqz::kernels;

namespace {

std::vector<double> random_vec(Rng& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
    std::vector<double> v(n);
    for (double& x : v) x = lo + (hi - lo) * rng.uniform();
    return v;
}

bool close(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

} // namespace

TEST_CASE("dispatch reports a valid instruction set") {
    k::Isa isa = k::active_isa();
    CHECK((isa == k::Isa::scalar || isa == k::Isa::avx2));
    CHECK(k::isa_name(isa) != nullptr);
}

TEST_CASE("dot matches scalar reference across sizes") {
    Rng rng(11);
    // Sizes cover the 8-wide loop, the 4-wide loop and odd tails.
    for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 64u, 1000u, 1003u}) {
        auto x = random_vec(rng, n);
        auto y = random_vec(rng, n);
        double got = k::dot(x.data(), y.data(), n);
        double ref = k::detail::dot_scalar(x.data(), y.data(), n);
        CHECK(close(got, ref, 1e-12));
    }
}

TEST_CASE("axpy matches scalar reference across sizes") {
    Rng rng(12);
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 8u, 13u, 64u, 257u}) {
        auto x = random_vec(rng, n);
        auto y0 = random_vec(rng, n);
        double a = rng.uniform() * 4.0 - 2.0;
        auto got = y0;
        k::axpy(a, x.data(), got.data(), n);
        auto ref = y0;
        k::detail::axpy_scalar(a, x.data(), ref.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(close(got[i], ref[i], 1e-14));
    }
}

TEST_CASE("scale matches scalar reference") {
    Rng rng(13);
    for (std::size_t n : {0u, 1u, 4u, 6u, 31u, 128u}) {
        auto x0 = random_vec(rng, n);
        double a = rng.uniform() * 4.0 - 2.0;
        auto got = x0;
        k::scale(a, got.data(), n);
        auto ref = x0;
        k::detail::scale_scalar(a, ref.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(got[i] == doctest::Approx(ref[i]).epsilon(1e-15));
    }
}

TEST_CASE("matmul matches scalar reference on random shapes") {
    Rng rng(14);
    for (int trial = 0; trial < 40; ++trial) {
        std::size_t m = 1 + rng.below(9);
        std::size_t kk = 1 + rng.below(17);
        std::size_t n = 1 + rng.below(33);
        auto a = random_vec(rng, m * kk);
        auto b = random_vec(rng, kk * n);
        auto c0 = random_vec(rng, m * n);
        auto got = c0;
        k::matmul(a.data(), b.data(), got.data(), m, kk, n);
        auto ref = c0;
        k::detail::matmul_scalar(a.data(), b.data(), ref.data(), m, kk, n);
        for (std::size_t i = 0; i < m * n; ++i) CHECK(close(got[i], ref[i], 1e-12));
    }
}

TEST_CASE("matmul accumulates into C") {
    std::vector<double> a{1.0, 2.0};        // 1x2
    std::vector<double> b{3.0, 4.0};        // 2x1
    std::vector<double> c{10.0};            // 1x1
    k::matmul(a.data(), b.data(), c.data(), 1, 2, 1);
    CHECK(c[0] == doctest::Approx(10.0 + 1.0 * 3.0 + 2.0 * 4.0));
}

TEST_CASE("forcing scalar and re-forcing native gives the same results") {
    Rng rng(15);
    auto x = random_vec(rng, 37);
    auto y = random_vec(rng, 37);
    k::Isa original = k::active_isa();
    double native = k::dot(x.data(), y.data(), x.size());
    k::force_isa(k::Isa::scalar);
    double scalar = k::dot(x.data(), y.data(), x.size());
    k::force_isa(original);
    CHECK(close(native, scalar, 1e-12));
    CHECK(k::active_isa() == original);
}
