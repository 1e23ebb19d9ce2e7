// Copyright 2026 The zeno-dyn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <catch2/catch_amalgamated.hpp>

#include "support/test_support.hpp"

using namespace zeno;
using namespace zeno::testing;

TEST_CASE("trace norm on known operators") {
    CHECK(trace_norm(ComplexOperator::Identity(3, 3)) == Catch::Approx(3.0));
    CHECK(trace_norm(pauli_z()) == Catch::Approx(2.0));
    CHECK(trace_norm(ComplexOperator::Zero(2, 2)) == Catch::Approx(0.0).margin(1e-14));
}

TEST_CASE("trace norm of random Hermitian matches the eigenvalue oracle") {
    RngState rng(11);
    for (int rep = 0; rep < 10; ++rep) {
        const ComplexOperator a = random_hermitian(rng, 4);
        CHECK(trace_norm(a) == Catch::Approx(hermitian_trace_norm_oracle(a)).epsilon(1e-12));
    }
}

TEST_CASE("trace norm rejects non-finite input") {
    ComplexOperator a = ComplexOperator::Identity(2, 2);
    a(0, 1) = Complex(std::numeric_limits<double>::quiet_NaN(), 0.0);
    CHECK_THROWS_AS(trace_norm(a), ValidationError);
}

TEST_CASE("trace norm is a norm") {
    RngState rng(12);
    for (int rep = 0; rep < 10; ++rep) {
        const ComplexOperator a = random_complex_matrix(rng, 5, 5);
        const ComplexOperator b = random_complex_matrix(rng, 5, 5);
        const double na = trace_norm(a), nb = trace_norm(b);
        CHECK(na >= 0.0);
        CHECK(trace_norm(a + b) <= na + nb + 1e-10);
    }
}

TEST_CASE("tensor product basics") {
    CHECK(max_abs(tensor(ComplexOperator::Identity(2, 2), ComplexOperator::Identity(2, 2)) -
                  ComplexOperator::Identity(4, 4)) == 0.0);
    ComplexOperator a = ComplexOperator::Zero(2, 2), b = ComplexOperator::Zero(2, 2);
    a.diagonal() << 1, 2;
    b.diagonal() << 3, 4;
    ComplexOperator expected = ComplexOperator::Zero(4, 4);
    expected.diagonal() << 3, 4, 6, 8;
    CHECK(max_abs(tensor(a, b) - expected) == 0.0);
}

TEST_CASE("tensor matches the elementwise oracle and fixes the index convention") {
    CHECK(max_abs(tensor(pauli_x(), pauli_z()) - kron_oracle(pauli_x(), pauli_z())) == 0.0);
    RngState rng(13);
    const ComplexOperator a = random_complex_matrix(rng, 3, 3);
    const ComplexOperator b = random_complex_matrix(rng, 2, 2);
    const ComplexOperator t = tensor(a, b);
    CHECK(max_abs(t - kron_oracle(a, b)) < 1e-14);
    // Composite index (i_A i_B): entry (i_A*dimB + i_B, j_A*dimB + j_B).
    CHECK(t(1 * 2 + 0, 2 * 2 + 1) == a(1, 2) * b(0, 1));
}

TEST_CASE("partial trace over R") {
    RngState rng(14);
    const SubsystemShape shape{2, 3};
    SECTION("factorized inputs") {
        const ComplexOperator x = random_complex_matrix(rng, 2, 2);
        const ComplexOperator y = random_complex_matrix(rng, 3, 3);
        CHECK(max_abs(partial_trace_r(tensor(x, ComplexOperator::Identity(3, 3)), shape) -
                      3.0 * x) < 1e-13);
        const ComplexOperator traced =
            partial_trace_r(tensor(ComplexOperator::Identity(2, 2), y), shape);
        CHECK(max_abs(traced - y.trace() * ComplexOperator::Identity(2, 2)) < 1e-13);
    }
    SECTION("random input matches the contraction oracle and preserves trace") {
        const ComplexOperator a = random_complex_matrix(rng, 6, 6);
        const ComplexOperator traced = partial_trace_r(a, shape);
        CHECK(max_abs(traced - ptrace_r_oracle(a, 2, 3)) == 0.0);
        CHECK(std::abs(traced.trace() - a.trace()) < 1e-13);
    }
    SECTION("dimension mismatch") {
        CHECK_THROWS_AS(partial_trace_r(ComplexOperator::Identity(5, 5), shape), ValidationError);
    }
}

TEST_CASE("partial traces of tensor products recover scaled factors") {
    RngState rng(15);
    for (int rep = 0; rep < 8; ++rep) {
        const ComplexOperator x = random_complex_matrix(rng, 2, 2);
        const ComplexOperator y = random_complex_matrix(rng, 2, 2);
        const SubsystemShape shape{2, 2};
        const ComplexOperator prod = tensor(x, y);
        CHECK(max_abs(partial_trace_r(prod, shape) - y.trace() * x) < 1e-12);
        CHECK(max_abs(partial_trace_s(prod, shape) - x.trace() * y) < 1e-12);
    }
}

TEST_CASE("hermitian_eig on known matrices") {
    SECTION("diagonal") {
        ComplexOperator a = ComplexOperator::Zero(2, 2);
        a.diagonal() << 2, 1;
        const HermitianEig eig = hermitian_eig(a);
        CHECK(eig.values(0) == Catch::Approx(1.0));
        CHECK(eig.values(1) == Catch::Approx(2.0));
    }
    SECTION("sigma_x with the phase convention") {
        const HermitianEig eig = hermitian_eig(pauli_x());
        CHECK(eig.values(0) == Catch::Approx(-1.0));
        CHECK(eig.values(1) == Catch::Approx(1.0));
        const double s = 1.0 / std::sqrt(2.0);
        CHECK(std::abs(eig.vectors(0, 0) - Complex(s, 0)) < 1e-12);
        CHECK(std::abs(eig.vectors(1, 0) - Complex(-s, 0)) < 1e-12);
        CHECK(std::abs(eig.vectors(0, 1) - Complex(s, 0)) < 1e-12);
        CHECK(std::abs(eig.vectors(1, 1) - Complex(s, 0)) < 1e-12);
    }
    SECTION("reconstruction on random 8x8") {
        RngState rng(16);
        const ComplexOperator a = random_hermitian(rng, 8);
        const HermitianEig eig = hermitian_eig(a);
        const ComplexOperator rebuilt =
            eig.vectors * eig.values.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
        CHECK(max_abs(rebuilt - a) < 1e-10);
        CHECK(max_abs(eig.vectors.adjoint() * eig.vectors - ComplexOperator::Identity(8, 8)) <
              1e-12);
    }
    SECTION("non-Hermitian input rejected") {
        ComplexOperator a(2, 2);
        a << 0, 1, 0, 0;
        CHECK_THROWS_AS(hermitian_eig(a), ValidationError);
    }
}

TEST_CASE("unitary_step") {
    RngState rng(17);
    const ComplexOperator h = random_hermitian(rng, 4);
    SECTION("t = 0 gives the identity") {
        CHECK(max_abs(unitary_step(h, 0.0) - ComplexOperator::Identity(4, 4)) < 1e-12);
    }
    SECTION("diagonal exponential for sigma_z") {
        const ComplexOperator u = unitary_step(pauli_z(), M_PI / 2.0);
        CHECK(std::abs(u(0, 0) - std::exp(Complex(0, -M_PI / 2))) < 1e-12);
        CHECK(std::abs(u(1, 1) - std::exp(Complex(0, M_PI / 2))) < 1e-12);
        CHECK(std::abs(u(0, 1)) < 1e-14);
    }
    SECTION("group law and unitarity") {
        const ComplexOperator u1 = unitary_step(h, 0.7);
        const ComplexOperator u2 = unitary_step(h, 0.4);
        const ComplexOperator u12 = unitary_step(h, 1.1);
        CHECK(max_abs(u1 * u2 - u12) < 1e-10);
        CHECK(max_abs(u1.adjoint() * u1 - ComplexOperator::Identity(4, 4)) <= 1e-10);
    }
    SECTION("non-Hermitian input rejected") {
        ComplexOperator bad(2, 2);
        bad << 0, 1, 0, 0;
        CHECK_THROWS_AS(unitary_step(bad, 1.0), ValidationError);
    }
}

TEST_CASE("liouvillian_apply") {
    RngState rng(18);
    SECTION("commutator with itself vanishes") {
        const ComplexOperator h = random_hermitian(rng, 3);
        CHECK(max_abs(liouvillian_apply(h, h)) < 1e-14);
    }
    SECTION("Pauli algebra: -i[sigma_z, sigma_x] = 2 sigma_y") {
        CHECK(max_abs(liouvillian_apply(pauli_z(), pauli_x()) - 2.0 * pauli_y()) < 1e-14);
    }
    SECTION("finite differences of the Heisenberg conjugation") {
        const ComplexOperator h = random_hermitian(rng, 4);
        const ComplexOperator a = random_hermitian(rng, 4);
        const double dt = 1e-5;
        const ComplexOperator up = unitary_step(h, dt);
        const ComplexOperator um = unitary_step(h, -dt);
        const ComplexOperator derivative =
            (up * a * up.adjoint() - um * a * um.adjoint()) / (2.0 * dt);
        CHECK(max_abs(derivative - liouvillian_apply(h, a)) < 1e-6);
    }
    SECTION("output is traceless and Hermiticity preserving") {
        for (int rep = 0; rep < 6; ++rep) {
            const ComplexOperator h = random_hermitian(rng, 4);
            const ComplexOperator a = random_hermitian(rng, 4);
            const ComplexOperator out = liouvillian_apply(h, a);
            CHECK(std::abs(out.trace()) < 1e-12);
            CHECK(hermiticity_defect(out) < 1e-12);
        }
    }
    SECTION("dimension mismatch") {
        CHECK_THROWS_AS(
            liouvillian_apply(ComplexOperator::Identity(2, 2), ComplexOperator::Identity(3, 3)),
            ValidationError);
    }
}

TEST_CASE("DensityOperator validation") {
    RngState rng(19);
    SECTION("valid state accepted") {
        CHECK_NOTHROW(random_density(rng, 4));
    }
    SECTION("non-unit trace rejected") {
        CHECK_THROWS_AS(DensityOperator(0.7 * ComplexOperator::Identity(2, 2)), ValidationError);
    }
    SECTION("negative eigenvalue rejected") {
        ComplexOperator bad = ComplexOperator::Zero(2, 2);
        bad.diagonal() << 1.5, -0.5;
        CHECK_THROWS_AS(DensityOperator(bad), ValidationError);
    }
    SECTION("non-Hermitian rejected") {
        ComplexOperator bad = ComplexOperator::Identity(2, 2) * 0.5;
        bad(0, 1) = Complex(0.3, 0.0);
        CHECK_THROWS_AS(DensityOperator(bad), ValidationError);
    }
    SECTION("unnormalized variant keeps the running probability") {
        const DensityOperator partial =
            DensityOperator::unnormalized(0.25 * ComplexOperator::Identity(2, 2));
        CHECK(partial.trace() == Catch::Approx(0.5));
    }
}
