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

namespace {

ComplexOperator basis_projector(Index dim, Index which) {
    ComplexOperator p = ComplexOperator::Zero(dim, dim);
    p(which, which) = 1.0;
    return p;
}

}  // namespace

TEST_CASE("validate") {
    SECTION("single identity Kraus") {
        const auto report = validate_kraus({ComplexOperator::Identity(3, 3)});
        CHECK(report.ok);
        CHECK(report.max_abs_deviation == 0.0);
    }
    SECTION("decay channel is complete") {
        CHECK(validate(decay_channel()).ok);
    }
    SECTION("M1 alone violates completeness: sum is the ground projector") {
        ComplexOperator m1 = ComplexOperator::Zero(3, 3);
        m1(0, 0) = 1.0;
        m1(1, 1) = 1.0;
        const auto report = validate_kraus({m1});
        CHECK_FALSE(report.ok);
        CHECK(report.max_abs_deviation == Catch::Approx(1.0));
        CHECK_THROWS_AS(KrausChannel({m1}), ValidationError);
    }
}

TEST_CASE("apply") {
    const KrausChannel decay = decay_channel();
    SECTION("identity channel acts trivially") {
        RngState rng(21);
        const ComplexOperator a = random_complex_matrix(rng, 4, 4);
        CHECK(max_abs(identity_channel(4).apply(a) - a) == 0.0);
    }
    SECTION("excited state decays to the ground mixture") {
        const ComplexOperator result = decay.apply(basis_projector(3, 2));
        ComplexOperator expected = ComplexOperator::Zero(3, 3);
        expected(0, 0) = 0.5;
        expected(1, 1) = 0.5;
        CHECK(max_abs(result - expected) < 1e-14);
    }
    SECTION("ground states are fixed") {
        CHECK(max_abs(decay.apply(basis_projector(3, 0)) - basis_projector(3, 0)) < 1e-14);
    }
    SECTION("preserves trace and Hermiticity on random inputs") {
        RngState rng(22);
        const KrausChannel channel = random_kraus_channel(rng, 4, 3);
        for (int rep = 0; rep < 8; ++rep) {
            const ComplexOperator a = random_hermitian(rng, 4);
            const ComplexOperator out = channel.apply(a);
            CHECK(std::abs(out.trace() - a.trace()) < 1e-12);
            CHECK(hermiticity_defect(out) < 1e-12);
        }
    }
    SECTION("does not increase the trace norm of Hermitian operators") {
        RngState rng(23);
        const KrausChannel channel = random_kraus_channel(rng, 5, 3);
        for (int rep = 0; rep < 8; ++rep) {
            const ComplexOperator a = random_hermitian(rng, 5);
            CHECK(trace_norm(channel.apply(a)) <= trace_norm(a) + 1e-10);
        }
    }
    SECTION("dimension mismatch") {
        CHECK_THROWS_AS(decay.apply(ComplexOperator::Identity(2, 2)), ValidationError);
    }
}

TEST_CASE("apply_dual") {
    const KrausChannel decay = decay_channel();
    SECTION("unitality") {
        CHECK(max_abs(decay.apply_dual(ComplexOperator::Identity(3, 3)) -
                      ComplexOperator::Identity(3, 3)) < 1e-14);
    }
    SECTION("adjoint pairing on random operators") {
        RngState rng(24);
        for (int rep = 0; rep < 10; ++rep) {
            const ComplexOperator a = random_complex_matrix(rng, 3, 3);
            const ComplexOperator b = random_complex_matrix(rng, 3, 3);
            const Complex lhs = (b * decay.apply(a)).trace();
            const Complex rhs = (decay.apply_dual(b) * a).trace();
            CHECK(std::abs(lhs - rhs) < 1e-10);
        }
    }
    SECTION("projective channels are self-dual") {
        RngState rng(25);
        const auto [channel, projectors] = random_projective_channel(rng, {2, 1});
        const ComplexOperator a = random_complex_matrix(rng, 3, 3);
        CHECK(max_abs(channel.apply(a) - channel.apply_dual(a)) < 1e-12);
    }
}

TEST_CASE("compose") {
    RngState rng(26);
    SECTION("identity composed with a channel acts identically") {
        const KrausChannel channel = random_kraus_channel(rng, 3, 2);
        const KrausChannel composed = compose(identity_channel(3), channel);
        const ComplexOperator a = random_complex_matrix(rng, 3, 3);
        CHECK(max_abs(composed.apply(a) - channel.apply(a)) < 1e-12);
    }
    SECTION("two unitary channels compose to the product unitary") {
        const ComplexOperator u = random_unitary(rng, 3);
        const ComplexOperator v = random_unitary(rng, 3);
        const KrausChannel composed = compose(KrausChannel({u}), KrausChannel({v}));
        REQUIRE(composed.size() == 1);
        CHECK(max_abs(composed.kraus()[0] - u * v) < 1e-12);
    }
    SECTION("composition equals sequential application") {
        const KrausChannel outer = random_kraus_channel(rng, 3, 2);
        const KrausChannel inner = random_kraus_channel(rng, 3, 3);
        const KrausChannel composed = compose(outer, inner);
        const ComplexOperator a = random_complex_matrix(rng, 3, 3);
        CHECK(max_abs(composed.apply(a) - outer.apply(inner.apply(a))) < 1e-10);
    }
    SECTION("two weak gauge measurements stay unital") {
        const ComplexOperator zz = tensor(pauli_z(), pauli_z());
        const ComplexOperator xi = tensor(pauli_x(), ComplexOperator::Identity(2, 2));
        const KrausChannel composed =
            compose(weak_pauli_measurement(zz, 0.3), weak_pauli_measurement(xi, 0.6));
        CHECK(max_abs(composed.apply(ComplexOperator::Identity(4, 4)) -
                      ComplexOperator::Identity(4, 4)) < 1e-12);
    }
    SECTION("Kraus-count cap") {
        Tolerances tols;
        tols.compose_cap = 3;
        const KrausChannel a = random_kraus_channel(rng, 2, 2);
        const KrausChannel b = random_kraus_channel(rng, 2, 2);
        CHECK_THROWS_AS(compose(a, b, tols), ValidationError);
    }
    SECTION("dimension mismatch") {
        CHECK_THROWS_AS(compose(identity_channel(2), identity_channel(3)), ValidationError);
    }
}

TEST_CASE("weak_pauli_measurement") {
    SECTION("zeta = 0 equals the projective measurement") {
        const ComplexOperator c = tensor(pauli_z(), pauli_z());
        const KrausChannel weak = weak_pauli_measurement(c, 0.0);
        const ComplexOperator plus = 0.5 * (ComplexOperator::Identity(4, 4) + c);
        const ComplexOperator minus = 0.5 * (ComplexOperator::Identity(4, 4) - c);
        const KrausChannel projective({plus, minus});
        RngState rng(27);
        const ComplexOperator a = random_complex_matrix(rng, 4, 4);
        CHECK(max_abs(weak.apply(a) - projective.apply(a)) < 1e-13);
    }
    SECTION("commuting operators pass through unchanged") {
        const KrausChannel weak = weak_pauli_measurement(pauli_z(), 0.7);
        CHECK(max_abs(weak.apply(pauli_z()) - pauli_z()) < 1e-14);
    }
    SECTION("anticommuting operator is damped by zeta") {
        const KrausChannel weak = weak_pauli_measurement(pauli_z(), 0.5);
        CHECK(max_abs(weak.apply(pauli_x()) - 0.5 * pauli_x()) < 1e-14);
    }
    SECTION("channel is unital") {
        const KrausChannel weak = weak_pauli_measurement(pauli_x(), 0.25);
        CHECK(max_abs(weak.apply(ComplexOperator::Identity(2, 2)) -
                      ComplexOperator::Identity(2, 2)) < 1e-14);
    }
    SECTION("non-involutions and bad zeta are rejected") {
        ComplexOperator not_involution = ComplexOperator::Identity(2, 2) * 2.0;
        CHECK_THROWS_AS(weak_pauli_measurement(not_involution, 0.1), ValidationError);
        CHECK_THROWS_AS(weak_pauli_measurement(pauli_z(), 1.0), ValidationError);
        CHECK_THROWS_AS(weak_pauli_measurement(pauli_z(), -0.1), ValidationError);
    }
}

TEST_CASE("sample_outcome") {
    const KrausChannel decay = decay_channel();
    SECTION("single-Kraus unitary channel always yields outcome 0") {
        RngState rng(28);
        const ComplexOperator u = random_unitary(rng, 3);
        const KrausChannel unitary({u});
        const DensityOperator rho = random_density(rng, 3);
        const OutcomeSample sample = sample_outcome(unitary, rho, rng);
        CHECK(sample.index == 0);
        CHECK(sample.probability == Catch::Approx(1.0));
        CHECK(max_abs(sample.post_state.matrix() - u * rho.matrix() * u.adjoint()) < 1e-12);
    }
    SECTION("excited state decays to either ground state with p = 1/2") {
        RngState rng(29);
        const DensityOperator excited(basis_projector(3, 2));
        int count_m2 = 0;
        const int draws = 10000;
        for (int i = 0; i < draws; ++i) {
            const OutcomeSample sample = sample_outcome(decay, excited, rng);
            REQUIRE((sample.index == 1 || sample.index == 2));
            CHECK(sample.probability == Catch::Approx(0.5));
            if (sample.index == 1) ++count_m2;
        }
        // Binomial three-sigma window around p = 1/2.
        const double sigma = std::sqrt(0.25 / draws);
        CHECK(std::abs(count_m2 / double(draws) - 0.5) < 3.0 * sigma);
    }
    SECTION("ground state never moves") {
        RngState rng(30);
        const DensityOperator ground(basis_projector(3, 0));
        for (int i = 0; i < 50; ++i) {
            const OutcomeSample sample = sample_outcome(decay, ground, rng);
            CHECK(sample.index == 0);
            CHECK(max_abs(sample.post_state.matrix() - ground.matrix()) < 1e-12);
        }
    }
    SECTION("outcome probabilities sum to one on any state") {
        RngState rng(31);
        for (int rep = 0; rep < 6; ++rep) {
            const KrausChannel channel = random_kraus_channel(rng, 4, 3);
            const DensityOperator rho = random_density(rng, 4);
            const std::vector<double> probs = outcome_probabilities(channel, rho.matrix());
            double total = 0.0;
            for (double p : probs) total += p;
            CHECK(total == Catch::Approx(1.0).margin(1e-9));
        }
    }
    SECTION("exact posterior mixture reproduces the non-selective map") {
        RngState rng(32);
        const KrausChannel channel = random_kraus_channel(rng, 3, 3);
        const DensityOperator rho = random_density(rng, 3);
        ComplexOperator mixture = ComplexOperator::Zero(3, 3);
        for (const auto& m : channel.kraus()) mixture += m * rho.matrix() * m.adjoint();
        CHECK(trace_norm(mixture - channel.apply(rho.matrix())) < 1e-10);
    }
}
