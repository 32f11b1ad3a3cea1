// Copyright 2026 The nulllab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "nulllab/operators.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "test_support.hpp"

using namespace nulllab;
using nulllab::testing::numbered_space;
using nulllab::testing::random_density;
using nulllab::testing::random_state;
using nulllab::testing::random_unitary;

namespace {

const Complex I(0.0, 1.0);
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

SpacePtr paths() { return HilbertSpace::make({"1", "2"}); }

void expect_amplitudes(const StateVector &psi, const std::vector<Complex> &expected, double tol = kExactTolerance) {
    ASSERT_EQ(psi.dim(), expected.size());
    for (std::size_t k = 0; k < expected.size(); ++k) {
        EXPECT_NEAR(std::abs(psi[k] - expected[k]), 0.0, tol) << "component " << k;
    }
}

}  // namespace

TEST(BeamSplitter, acts_on_basis_states) {
    auto s = paths();
    auto bs = beam_splitter(s);
    expect_amplitudes(apply(bs, StateVector::basis(s, "1")), {kInvSqrt2, I * kInvSqrt2});
    expect_amplitudes(apply(bs, StateVector::basis(s, "2")), {I * kInvSqrt2, kInvSqrt2});
    EXPECT_LE(unitarity_defect(bs.matrix()), kExactTolerance);
}

TEST(BeamSplitter, wrong_dimension) {
    try {
        beam_splitter(numbered_space(3));
        FAIL() << "expected WrongDimension";
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::WrongDimension);
    }
    EXPECT_THROW(mirror(numbered_space(4)), Error);
}

TEST(Mirror, examples) {
    auto s = paths();
    auto m = mirror(s);
    expect_amplitudes(apply(m, StateVector::basis(s, "2")), {I, 0.0});
    StateVector gamma(s, std::vector<Complex>{kInvSqrt2, I * kInvSqrt2});
    expect_amplitudes(apply(m, gamma), {-kInvSqrt2, I * kInvSqrt2});

    Eigen::MatrixXcd sq = m.matrix() * m.matrix();
    EXPECT_LE((sq + Eigen::MatrixXcd::Identity(2, 2)).cwiseAbs().maxCoeff(), kExactTolerance);
}

TEST(Apply, dud_interferometer_returns_minus_one) {
    auto s = paths();
    auto bs = beam_splitter(s);
    auto chain = then(then(bs, mirror(s)), bs);
    auto out = apply(chain, StateVector::basis(s, "1"));
    expect_amplitudes(out, {-1.0, 0.0});
    EXPECT_GE(std::norm(out[0]), 1.0 - kExactTolerance);

    // Same thing by hand with 2x2 arithmetic, step by step.
    Complex a = 1.0, b = 0.0;
    Complex a1 = kInvSqrt2 * (a + I * b), b1 = kInvSqrt2 * (I * a + b);
    Complex a2 = I * b1, b2 = I * a1;
    Complex a3 = kInvSqrt2 * (a2 + I * b2), b3 = kInvSqrt2 * (I * a2 + b2);
    EXPECT_NEAR(std::abs(out[0] - a3), 0.0, kExactTolerance);
    EXPECT_NEAR(std::abs(out[1] - b3), 0.0, kExactTolerance);
}

TEST(Apply, identity_and_mismatch) {
    std::mt19937_64 gen(21);
    auto s = numbered_space(5);
    auto psi = random_state(gen, s);
    auto out = apply(UnitaryOp::identity(s), psi);
    EXPECT_EQ(out.amplitudes(), psi.amplitudes());
    EXPECT_THROW(apply(UnitaryOp::identity(numbered_space(5, "t")), psi), Error);
    EXPECT_THROW(apply(UnitaryOp::identity(s), StateVector(s, Eigen::VectorXcd::Ones(5))), Error);
}

TEST(Apply, preserves_norm_property) {
    std::mt19937_64 gen(22);
    for (int trial = 0; trial < 1000; ++trial) {
        std::size_t dim = 2 + static_cast<std::size_t>(trial % 7);
        auto s = numbered_space(dim);
        UnitaryOp u(s, random_unitary(gen, dim), "random");
        auto out = apply(u, random_state(gen, s));
        EXPECT_NEAR(out.norm(), 1.0, kMatrixTolerance);
    }
}

TEST(UnitaryOp, rejects_non_unitary_and_bad_shape) {
    auto s = paths();
    Eigen::MatrixXcd m(2, 2);
    m << 1.0, 1.0, 0.0, 1.0;
    try {
        UnitaryOp(s, m, "shear");
        FAIL() << "expected NotUnitary";
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotUnitary);
    }
    EXPECT_THROW(UnitaryOp(s, Eigen::MatrixXcd::Identity(3, 3), "big"), Error);
}

TEST(SpinPathCoupler, deflects_by_spin) {
    auto spin = HilbertSpace::make({"up", "down"});
    auto path = HilbertSpace::make({"center", "upper", "lower"});
    auto sg = spin_path_coupler(spin, path);
    EXPECT_LE(unitarity_defect(sg.matrix()), kExactTolerance);

    const Complex c1(0.6, 0.0), c2(0.0, 0.8);
    auto in = tensor_product(StateVector(spin, std::vector<Complex>{c1, c2}), StateVector::basis(path, "center"));
    auto out = apply(sg, in);
    EXPECT_NEAR(std::abs(out.amplitude("up⊗upper") - c1), 0.0, kExactTolerance);
    EXPECT_NEAR(std::abs(out.amplitude("down⊗lower") - c2), 0.0, kExactTolerance);
    EXPECT_NEAR(std::norm(out.amplitude("up⊗upper")) + std::norm(out.amplitude("down⊗lower")), 1.0, kExactTolerance);

    auto up = apply(sg, StateVector::basis(sg.space(), "up⊗center"));
    EXPECT_DOUBLE_EQ(std::norm(up.amplitude("up⊗upper")), 1.0);

    EXPECT_THROW(spin_path_coupler(path, path), Error);
}

TEST(Superselect, examples) {
    auto s = paths();
    auto rho = density_from_state(StateVector(s, std::vector<Complex>{kInvSqrt2, I * kInvSqrt2}));
    auto out = superselect(rho, SuperselectionBasis::singletons(s));
    EXPECT_NEAR(std::abs(out(0, 0) - 0.5), 0.0, kExactTolerance);
    EXPECT_NEAR(std::abs(out(1, 1) - 0.5), 0.0, kExactTolerance);
    EXPECT_EQ(out(0, 1), Complex(0.0));
    EXPECT_EQ(out(1, 0), Complex(0.0));

    auto diag = density_from_state(StateVector::basis(s, "2"));
    EXPECT_EQ(superselect(diag, SuperselectionBasis::singletons(s)).matrix(), diag.matrix());
}

TEST(Superselect, blocks_must_partition) {
    auto s = numbered_space(3);
    EXPECT_THROW(SuperselectionBasis(s, {{"s1"}, {"s2"}}), Error);
    EXPECT_THROW(SuperselectionBasis(s, {{"s1", "s2"}, {"s2", "s3"}}), Error);
}

TEST(Superselect, keeps_in_block_coherence_and_is_idempotent_property) {
    std::mt19937_64 gen(23);
    for (int trial = 0; trial < 300; ++trial) {
        auto s = numbered_space(2 + trial % 7);
        auto rho = random_density(gen, s);
        std::vector<std::vector<std::string>> blocks(2);
        for (std::size_t k = 0; k < s->dim(); ++k) {
            blocks[k % 2].push_back(s->label(k));
        }
        SuperselectionBasis basis(s, blocks);
        auto once = superselect(rho, basis);
        auto twice = superselect(once, basis);
        EXPECT_EQ(once.matrix(), twice.matrix());
        EXPECT_NEAR(once.trace(), 1.0, kMatrixTolerance);
        EXPECT_GE(once.min_eigenvalue(), -kPsdTolerance);
        for (std::size_t r = 0; r < s->dim(); ++r) {
            for (std::size_t c = 0; c < s->dim(); ++c) {
                if (r % 2 == c % 2) {
                    EXPECT_EQ(once(r, c), rho(r, c));
                } else {
                    EXPECT_EQ(once(r, c), Complex(0.0));
                }
            }
        }
    }
}
