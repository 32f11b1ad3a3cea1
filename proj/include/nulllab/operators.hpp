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

#ifndef NULLLAB_OPERATORS_HPP
#define NULLLAB_OPERATORS_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "nulllab/common.hpp"
#include "nulllab/qstate.hpp"

namespace nulllab {

/// Largest entrywise deviation of U^dagger U from the identity.
inline double unitarity_defect(const Eigen::MatrixXcd &u) {
    Eigen::MatrixXcd d = u.adjoint() * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols());
    return d.cwiseAbs().maxCoeff();
}

class UnitaryOp {
   public:
    UnitaryOp(SpacePtr space, Eigen::MatrixXcd matrix, std::string name, double tolerance = kMatrixTolerance)
        : space_(std::move(space)), matrix_(std::move(matrix)), name_(std::move(name)), tolerance_(tolerance) {
        auto n = static_cast<Eigen::Index>(space_->dim());
        if (matrix_.rows() != n || matrix_.cols() != n) {
            throw Error(ErrorKind::WrongDimension, "operator '" + name_ + "' has the wrong shape for its space");
        }
        if (unitarity_defect(matrix_) > tolerance) {
            throw Error(ErrorKind::NotUnitary, "operator '" + name_ + "' is not unitary");
        }
    }

    static UnitaryOp identity(SpacePtr space) {
        auto n = static_cast<Eigen::Index>(space->dim());
        return {std::move(space), Eigen::MatrixXcd::Identity(n, n), "identity"};
    }

    const SpacePtr &space() const { return space_; }
    const Eigen::MatrixXcd &matrix() const { return matrix_; }
    const std::string &name() const { return name_; }
    /// Unitarity tolerance the matrix was accepted under.
    double tolerance() const { return tolerance_; }

   private:
    SpacePtr space_;
    Eigen::MatrixXcd matrix_;
    std::string name_;
    double tolerance_;
};

inline StateVector apply(const UnitaryOp &u, const StateVector &psi) {
    require_same_space(u.space(), psi.space(), "apply");
    if (!psi.is_normalized()) {
        throw Error(ErrorKind::NotNormalized, "apply expects a normalized state");
    }
    Eigen::VectorXcd out = u.matrix() * psi.amplitudes();
    // Typed-in matrices are accepted with a looser defect; keep the state on the unit sphere.
    if (u.tolerance() > kMatrixTolerance) {
        out /= out.norm();
    }
    return {psi.space(), std::move(out)};
}

/// The operator that applies `first` and then `second`.
inline UnitaryOp then(const UnitaryOp &first, const UnitaryOp &second) {
    require_same_space(first.space(), second.space(), "then");
    return {first.space(), second.matrix() * first.matrix(), first.name() + ";" + second.name(),
            std::max(kMatrixTolerance, 2.0 * std::max(first.tolerance(), second.tolerance()))};
}

namespace detail {
inline void require_dim(const SpacePtr &space, std::size_t dim, const char *what) {
    if (space->dim() != dim) {
        throw Error(ErrorKind::WrongDimension, std::string(what) + " needs a " + std::to_string(dim) +
                                                   "-dimensional space, got " + std::to_string(space->dim()));
    }
}
}  // namespace detail

/// Half-silvered mirror: transmission keeps the amplitude, reflection
/// multiplies it by i. |1> -> (|1> + i|2>)/sqrt2, |2> -> (i|1> + |2>)/sqrt2.
inline UnitaryOp beam_splitter(const SpacePtr &space) {
    detail::require_dim(space, 2, "beam_splitter");
    const double s = 1.0 / std::sqrt(2.0);
    const Complex i(0.0, 1.0);
    Eigen::MatrixXcd m(2, 2);
    m << s, s * i, s * i, s;
    return {space, std::move(m), "beam_splitter", kExactTolerance};
}

/// Pair of fully silvered mirrors exchanging the two paths, each reflection adding phase i.
inline UnitaryOp mirror(const SpacePtr &space) {
    detail::require_dim(space, 2, "mirror");
    const Complex i(0.0, 1.0);
    Eigen::MatrixXcd m(2, 2);
    m << 0.0, i, i, 0.0;
    return {space, std::move(m), "mirror", kExactTolerance};
}

/// Ideal Stern-Gerlach deflection on spin⊗path. Spin labels are (up, down) and
/// path labels are (center, upper, lower), both in declaration order. The
/// up component is shifted cyclically center -> upper -> lower -> center and
/// the down component by the inverse shift center -> lower -> upper -> center.
inline UnitaryOp spin_path_coupler(const SpacePtr &spin_space, const SpacePtr &path_space) {
    detail::require_dim(spin_space, 2, "spin_path_coupler spin factor");
    detail::require_dim(path_space, 3, "spin_path_coupler path factor");
    auto space = HilbertSpace::product(spin_space, path_space);
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(6, 6);
    for (Eigen::Index p = 0; p < 3; ++p) {
        m(0 * 3 + (p + 1) % 3, 0 * 3 + p) = 1.0;
        m(1 * 3 + (p + 2) % 3, 1 * 3 + p) = 1.0;
    }
    return {std::move(space), std::move(m), "spin_path_coupler", kExactTolerance};
}

/// Partition of the basis labels into outcome sectors.
class SuperselectionBasis {
   public:
    SuperselectionBasis(SpacePtr space, std::vector<std::vector<std::string>> blocks)
        : space_(std::move(space)), blocks_(std::move(blocks)), block_of_(space_->dim(), kUnassigned) {
        for (std::size_t b = 0; b < blocks_.size(); ++b) {
            for (const auto &label : blocks_[b]) {
                auto i = space_->index_of(label);
                if (block_of_[i] != kUnassigned) {
                    throw Error(ErrorKind::InvalidArgument, "superselection blocks overlap at '" + label + "'");
                }
                block_of_[i] = b;
            }
        }
        for (auto b : block_of_) {
            if (b == kUnassigned) {
                throw Error(ErrorKind::InvalidArgument, "superselection blocks do not cover the basis");
            }
        }
    }

    /// One block per basis label: the fully resolving measurement.
    static SuperselectionBasis singletons(const SpacePtr &space) {
        std::vector<std::vector<std::string>> blocks;
        for (const auto &label : space->labels()) {
            blocks.push_back({label});
        }
        return {space, std::move(blocks)};
    }

    const SpacePtr &space() const { return space_; }
    const std::vector<std::vector<std::string>> &blocks() const { return blocks_; }
    std::size_t block_of(std::size_t index) const { return block_of_.at(index); }

   private:
    static constexpr std::size_t kUnassigned = static_cast<std::size_t>(-1);
    SpacePtr space_;
    std::vector<std::vector<std::string>> blocks_;
    std::vector<std::size_t> block_of_;
};

/// Zeroes every coherence between different outcome sectors.
inline DensityMatrix superselect(const DensityMatrix &rho, const SuperselectionBasis &basis) {
    require_same_space(rho.space(), basis.space(), "superselect");
    Eigen::MatrixXcd out = rho.matrix();
    for (std::size_t r = 0; r < rho.dim(); ++r) {
        for (std::size_t c = 0; c < rho.dim(); ++c) {
            if (basis.block_of(r) != basis.block_of(c)) {
                out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = 0.0;
            }
        }
    }
    return {rho.space(), std::move(out)};
}

}  // namespace nulllab

#endif  // NULLLAB_OPERATORS_HPP
