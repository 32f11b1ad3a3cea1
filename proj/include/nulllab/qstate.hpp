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

#ifndef NULLLAB_QSTATE_HPP
#define NULLLAB_QSTATE_HPP

// Dense states and density matrices over small Hilbert spaces whose basis
// vectors carry text labels. Label order is declaration order and is the
// order used everywhere else (sampling, printing, matrix layout).

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nulllab/common.hpp"

namespace nulllab {

class HilbertSpace;
using SpacePtr = std::shared_ptr<const HilbertSpace>;

/// Separator between factor labels of a tensor-product basis state.
inline constexpr std::string_view kTensorSeparator = "⊗";

inline std::string tensor_label(std::string_view a, std::string_view b) {
    std::string out(a);
    out += kTensorSeparator;
    out += b;
    return out;
}

class HilbertSpace {
   public:
    static SpacePtr make(std::vector<std::string> labels) {
        return SpacePtr(new HilbertSpace(std::move(labels), {}));
    }

    /// Product space a⊗b. The factor list is flattened, so (a⊗b)⊗c has three factors.
    static SpacePtr product(const SpacePtr &a, const SpacePtr &b) {
        std::vector<std::string> labels;
        labels.reserve(a->dim() * b->dim());
        for (const auto &la : a->labels()) {
            for (const auto &lb : b->labels()) {
                labels.push_back(tensor_label(la, lb));
            }
        }
        std::vector<SpacePtr> factors;
        auto append = [&factors](const SpacePtr &s) {
            if (s->is_product()) {
                factors.insert(factors.end(), s->factors().begin(), s->factors().end());
            } else {
                factors.push_back(s);
            }
        };
        append(a);
        append(b);
        return SpacePtr(new HilbertSpace(std::move(labels), std::move(factors)));
    }

    std::size_t dim() const { return labels_.size(); }
    const std::vector<std::string> &labels() const { return labels_; }
    const std::string &label(std::size_t i) const { return labels_.at(i); }

    std::optional<std::size_t> find(std::string_view label) const {
        auto it = index_.find(label);
        if (it == index_.end()) {
            return std::nullopt;
        }
        return it->second;
    }

    std::size_t index_of(std::string_view label) const {
        auto i = find(label);
        if (!i) {
            throw Error(ErrorKind::InvalidArgument, "no basis state labelled '" + std::string(label) + "'");
        }
        return *i;
    }

    /// Elementary factors; empty unless the space was built by product().
    const std::vector<SpacePtr> &factors() const { return factors_; }
    bool is_product() const { return !factors_.empty(); }

    friend bool operator==(const HilbertSpace &a, const HilbertSpace &b) {
        if (a.labels_ != b.labels_ || a.factors_.size() != b.factors_.size()) {
            return false;
        }
        for (std::size_t k = 0; k < a.factors_.size(); ++k) {
            if (!(*a.factors_[k] == *b.factors_[k])) {
                return false;
            }
        }
        return true;
    }

   private:
    HilbertSpace(std::vector<std::string> labels, std::vector<SpacePtr> factors)
        : labels_(std::move(labels)), factors_(std::move(factors)) {
        if (labels_.empty()) {
            throw Error(ErrorKind::InvalidArgument, "a Hilbert space needs at least one basis label");
        }
        for (std::size_t i = 0; i < labels_.size(); ++i) {
            if (!index_.emplace(labels_[i], i).second) {
                throw Error(ErrorKind::InvalidArgument, "duplicate basis label '" + labels_[i] + "'");
            }
        }
    }

    std::vector<std::string> labels_;
    std::vector<SpacePtr> factors_;
    std::map<std::string, std::size_t, std::less<>> index_;
};

inline bool same_space(const SpacePtr &a, const SpacePtr &b) {
    return a == b || (a && b && *a == *b);
}

inline void require_same_space(const SpacePtr &a, const SpacePtr &b, std::string_view what) {
    if (!same_space(a, b)) {
        throw Error(ErrorKind::SpaceMismatch, std::string(what) + ": operands live in different spaces");
    }
}

inline bool is_finite(Complex c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); }

class StateVector {
   public:
    StateVector(SpacePtr space, Eigen::VectorXcd amplitudes)
        : space_(std::move(space)), amplitudes_(std::move(amplitudes)) {
        if (!space_) {
            throw Error(ErrorKind::InvalidArgument, "state without a space");
        }
        if (static_cast<std::size_t>(amplitudes_.size()) != space_->dim()) {
            throw Error(ErrorKind::WrongDimension, "expected " + std::to_string(space_->dim()) + " amplitudes, got " +
                                                       std::to_string(amplitudes_.size()));
        }
        for (Eigen::Index i = 0; i < amplitudes_.size(); ++i) {
            if (!is_finite(amplitudes_[i])) {
                throw Error(ErrorKind::InvalidArgument, "non-finite amplitude");
            }
        }
    }

    StateVector(SpacePtr space, const std::vector<Complex> &amplitudes)
        : StateVector(std::move(space),
                      Eigen::VectorXcd(Eigen::Map<const Eigen::VectorXcd>(amplitudes.data(),
                                                                          static_cast<Eigen::Index>(amplitudes.size())))) {}

    static StateVector basis(SpacePtr space, std::size_t index) {
        if (index >= space->dim()) {
            throw Error(ErrorKind::InvalidArgument, "basis index out of range");
        }
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(space->dim()));
        v[static_cast<Eigen::Index>(index)] = 1.0;
        return {std::move(space), std::move(v)};
    }

    static StateVector basis(SpacePtr space, std::string_view label) {
        auto i = space->index_of(label);
        return basis(std::move(space), i);
    }

    /// Equal weight 1/sqrt(N) on every basis state.
    static StateVector uniform(SpacePtr space) {
        auto n = static_cast<Eigen::Index>(space->dim());
        Eigen::VectorXcd v = Eigen::VectorXcd::Constant(n, Complex(1.0 / std::sqrt(static_cast<double>(n)), 0.0));
        return {std::move(space), std::move(v)};
    }

    const SpacePtr &space() const { return space_; }
    std::size_t dim() const { return space_->dim(); }
    const Eigen::VectorXcd &amplitudes() const { return amplitudes_; }
    Complex operator[](std::size_t i) const { return amplitudes_[static_cast<Eigen::Index>(i)]; }
    Complex amplitude(std::string_view label) const { return (*this)[space_->index_of(label)]; }

    double norm() const { return amplitudes_.norm(); }
    bool is_normalized(double tol = kMatrixTolerance) const { return std::abs(norm() - 1.0) <= tol; }

   private:
    SpacePtr space_;
    Eigen::VectorXcd amplitudes_;
};

inline double norm(const StateVector &psi) { return psi.norm(); }

inline StateVector normalize(const StateVector &psi) {
    double n = psi.norm();
    if (n <= kExactTolerance) {
        throw Error(ErrorKind::ZeroVector, "cannot normalize a vector of norm " + std::to_string(n));
    }
    return {psi.space(), psi.amplitudes() / n};
}

/// <a|b>, antilinear in a.
inline Complex inner_product(const StateVector &a, const StateVector &b) {
    require_same_space(a.space(), b.space(), "inner_product");
    return a.amplitudes().dot(b.amplitudes());
}

inline StateVector tensor_product(const StateVector &a, const StateVector &b) {
    auto space = HilbertSpace::product(a.space(), b.space());
    Eigen::VectorXcd v(static_cast<Eigen::Index>(space->dim()));
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < a.amplitudes().size(); ++i) {
        for (Eigen::Index j = 0; j < b.amplitudes().size(); ++j) {
            v[k++] = a.amplitudes()[i] * b.amplitudes()[j];
        }
    }
    return {std::move(space), std::move(v)};
}

/// |<a|b>|^2 for normalized states; insensitive to global phase.
inline double fidelity_pure(const StateVector &a, const StateVector &b) {
    require_same_space(a.space(), b.space(), "fidelity_pure");
    if (!a.is_normalized() || !b.is_normalized()) {
        throw Error(ErrorKind::NotNormalized, "fidelity_pure expects normalized states");
    }
    return std::min(1.0, std::norm(inner_product(a, b)));
}

class DensityMatrix {
   public:
    /// Validates Hermiticity, unit trace and positive semidefiniteness.
    DensityMatrix(SpacePtr space, Eigen::MatrixXcd entries) : space_(std::move(space)), entries_(std::move(entries)) {
        auto n = static_cast<Eigen::Index>(space_->dim());
        if (entries_.rows() != n || entries_.cols() != n) {
            throw Error(ErrorKind::WrongDimension, "density matrix shape does not match its space");
        }
        for (Eigen::Index r = 0; r < n; ++r) {
            for (Eigen::Index c = 0; c < n; ++c) {
                if (!is_finite(entries_(r, c))) {
                    throw Error(ErrorKind::InvalidArgument, "non-finite density matrix entry");
                }
                if (std::abs(entries_(r, c) - std::conj(entries_(c, r))) > kMatrixTolerance) {
                    throw Error(ErrorKind::NotHermitian, "density matrix is not Hermitian");
                }
            }
        }
        if (std::abs(entries_.trace() - Complex(1.0)) > kMatrixTolerance) {
            throw Error(ErrorKind::InvalidArgument, "density matrix trace differs from 1");
        }
        if (min_eigenvalue() < -kPsdTolerance) {
            throw Error(ErrorKind::InvalidArgument, "density matrix is not positive semidefinite");
        }
    }

    const SpacePtr &space() const { return space_; }
    std::size_t dim() const { return space_->dim(); }
    const Eigen::MatrixXcd &matrix() const { return entries_; }
    Complex operator()(std::size_t r, std::size_t c) const {
        return entries_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }

    double trace() const { return entries_.trace().real(); }
    double purity() const { return (entries_ * entries_).trace().real(); }

    double min_eigenvalue() const {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(entries_, Eigen::EigenvaluesOnly);
        return solver.eigenvalues().minCoeff();
    }

   private:
    SpacePtr space_;
    Eigen::MatrixXcd entries_;
};

/// rho_nm = c_n conj(c_m).
inline DensityMatrix density_from_state(const StateVector &psi) {
    if (!psi.is_normalized()) {
        throw Error(ErrorKind::NotNormalized, "density_from_state expects a normalized state");
    }
    return {psi.space(), psi.amplitudes() * psi.amplitudes().adjoint()};
}

/// Reduces rho to the factors listed in `keep` (indices into space->factors()).
inline DensityMatrix partial_trace(const DensityMatrix &rho, std::span<const std::size_t> keep) {
    const auto &factors = rho.space()->factors();
    if (factors.empty()) {
        throw Error(ErrorKind::NotAProductSpace, "partial_trace needs a space built as a tensor product");
    }
    std::vector<bool> kept(factors.size(), false);
    for (auto k : keep) {
        if (k >= factors.size() || kept[k]) {
            throw Error(ErrorKind::InvalidArgument, "bad subsystem selector");
        }
        kept[k] = true;
    }
    if (keep.empty()) {
        throw Error(ErrorKind::InvalidArgument, "partial_trace must keep at least one factor");
    }

    std::vector<std::size_t> dims;
    for (const auto &f : factors) {
        dims.push_back(f->dim());
    }
    // Row-major digit decomposition of a flat index, first factor most significant.
    auto digits = [&dims](std::size_t flat) {
        std::vector<std::size_t> d(dims.size());
        for (std::size_t k = dims.size(); k-- > 0;) {
            d[k] = flat % dims[k];
            flat /= dims[k];
        }
        return d;
    };

    SpacePtr reduced;
    std::vector<std::size_t> order(keep.begin(), keep.end());
    std::sort(order.begin(), order.end());
    for (auto k : order) {
        reduced = reduced ? HilbertSpace::product(reduced, factors[k]) : factors[k];
    }
    auto compose = [&](const std::vector<std::size_t> &d) {
        std::size_t flat = 0;
        for (auto k : order) {
            flat = flat * dims[k] + d[k];
        }
        return flat;
    };
    auto traced_key = [&](const std::vector<std::size_t> &d) {
        std::size_t flat = 0;
        for (std::size_t k = 0; k < dims.size(); ++k) {
            if (!kept[k]) {
                flat = flat * dims[k] + d[k];
            }
        }
        return flat;
    };

    auto n = static_cast<Eigen::Index>(reduced->dim());
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
    const std::size_t total = rho.dim();
    for (std::size_t r = 0; r < total; ++r) {
        auto dr = digits(r);
        for (std::size_t c = 0; c < total; ++c) {
            auto dc = digits(c);
            if (traced_key(dr) != traced_key(dc)) {
                continue;
            }
            out(static_cast<Eigen::Index>(compose(dr)), static_cast<Eigen::Index>(compose(dc))) += rho(r, c);
        }
    }
    return {std::move(reduced), std::move(out)};
}

inline DensityMatrix partial_trace(const DensityMatrix &rho, std::initializer_list<std::size_t> keep) {
    return partial_trace(rho, std::span<const std::size_t>(keep.begin(), keep.size()));
}

struct Eigenspace {
    double eigenvalue = 0.0;
    std::vector<std::string> labels;
};

/// A diagonal observable given by eigenvalues on a partition of the basis labels.
class Observable {
   public:
    Observable(SpacePtr space, std::vector<Eigenspace> eigenspaces)
        : space_(std::move(space)), eigenspaces_(std::move(eigenspaces)), values_(space_->dim()) {
        std::vector<bool> seen(space_->dim(), false);
        for (const auto &e : eigenspaces_) {
            for (const auto &label : e.labels) {
                auto i = space_->index_of(label);
                if (seen[i]) {
                    throw Error(ErrorKind::InvalidArgument, "eigenspaces overlap at '" + label + "'");
                }
                seen[i] = true;
                values_[i] = e.eigenvalue;
            }
        }
        if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
            throw Error(ErrorKind::InvalidArgument, "eigenspaces do not cover every basis label");
        }
    }

    const SpacePtr &space() const { return space_; }
    const std::vector<Eigenspace> &eigenspaces() const { return eigenspaces_; }
    double eigenvalue_at(std::size_t index) const { return values_.at(index); }

    Eigen::MatrixXcd matrix() const {
        Eigen::VectorXcd d(static_cast<Eigen::Index>(values_.size()));
        for (std::size_t i = 0; i < values_.size(); ++i) {
            d[static_cast<Eigen::Index>(i)] = values_[i];
        }
        return d.asDiagonal();
    }

   private:
    SpacePtr space_;
    std::vector<Eigenspace> eigenspaces_;
    std::vector<double> values_;
};

/// <psi|F|psi> = sum_n f_n |c_n|^2.
inline double expectation(const StateVector &psi, const Observable &obs) {
    require_same_space(psi.space(), obs.space(), "expectation");
    if (!psi.is_normalized()) {
        throw Error(ErrorKind::NotNormalized, "expectation expects a normalized state");
    }
    double sum = 0.0;
    for (std::size_t n = 0; n < psi.dim(); ++n) {
        sum += obs.eigenvalue_at(n) * std::norm(psi[n]);
    }
    return sum;
}

/// Tr(rho F).
inline double expectation(const DensityMatrix &rho, const Observable &obs) {
    require_same_space(rho.space(), obs.space(), "expectation");
    return (rho.matrix() * obs.matrix()).trace().real();
}

}  // namespace nulllab

#endif  // NULLLAB_QSTATE_HPP
