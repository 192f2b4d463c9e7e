#pragma once

#include <Eigen/Dense>

#include "smica/errors.hpp"

namespace smica {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// A d x T block of d-channel samples, one column per time step.
/// Entries are checked finite at construction and immutable afterwards.
class SignalMatrix {
public:
    explicit SignalMatrix(Matrix data) : data_(std::move(data)) {
        if (data_.rows() < 1 || data_.cols() < 1)
            throw InvalidInputError("SignalMatrix: need at least 1 channel and 1 sample");
        if (!data_.allFinite())
            throw InvalidInputError("SignalMatrix: non-finite entries");
    }

    const Matrix& data() const { return data_; }
    Index channels() const { return data_.rows(); }
    Index samples() const { return data_.cols(); }

    Vector column(Index t) const { return data_.col(t); }

private:
    Matrix data_;
};

}  // namespace smica
