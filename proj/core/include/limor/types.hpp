// Copyright The limor Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>

#include <Eigen/Core>

namespace limor
{

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

}  // namespace limor
