/*
    Copyright (C) 2026 by the iges project

    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/
#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "iges/errors.hpp"

namespace iges {

/// Estimate and covariance of a linear-Gaussian filter.
template <typename Scalar>
struct KalmanStateT {
    using Vec = Eigen::Vector<Scalar, Eigen::Dynamic>;
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    Vec x;
    Mat p;
};

namespace detail {
template <typename Mat>
void symmetrize(Mat& p) {
    p = ((p + p.transpose()) / 2).eval();
}
}  // namespace detail

/// x <- F x + u, P <- F P F' + diag(q).
template <typename Scalar>
KalmanStateT<Scalar> kf_predict(const KalmanStateT<Scalar>& kf,
                                const typename KalmanStateT<Scalar>::Mat& f,
                                const typename KalmanStateT<Scalar>::Vec& u,
                                const typename KalmanStateT<Scalar>::Vec& q_diag) {
    KalmanStateT<Scalar> out;
    out.x = f * kf.x + u;
    out.p = f * kf.p * f.transpose();
    out.p.diagonal() += q_diag;
    detail::symmetrize(out.p);
    return out;
}

/// Joseph-form measurement update with diagonal R. Throws NumericFailure when
/// the innovation covariance is numerically singular.
template <typename Scalar>
KalmanStateT<Scalar> kf_update(const KalmanStateT<Scalar>& kf,
                               const typename KalmanStateT<Scalar>::Vec& z,
                               const typename KalmanStateT<Scalar>::Mat& h,
                               const typename KalmanStateT<Scalar>::Vec& r_diag) {
    using Mat = typename KalmanStateT<Scalar>::Mat;
    using Vec = typename KalmanStateT<Scalar>::Vec;
    const Eigen::Index n = kf.x.size();
    Mat ph_t = kf.p * h.transpose();
    Mat s = h * ph_t;
    s.diagonal() += r_diag;
    detail::symmetrize(s);
    // symmetric equilibration: channels carry wildly different units
    const Vec d_scale = s.diagonal().cwiseMax(Scalar{0}).cwiseSqrt().cwiseInverse();
    if (!d_scale.allFinite())
        throw NumericFailure("kf_update: innovation covariance has a non-positive diagonal");
    Mat s_tilde = d_scale.asDiagonal() * s * d_scale.asDiagonal();
    detail::symmetrize(s_tilde);
    Eigen::LDLT<Mat> ldlt(s_tilde);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
        throw NumericFailure("kf_update: innovation covariance is not positive definite");
    const auto d = ldlt.vectorD();
    if (d.minCoeff() <= d.maxCoeff() * Scalar{1e-15})
        throw NumericFailure("kf_update: innovation covariance is numerically singular");

    // K = P H' S^{-1}, with S^{-1} = D S~^{-1} D
    const Mat k =
        ldlt.solve(d_scale.asDiagonal() * ph_t.transpose()).transpose() * d_scale.asDiagonal();
    KalmanStateT<Scalar> out;
    out.x = kf.x + k * (z - h * kf.x);
    const Mat ikh = Mat::Identity(n, n) - k * h;
    out.p = ikh * kf.p * ikh.transpose() + k * r_diag.asDiagonal() * k.transpose();
    detail::symmetrize(out.p);
    return out;
}

/// Processes each measurement row on its own; with diagonal R this matches the
/// block update.
template <typename Scalar>
KalmanStateT<Scalar> kf_update_sequential(const KalmanStateT<Scalar>& kf,
                                          const typename KalmanStateT<Scalar>::Vec& z,
                                          const typename KalmanStateT<Scalar>::Mat& h,
                                          const typename KalmanStateT<Scalar>::Vec& r_diag) {
    using Vec = typename KalmanStateT<Scalar>::Vec;
    using Mat = typename KalmanStateT<Scalar>::Mat;
    KalmanStateT<Scalar> cur = kf;
    const Eigen::Index n = kf.x.size();
    for (Eigen::Index r = 0; r < z.size(); ++r) {
        const Vec hrow = h.row(r).transpose();
        const Vec ph = cur.p * hrow;
        const Scalar s = hrow.dot(ph) + r_diag[r];
        if (!(s > Scalar{0}))
            throw NumericFailure("kf_update_sequential: scalar innovation variance <= 0");
        const Vec k = ph / s;
        cur.x += k * (z[r] - hrow.dot(cur.x));
        const Mat ikh = Mat::Identity(n, n) - k * hrow.transpose();
        cur.p = ikh * cur.p * ikh.transpose() + r_diag[r] * k * k.transpose();
        detail::symmetrize(cur.p);
    }
    return cur;
}

using KalmanState = KalmanStateT<double>;

}  // namespace iges
