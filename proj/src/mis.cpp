#include "amdet/mis.hpp"

namespace amdet {

namespace {

CMat hermitize(const CMat& x) { return 0.5 * (x + x.adjoint()); }

}  // namespace

DataSplit split_data(const CMat& Z, const ProblemDims& dims) {
    validate_dims(dims);
    if (Z.rows() != dims.N || Z.cols() != dims.K) {
        throw std::invalid_argument("split_data: Z must be N x K");
    }
    // Canonical Vc1/Vc2 are identity selectors, so the products Z Vc1 and
    // Z Vc2 are exactly these column blocks.
    DataSplit ds{Z.leftCols(dims.M), Z.rightCols(dims.K - dims.M),
                 [&]() -> HpdMat {
                     CMat zp = Z.rightCols(dims.K - dims.M);
                     try {
                         return HpdMat(hermitize(zp * zp.adjoint()));
                     } catch (const NotPositiveDefinite& e) {
                         throw SingularSecondary(std::string("split_data: ") + e.what());
                     }
                 }()};
    return ds;
}

BlockSplit partition_blocks(const DataSplit& ds, const ProblemDims& dims) {
    const int t = dims.t, r = dims.r, J = dims.J(), N = dims.N, M = dims.M;
    const int n3 = N - J;
    const CMat& S = ds.Sc.mat();
    BlockSplit bs;
    bs.Z1 = ds.Zc.block(0, 0, t, M);
    bs.Z2 = ds.Zc.block(t, 0, r, M);
    bs.Z3 = ds.Zc.block(J, 0, n3, M);
    bs.S11 = S.block(0, 0, t, t);
    bs.S12 = S.block(0, t, t, r);
    bs.S13 = S.block(0, J, t, n3);
    bs.S21 = S.block(t, 0, r, t);
    bs.S22 = S.block(t, t, r, r);
    bs.S23 = S.block(t, J, r, n3);
    bs.S31 = S.block(J, 0, n3, t);
    bs.S32 = S.block(J, t, n3, r);
    bs.S33 = S.block(J, J, n3, n3);
    bs.Z23 = ds.Zc.block(t, 0, N - t, M);
    bs.S2 = S.block(t, t, N - t, N - t);
    return bs;
}

MisPair compute_mis(const BlockSplit& bs, const ProblemDims& dims) {
    const int M = dims.M;
    MisPair mp;
    if (dims.J() == dims.N) {
        HpdMat s22 = [&]() -> HpdMat {
            try {
                return HpdMat(hermitize(bs.S22));
            } catch (const NotPositiveDefinite& e) {
                throw SingularBlock(std::string("compute_mis: S22 ") + e.what());
            }
        }();
        mp.Ta = hermitize(bs.Z2.adjoint() * solve_hpd(s22, bs.Z2));
        mp.Tb = CMat::Zero(M, M);
        return mp;
    }
    HpdMat s33 = [&]() -> HpdMat {
        try {
            return HpdMat(hermitize(bs.S33));
        } catch (const NotPositiveDefinite& e) {
            throw SingularBlock(std::string("compute_mis: S33 ") + e.what());
        }
    }();
    CMat z23_cond = bs.Z2 - bs.S23 * solve_hpd(s33, bs.Z3);
    CMat s23_cond = hermitize(bs.S22 - bs.S23 * solve_hpd(s33, bs.S32));
    HpdMat schur = [&]() -> HpdMat {
        try {
            return HpdMat(s23_cond);
        } catch (const NotPositiveDefinite& e) {
            throw SingularBlock(std::string("compute_mis: S_{2.3} ") + e.what());
        }
    }();
    mp.Ta = hermitize(z23_cond.adjoint() * solve_hpd(schur, z23_cond));
    mp.Tb = hermitize(bs.Z3.adjoint() * solve_hpd(s33, bs.Z3));
    return mp;
}

MisPair mis_from_data(const CMat& Z, const ProblemDims& dims) {
    DataSplit ds = split_data(Z, dims);
    return compute_mis(partition_blocks(ds, dims), dims);
}

CMat induced_invariant(const CMat& B, const HpdMat& R, const ProblemDims& dims) {
    validate_dims(dims);
    if (B.rows() != dims.r || B.cols() != dims.M) {
        throw std::invalid_argument("induced_invariant: B must be r x M");
    }
    const int t = dims.t, r = dims.r, J = dims.J();
    const int n3 = dims.N - J;
    const CMat& Rm = R.mat();
    CMat r23_cond;
    if (n3 == 0) {
        r23_cond = hermitize(Rm.block(t, t, r, r));
    } else {
        CMat R22 = Rm.block(t, t, r, r);
        CMat R23 = Rm.block(t, J, r, n3);
        CMat R32 = Rm.block(J, t, n3, r);
        HpdMat r33 = [&]() -> HpdMat {
            try {
                return HpdMat(hermitize(Rm.block(J, J, n3, n3)));
            } catch (const NotPositiveDefinite& e) {
                throw SingularBlock(std::string("induced_invariant: R33 ") + e.what());
            }
        }();
        r23_cond = hermitize(R22 - R23 * solve_hpd(r33, R32));
    }
    HpdMat schur = [&]() -> HpdMat {
        try {
            return HpdMat(r23_cond);
        } catch (const NotPositiveDefinite& e) {
            throw SingularBlock(std::string("induced_invariant: R_{2.3} ") + e.what());
        }
    }();
    return hermitize(B.adjoint() * solve_hpd(schur, B));
}

double sinr(const CMat& B, const HpdMat& R, const ProblemDims& dims) {
    return induced_invariant(B, R, dims).trace().real();
}

}  // namespace amdet
