#pragma once

#include "amdet/model.hpp"

namespace amdet {

// Z split against the canonical right structure: Zc = Z Vc1 (the M columns
// that can carry signal), Zcperp = Z Vc2 (secondary data), Sc = Zcperp Zcperp^H.
struct DataSplit {
    CMat Zc;
    CMat Zcperp;
    HpdMat Sc;
};

// 3x3 row partition of (Zc, Sc): rows 1..t ("1"), t+1..J ("2"), J+1..N ("3").
// When t = 0 the "1" blocks are empty; when J = N the "3" blocks are empty.
struct BlockSplit {
    CMat Z1, Z2, Z3;
    CMat S11, S12, S13;
    CMat S21, S22, S23;
    CMat S31, S32, S33;
    CMat Z23;  // rows t+1..N of Zc, (N - t) x M
    CMat S2;   // trailing (N - t) x (N - t) block of Sc
};

// Maximal invariant pair: two M x M Hermitian PSD matrices. Every CFAR
// statistic in the suite is a function of (Ta, Tb, K) alone.
struct MisPair {
    CMat Ta;
    CMat Tb;
};

// Throws SingularSecondary when Sc fails the PD floor.
DataSplit split_data(const CMat& Z, const ProblemDims& dims);

BlockSplit partition_blocks(const DataSplit& ds, const ProblemDims& dims);

// J < N:  Ta = Z_{2.3}^H S_{2.3}^{-1} Z_{2.3},  Tb = Z3^H S33^{-1} Z3,
//         with Z_{2.3} = Z2 - S23 S33^{-1} Z3 and the Schur complement
//         S_{2.3} = S22 - S23 S33^{-1} S32.
// J = N:  Ta = Z2^H S22^{-1} Z2,  Tb = 0_M exactly.
// Throws SingularBlock when a required block inverse fails tolerance.
MisPair compute_mis(const BlockSplit& bs, const ProblemDims& dims);

// Convenience composition of the three steps above.
MisPair mis_from_data(const CMat& Z, const ProblemDims& dims);

// Parameter-space counterpart T_p = B^H R_{2.3}^{-1} B, with R_{2.3} built
// from R by the same 2.3 Schur recipe used for S_{2.3}.
CMat induced_invariant(const CMat& B, const HpdMat& R, const ProblemDims& dims);

// rho = tr[T_p]; the x-axis of every detection curve.
double sinr(const CMat& B, const HpdMat& R, const ProblemDims& dims);

}  // namespace amdet
