#pragma once

#include <vector>

#include "geobeam/floquet.hpp"
#include "geobeam/hermite.hpp"
#include "geobeam/kernels.hpp"

namespace geobeam {

// Uniform (s, x) grid; s covers one bookkeeping period.
struct SxGrid {
    int ns = 64;
    double period = kTwoPi;
    XGrid x;
    double ds() const { return period / ns; }
    double s(int a) const { return period * a / ns; }
    std::vector<double> s_nodes() const;
    std::size_t size() const { return static_cast<std::size_t>(ns) * x.n; }
};

// x-extent and resolution adequate for w_0..w_J of the given frame.
SxGrid auto_frame_grid(const FloquetFrame& frame, const CurvatureModel& model, int J, int L_max);

// Moving-frame samples w_j(s_a, x_i), j <= J.
struct FrameBasis {
    FrameBasis(const FloquetFrame& frame, const CurvatureModel& model, int J, const SxGrid& grid,
               Policy policy = Policy::Parallel);
    int J;
    SxGrid grid;
    std::vector<double> energies;
    FrameNodes nodes;
    std::vector<cplx> W;
};

struct FrameCoefficients {
    int J = 0, ns = 0;
    double period = kTwoPi;
    std::vector<cplx> h;  // h_j(s_a) at [j * ns + a]
    std::vector<cplx> c;  // DFT bins of h_j / ns at [j * ns + b]
    double j_tail = 0.0;  // relative L2 mass of Q outside the retained frame
    double l_tail = 0.0;  // relative size of the top quarter of the Fourier band
    double frequency(int b) const { return kTwoPi / period * fft_freq(b, ns); }
    cplx coeff(int j, int l) const;
};

FrameCoefficients frame_decompose(const std::vector<cplx>& Q, const FrameBasis& basis, const HermiteBasisSpec& spec,
                                  Policy policy = Policy::Parallel);
FrameCoefficients frame_decompose(const std::vector<cplx>& Q, const FloquetFrame& frame, const CurvatureModel& model,
                                  const SxGrid& grid, const HermiteBasisSpec& spec);

// sum_j h_j(s) w_j(s, x)
std::vector<cplx> frame_reconstruct(const FrameCoefficients& fc, const FrameBasis& basis,
                                    Policy policy = Policy::Parallel);

}  // namespace geobeam
