#include "geobeam/frame.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "geobeam/errors.hpp"

namespace geobeam {

std::vector<double> SxGrid::s_nodes() const {
    std::vector<double> s(ns);
    for (int a = 0; a < ns; ++a) s[a] = this->s(a);
    return s;
}

SxGrid auto_frame_grid(const FloquetFrame& frame, const CurvatureModel& model, int J, int L_max) {
    double amin = frame.alpha[0], amax = frame.alpha[0], admax = 0.0;
    for (int k = 0; k < frame.nodes; ++k) {
        amin = std::min(amin, frame.alpha[k]);
        amax = std::max(amax, frame.alpha[k]);
        admax = std::max(admax, std::abs(frame.alpha_dot[k]));
    }
    const double turn = std::sqrt(2.0 * J + 1.0) + 10.0;
    SxGrid g;
    g.period = model.period();
    g.ns = 2 * L_max * static_cast<int>(std::lround(g.period / kTwoPi));
    g.x.X = turn * std::exp(amax);
    const double kmax = turn * std::exp(-amin) + admax * g.x.X;
    const double dx = kPi / (1.3 * kmax);
    int n = static_cast<int>(std::ceil(2.0 * g.x.X / dx));
    g.x.n = (n + 31) / 32 * 32;
    return g;
}

FrameBasis::FrameBasis(const FloquetFrame& frame, const CurvatureModel& model, int J_, const SxGrid& grid_,
                       Policy policy)
    : J(J_), grid(grid_) {
    for (int j = 0; j <= J; ++j) energies.push_back(mode_energy(frame, model, j));
    nodes = frame_nodes(frame, grid.s_nodes());
    frame_table(nodes, energies, grid.x.nodes(), J, W, policy);
}

cplx FrameCoefficients::coeff(int j, int l) const {
    const int mult = static_cast<int>(std::lround(period / kTwoPi));
    const int m = l * mult;
    if (j < 0 || j > J || std::abs(m) >= ns / 2) return {};
    return c[static_cast<std::size_t>(j) * ns + (m + ns) % ns];
}

FrameCoefficients frame_decompose(const std::vector<cplx>& Q, const FrameBasis& basis, const HermiteBasisSpec& spec,
                                  Policy policy) {
    const int ns = basis.grid.ns, nx = basis.grid.x.n, J = basis.J;
    FrameCoefficients fc;
    fc.J = J;
    fc.ns = ns;
    fc.period = basis.grid.period;
    frame_project(basis.W, Q, J, ns, nx, basis.grid.x.dx(), fc.h, policy);
    fc.c = fc.h;
    fft_rows(fc.c.data(), J + 1, ns, -1);
    for (auto& v : fc.c) v /= static_cast<double>(ns);

    const auto R = frame_reconstruct(fc, basis, policy);
    double qn = 0.0, rn = 0.0;
    for (std::size_t i = 0; i < Q.size(); ++i) {
        qn += std::norm(Q[i]);
        rn += std::norm(Q[i] - R[i]);
    }
    fc.j_tail = qn > 0.0 ? std::sqrt(rn / qn) : 0.0;
    double cmax = 0.0, ctop = 0.0;
    for (int j = 0; j <= J; ++j)
        for (int b = 0; b < ns; ++b) {
            const double a = std::abs(fc.c[static_cast<std::size_t>(j) * ns + b]);
            cmax = std::max(cmax, a);
            if (std::abs(fft_freq(b, ns)) >= ns / 2 - ns / 8) ctop = std::max(ctop, a);
        }
    fc.l_tail = cmax > 0.0 ? ctop / cmax : 0.0;
    if (fc.j_tail > spec.tail_tol || fc.l_tail > spec.tail_tol)
        throw Error(ErrorKind::TailTooLarge, "frame decomposition tail j=" + sci(fc.j_tail) +
                                                 " l=" + sci(fc.l_tail) + " above tolerance");
    return fc;
}

FrameCoefficients frame_decompose(const std::vector<cplx>& Q, const FloquetFrame& frame, const CurvatureModel& model,
                                  const SxGrid& grid, const HermiteBasisSpec& spec) {
    FrameBasis basis(frame, model, spec.J_max, grid);
    return frame_decompose(Q, basis, spec);
}

std::vector<cplx> frame_reconstruct(const FrameCoefficients& fc, const FrameBasis& basis, Policy policy) {
    std::vector<cplx> V;
    frame_synthesize(basis.W, fc.h, fc.J, basis.grid.ns, basis.grid.x.n, V, policy);
    return V;
}

}  // namespace geobeam
