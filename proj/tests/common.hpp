#pragma once

#include <prandtl/norms.hpp>
#include <prandtl/solver.hpp>

#include <cmath>
#include <string>

namespace prandtl::testing {

// Reference setup at a given y-resolution: Nx=128, Lx=2pi, Ymax=30, y0=2,
// alpha=2, amp=1e-3, kx=1.
struct Case {
    Grid2D grid;
    ShearProfile profile;
    AssumptionReport rep;
    CutoffSet cut;
    Field u0;

    explicit Case(int ny = 257, double amp = 1e-3, int nx = 128)
        : grid(nx, ny), profile(build_shear_profile(grid, 2.0, 2.0)), rep(validate_assumption(profile)),
          cut(build_cutoffs(grid, 2.0, rep.delta)), u0(build_perturbation(grid, amp, 1, profile)) {}
};

// Reference setup and its Picard trajectory (eps=0.1, T=0.05, Nt=32), built once.
struct Reference {
    Case s;
    SolverConfig cfg;
    Trajectory tr;
    Reference() : s(257), tr(picard_solve(s.u0, s.profile, cfg)) {}
    static const Reference& get() {
        static const Reference r;
        return r;
    }
};

inline double observed_order(double coarse, double fine, double ratio = 2.0) {
    return std::log(coarse / fine) / std::log(ratio);
}

} // namespace prandtl::testing
