#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lfc3d/cycle.hpp"
#include "lfc3d/degree.hpp"
#include "lfc3d/fields.hpp"
#include "lfc3d/quad.hpp"

namespace lfc3d {

struct FluxParameters {
  int kappa = 6;
  int n_space = 0;  ///< nNodeS
  int n_time = 0;   ///< nNodeT
  double h = 0.0;
  double dt = 0.0;
  double xi = 0.0;
};

struct FluxResult {
  double value = 0.0;
  std::array<double, 6> per_patch{};  ///< unsigned I_1..I_6
  FluxParameters parameters;
};

/// I_1 - I_2 + I_3 + I_4 + I_5 + I_6 for the mesh's sign pattern.
double assemble_flux(const std::array<double, 6>& per_patch, const std::array<int, 6>& signs);

/// Flux of f(., t0) through an existing cycle with q = kappa node counts.
FluxResult cycle_flux(const GeneratingCycleMesh& mesh, const ScalarField& f, double xi = 0.0);

/// Lagrangian flux of f through S over [t0, te]: h = 1/n_space,
/// dt = (te-t0)/n_time, generating cycle of order kappa, cubature with q = kappa.
FluxResult lfc3d_flux(const ScalarField& f, const VelocityField& u, const MovingSurface& surface,
                      double t0, double te, int n_space, int n_time, int kappa, double xi = 0.0);
FluxResult lfc3d_flux(const PresetCase& preset, int n_space, int n_time, int kappa,
                      double xi = 0.0);

/// Eulerian flux int_t int_S f (u - dS/dt) . n by tensor Gauss-Legendre
/// quadrature with n_space nodes in u and v and n_time nodes in t.
double eulerian_flux_oracle(const ScalarField& f, const VelocityField& u,
                            const MovingSurface& surface, double t0, double te, int n_space,
                            int n_time);

struct GatedReference {
  double value = 0.0;       ///< oracle at the finer resolution
  double coarse = 0.0;      ///< oracle at the coarser resolution
  double difference = 0.0;  ///< relative (absolute when the flux vanishes)
};

/// Oracle at (64, 64) and (96, 96); throws ReferenceQualityError when the
/// two differ by more than `tolerance`.
GatedReference gated_eulerian_oracle(const PresetCase& preset, double tolerance = 1e-11);

struct ConvergenceRow {
  int kappa = 0;
  int nodes = 0;
  double h = 0.0;
  double value = 0.0;
  double error = 0.0;  ///< relative error, absolute when the reference vanishes
  double rate = 0.0;   ///< log2(E(2h)/E(h)); NaN on the coarsest row
  bool flagged = false;  ///< reference vanishes or the rate is undefined
};

struct ConvergenceTable {
  std::string preset;
  GatedReference reference;
  std::vector<ConvergenceRow> rows;
};

/// Runs lfc3d_flux with nNodeS = nNodeT = n for every kappa and n. `nodes`
/// must be a doubling sequence. Throws ReferenceQualityError if the oracle
/// gate fails.
ConvergenceTable convergence_study(const PresetCase& preset, const std::vector<int>& kappas,
                                   const std::vector<int>& nodes, double xi = 0.0);

/// CSV with header kappa,h,E,rate.
std::string convergence_csv(const ConvergenceTable& table);

// ---------------------------------------------------------------------------
// Identity checks

struct DivergenceCheck {
  double boundary = 0.0;  ///< closed-cycle flux of F = (x, 0, 0) over the spline patches
  double volume = 0.0;    ///< int_{B^3} J_chi by tensor quadrature with FD Jacobians
  double relative_difference = 0.0;
};

/// Divergence theorem on the cycle of `preset` with F = (x, 0, 0).
DivergenceCheck divergence_theorem_check(const PresetCase& preset, int kappa, int nodes,
                                         int volume_nodes = 48, int chi_steps = 64);

struct TransportCheck {
  double t = 0.0;
  double lhs = 0.0;  ///< d/dt int_{B^3} f(phi, t) J_phi by central differences
  double rhs = 0.0;  ///< int_{B^3} f_t J_phi + closed-surface term
  double relative_difference = 0.0;
};

/// Reynolds transport on phi(., t) = composite map of [t0, t].
TransportCheck reynolds_transport_check(const PresetCase& preset, double t,
                                        double fd_step = 1e-4, int nodes = 24,
                                        int chi_steps = 32);

struct IdentityCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double difference = 0.0;  ///< relative, or in standard errors for the Monte Carlo pair
  double tolerance = 0.0;
  bool passed = false;
};

struct IdentityReport {
  std::string preset;
  FluxResult flux;
  double oracle = 0.0;
  DonatingRegionEstimate donating;
  std::vector<IdentityCheck> checks;
  bool passed = false;
};

struct IdentityOptions {
  std::size_t mc_samples = 100000;
  std::uint64_t seed = 0;
  int tessellation = 256;
  double lfc_tolerance = 1e-4;       ///< relative, oracle vs cycle flux
  double mc_sigmas = 3.0;            ///< cycle flux vs donating-region estimate
  double divergence_tolerance = 1e-6;
  double transport_tolerance = 1e-5;
  bool divergence = true;
  bool transport = true;
};

/// Oracle vs cycle flux vs donating-region integral, plus the divergence
/// and Reynolds-transport checks on the same case.
IdentityReport verify_identities(const PresetCase& preset, int kappa, int nodes,
                                 const IdentityOptions& options = {});

}  // namespace lfc3d
