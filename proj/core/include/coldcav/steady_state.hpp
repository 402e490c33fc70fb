#pragma once

#include <Eigen/Core>
#include <array>
#include <complex>
#include <string>
#include <vector>

#include "coldcav/model.hpp"

namespace coldcav {

enum class StabilityClass {
  StableNode,
  StableFocus,
  Saddle,
  UnstableFocus,
  UnstableNode,
};

std::string to_string(StabilityClass c);

struct FixedPoint {
  double intensity = 0.0;
  double orientation = 0.0;
  double phase = 0.0;  // dispersive round-trip phase at the fixed point
  std::array<std::complex<double>, 3> eigenvalues{};
  StabilityClass stability = StabilityClass::StableNode;
};

// I_bist = 8 gamma_cav^2 / (3 sqrt(3) K); requires K > 0.
double bistability_threshold(const ModelParams& params);

// Steady complex field at the branch point (I, p).
std::complex<double> steady_field(const ModelParams& params, double intensity,
                                  double orientation);

// All nonnegative-intensity fixed points of the coupled system at params.phi0,
// with eigenvalues and stability filled in. The steady orientation
// p*(I) = g(I)/(gamma_p + g(I)) is eliminated, the modulus equation cleared
// into a polynomial in I (degree <= 5), solved by companion-matrix
// eigenvalues and polished with damped Newton. Tangencies appear as repeated
// entries. Sorted by intensity.
std::vector<FixedPoint> find_fixed_points(const ModelParams& params);

// Analytic Jacobian of the real 3-dimensional flow (Re a, Im a, p) at a fixed
// point.
Eigen::Matrix3d jacobian(const FixedPoint& point, const ModelParams& params);

// Focus when a complex pair exists, sign from the largest real part; Saddle
// for an all-real spectrum of mixed sign. The tie tolerance 1e-9 is relative
// to the spectral magnitude so the class is scale-invariant.
StabilityClass classify_stability(const std::array<std::complex<double>, 3>& eigenvalues);

struct BranchDiagram {
  std::vector<double> phi0_grid;
  std::vector<std::vector<FixedPoint>> branches;  // one list per grid point
  std::vector<double> turning_points;             // refined to 1e-6 in phi0
};
BranchDiagram branch_diagram(const ModelParams& params, double phi0_min,
                             double phi0_max, int n_points);

struct StabilityCell {
  double phi0 = 0.0;
  double drive = 0.0;
  int n_roots = 0;
  std::vector<StabilityClass> classes;  // per root, sorted by intensity
  bool failed = false;
};

struct InstabilityMap {
  std::vector<double> phi0_grid;
  std::vector<double> drive_grid;
  std::vector<StabilityCell> cells;  // drive-major: cells[i_drive*n_phi + i_phi]

  const StabilityCell& at(int i_drive, int i_phi) const {
    return cells[static_cast<std::size_t>(i_drive) * phi0_grid.size() + i_phi];
  }
};

// Classifies fixed points on a (phi0, drive) grid. Solver failures mark the
// cell failed instead of aborting the map.
InstabilityMap instability_map(const ModelParams& params, double phi0_min,
                               double phi0_max, int n_phi, double drive_min,
                               double drive_max, int n_drive);

}  // namespace coldcav
