#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "nlscatter/conormal.hpp"
#include "nlscatter/errors.hpp"
#include "nlscatter/grid.hpp"
#include "nlscatter/interaction3d.hpp"
#include "nlscatter/nonlinearity.hpp"

namespace nlscatter {

class ProbeError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

// Windowed second-difference energy of Xi(., omega_k) around s_center, compared with the mean over
// windows at s_center + off_offsets. The windows must avoid the plane singularities of `planes`,
// located at finite radius R when probe_radius > 0 (asymptotically otherwise), by plane_margin.
struct SingularityProbe {
  int omega_index = 0;
  double s_center = 0.0;
  double half_width = 0.3;
  std::vector<double> off_offsets{-0.8, -1.6, 0.8};
  double threshold = 5.0;
  double probe_radius = 0.0;
  double plane_margin = 0.1;
  std::vector<PatternSet> planes;
  ConeConfig cones;  // vertices and emission times of the planes (finite-radius location)
};

struct DetectionReport {
  double on = 0.0;
  std::vector<double> off;
  double off_mean = 0.0;
  double floor = 0.0;
  double ratio = 1.0;
  bool detected = false;
  std::string csv_row() const;  // omega_index-free summary: on,off_mean,ratio,verdict
};

// Location of plane j along omega at radius R (R = 0: the asymptotic pattern s_j - <omega, z_j>).
double plane_location(const ConeConfig& cones, int j, const Vec3& omega, double R);

// Throws ProbeError when a window meets a plane or leaves the recorded s-range.
DetectionReport detect_new_singularities(const RadiationFieldData& xi, const SingularityProbe& probe);

// Ready-made probes for the shipped experiments (a = b = c = 1 configurations).
struct ExperimentSetup {
  Interaction3DConfig run;
  SingularityProbe probe;
};
ExperimentSetup triple_experiment(int n = 160, double background_amplitude = 1.0);
ExperimentSetup quadruple_experiment(int n = 160, double background_amplitude = 1.0);

struct ScalingReport {
  std::vector<double> kappa;
  std::vector<double> amplitude;  // sqrt of the on-window statistic
  double slope = 0.0;
  std::vector<DetectionReport> detections;
};

// Split solve: one run evolves a copy of the target per kappa with its source scaled by kappa.
ScalingReport amplitude_scaling_probe(const ExperimentSetup& setup, const std::vector<double>& kappa);

// f from samples of f''' on the uniform grid over [u_lo, u_hi] (0 inside), integrating three times
// from 0 with zero constants; returned as a table on the largest symmetric interval.
Nonlinearity reconstruct_f_from_third_derivative(double u_lo, double u_hi, const std::vector<double>& g3);

struct PhiEqualityReport {
  double third_error = 0.0;   // max |f1'''(phi1) - f2'''(phi2)|
  double fourth_error = 0.0;  // max |f1''''(phi1) phi1' - f2''''(phi2) phi2'|
  double derivative_error = 0.0;  // max |phi1' - phi2'| on O
  std::vector<std::pair<int, int>> components;  // index ranges [first, last] of O
  std::vector<double> constants;                // phi1 - phi2 at the component endpoints
  bool equal = false;
  int first_violation = -1;  // grid index
  std::string violated_check;
  int offending_component = -1;
};

PhiEqualityReport verify_phi_equality(const std::vector<double>& phi1, const std::vector<double>& phi2,
                                      double ds, const Nonlinearity& nl1, const Nonlinearity& nl2,
                                      double tol = 1e-8);

}  // namespace nlscatter
