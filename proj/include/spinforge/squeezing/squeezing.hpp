#pragma once

#include <string_view>

#include "spinforge/core/states.hpp"

namespace spinforge {

/// Which transverse operators the second moments refer to.
enum class AxisPair { SySz, SyDeltaZ };

std::string_view to_string(AxisPair axes);

/// A = Var(e1) - Var(e2), B = 2 Cov(e1, e2), C = Var(e1) + Var(e2) for the two axes e1, e2
/// orthogonal to the mean spin (e1 = z x n, e2 = n x e1; for a mean along +x that is (y, z)).
struct QuadratureCorrelators {
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;
  Vec3 mean_spin = Vec3::Zero();
  AxisPair axes = AxisPair::SySz;
};

struct QuadratureVariances {
  double v_minus = 0.0;
  double v_plus = 0.0;
  double nu = 0.0;  ///< 0.5 * atan2(B, A); 0 when A = B = 0
};

/// Quadrature S_psi = cos(psi) S_e1 - sin(psi) S_e2: maximal at psi = -nu, minimal at pi/2 - nu.
struct SqueezingReport {
  double v_minus = 0.0;
  double v_plus = 0.0;
  double nu = 0.0;
  double psi_min = 0.0;
  double spin_length = 0.0;
  double xi2 = 0.0;          ///< N V- / |<S>|^2
  double xi2_db = 0.0;       ///< 10 log10(xi2); negative means squeezed
  double xi2_nominal = 0.0;  ///< V- / (N/4), the fixed-length normalization
  double xi2_nominal_db = 0.0;
};

QuadratureVariances variances_from_correlators(const QuadratureCorrelators& c);
double quadrature_variance(const QuadratureCorrelators& c, double psi);

/// Projects the covariance of (Sx, Sy, Sz) onto the plane orthogonal to the mean spin.
/// `second` holds symmetrized moments <(Sa Sb + Sb Sa)/2>.
QuadratureCorrelators correlators_from_moments(const Vec3& mean, const Mat3& second,
                                               AxisPair axes = AxisPair::SySz);

double squeezing_parameter(double v_minus, double spin_length, double atoms);
double to_db(double ratio);
SqueezingReport squeezing_report(const QuadratureCorrelators& c, double atoms);

/// Symmetrized moments of (S1x, S1y, S1z, S2x, S2y, S2z).
struct TwoEnsembleMoments {
  Eigen::Matrix<double, 6, 1> mean = Eigen::Matrix<double, 6, 1>::Zero();
  Eigen::Matrix<double, 6, 6> second = Eigen::Matrix<double, 6, 6>::Zero();
};
struct SpinMoments {
  Vec3 mean = Vec3::Zero();
  Mat3 second = Mat3::Zero();
};

TwoEnsembleMoments two_ensemble_moments(const TwoEnsembleKet& ket);
SpinMoments total_spin_moments(const Ket& ket);

/// Back-to-back lab frame to measurement frame: (Dx, Sy, Dz) of the lab spins.
SpinMoments tss_frame_map(const TwoEnsembleMoments& lab);
/// State path: pi rotation of the second ensemble about y.
TwoEnsembleKet tss_frame_map(const TwoEnsembleKet& lab);

struct CavityField {
  cplx amplitude;
  double photons = 0.0;
};

/// Adiabatically slaved cavity field from the atomic coherence.
CavityField cavity_field_estimate(cplx s_minus, double s_plus_s_minus, double g, double kappa, double detuning);
CavityField cavity_field_estimate(const Ket& ket, double g, double kappa, double detuning);

}  // namespace spinforge
