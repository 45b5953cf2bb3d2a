#pragma once

#include <string>

#include "viscontact/types.hpp"

namespace viscontact {

enum class PlaneMode { Strain, Stress };

/// Constant fourth-order elasticity tensor with both minor and major
/// symmetries, stored as a 3x3 matrix acting on packed symmetric tensors.
/// Construction rejects tensors that are not symmetric or not uniformly
/// elliptic.
class ElasticTensor {
 public:
  /// Isotropic law from engineering constants. PlaneMode::Strain keeps the 3D
  /// Lame parameters; PlaneMode::Stress substitutes the reduced first
  /// parameter lambda* = lambda 2mu / (lambda + 2mu).
  static ElasticTensor isotropic(double youngs, double poisson,
                                 PlaneMode mode = PlaneMode::Strain);

  static ElasticTensor from_lame(double lambda, double mu);

  /// General anisotropic law from components a[i][j][k][l]. Requires
  /// a_ijkl = a_jikl = a_klij.
  static ElasticTensor from_components(const double (&a)[2][2][2][2]);

  Vec3 apply(const Vec3& packed) const { return voigt_ * packed; }
  Mat2 apply(const Mat2& tensor) const { return from_packed(voigt_ * to_packed(tensor)); }
  TensorField apply(const TensorField& field) const { return voigt_ * field; }

  /// Matrix of the tensor in the packed basis; symmetric positive definite.
  const Mat3& voigt() const { return voigt_; }

  /// Largest ellipticity constant m with (E tau, tau) >= m |tau|^2, i.e. the
  /// smallest eigenvalue of voigt().
  double ellipticity_constant() const { return ellipticity_; }

  /// max_{ijkl} |a_ijkl|, the norm used in the stability bounds.
  double sup_component_norm() const { return sup_norm_; }

  double component(int i, int j, int k, int l) const;

 private:
  explicit ElasticTensor(const Mat3& voigt);

  Mat3 voigt_;
  double ellipticity_ = 0.0;
  double sup_norm_ = 0.0;
};

/// Kinds of viscoplastic evolution G(sigma, epsilon). All are Lipschitz in
/// both arguments and vanish nowhere required; Zero recovers pure elasticity.
class ViscoplasticLaw {
 public:
  enum class Kind { Zero, LinearRelaxation, TruncatedPerzyna };

  /// G = 0: the body is elastic and history terms stay frozen.
  static ViscoplasticLaw zero();

  /// G = -kappa (sigma - E eps): relaxation toward the elastic stress.
  static ViscoplasticLaw linear_relaxation(double kappa);

  /// G = -kappa (sigma - P(sigma)) with P the projection onto the von Mises
  /// ball of radius sigma_y around the hydrostatic axis: overstress decays,
  /// admissible stress is stationary.
  static ViscoplasticLaw truncated_perzyna(double kappa, double sigma_y);

  Kind kind() const { return kind_; }
  double kappa() const { return kappa_; }
  double sigma_y() const { return sigma_y_; }

  Vec3 evaluate(const ElasticTensor& E, const Vec3& sigma, const Vec3& eps) const;
  Mat2 evaluate(const ElasticTensor& E, const Mat2& sigma, const Mat2& eps) const;
  TensorField evaluate(const ElasticTensor& E, const TensorField& sigma,
                       const TensorField& eps) const;

  /// A constant L with |G(s1,e1) - G(s2,e2)| <= L (|s1-s2| + |e1-e2|),
  /// uniformly over arguments.
  double lipschitz_constant(const ElasticTensor& E) const;

  std::string describe() const;

 private:
  Kind kind_ = Kind::Zero;
  double kappa_ = 0.0;
  double sigma_y_ = 0.0;
};

}  // namespace viscontact
