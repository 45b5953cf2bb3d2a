#include "viscontact/material.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "viscontact/errors.hpp"
#include "viscontact/random.hpp"

namespace viscontact {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

// Packed-basis index pairs: component r of a packed tensor corresponds to the
// tensor slot (row[r], col[r]) with weight 1, 1, sqrt(2).
constexpr int kRow[3] = {0, 1, 0};
constexpr int kCol[3] = {0, 1, 1};
constexpr double kWeight[3] = {1.0, 1.0, kSqrt2};

}  // namespace

ElasticTensor::ElasticTensor(const Mat3& voigt) : voigt_(voigt) {
  if (!voigt_.isApprox(voigt_.transpose(), 1e-12))
    throw Error("elasticity tensor is not symmetric");
  voigt_ = 0.5 * (voigt_ + voigt_.transpose());

  Eigen::SelfAdjointEigenSolver<Mat3> eig(voigt_, Eigen::EigenvaluesOnly);
  ellipticity_ = eig.eigenvalues().minCoeff();
  if (ellipticity_ <= 0.0)
    throw Error("elasticity tensor is not elliptic (smallest eigenvalue " +
                std::to_string(ellipticity_) + ")");

  sup_norm_ = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l)
          sup_norm_ = std::max(sup_norm_, std::abs(component(i, j, k, l)));

  // The stability analysis uses |E tau| <= d * sup_norm * |tau| with d = 2.
  // That bound holds for the isotropic laws used here but is not a theorem
  // for arbitrary symmetric tensors, so verify it on random samples and
  // refuse tensors that break it instead of silently producing wrong
  // certified constants.
  Rng rng(0x9e3779b97f4a7c15ull);
  const double budget = 2.0 * sup_norm_;
  for (int s = 0; s < 256; ++s) {
    const Vec3 tau = rng.packed_tensor(-1.0, 1.0);
    const double norm = tau.norm();
    if (norm == 0.0) continue;
    if ((voigt_ * tau).norm() > budget * norm * (1.0 + 1e-12))
      throw Error("elasticity tensor violates |E tau| <= d max|a_ijkl| |tau|; "
                  "its stability constants would be invalid");
  }
}

ElasticTensor ElasticTensor::isotropic(double youngs, double poisson, PlaneMode mode) {
  if (youngs <= 0.0) throw Error("Young's modulus must be positive");
  if (poisson <= -1.0 || poisson >= 0.5) throw Error("Poisson ratio must lie in (-1, 0.5)");
  const double lambda = youngs * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson));
  const double mu = youngs / (2.0 * (1.0 + poisson));
  if (mode == PlaneMode::Strain) return from_lame(lambda, mu);
  return from_lame(2.0 * lambda * mu / (lambda + 2.0 * mu), mu);
}

ElasticTensor ElasticTensor::from_lame(double lambda, double mu) {
  Mat3 m;
  m << lambda + 2.0 * mu, lambda, 0.0,
       lambda, lambda + 2.0 * mu, 0.0,
       0.0, 0.0, 2.0 * mu;
  return ElasticTensor(m);
}

ElasticTensor ElasticTensor::from_components(const double (&a)[2][2][2][2]) {
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
          if (a[i][j][k][l] != a[j][i][k][l] || a[i][j][k][l] != a[i][j][l][k])
            throw Error("elasticity components lack minor symmetry");
          if (a[i][j][k][l] != a[k][l][i][j])
            throw Error("elasticity components lack major symmetry");
        }
  Mat3 m;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      m(r, c) = kWeight[r] * kWeight[c] * a[kRow[r]][kCol[r]][kRow[c]][kCol[c]];
  return ElasticTensor(m);
}

double ElasticTensor::component(int i, int j, int k, int l) const {
  auto packed_index = [](int p, int q) { return (p == q) ? p : 2; };
  const int r = packed_index(i, j);
  const int c = packed_index(k, l);
  return voigt_(r, c) / (kWeight[r] * kWeight[c]);
}

ViscoplasticLaw ViscoplasticLaw::zero() { return {}; }

ViscoplasticLaw ViscoplasticLaw::linear_relaxation(double kappa) {
  if (kappa < 0.0) throw Error("relaxation rate must be >= 0");
  ViscoplasticLaw law;
  law.kind_ = Kind::LinearRelaxation;
  law.kappa_ = kappa;
  return law;
}

ViscoplasticLaw ViscoplasticLaw::truncated_perzyna(double kappa, double sigma_y) {
  if (kappa < 0.0) throw Error("relaxation rate must be >= 0");
  if (sigma_y < 0.0) throw Error("yield radius must be >= 0");
  ViscoplasticLaw law;
  law.kind_ = Kind::TruncatedPerzyna;
  law.kappa_ = kappa;
  law.sigma_y_ = sigma_y;
  return law;
}

namespace {

// Projection onto { tau : |dev tau| <= sigma_y } in the packed basis. The
// hydrostatic part is untouched; the deviatoric part is radially clipped.
Vec3 project_yield_ball(const Vec3& sigma, double sigma_y) {
  const double mean = 0.5 * (sigma(0) + sigma(1));
  Vec3 dev = sigma;
  dev(0) -= mean;
  dev(1) -= mean;
  const double norm = dev.norm();
  if (norm <= sigma_y) return sigma;
  Vec3 result = dev * (sigma_y / norm);
  result(0) += mean;
  result(1) += mean;
  return result;
}

}  // namespace

Vec3 ViscoplasticLaw::evaluate(const ElasticTensor& E, const Vec3& sigma, const Vec3& eps) const {
  switch (kind_) {
    case Kind::Zero:
      return Vec3::Zero();
    case Kind::LinearRelaxation:
      return -kappa_ * (sigma - E.apply(eps));
    case Kind::TruncatedPerzyna:
      return -kappa_ * (sigma - project_yield_ball(sigma, sigma_y_));
  }
  return Vec3::Zero();
}

Mat2 ViscoplasticLaw::evaluate(const ElasticTensor& E, const Mat2& sigma, const Mat2& eps) const {
  return from_packed(evaluate(E, to_packed(sigma), to_packed(eps)));
}

TensorField ViscoplasticLaw::evaluate(const ElasticTensor& E, const TensorField& sigma,
                                      const TensorField& eps) const {
  switch (kind_) {
    case Kind::Zero:
      return TensorField::Zero(3, sigma.cols());
    case Kind::LinearRelaxation:
      return -kappa_ * (sigma - E.apply(eps));
    case Kind::TruncatedPerzyna: {
      TensorField out(3, sigma.cols());
      for (Eigen::Index c = 0; c < sigma.cols(); ++c)
        out.col(c) = -kappa_ * (sigma.col(c) - project_yield_ball(sigma.col(c), sigma_y_));
      return out;
    }
  }
  return TensorField::Zero(3, sigma.cols());
}

double ViscoplasticLaw::lipschitz_constant(const ElasticTensor& E) const {
  switch (kind_) {
    case Kind::Zero:
      return 0.0;
    case Kind::LinearRelaxation:
      // |G(s1,e1)-G(s2,e2)| <= kappa |s1-s2| + kappa |E(e1-e2)|, and the
      // second factor is bounded through d max|a_ijkl|.
      return kappa_ * std::max(1.0, 2.0 * E.sup_component_norm());
    case Kind::TruncatedPerzyna:
      // sigma - P(sigma) is a difference of 1-Lipschitz maps.
      return 2.0 * kappa_;
  }
  return 0.0;
}

std::string ViscoplasticLaw::describe() const {
  switch (kind_) {
    case Kind::Zero:
      return "zero";
    case Kind::LinearRelaxation:
      return "linear_relaxation(kappa=" + std::to_string(kappa_) + ")";
    case Kind::TruncatedPerzyna:
      return "truncated_perzyna(kappa=" + std::to_string(kappa_) +
             ", sigma_y=" + std::to_string(sigma_y_) + ")";
  }
  return "?";
}

}  // namespace viscontact
