#ifndef TRIPANEL_KERNEL_HPP
#define TRIPANEL_KERNEL_HPP

#include <cmath>
#include <complex>

// Closed-form potential and flux of a unit-strength uniform source on the
// normalized right triangle with vertices (0,0), (1,0), (0,zM) in the XZ
// plane, evaluated at a field point (X,Y,Z).
//
// The expressions are assembled from distances to the three corners
// (D11, D21, D12), the hypotenuse symbols E1, E2, G, H1, H2, and two
// conjugate pairs of complex logarithms attached to the corner lines
// x=0 and x=1. All complex logarithms are principal-branch; each group is
// arranged so that its argument path from one endpoint of the defining
// integral to the other never meets the negative real axis, which keeps
// the principal branch exact for every field point with |Y| > 0. The
// |Y| -> 0 limit is reached continuously through IEEE signed zeros, so
// on-plane evaluation (away from the edge lines) is also exact.
//
// The formulas degenerate on four lines: the three element edge lines
// (extended) and the line {x=1, y=0}. Evaluation near those lines loses
// precision to cancellation and is refused; callers fall back to
// quadrature (see eval.hpp).

namespace tripanel {

struct KernelInputs {
  double zM;
  double x;
  double y;
  double z;
};

enum class KernelStatus {
  Ok,
  DegenerateLine,     // within the guard band of a formula-degenerate line
  LogDomainFailure,   // a real logarithm argument was not strictly positive
  BranchAmbiguity,    // a complex log argument within 1e-12 of its cut
  NonFiniteResult,
  NegativePotential,
};

/// Auxiliary symbols of the closed forms, plus the four complex logarithm
/// values. LM1/LM2 are the conjugates of LP1/LP2 for real inputs.
struct KernelTerms {
  double D11, D12, D21;          // distances to (0,0), (0,zM), (1,0)
  double I1, I2;                 // X|Y|, (X-1)|Y|
  double S1;                     // sign(-Z)
  double R1;                     // Y^2 + Z^2
  double E1, E2, G, H1, H2;
  std::complex<double> LP1, LM1, LP2, LM2;
  KernelStatus status = KernelStatus::Ok;
};

struct KernelOutput {
  double value = 0.0;
  double imagResidue = 0.0;
  KernelStatus status = KernelStatus::Ok;

  bool ok() const { return status == KernelStatus::Ok; }
};

struct FluxOutput {
  KernelOutput fx, fy, fz;

  bool ok() const { return fx.ok() && fy.ok() && fz.ok(); }
};

struct InfluenceOutput {
  KernelOutput potential;
  FluxOutput flux;

  bool ok() const { return potential.ok() && flux.ok(); }
};

namespace detail {

inline double sign_of(double v) { return (v > 0.0) - (v < 0.0); }

/// R - t without cancellation, given q2 = R^2 - t^2 analytically.
inline double residual_diff(double r, double t, double q2) {
  return t > 0.0 ? q2 / (r + t) : r - t;
}

/// Principal complex log from explicit re/im parts. atan2 keeps the signed
/// zero of the imaginary part, which selects the correct side of the cut in
/// the Y -> 0 limit.
inline std::complex<double> principal_log(double re, double im) {
  return {0.5 * std::log(re * re + im * im), std::atan2(im, re)};
}

/// Everything the potential and flux assemblies share.
struct Workspace {
  double zM, X, Y, Z;
  double aY, sgY, sgZ;
  double sq2, sq;
  double D11, D12, D21;
  double E1, E2, G;
  double lambda;                  // Y^2 (1+zM^2) + G^2
  double d11mZ, d21mZ, wTop;      // D11-Z, D21-Z, (zM-Z)+D12
  double d11mX, d21p1mX;          // D11-X, D21+1-X
  double n1re, n1im, n2re, n2im;  // N1, N2 components
  std::complex<double> lnN1, lnN2, lnZ1, lnZ2;
  double lnHyp;                   // log((sq D21 - E2)/(sq D12 - E1))
  double atanZ1, atanZ2;          // the sign(Z) arctangent pair (0 if skipped)
  KernelStatus status = KernelStatus::Ok;
};

inline Workspace make_workspace(const KernelInputs& in, double guardBand) {
  Workspace w;
  const double zM = in.zM, X = in.x, Y = in.y, Z = in.z;
  w.zM = zM;
  w.X = X;
  w.Y = Y;
  w.Z = Z;
  w.aY = std::abs(Y);
  w.sgY = sign_of(Y);
  w.sgZ = sign_of(Z);
  w.sq2 = 1.0 + zM * zM;
  w.sq = std::sqrt(w.sq2);

  const double r2c = X * X + Y * Y;          // squared distance to line x=0,y=0
  const double r2e = (X - 1) * (X - 1) + Y * Y;  // to line x=1,y=0
  const double r2b = Y * Y + Z * Z;          // to the bottom edge line
  w.D11 = std::sqrt(r2c + Z * Z);
  w.D21 = std::sqrt(r2e + Z * Z);
  w.D12 = std::sqrt(r2c + (Z - zM) * (Z - zM));
  w.E1 = X + zM * zM - zM * Z;
  w.E2 = X - 1.0 - zM * Z;
  w.G = zM * (X - 1.0) + Z;
  w.lambda = Y * Y * w.sq2 + w.G * w.G;      // = (sq D12)^2-E1^2 = (sq D21)^2-E2^2

  // Distance to the nearest formula-degenerate line decides whether the
  // closed forms can be trusted in double precision.
  const double band = guardBand * std::max(1.0, zM);
  const double dLine2 = std::min(std::min(r2c, r2e),
                                 std::min(r2b, w.lambda / w.sq2));
  if (!(dLine2 > band * band)) {
    w.status = KernelStatus::DegenerateLine;
    return w;
  }

  w.d11mZ = residual_diff(w.D11, Z, r2c);
  w.d21mZ = residual_diff(w.D21, Z, r2e);
  w.wTop = (zM - Z) >= 0.0 ? (zM - Z) + w.D12 : residual_diff(w.D12, Z - zM, r2c);
  w.d11mX = residual_diff(w.D11, X, r2b);
  w.d21p1mX = residual_diff(w.D21, X - 1.0, r2b);
  if (!(w.d11mZ > 0.0 && w.d21mZ > 0.0 && w.wTop > 0.0 && w.d11mX > 0.0 &&
        w.d21p1mX > 0.0)) {
    w.status = KernelStatus::LogDomainFailure;
    return w;
  }

  const double hyp1 = w.E1 > 0.0 ? w.lambda / (w.sq * w.D12 + w.E1)
                                 : w.sq * w.D12 - w.E1;
  const double hyp2 = w.E2 > 0.0 ? w.lambda / (w.sq * w.D21 + w.E2)
                                 : w.sq * w.D21 - w.E2;
  if (!(hyp1 > 0.0 && hyp2 > 0.0)) {
    w.status = KernelStatus::LogDomainFailure;
    return w;
  }
  w.lnHyp = std::log(hyp2 / hyp1);

  // N1 = (H1 + G D12) + i|Y|(E1 - zM D12), with the cancellation-prone real
  // part rewritten through the residual difference D12 - (zM - Z).
  const double q1 = (zM - Z) > 0.0 ? r2c / (w.D12 + (zM - Z)) : w.D12 - (zM - Z);
  const double q2 = Z < 0.0 ? r2e / (w.D21 - Z) : w.D21 + Z;
  w.n1re = Y * Y + w.G * q1;
  w.n1im = w.aY * (w.E1 - zM * w.D12);
  w.n2re = Y * Y + w.G * q2;
  w.n2im = w.aY * (w.E2 - zM * w.D21);
  w.lnN1 = principal_log(w.n1re, w.n1im);
  w.lnN2 = principal_log(w.n2re, w.n2im);
  w.lnZ1 = principal_log(X, -w.aY);
  w.lnZ2 = principal_log(X - 1.0, -w.aY);

  if (w.aY > 0.0 && Z != 0.0) {
    const double aZ = std::abs(Z);
    w.atanZ1 = std::atan((1.0 - X) * aZ / (w.aY * w.D21));
    w.atanZ2 = std::atan(X * aZ / (w.aY * w.D11));
  } else {
    w.atanZ1 = 0.0;
    w.atanZ2 = 0.0;
  }
  return w;
}

inline void flux_from(const Workspace& w, FluxOutput& out) {
  out.fx.value = std::log(w.d11mZ) - std::log(w.d21mZ) + (w.zM / w.sq) * w.lnHyp +
                 w.lnN1.real() - w.lnN2.real() -
                 2.0 * (w.lnZ1.real() - w.lnZ2.real());
  out.fy.value = w.sgY == 0.0
                     ? 0.0
                     : w.sgY * ((w.lnN1.imag() - w.lnN2.imag()) -
                                (w.lnZ1.imag() - w.lnZ2.imag())) +
                           w.sgY * w.sgZ * (w.atanZ1 + w.atanZ2);
  out.fz.value = w.lnHyp / w.sq + std::log(w.d11mX / w.d21p1mX);
  for (KernelOutput* c : {&out.fx, &out.fy, &out.fz}) {
    if (!std::isfinite(c->value)) c->status = KernelStatus::NonFiniteResult;
  }
}

inline double potential_from(const Workspace& w) {
  const double X = w.X, Z = w.Z;
  // Slant-edge complex group: 2 Re{ A+ [2(ln z1 - ln z2) - (ln N1 - ln N2)] },
  // A+ = (zM G - i|Y|(1+zM^2)) / (2(1+zM^2)).
  const double uRe = 2.0 * (w.lnZ1.real() - w.lnZ2.real()) -
                     (w.lnN1.real() - w.lnN2.real());
  const double uIm = 2.0 * (w.lnZ1.imag() - w.lnZ2.imag()) -
                     (w.lnN1.imag() - w.lnN2.imag());
  const double cplx = (w.zM * w.G / w.sq2) * uRe + w.aY * uIm;

  const double vlnW = (w.E1 * std::log(w.wTop) - w.E2 * std::log(w.d21mZ)) / w.sq2;
  const double hyplog = -(w.G / w.sq) * w.lnHyp;

  double edge = (1.0 - X) * std::log(w.d21mZ) + X * std::log(w.d11mZ);
  if (Z != 0.0) {
    edge -= Z * std::log(w.d21p1mX / w.d11mX);
  }
  double atans = 0.0;
  if (w.aY > 0.0) {
    atans = w.aY * (std::atan((1.0 - X) / w.aY) + std::atan(X / w.aY));
    atans += w.aY * w.sgZ * (w.atanZ1 + w.atanZ2);
  }
  return vlnW + cplx + hyplog - edge - atans;
}

}  // namespace detail

/// Guard band (in units of max(1, zM)) around the formula-degenerate lines;
/// inside it the kernel refuses to evaluate and reports DegenerateLine.
inline constexpr double kKernelGuardBand = 1e-6;

/// Potential of the unit-strength normalized triangle at (X,Y,Z).
inline KernelOutput tri_potential(const KernelInputs& in,
                                  double guardBand = kKernelGuardBand) {
  const detail::Workspace w = detail::make_workspace(in, guardBand);
  KernelOutput out;
  if (w.status != KernelStatus::Ok) {
    out.status = w.status;
    return out;
  }
  out.value = detail::potential_from(w);
  if (!std::isfinite(out.value)) {
    out.status = KernelStatus::NonFiniteResult;
  } else if (out.value <= 0.0) {
    out.status = KernelStatus::NegativePotential;
  }
  return out;
}

/// Flux (F = -grad Phi) of the unit-strength normalized triangle.
/// On the element plane (Y = +-0) the odd component fy is reported as 0,
/// the two-sided principal value.
inline FluxOutput tri_flux(const KernelInputs& in,
                           double guardBand = kKernelGuardBand) {
  const detail::Workspace w = detail::make_workspace(in, guardBand);
  FluxOutput out;
  if (w.status != KernelStatus::Ok) {
    out.fx.status = out.fy.status = out.fz.status = w.status;
    return out;
  }
  detail::flux_from(w, out);
  return out;
}

/// Potential and flux together, sharing the term evaluation.
inline InfluenceOutput tri_influence(const KernelInputs& in,
                                     double guardBand = kKernelGuardBand) {
  const detail::Workspace w = detail::make_workspace(in, guardBand);
  InfluenceOutput out;
  if (w.status != KernelStatus::Ok) {
    out.potential.status = w.status;
    out.flux.fx.status = out.flux.fy.status = out.flux.fz.status = w.status;
    return out;
  }
  out.potential.value = detail::potential_from(w);
  if (!std::isfinite(out.potential.value)) {
    out.potential.status = KernelStatus::NonFiniteResult;
  } else if (out.potential.value <= 0.0) {
    out.potential.status = KernelStatus::NegativePotential;
  }
  detail::flux_from(w, out.flux);
  return out;
}

/// Full term record for diagnostics and tests. The complex pair values use
/// the single-log-of-ratio convention; LM1/LM2 are the conjugates of
/// LP1/LP2 whenever the inputs are real.
inline KernelTerms eval_terms(const KernelInputs& in,
                              double guardBand = kKernelGuardBand) {
  const detail::Workspace w = detail::make_workspace(in, guardBand);
  KernelTerms t;
  t.D11 = w.D11;
  t.D12 = w.D12;
  t.D21 = w.D21;
  t.I1 = in.x * w.aY;
  t.I2 = (in.x - 1.0) * w.aY;
  t.S1 = detail::sign_of(-in.z);
  t.R1 = in.y * in.y + in.z * in.z;
  t.E1 = w.E1;
  t.E2 = w.E2;
  t.G = w.G;
  t.H1 = in.y * in.y + w.G * (in.z - in.zM);
  t.H2 = in.y * in.y + w.G * in.z;
  t.status = w.status;
  if (w.status != KernelStatus::Ok) {
    t.LP1 = t.LM1 = t.LP2 = t.LM2 = {0.0, 0.0};
    return t;
  }
  const std::complex<double> N1{w.n1re, w.n1im};
  const std::complex<double> N2{w.n2re, w.n2im};
  const std::complex<double> den1{-in.x, w.aY};        // -X + i|Y|
  const std::complex<double> den2{1.0 - in.x, w.aY};   // 1 - X + i|Y|
  const std::complex<double> pref{w.G, -w.zM * w.aY};  // G - i zM |Y|
  t.LP1 = std::log(N1 / den1) / pref;
  t.LP2 = std::log(N2 / den2) / pref;
  t.LM1 = std::conj(t.LP1);
  t.LM2 = std::conj(t.LP2);
  const auto nearCut = [](const std::complex<double>& a) {
    return a.real() < 0.0 && std::abs(a.imag()) <= 1e-12 * std::abs(a.real());
  };
  if (nearCut(N1 / den1) || nearCut(N2 / den2)) {
    t.status = KernelStatus::BranchAmbiguity;
  }
  return t;
}

/// Reference assembly of the potential from the four complex log pairs and
/// complex inverse hyperbolic tangents, following the printed grouping.
/// The grouped logs wrap branches when the field point has 0 < X < 1, so
/// this path is only meaningful outside that band; it exists as a
/// diagnostic cross-check for the production assembly. The imaginary part
/// that the grouping should cancel is reported as imagResidue.
inline KernelOutput tri_potential_fourterm(const KernelInputs& in) {
  using C = std::complex<double>;
  const KernelTerms t = eval_terms(in);
  KernelOutput out;
  if (t.status != KernelStatus::Ok && t.status != KernelStatus::BranchAmbiguity) {
    out.status = t.status;
    return out;
  }
  const double zM = in.zM, X = in.x, Z = in.z;
  const double aY = std::abs(in.y);
  const double sq = std::sqrt(1.0 + zM * zM);
  const C i{0.0, 1.0};
  const auto atanhc = [](const C& w) { return 0.5 * std::log((1.0 + w) / (1.0 - w)); };

  C sum = (zM * in.y * in.y - X * t.G) * (t.LP1 + t.LM1 - t.LP2 - t.LM2) +
          i * aY * (zM * X + t.G) * (t.LP1 - t.LM1 - t.LP2 + t.LM2);
  if (t.S1 != 0.0) {
    const double aZ = std::abs(Z);
    const C ta1 = atanhc(C{t.R1, t.I1} / (t.D11 * aZ));
    const C ta1c = atanhc(C{t.R1, -t.I1} / (t.D11 * aZ));
    const C ta2 = atanhc(C{t.R1, t.I2} / (t.D21 * aZ));
    const C ta2c = atanhc(C{t.R1, -t.I2} / (t.D21 * aZ));
    sum += -t.S1 * X * (ta1 + ta1c - ta2 - ta2c) +
           i * t.S1 * aY * (ta1 - ta1c - ta2 + ta2c);
  }
  sum += 2.0 * t.G / sq * std::log((sq * t.D12 - t.E1) / (sq * t.D21 - t.E2));
  if (Z != 0.0) {
    sum += 2.0 * Z * std::log((t.D21 - X + 1.0) / (t.D11 - X));
  }
  out.value = 0.5 * sum.real();
  out.imagResidue = 0.5 * std::abs(sum.imag());
  if (!std::isfinite(out.value)) {
    out.status = KernelStatus::NonFiniteResult;
  } else if (out.imagResidue > 1e-10 * std::max(1.0, std::abs(out.value))) {
    out.status = KernelStatus::BranchAmbiguity;
  } else if (out.value <= 0.0) {
    out.status = KernelStatus::NegativePotential;
  }
  return out;
}

}  // namespace tripanel

#endif
