// Command-line harness: influence sweeps, quadrature error studies, kernel
// timing, and the unit square plate capacitance benchmark. All outputs are
// CSV with a versioned header comment, full precision (17 significant
// digits), suitable for any external plotter.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tripanel/csv.hpp"
#include "tripanel/eval.hpp"
#include "tripanel/kernel.hpp"
#include "tripanel/quadrature.hpp"
#include "tripanel/solver.hpp"

namespace {

using namespace tripanel;

constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;

struct OutputTarget {
  std::ofstream file;
  std::ostream* os = &std::cout;

  bool open(const std::string& path) {
    if (path.empty()) return true;
    file.open(path);
    if (!file) {
      std::cerr << "error: cannot open output file " << path << "\n";
      return false;
    }
    os = &file;
    return true;
  }
};

/// key=value policy file, e.g. "distance_floor=1e-8".
bool load_policy_file(const std::string& path, EvalPolicy& policy) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "error: cannot read policy file " << path << "\n";
    return false;
  }
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t");
      const auto b = s.find_last_not_of(" \t");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) continue;
    try {
      if (key == "distance_floor") policy.distanceFloor = std::stod(value);
      else if (key == "special_band") policy.specialBand = std::stod(value);
      else if (key == "far_field_threshold") policy.farFieldThreshold = std::stod(value);
      else if (key == "fallback_tol") policy.fallbackTol = std::stod(value);
      else if (key == "kernel_guard_band") policy.kernelGuardBand = std::stod(value);
      else {
        std::cerr << "error: unknown policy key '" << key << "'\n";
        return false;
      }
    } catch (const std::exception&) {
      std::cerr << "error: bad value for policy key '" << key << "'\n";
      return false;
    }
  }
  return true;
}

bool parse_vec3(const std::string& s, Vec3& v) {
  std::istringstream in(s);
  char c1, c2;
  return static_cast<bool>(in >> v.x >> c1 >> v.y >> c2 >> v.z) && c1 == ',' && c2 == ',';
}

std::string flags_column(const InfluenceResult& r) {
  std::string out;
  for (const ApproxFlag& f : r.flags) {
    if (!out.empty()) out += ';';
    out += to_string(f.code);
  }
  return out;
}

int cmd_influence(double zM, const std::string& lineSpec, const std::string& gridPlane,
                  int samples, const EvalPolicy& policy, const std::string& outPath) {
  OutputTarget out;
  if (!out.open(outPath)) return kExitUsage;
  PanelElement element{TrianglePrimitive{zM}, ElementFrame{}, 1.0};

  std::vector<Vec3> points;
  if (!gridPlane.empty()) {
    if (gridPlane != "XZ" && gridPlane != "XY") {
      std::cerr << "error: --grid-plane must be XZ or XY\n";
      return kExitUsage;
    }
    if (samples < 2) {
      std::cerr << "error: a grid needs at least 2 samples per side\n";
      return kExitUsage;
    }
    // Contour-ready grid over the element neighbourhood on the given plane.
    const double lo = -0.5, hiX = 1.5;
    const double hiZ = 1.5 * zM;
    const int nSide = samples;
    for (int i = 0; i < nSide; ++i) {
      for (int j = 0; j < nSide; ++j) {
        const double a = lo + (hiX - lo) * i / (nSide - 1.0);
        const double b = lo + (hiZ - lo) * j / (nSide - 1.0);
        if (gridPlane == "XZ") points.push_back({a, 0.0, b});
        else points.push_back({a, b, 0.0});
      }
    }
  } else {
    Vec3 a, b;
    std::istringstream in(lineSpec);
    std::string sa, sb;
    if (!(in >> sa >> sb) || !parse_vec3(sa, a) || !parse_vec3(sb, b)) {
      std::cerr << "error: --line expects 'x,y,z x,y,z'\n";
      return kExitUsage;
    }
    for (int i = 0; i < samples; ++i) {
      const double t = samples == 1 ? 0.0 : static_cast<double>(i) / (samples - 1);
      points.push_back(a + (b - a) * t);
    }
  }

  *out.os << "# tripanel influence v1\n";
  *out.os << "x,y,z,phi,fx,fy,fz,path,flags\n";
  for (const Vec3& p : points) {
    try {
      const InfluenceResult r = influence(element, p, policy);
      *out.os << csv_num(p.x) << ',' << csv_num(p.y) << ',' << csv_num(p.z) << ','
              << csv_num(r.potential) << ',' << csv_num(r.flux.x) << ','
              << csv_num(r.flux.y) << ',' << csv_num(r.flux.z) << ','
              << to_string(r.path) << ',' << flags_column(r) << '\n';
    } catch (const UnresolvableEvaluation& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitNumerical;
    }
  }
  return 0;
}

int cmd_validate(double zM, int samples, const std::string& outPath) {
  OutputTarget out;
  if (!out.open(outPath)) return kExitUsage;
  const Vec3 centroid{1.0 / 3.0, 0.0, zM / 3.0};

  *out.os << "# tripanel validate v1\n";
  *out.os << "t,distance,relerr_centroid,relerr_10x10,relerr_100x100\n";
  struct Crossing {
    double centroid = -1.0, q10 = -1.0;
  } cross;
  double farErrCentroid = -1.0;
  double prevDist = -1.0;

  // March inward from 1000 units along the space diagonal; the exact kernel
  // is the reference.
  std::vector<double> ts;
  for (int i = 0; i < samples; ++i) {
    const double t = 1000.0 * std::pow(10.0, -3.8 * i / (samples - 1.0));  // 1000 -> ~0.16
    ts.push_back(t);
  }
  for (const double t : ts) {
    const Vec3 p{t, t, t};
    const KernelOutput exact = tri_potential({zM, p.x, p.y, p.z});
    if (!exact.ok()) continue;
    const double dist = norm(p - centroid);
    const double eC =
        std::abs(centroid_influence(zM, p).potential - exact.value) / exact.value;
    const double e10 =
        std::abs(quad_influence(zM, p, {10, 10, QuadratureRule::Midpoint}).potential -
                 exact.value) /
        exact.value;
    const double e100 =
        std::abs(quad_influence(zM, p, {100, 100, QuadratureRule::Midpoint}).potential -
                 exact.value) /
        exact.value;
    *out.os << csv_num(t) << ',' << csv_num(dist) << ',' << csv_num(eC) << ','
            << csv_num(e10) << ',' << csv_num(e100) << '\n';
    if (cross.centroid < 0 && eC > 0.01) cross.centroid = prevDist;
    if (cross.q10 < 0 && e10 > 0.01) cross.q10 = prevDist;
    if (farErrCentroid < 0 && dist <= 500.0) farErrCentroid = eC;
    prevDist = dist;
  }
  std::cerr << "centroid 1% crossing: " << cross.centroid << " units\n";
  std::cerr << "10x10 1% crossing: " << cross.q10 << " units\n";
  std::cerr << "centroid error at 500 units: " << farErrCentroid << "\n";
  const bool ok = cross.centroid > 10.0 && cross.centroid < 40.0 && cross.q10 > 1.0 &&
                  cross.q10 < 4.0 && farErrCentroid < 1e-5;
  std::cerr << (ok ? "far-field thresholds: PASS\n" : "far-field thresholds: FAIL\n");
  return ok ? 0 : kExitNumerical;
}

int cmd_bench(double zM, uint64_t seed, const std::string& outPath) {
  OutputTarget out;
  if (!out.open(outPath)) return kExitUsage;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-5.0, 5.0);
  auto nextPoint = [&]() {
    while (true) {
      const Vec3 p{U(rng), U(rng), U(rng)};
      if (std::abs(p.y) > 0.05) return p;
    }
  };
  double sink = 0.0;
  auto timeOne = [&](auto f, long iters) {
    for (long i = 0; i < std::max(100L, iters / 100); ++i) sink += f(nextPoint());
    const auto t0 = std::chrono::steady_clock::now();
    for (long i = 0; i < iters; ++i) sink += f(nextPoint());
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::nano>(t1 - t0).count() / iters;
  };

  const double tExact = timeOne(
      [&](const Vec3& p) {
        const InfluenceOutput r = tri_influence({zM, p.x, p.y, p.z});
        return r.potential.value + r.flux.fx.value;
      },
      100000);
  const double tCentroid = timeOne(
      [&](const Vec3& p) {
        const QuadResult r = centroid_influence(zM, p);
        return r.potential + r.flux.x;
      },
      100000);
  auto quadTimer = [&](int n, long iters) {
    return timeOne(
        [&, n](const Vec3& p) {
          const QuadResult r = quad_influence(zM, p, {n, n, QuadratureRule::Midpoint});
          return r.potential + r.flux.x;
        },
        iters);
  };
  const double t10 = quadTimer(10, 10000);
  const double t100 = quadTimer(100, 1000);
  const double t500 = quadTimer(500, 100);

  *out.os << "# tripanel bench v1\n";
  *out.os << "method,mean_ns_per_eval\n";
  *out.os << "exact," << csv_num(tExact) << '\n';
  *out.os << "centroid," << csv_num(tCentroid) << '\n';
  *out.os << "quad10x10," << csv_num(t10) << '\n';
  *out.os << "quad100x100," << csv_num(t100) << '\n';
  *out.os << "quad500x500," << csv_num(t500) << '\n';
  std::cerr << "exact " << tExact << " ns, centroid " << tCentroid << " ns, 10x10 "
            << t10 << " ns, 100x100 " << t100 << " ns, 500x500 " << t500
            << " ns (sink " << (sink != 0) << ")\n";
  return 0;
}

/// Reference capacitance values from earlier studies of the same benchmark,
/// printed alongside the computed sweep for comparison. Never used in any
/// computation.
struct ReferenceCapacitance {
  const char* source;
  const char* method;
  double value;
};
constexpr ReferenceCapacitance kReferenceCapacitance[] = {
    {"Maxwell 1878", "surface charge", 0.3607},
    {"Reitan-Higgins 1951", "surface charge", 0.362},
    {"Solomon 1964", "surface charge", 0.367},
    {"Goto-Shi-Yoshida 1992", "refined surface charge + extrapolation", 0.3667892},
    {"Read 1997", "refined boundary element + extrapolation", 0.3667874},
    {"Mansfield 2001", "numerical path integration", 0.36684},
    {"Wintle 2004", "random walk", 0.36},
    {"triangular-element exact BEM", "reported converged run", 0.3660587},
};

int cmd_plate(const std::vector<int>& ns, double windowMax, const EvalPolicy& policy,
              const std::string& outPath, const std::string& cornerPath,
              const std::string& meshPath, const std::string& matrixPath) {
  OutputTarget out;
  if (!out.open(outPath)) return kExitUsage;
  *out.os << "# tripanel plate v1\n";
  *out.os << "n,elements,cap_over_4pieps0,residual_norm\n";
  BemSystem last;
  try {
    for (const int n : ns) {
      BemSystem sys = assemble(mesh_unit_plate(n), policy);
      solve(sys);
      const CapacitanceReport rep = capacitance(sys);
      *out.os << rep.n << ',' << rep.nElements << ',' << csv_num(rep.capOver4PiEps0)
              << ',' << csv_num(rep.residualNorm) << '\n';
      std::cerr << "n=" << rep.n << " elements=" << rep.nElements
                << " C/4pieps0=" << rep.capOver4PiEps0 << " residual=" << rep.residualNorm
                << "\n";
      last = std::move(sys);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }

  std::cerr << "reference values (comparison only):\n";
  for (const auto& r : kReferenceCapacitance) {
    std::cerr << "  " << r.value << "  " << r.source << " (" << r.method << ")\n";
  }

  if (!cornerPath.empty() && !last.solution.empty()) {
    std::ofstream cf(cornerPath);
    if (!cf) {
      std::cerr << "error: cannot open " << cornerPath << "\n";
      return kExitUsage;
    }
    try {
      const CornerProfile prof = corner_profile(last, {0.0, windowMax});
      cf << "# tripanel corner-profile v1\n";
      cf << "r,sigma\n";
      for (const auto& [r, sigma] : prof.samples) {
        cf << csv_num(r) << ',' << csv_num(sigma) << '\n';
      }
      std::cerr << "corner fit: slope " << prof.fitSlope << " over r in (0, " << windowMax
                << "], " << prof.samples.size() << " band samples\n";
    } catch (const InsufficientSamples& e) {
      std::cerr << "warning: " << e.what() << " (mesh too coarse for the window)\n";
    }
  }
  if (!meshPath.empty() && !last.solution.empty()) {
    std::ofstream mf(meshPath);
    if (!mf) {
      std::cerr << "error: cannot open " << meshPath << "\n";
      return kExitUsage;
    }
    export_mesh_csv(mf, last);
  }
  if (!matrixPath.empty() && last.matrix.n > 0) {
    std::ofstream xf(matrixPath);
    if (!xf) {
      std::cerr << "error: cannot open " << matrixPath << "\n";
      return kExitUsage;
    }
    export_matrix_csv(xf, last.matrix);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Influence library and BEM plate benchmark driver"};
  app.require_subcommand(1);

  EvalPolicy policy;
  std::string policyFile;
  app.add_option("--policy-file", policyFile, "key=value evaluation policy file");

  double zM = 1.0;
  std::string lineSpec = "-2,-2,-2 2,2,2";
  std::string gridPlane;
  int samples = 401;
  std::string outPath;

  CLI::App* inf = app.add_subcommand("influence", "potential/flux along a line or grid");
  inf->add_option("--zM", zM, "normalized z-leg of the triangle");
  inf->add_option("--line", lineSpec, "line endpoints 'x,y,z x,y,z'");
  inf->add_option("--grid-plane", gridPlane, "XZ or XY grid instead of a line");
  inf->add_option("--samples", samples, "points per line (or per grid side)");
  inf->add_option("--out", outPath, "output CSV path (default stdout)");
  inf->add_option("--far-field", policy.farFieldThreshold,
                  "centroid approximation beyond this many longest sides");

  CLI::App* val = app.add_subcommand("validate", "error vs distance for quadratures");
  double valZM = 10.0;
  int valSamples = 400;
  std::string valOut;
  val->add_option("--zM", valZM, "normalized z-leg");
  val->add_option("--samples", valSamples, "sample count along the diagonal");
  val->add_option("--out", valOut, "output CSV path");

  CLI::App* ben = app.add_subcommand("bench", "evaluation timing table");
  double benZM = 10.0;
  uint64_t seed = 20080807;
  std::string benOut;
  ben->add_option("--zM", benZM, "normalized z-leg");
  ben->add_option("--seed", seed, "random point seed");
  ben->add_option("--out", benOut, "output CSV path");

  CLI::App* plate = app.add_subcommand("plate", "unit square plate capacitance sweep");
  std::vector<int> ns{4, 8, 16, 32};
  double windowMax = 0.3536;
  std::string plateOut, cornerOut, meshOut, matrixOut;
  plate->add_option("--n", ns, "squares per side, nondecreasing list");
  plate->add_option("--corner-window", windowMax, "corner fit window upper r");
  plate->add_option("--out", plateOut, "capacitance CSV path");
  plate->add_option("--corner-out", cornerOut, "corner profile CSV path");
  plate->add_option("--mesh-out", meshOut, "mesh + solution CSV path");
  plate->add_option("--matrix-out", matrixOut, "influence matrix CSV dump (debug)");

  CLI11_PARSE(app, argc, argv);

  if (!policyFile.empty() && !load_policy_file(policyFile, policy)) return kExitUsage;
  if (policy.farFieldEnabled() && policy.farFieldThreshold < 2.0) {
    std::cerr << "error: far-field threshold must be at least 2 element lengths\n";
    return kExitUsage;
  }
  if (!(policy.distanceFloor > 0) || !(policy.distanceFloor < policy.specialBand)) {
    std::cerr << "error: distance floor must be positive and below the special band\n";
    return kExitUsage;
  }

  if (inf->parsed()) {
    if (zM <= 0 || samples < 1 || !std::isfinite(zM)) {
      std::cerr << "error: invalid parameters\n";
      return kExitUsage;
    }
    return cmd_influence(zM, lineSpec, gridPlane, samples, policy, outPath);
  }
  if (val->parsed()) {
    if (valZM <= 0 || valSamples < 2) {
      std::cerr << "error: invalid parameters\n";
      return kExitUsage;
    }
    return cmd_validate(valZM, valSamples, valOut);
  }
  if (ben->parsed()) {
    if (benZM <= 0) {
      std::cerr << "error: invalid parameters\n";
      return kExitUsage;
    }
    return cmd_bench(benZM, seed, benOut);
  }
  if (plate->parsed()) {
    if (ns.empty() || !std::is_sorted(ns.begin(), ns.end())) {
      std::cerr << "error: --n must be a nondecreasing list\n";
      return kExitUsage;
    }
    for (const int n : ns) {
      if (n < 1 || n > 45) {
        std::cerr << "error: n out of the dense-solve budget [1, 45]\n";
        return kExitUsage;
      }
    }
    return cmd_plate(ns, windowMax, policy, plateOut, cornerOut, meshOut, matrixOut);
  }
  return kExitUsage;
}
