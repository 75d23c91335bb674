#include "tdbem/assembly.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

namespace tdbem {

namespace {

constexpr double kInv2Pi = 1.0 / (2.0 * M_PI);

struct TriGeom {
  std::array<int, 3> vid;
  Vec3 v[3];
  Vec3 n;          // unit normal, CCW orientation
  double area = 0;
  Vec3 t1, t2;     // in-plane orthonormal frame
  double q[3][2];  // vertices in the (t1,t2) frame relative to v[0]
  double binv[2][2];  // 2d offset -> (lambda_1, lambda_2)
  Vec3 curl[3];    // surface curl of the P1 hats: -e_a / (2A)
  Vec3 c;          // centroid
  double rad = 0;  // centroid-to-vertex radius
};

TriGeom make_tri_geom(const SurfaceMesh& mesh, int t) {
  TriGeom g;
  g.vid = mesh.triangles[t];
  for (int k = 0; k < 3; ++k) g.v[k] = mesh.vertices[g.vid[k]];
  Vec3 e1 = g.v[1] - g.v[0], e2 = g.v[2] - g.v[0];
  Vec3 nn = cross(e1, e2);
  double n2 = norm(nn);
  g.area = 0.5 * n2;
  g.n = (1.0 / n2) * nn;
  g.t1 = normalized(e1);
  g.t2 = cross(g.n, g.t1);
  g.q[0][0] = g.q[0][1] = 0;
  g.q[1][0] = dot(e1, g.t1);
  g.q[1][1] = dot(e1, g.t2);
  g.q[2][0] = dot(e2, g.t1);
  g.q[2][1] = dot(e2, g.t2);
  double a11 = g.q[1][0], a12 = g.q[2][0], a21 = g.q[1][1], a22 = g.q[2][1];
  double det = a11 * a22 - a12 * a21;
  g.binv[0][0] = a22 / det;
  g.binv[0][1] = -a12 / det;
  g.binv[1][0] = -a21 / det;
  g.binv[1][1] = a11 / det;
  // opposite edge vectors, CCW: e_0 = v2 - v1, e_1 = v0 - v2, e_2 = v1 - v0
  Vec3 e[3] = {g.v[2] - g.v[1], g.v[0] - g.v[2], g.v[1] - g.v[0]};
  for (int k = 0; k < 3; ++k) g.curl[k] = (-1.0 / (2.0 * g.area)) * e[k];
  g.c = (1.0 / 3.0) * (g.v[0] + g.v[1] + g.v[2]);
  for (int k = 0; k < 3; ++k) g.rad = std::max(g.rad, norm(g.v[k] - g.c));
  return g;
}

// Temporal Galerkin weights as functions of the lag j and the distance r.
// Trial functions are the time hats beta^m, test functions the piecewise
// constants gamma^n or their derivatives; j = n - m. All weights are
// supported on (j-2)dt < r < (j+1)dt.
struct Weights {
  double g;    // int beta(t-r) gamma
  double gd;   // int beta'(t-r) gamma
  double gw2;  // int beta''(t-r) gamma
  double fV;   // int beta(t-r) gamma'
  double fK1;  // int beta'(t-r) gamma'
};

inline Weights eval_weights(int j, double r, double dt) {
  Weights w;
  double s1 = j * dt - r, s0 = s1 - dt;
  w.g = hat_primitive(s1, dt) - hat_primitive(s0, dt);
  w.gd = hat(s1, dt) - hat(s0, dt);
  w.fV = -w.gd;
  w.fK1 = hat_deriv(s0, dt) - hat_deriv(s1, dt);
  double q = r / dt;
  int box = static_cast<int>(std::floor(q));  // r in [box*dt, (box+1)*dt)
  w.gw2 = 0;
  if (box == j) w.gw2 = 1.0 / dt;
  else if (box == j - 1) w.gw2 = -2.0 / dt;
  else if (box == j - 2) w.gw2 = 1.0 / dt;
  return w;
}

inline void lag_range(double r, double dt, int cap, int& jlo, int& jhi) {
  jlo = std::max(0, static_cast<int>(std::ceil(r / dt)) - 1);
  jhi = std::min(cap, static_cast<int>(std::floor(r / dt)) + 2);
}

constexpr int CH_V = 0, CH_K = 1, CH_KP = 2, CH_W = 3, CH_VG = 4, N_CH = 5;
constexpr unsigned M_V = 1u << CH_V, M_K = 1u << CH_K, M_KP = 1u << CH_KP, M_W = 1u << CH_W,
                   M_VG = 1u << CH_VG;

struct PairAccum {
  int jlo = 0, jhi = -1;
  std::vector<double> data;  // [(j-jlo) * N_CH * 9 + ch * 9 + a * 3 + b]

  void reset(int lo, int hi) {
    jlo = lo;
    jhi = hi;
    data.assign(hi >= lo ? (hi - lo + 1) * N_CH * 9 : 0, 0.0);
  }
  double* at(int j, int ch) { return data.data() + ((j - jlo) * N_CH + ch) * 9; }
};

struct InnerRule {
  int n_ang = 4;       // Gauss points per angular panel
  double panel = M_PI / 4;  // target angular panel width
  int n_rad = 4;       // Gauss points per radial light-cone segment
};

// Inner integral over trial triangle S for a fixed test point x, polar
// coordinates about the projection of x with exact radial splits at the
// light-cone radii r = k*dt. Accumulates into acc with outer weight wx.
void inner_polar(const Vec3& x, const double xi_x[3], double wx, const TriGeom& T,
                 const TriGeom& S, double dt, int cap, unsigned mask, const InnerRule& rule,
                 const double cucu[3][3], PairAccum& acc) {
  Vec3 d0 = x - S.v[0];
  double z = dot(d0, S.n);
  double az = std::abs(z);
  double px = dot(d0, S.t1), py = dot(d0, S.t2);
  double cn = dot(T.n, S.n);

  const GaussRule1D& ga = gauss_rule(rule.n_ang);
  const GaussRule1D& gr = gauss_rule(rule.n_rad);

  double scale = std::max({norm(S.v[1] - S.v[0]), norm(S.v[2] - S.v[0]), 1e-300});

  for (int e = 0; e < 3; ++e) {
    double u1x = S.q[e][0] - px, u1y = S.q[e][1] - py;
    int e2i = (e + 1) % 3;
    double u2x = S.q[e2i][0] - px, u2y = S.q[e2i][1] - py;
    double cr = u1x * u2y - u1y * u2x;
    if (std::abs(cr) < 1e-14 * scale * scale) continue;
    double sgn = cr > 0 ? 1.0 : -1.0;
    double dotu = u1x * u2x + u1y * u2y;
    double theta_tot = std::atan2(std::abs(cr), dotu);
    double th1 = std::atan2(u1y, u1x);
    // line through u1,u2: m . p = mc
    double ex = u2x - u1x, ey = u2y - u1y;
    double el = std::hypot(ex, ey);
    double mx = ey / el, my = -ex / el;
    double mc = mx * u1x + my * u1y;

    int n_pan = std::max(1, static_cast<int>(std::ceil(theta_tot / rule.panel)));
    double dth = theta_tot / n_pan;
    for (int p = 0; p < n_pan; ++p) {
      for (int ia = 0; ia < rule.n_ang; ++ia) {
        double theta = (p + ga.x[ia]) * dth;
        double wth = ga.w[ia] * dth;
        double cth = std::cos(th1 + sgn * theta), sth = std::sin(th1 + sgn * theta);
        double denom = mx * cth + my * sth;
        if (std::abs(denom) < 1e-14) continue;
        double R = mc / denom;
        if (R <= 0) continue;
        // rays inside the sector hit the edge segment, so R is bounded by
        // the corner distances; enforce it against roundoff
        R = std::min(R, 1.0000001 * std::max(std::hypot(u1x, u1y), std::hypot(u2x, u2y)));

        // radial breakpoints where r = k*dt crosses the ray
        double seg_lo = 0.0;
        int k = static_cast<int>(std::floor(az / dt)) + 1;
        double rmax_ray = std::hypot(R, z);
        int kmax = static_cast<int>(std::floor(rmax_ray / dt));
        while (true) {
          double seg_hi = R;
          if (k <= kmax) {
            double rk = k * dt;
            double rho_k = std::sqrt(std::max(0.0, rk * rk - z * z));
            if (rho_k < R) seg_hi = rho_k;
            else k = kmax + 1;
          }
          if (seg_hi > seg_lo + 1e-15 * scale) {
            double len = seg_hi - seg_lo;
            for (int ir = 0; ir < rule.n_rad; ++ir) {
              double rho = seg_lo + gr.x[ir] * len;
              double wrho = gr.w[ir] * len * rho * sgn * wth * wx;
              double yx = px + rho * cth, yy = py + rho * sth;
              double l1 = S.binv[0][0] * yx + S.binv[0][1] * yy;
              double l2 = S.binv[1][0] * yx + S.binv[1][1] * yy;
              double xi_y[3] = {1.0 - l1 - l2, l1, l2};
              double r = std::hypot(rho, z);
              if (r < 1e-14) continue;
              Vec3 y = S.v[0] + yx * S.t1 + yy * S.t2;
              Vec3 dxy = x - y;
              double cyv = dot(S.n, dxy);        // n_y . (x-y)
              double cxv = -dot(T.n, dxy);       // n_x . (y-x)
              int jlo, jhi;
              lag_range(r, dt, cap, jlo, jhi);
              jlo = std::max(jlo, acc.jlo);
              jhi = std::min(jhi, acc.jhi);
              double inv_r = 1.0 / r, inv_r2 = inv_r * inv_r, inv_r3 = inv_r2 * inv_r;
              for (int j = jlo; j <= jhi; ++j) {
                Weights w = eval_weights(j, r, dt);
                if (mask & M_V) {
                  double cV = w.fV * inv_r * wrho;
                  double* o = acc.at(j, CH_V);
                  for (int a = 0; a < 3; ++a)
                    for (int b = 0; b < 3; ++b) o[a * 3 + b] += cV * xi_x[a] * xi_y[b];
                }
                if (mask & M_VG) {
                  double cVG = w.g * inv_r * wrho;
                  double* o = acc.at(j, CH_VG);
                  for (int a = 0; a < 3; ++a)
                    for (int b = 0; b < 3; ++b) o[a * 3 + b] += cVG * xi_x[a] * xi_y[b];
                }
                if (mask & M_K) {
                  double cK = cyv * (w.fK1 * inv_r2 + w.fV * inv_r3) * wrho;
                  double* o = acc.at(j, CH_K);
                  for (int a = 0; a < 3; ++a)
                    for (int b = 0; b < 3; ++b) o[a * 3 + b] += cK * xi_x[a] * xi_y[b];
                }
                if (mask & M_KP) {
                  double cKP = cxv * (w.gd * inv_r2 + w.g * inv_r3) * wrho;
                  double* o = acc.at(j, CH_KP);
                  for (int a = 0; a < 3; ++a)
                    for (int b = 0; b < 3; ++b) o[a * 3 + b] += cKP * xi_x[a] * xi_y[b];
                }
                if (mask & M_W) {
                  // regularized form: surface curls plus second time derivative
                  double cWc = -w.g * inv_r * wrho;
                  double cWn = -cn * w.gw2 * inv_r * wrho;
                  double* o = acc.at(j, CH_W);
                  for (int a = 0; a < 3; ++a)
                    for (int b = 0; b < 3; ++b)
                      o[a * 3 + b] += cWc * cucu[a][b] + cWn * xi_x[a] * xi_y[b];
                }
              }
            }
          }
          seg_lo = seg_hi;
          ++k;
          if (seg_lo >= R - 1e-15 * scale) break;
        }
      }
    }
  }
}

// Uniform-subdivision fallback rule for the inner integral (cross-checks).
void inner_subdivision(const Vec3& x, const double xi_x[3], double wx, const TriGeom& T,
                       const TriGeom& S, double dt, int cap, unsigned mask, int depth,
                       const double cucu[3][3], PairAccum& acc) {
  int ndiv = 1 << depth;
  double nd = static_cast<double>(ndiv);
  double cn = dot(T.n, S.n);
  const auto& rule = triangle_rule(2);
  // subdivide the reference triangle into ndiv^2 congruent cells
  for (int iu = 0; iu < ndiv; ++iu) {
    for (int iv = 0; iv + iu < ndiv; ++iv) {
      for (int up = 0; up < 2; ++up) {
        if (up == 1 && iv + iu + 2 > ndiv) continue;
        for (const auto& qp : rule) {
          double l1, l2;
          if (up == 0) {
            l1 = (iu + qp.a) / nd;
            l2 = (iv + qp.b) / nd;
          } else {
            l1 = (iu + 1 - qp.a) / nd;
            l2 = (iv + 1 - qp.b) / nd;
          }
          double xi_y[3] = {1.0 - l1 - l2, l1, l2};
          Vec3 y = xi_y[0] * S.v[0] + xi_y[1] * S.v[1] + xi_y[2] * S.v[2];
          double w = qp.w * S.area / (nd * nd) * wx;
          Vec3 dxy = x - y;
          double r = norm(dxy);
          if (r < 1e-14) continue;
          double cyv = dot(S.n, dxy), cxv = -dot(T.n, dxy);
          int jlo, jhi;
          lag_range(r, dt, cap, jlo, jhi);
          jlo = std::max(jlo, acc.jlo);
          jhi = std::min(jhi, acc.jhi);
          double inv_r = 1.0 / r, inv_r2 = inv_r * inv_r, inv_r3 = inv_r2 * inv_r;
          for (int j = jlo; j <= jhi; ++j) {
            Weights ww = eval_weights(j, r, dt);
            if (mask & M_V) {
              double c = ww.fV * inv_r * w;
              double* o = acc.at(j, CH_V);
              for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) o[a * 3 + b] += c * xi_x[a] * xi_y[b];
            }
            if (mask & M_VG) {
              double c = ww.g * inv_r * w;
              double* o = acc.at(j, CH_VG);
              for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) o[a * 3 + b] += c * xi_x[a] * xi_y[b];
            }
            if (mask & M_K) {
              double c = cyv * (ww.fK1 * inv_r2 + ww.fV * inv_r3) * w;
              double* o = acc.at(j, CH_K);
              for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) o[a * 3 + b] += c * xi_x[a] * xi_y[b];
            }
            if (mask & M_KP) {
              double c = cxv * (ww.gd * inv_r2 + ww.g * inv_r3) * w;
              double* o = acc.at(j, CH_KP);
              for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) o[a * 3 + b] += c * xi_x[a] * xi_y[b];
            }
            if (mask & M_W) {
              double cWc = -ww.g * inv_r * w;
              double cWn = -cn * ww.gw2 * inv_r * w;
              double* o = acc.at(j, CH_W);
              for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                  o[a * 3 + b] += cWc * cucu[a][b] + cWn * xi_x[a] * xi_y[b];
            }
          }
        }
      }
    }
  }
}

void integrate_pair(const TriGeom& T, const TriGeom& S, double dt, int cap, unsigned mask,
                    const QuadratureConfig& quad, PairAccum& acc) {
  double cdist = norm(T.c - S.c);
  double rmin = std::max(0.0, cdist - T.rad - S.rad);
  double rmax = cdist + T.rad + S.rad;
  int jlo = std::max(0, static_cast<int>(std::ceil(rmin / dt)) - 1);
  int jhi = std::min(cap, static_cast<int>(std::floor(rmax / dt)) + 3);
  acc.reset(jlo, jhi);
  if (jhi < jlo) return;

  bool near = cdist <= quad.nearfield_threshold * 2.0 * std::max(T.rad, S.rad);
  InnerRule rule;
  rule.n_rad = quad.inner_order + (near ? 2 : 0);
  rule.panel = near ? M_PI / (4.0 * (1 + quad.subdivision_depth)) : M_PI / 4.0;
  rule.n_ang = 4;

  double cucu[3][3];
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) cucu[a][b] = dot(T.curl[a], S.curl[b]);

  const auto& outer = triangle_rule(quad.outer_order + (near ? 1 : 0));
  for (const auto& qp : outer) {
    double xi_x[3] = {1.0 - qp.a - qp.b, qp.a, qp.b};
    Vec3 x = xi_x[0] * T.v[0] + xi_x[1] * T.v[1] + xi_x[2] * T.v[2];
    double wx = qp.w * T.area;
    if (quad.use_subdivision_fallback)
      inner_subdivision(x, xi_x, wx, T, S, dt, cap, mask, quad.subdivision_depth, cucu, acc);
    else
      inner_polar(x, xi_x, wx, T, S, dt, cap, mask, rule, cucu, acc);
  }
  for (double& v : acc.data) v *= kInv2Pi;
}

}  // namespace

TemporalTest default_test(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::SingleLayer:
    case OperatorKind::DoubleLayer: return TemporalTest::ConstantDerivative;
    default: return TemporalTest::Constant;
  }
}

std::string kind_name(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::SingleLayer: return "V";
    case OperatorKind::DoubleLayer: return "K";
    case OperatorKind::AdjointDoubleLayer: return "K'";
    case OperatorKind::Hypersingular: return "W";
  }
  return "?";
}

int causal_lag_bound(const SurfaceMesh& mesh, const TimeGrid& grid) {
  double diam = mesh_stats(mesh).diameter;
  int L = static_cast<int>(std::ceil(diam / grid.dt)) + 2;
  return std::min(L, std::max(grid.n_steps - 1, 0));
}

int worker_count() {
  if (const char* env = std::getenv("TDBEM_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc ? static_cast<int>(hc) : 1;
}

namespace {

// Static range split over test triangles; each worker accumulates a local
// row strip which is merged in worker order, so results do not depend on
// scheduling for a fixed worker count.
template <class PairFn>
void parallel_pair_sweep(int n_test, int n_workers, PairFn&& fn) {
  std::vector<std::thread> threads;
  int chunk = (n_test + n_workers - 1) / n_workers;
  for (int w = 0; w < n_workers; ++w) {
    int lo = w * chunk, hi = std::min(n_test, lo + chunk);
    if (lo >= hi) break;
    threads.emplace_back([&fn, w, lo, hi]() { fn(w, lo, hi); });
  }
  for (auto& t : threads) t.join();
}

}  // namespace

BlockSeries assemble_series(const SurfaceMesh& mesh, const TimeGrid& grid, OperatorKind kind,
                            const QuadratureConfig& quad) {
  return assemble_series(mesh, grid, kind, quad, default_test(kind));
}

BlockSeries assemble_series(const SurfaceMesh& mesh, const TimeGrid& grid, OperatorKind kind,
                            const QuadratureConfig& quad, TemporalTest test_family) {
  if (quad.outer_order < 1 || quad.inner_order < 1)
    throw std::invalid_argument("quadrature order must be >= 1");
  int nv = mesh.n_vertices();
  int L = causal_lag_bound(mesh, grid);
  int ch;
  if (kind == OperatorKind::SingleLayer)
    ch = test_family == TemporalTest::Constant ? CH_VG : CH_V;
  else if (kind == OperatorKind::DoubleLayer)
    ch = CH_K;
  else if (kind == OperatorKind::AdjointDoubleLayer)
    ch = CH_KP;
  else
    ch = CH_W;

  BlockSeries out;
  out.kind = kind_name(kind);
  out.dt = grid.dt;
  out.n_rows = out.n_cols = nv;
  out.blocks.assign(L + 1, Matrix::Zero(nv, nv));

  std::vector<TriGeom> geom;
  geom.reserve(mesh.n_triangles());
  for (int t = 0; t < mesh.n_triangles(); ++t) geom.push_back(make_tri_geom(mesh, t));

  int n_workers = worker_count();
  std::vector<std::vector<Matrix>> local(n_workers);
  parallel_pair_sweep(mesh.n_triangles(), n_workers, [&](int w, int lo, int hi) {
    auto& strip = local[w];
    strip.assign(L + 1, Matrix::Zero(nv, nv));
    PairAccum acc;
    for (int t = lo; t < hi; ++t) {
      for (int s = 0; s < mesh.n_triangles(); ++s) {
        integrate_pair(geom[t], geom[s], grid.dt, L, 1u << ch, quad, acc);
        for (int j = acc.jlo; j <= acc.jhi; ++j) {
          const double* o = acc.at(j, ch);
          for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
              strip[j](geom[t].vid[a], geom[s].vid[b]) += o[a * 3 + b];
        }
      }
    }
  });
  for (int w = 0; w < n_workers; ++w)
    if (!local[w].empty())
      for (int j = 0; j <= L; ++j) out.blocks[j] += local[w][j];
  return out;
}

Matrix assemble_block(const SurfaceMesh& mesh, const TimeGrid& grid, OperatorKind kind, int j,
                      const QuadratureConfig& quad) {
  if (j < 0) throw std::invalid_argument("assemble_block: lag must be >= 0");
  if (quad.outer_order < 1 || quad.inner_order < 1)
    throw std::invalid_argument("quadrature order must be >= 1");
  int nv = mesh.n_vertices();
  Matrix out = Matrix::Zero(nv, nv);
  int ch = kind == OperatorKind::SingleLayer     ? CH_V
           : kind == OperatorKind::DoubleLayer   ? CH_K
           : kind == OperatorKind::AdjointDoubleLayer ? CH_KP
                                                      : CH_W;
  std::vector<TriGeom> geom;
  for (int t = 0; t < mesh.n_triangles(); ++t) geom.push_back(make_tri_geom(mesh, t));
  PairAccum acc;
  for (int t = 0; t < mesh.n_triangles(); ++t)
    for (int s = 0; s < mesh.n_triangles(); ++s) {
      integrate_pair(geom[t], geom[s], grid.dt, j, 1u << ch, quad, acc);
      if (j >= acc.jlo && j <= acc.jhi) {
        const double* o = acc.at(j, ch);
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b) out(geom[t].vid[a], geom[s].vid[b]) += o[a * 3 + b];
      }
    }
  return out;
}

CoupledSystem assemble_coupled(const SurfaceMesh& mesh, const TimeGrid& grid,
                               const QuadratureConfig& quad, SpatialBasis multiplier_basis) {
  CoupledSystem sys;
  sys.dofs = make_dof_maps(mesh, multiplier_basis);
  if (sys.dofs.n_trace() == 0)
    throw std::runtime_error("assemble_coupled: empty trace dof set (all vertices pinned)");
  sys.mass = build_mass_matrices(mesh, sys.dofs, grid.dt);

  int nv = mesh.n_vertices();
  int ntr = sys.dofs.n_trace();
  int N = ntr + nv;
  int L = causal_lag_bound(mesh, grid);

  sys.M.kind = "coupled";
  sys.M.dt = grid.dt;
  sys.M.n_rows = sys.M.n_cols = N;
  sys.M.n_trace = ntr;
  sys.M.n_density = nv;
  sys.M.blocks.assign(L + 1, Matrix::Zero(N, N));

  std::vector<TriGeom> geom;
  for (int t = 0; t < mesh.n_triangles(); ++t) geom.push_back(make_tri_geom(mesh, t));
  std::vector<bool> has_free(mesh.n_triangles(), false);
  for (int t = 0; t < mesh.n_triangles(); ++t)
    for (int k = 0; k < 3; ++k)
      if (!mesh.dirichlet_vertex_mask[mesh.triangles[t][k]]) has_free[t] = true;

  const auto& tix = sys.dofs.trace_index;
  int n_workers = worker_count();
  std::vector<std::vector<Matrix>> local(n_workers);
  parallel_pair_sweep(mesh.n_triangles(), n_workers, [&](int w, int lo, int hi) {
    auto& strip = local[w];
    strip.assign(L + 1, Matrix::Zero(N, N));
    PairAccum acc;
    for (int t = lo; t < hi; ++t) {
      for (int s = 0; s < mesh.n_triangles(); ++s) {
        unsigned mask = M_V;
        if (has_free[s]) mask |= M_K;
        if (has_free[t]) mask |= M_KP;
        if (has_free[t] && has_free[s]) mask |= M_W;
        integrate_pair(geom[t], geom[s], grid.dt, L, mask, quad, acc);
        for (int j = acc.jlo; j <= acc.jhi; ++j) {
          for (int a = 0; a < 3; ++a) {
            int va = geom[t].vid[a];
            int ra_tr = tix[va];
            int ra_de = ntr + va;
            for (int b = 0; b < 3; ++b) {
              int vb = geom[s].vid[b];
              int cb_tr = tix[vb];
              int cb_de = ntr + vb;
              int ab = a * 3 + b;
              // system rows carry the negated literal pairings so the
              // diagonal blocks act positively
              strip[j](ra_de, cb_de) -= acc.at(j, CH_V)[ab];
              if (cb_tr >= 0) strip[j](ra_de, cb_tr) -= acc.at(j, CH_K)[ab];
              if (ra_tr >= 0) strip[j](ra_tr, cb_de) -= acc.at(j, CH_KP)[ab];
              if (ra_tr >= 0 && cb_tr >= 0) strip[j](ra_tr, cb_tr) -= acc.at(j, CH_W)[ab];
            }
          }
        }
      }
    }
  });
  for (int w = 0; w < n_workers; ++w)
    if (!local[w].empty())
      for (int j = 0; j <= L; ++j) sys.M.blocks[j] += local[w][j];

  // mass couplings from the identity terms, lags 0 and 1 only
  const Matrix& Ilin = sys.mass.I_lin;  // trace x density
  for (int j = 0; j <= std::min(L, 1); ++j) {
    sys.M.blocks[j].block(0, ntr, ntr, nv) += 0.5 * grid.dt * Ilin;
    double ihat = (j == 0) ? -1.0 : 1.0;
    sys.M.blocks[j].block(ntr, 0, nv, ntr) += ihat * Ilin.transpose();
  }
  return sys;
}

CoupledSystem assemble_punch(const SurfaceMesh& mesh, const TimeGrid& grid,
                             const QuadratureConfig& quad, SpatialBasis multiplier_basis) {
  CoupledSystem sys;
  sys.dofs = make_dof_maps(mesh, multiplier_basis);
  if (sys.dofs.n_trace() == 0)
    throw std::runtime_error("assemble_punch: empty dof set (all vertices pinned)");
  sys.mass = build_mass_matrices(mesh, sys.dofs, grid.dt);

  int ntr = sys.dofs.n_trace();
  int L = causal_lag_bound(mesh, grid);
  sys.M.kind = "punch-V";
  sys.M.dt = grid.dt;
  sys.M.n_rows = sys.M.n_cols = ntr;
  sys.M.n_trace = ntr;
  sys.M.n_density = 0;
  sys.M.blocks.assign(L + 1, Matrix::Zero(ntr, ntr));

  auto contact = mesh.contact_triangles();
  std::vector<TriGeom> geom;
  for (int t : contact) geom.push_back(make_tri_geom(mesh, t));
  const auto& tix = sys.dofs.trace_index;

  int n_workers = worker_count();
  std::vector<std::vector<Matrix>> local(n_workers);
  parallel_pair_sweep(static_cast<int>(contact.size()), n_workers, [&](int w, int lo, int hi) {
    auto& strip = local[w];
    strip.assign(L + 1, Matrix::Zero(ntr, ntr));
    PairAccum acc;
    for (int t = lo; t < hi; ++t) {
      for (size_t s = 0; s < contact.size(); ++s) {
        integrate_pair(geom[t], geom[s], grid.dt, L, M_VG, quad, acc);
        for (int j = acc.jlo; j <= acc.jhi; ++j) {
          const double* o = acc.at(j, CH_VG);
          for (int a = 0; a < 3; ++a) {
            int ra = tix[geom[t].vid[a]];
            if (ra < 0) continue;
            for (int b = 0; b < 3; ++b) {
              int cb = tix[geom[s].vid[b]];
              if (cb >= 0) strip[j](ra, cb) += o[a * 3 + b];
            }
          }
        }
      }
    }
  });
  for (int w = 0; w < n_workers; ++w)
    if (!local[w].empty())
      for (int j = 0; j <= L; ++j) sys.M.blocks[j] += local[w][j];
  return sys;
}

double galerkin_entry(const SurfaceMesh& mesh, const TimeGrid& grid, OperatorKind kind, int j,
                      int test_vertex, int trial_vertex, const QuadratureConfig& quad) {
  int ch = kind == OperatorKind::SingleLayer     ? CH_V
           : kind == OperatorKind::DoubleLayer   ? CH_K
           : kind == OperatorKind::AdjointDoubleLayer ? CH_KP
                                                      : CH_W;
  double sum = 0;
  PairAccum acc;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    int a = -1;
    for (int k = 0; k < 3; ++k)
      if (mesh.triangles[t][k] == test_vertex) a = k;
    if (a < 0) continue;
    TriGeom gt = make_tri_geom(mesh, t);
    for (int s = 0; s < mesh.n_triangles(); ++s) {
      int b = -1;
      for (int k = 0; k < 3; ++k)
        if (mesh.triangles[s][k] == trial_vertex) b = k;
      if (b < 0) continue;
      TriGeom gs = make_tri_geom(mesh, s);
      integrate_pair(gt, gs, grid.dt, j, 1u << ch, quad, acc);
      if (j >= acc.jlo && j <= acc.jhi) sum += acc.at(j, ch)[a * 3 + b];
    }
  }
  return sum;
}

double oracle_entry(const SurfaceMesh& mesh, const TimeGrid& grid, OperatorKind kind, int j,
                    int test_vertex, int trial_vertex, int dense_order) {
  if (dense_order < 8) throw std::invalid_argument("oracle_entry: dense_order must be >= 8");
  const GaussRule1D& g1 = gauss_rule(std::min(16, dense_order));
  double dt = grid.dt;
  double sum = 0;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    int a = -1;
    for (int k = 0; k < 3; ++k)
      if (mesh.triangles[t][k] == test_vertex) a = k;
    if (a < 0) continue;
    TriGeom T = make_tri_geom(mesh, t);
    for (int s = 0; s < mesh.n_triangles(); ++s) {
      int b = -1;
      for (int k = 0; k < 3; ++k)
        if (mesh.triangles[s][k] == trial_vertex) b = k;
      if (b < 0) continue;
      TriGeom S = make_tri_geom(mesh, s);
      double cn = dot(T.n, S.n);
      // collapsed-square tensor rule on both triangles
      for (size_t iu = 0; iu < g1.x.size(); ++iu)
        for (size_t iv = 0; iv < g1.x.size(); ++iv) {
          double u = g1.x[iu], v = g1.x[iv];
          double lx[3] = {1.0 - u, u * (1.0 - v), u * v};
          Vec3 x = lx[0] * T.v[0] + lx[1] * T.v[1] + lx[2] * T.v[2];
          double wx = g1.w[iu] * g1.w[iv] * u * 2.0 * T.area;
          for (size_t ju = 0; ju < g1.x.size(); ++ju)
            for (size_t jv = 0; jv < g1.x.size(); ++jv) {
              double p = g1.x[ju], q = g1.x[jv];
              double ly[3] = {1.0 - p, p * (1.0 - q), p * q};
              Vec3 y = ly[0] * S.v[0] + ly[1] * S.v[1] + ly[2] * S.v[2];
              double wy = g1.w[ju] * g1.w[jv] * p * 2.0 * S.area;
              Vec3 d = x - y;
              double r = norm(d);
              if (r < 1e-14) continue;
              Weights w = eval_weights(j, r, dt);
              double val = 0;
              double xa = lx[a], yb = ly[b];
              if (kind == OperatorKind::SingleLayer) {
                val = xa * yb * w.fV / r;
              } else if (kind == OperatorKind::DoubleLayer) {
                double cyv = dot(S.n, d);
                val = xa * yb * cyv * (w.fK1 / (r * r) + w.fV / (r * r * r));
              } else if (kind == OperatorKind::AdjointDoubleLayer) {
                double cxv = -dot(T.n, d);
                val = xa * yb * cxv * (w.gd / (r * r) + w.g / (r * r * r));
              } else {
                // strong second-derivative kernel of the retarded potential
                double cx = dot(T.n, d) / r;   // n_x . (x-y)/r
                double cy = -dot(S.n, d) / r;  // n_y . (y-x)/r
                double r2 = r * r, r3 = r2 * r;
                val = xa * yb *
                      (cn * (w.gd / r2 + w.g / r3) +
                       cx * cy * (w.gw2 / r + 3.0 * w.gd / r2 + 3.0 * w.g / r3));
              }
              sum += wx * wy * val;
            }
        }
    }
  }
  return sum * kInv2Pi;
}

}  // namespace tdbem
