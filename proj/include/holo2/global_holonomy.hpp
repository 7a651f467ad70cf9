// Meshing of the parameter square, chart assignment, and gluing of local
// 2-holonomies with transition 2-arrows and cocycle fillers into the global
// 2-holonomy of a surface loop.
#pragma once

#include <algorithm>
#include <atomic>
#include <string>
#include <thread>
#include <vector>

#include "holo2/bundle.hpp"

namespace holo2 {

struct MeshError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SurfaceLoop {
  SurfacePatch patch;  // parameter square [0,1]^2
  bool sphere_mode = false;
};

// Max violation of the loop-in-loop-space closure (and, in sphere mode, of
// the constancy of the boundary rows).
inline double loop_closure_residual(const SurfaceLoop& gamma, int samples = 32) {
  double r = 0.0;
  const Vec base = gamma.patch.map(0.0, 0.0);
  for (int k = 0; k <= samples; ++k) {
    double w = static_cast<double>(k) / samples;
    r = std::max(r, (gamma.patch.map(w, 0.0) - gamma.patch.map(w, 1.0)).norm());
    r = std::max(r, (gamma.patch.map(0.0, w) - gamma.patch.map(1.0, w)).norm());
    if (gamma.sphere_mode) {
      r = std::max(r, (gamma.patch.map(w, 0.0) - base).norm());
      r = std::max(r, (gamma.patch.map(w, 1.0) - base).norm());
    }
  }
  return r;
}

struct MeshGrid {
  std::vector<double> ts, ss;  // strictly increasing, 0 .. 1
  int nt() const { return static_cast<int>(ts.size()) - 1; }
  int ns() const { return static_cast<int>(ss.size()) - 1; }
};

inline MeshGrid uniform_mesh(int n, int m) {
  MeshGrid g;
  for (int a = 0; a <= n; ++a) g.ts.push_back(static_cast<double>(a) / n);
  for (int b = 0; b <= m; ++b) g.ss.push_back(static_cast<double>(b) / m);
  return g;
}

inline MeshGrid refine_mesh(const MeshGrid& g) {
  MeshGrid r;
  for (int a = 0; a < g.nt(); ++a) {
    r.ts.push_back(g.ts[a]);
    r.ts.push_back(0.5 * (g.ts[a] + g.ts[a + 1]));
  }
  r.ts.push_back(g.ts.back());
  for (int b = 0; b < g.ns(); ++b) {
    r.ss.push_back(g.ss[b]);
    r.ss.push_back(0.5 * (g.ss[b] + g.ss[b + 1]));
  }
  r.ss.push_back(g.ss.back());
  return r;
}

struct ChartAssignment {
  std::vector<std::vector<int>> chart;  // [a][b]
  int at(int a, int b) const { return chart[a][b]; }
};

inline std::vector<int> cell_chart_candidates(const SurfaceLoop& gamma,
                                              const Atlas& atlas,
                                              const MeshGrid& mesh, int a,
                                              int b, int sub = 4) {
  std::vector<int> out;
  for (const auto& c : atlas.charts) {
    bool ok = true;
    for (int i = 0; i <= sub && ok; ++i)
      for (int j = 0; j <= sub && ok; ++j) {
        double t = mesh.ts[a] + (mesh.ts[a + 1] - mesh.ts[a]) * i / sub;
        double s = mesh.ss[b] + (mesh.ss[b + 1] - mesh.ss[b]) * j / sub;
        if (!c.contains(gamma.patch.map(t, s))) ok = false;
      }
    if (ok) out.push_back(c.id);
  }
  return out;
}

// Chooses the lowest chart id containing each cell image (sampled on a
// sub-grid), refining the mesh uniformly until every cell is covered. Cells
// of the first and last row are constrained to share a chart.
inline std::pair<MeshGrid, ChartAssignment> build_mesh(const SurfaceLoop& gamma,
                                                       const Atlas& atlas,
                                                       int initial_n, int initial_m,
                                                       int max_refinements = 4,
                                                       int sub = 4) {
  MeshGrid mesh = uniform_mesh(initial_n, initial_m);
  for (int round = 0; round <= max_refinements; ++round) {
    const int N = mesh.nt(), M = mesh.ns();
    ChartAssignment assign;
    assign.chart.assign(N, std::vector<int>(M, -1));
    bool ok = true;
    std::string offending;
    for (int a = 0; a < N && ok; ++a) {
      auto first = cell_chart_candidates(gamma, atlas, mesh, a, 0, sub);
      auto last = cell_chart_candidates(gamma, atlas, mesh, a, M - 1, sub);
      std::vector<int> joint;
      std::set_intersection(first.begin(), first.end(), last.begin(), last.end(),
                            std::back_inserter(joint));
      if (joint.empty()) {
        ok = false;
        offending = "boundary-row cells (" + std::to_string(a) + ",0)/(" +
                    std::to_string(a) + "," + std::to_string(M - 1) + ")";
        break;
      }
      assign.chart[a][0] = assign.chart[a][M - 1] = joint.front();
      for (int b = 1; b < M - 1; ++b) {
        auto cand = cell_chart_candidates(gamma, atlas, mesh, a, b, sub);
        if (cand.empty()) {
          ok = false;
          offending = "cell (" + std::to_string(a) + "," + std::to_string(b) + ")";
          break;
        }
        assign.chart[a][b] = cand.front();
      }
    }
    if (ok) return {mesh, assign};
    if (round == max_refinements)
      throw MeshError("no covering chart for " + offending + " after " +
                      std::to_string(max_refinements) + " refinements");
    mesh = refine_mesh(mesh);
  }
  throw MeshError("unreachable");
}

// ---------------------------------------------------------------------------
// Gluing

struct GlueOptions {
  enum class Order { row_major, column_major };
  Order order = Order::row_major;
  double ctol = 1e-4;    // per-piece composability tolerance
  bool check = true;     // throw on composability failure
  bool parallel = true;  // evaluate cell 2-holonomies concurrently
};

struct GlueError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GlobalHolonomy {
  WreathElement arrow;  // source word and the glued H-element Hol
  std::vector<double> invariant;
  double max_piece_residual = 0.0;
  double closure_residual = 0.0;  // || alpha(h^-1) source - target word ||
  MeshGrid mesh;
  ChartAssignment assignment;
  StepSpec spec;
};

namespace detail {

struct EdgeTransition {
  int c1 = -1, c2 = -1;
  Mat psi;        // H-element of the transition transport (identity if c1==c2)
  double residual = 0.0;  // target-matching residual of the transition arrow
};

struct GlueWork {
  int N = 0, M = 0;
  std::vector<std::vector<LocalTwoHolonomy>> cell;   // [a][b]
  std::vector<std::vector<EdgeTransition>> vtrans;   // [a][b]: edge t_{a+1}, row b
  std::vector<std::vector<EdgeTransition>> htrans;   // [a][b]: edge s_{b+1}, col a
};

inline EdgeTransition make_transition(const BundleData& bundle,
                                      const CrossedModule& cm, int c1, int c2,
                                      const ParamPath& edge, const Mat& F1e,
                                      const Mat& F2e, const StepSpec& spec) {
  EdgeTransition tr;
  tr.c1 = c1;
  tr.c2 = c2;
  if (c1 == c2) {
    tr.psi = cm.id_H();
    tr.residual = mat_dist(F1e, F2e);
    return tr;
  }
  tr.psi = gauge_transport_h(bundle.conn(c1).A, bundle.a_form(c1, c2, cm), edge,
                             spec, cm).endpoint;
  Vec x = edge.map(edge.a), y = edge.map(edge.b);
  Mat target = cm.alpha_group(tr.psi.inverse()) * F1e * bundle.g_val(c1, c2, y, cm);
  tr.residual = mat_dist(target, Mat(bundle.g_val(c1, c2, x, cm) * F2e));
  return tr;
}

inline GlueWork prepare_glue(const SurfaceLoop& gamma, const BundleData& bundle,
                             const MeshGrid& mesh, const ChartAssignment& assign,
                             const StepSpec& spec, const CrossedModule& cm,
                             bool parallel) {
  GlueWork w;
  w.N = mesh.nt();
  w.M = mesh.ns();
  w.cell.assign(w.N, std::vector<LocalTwoHolonomy>(w.M));
  // Cell 2-holonomies are independent and each writes only its own slot, so
  // the parallel map is bit-stable for a fixed StepSpec; the gluing fold
  // below stays a deterministic sequential reduction.
  auto cell_job = [&](int a, int b) {
    SurfacePatch p = gamma.patch;
    p.t0 = mesh.ts[a];
    p.t1 = mesh.ts[a + 1];
    p.s0 = mesh.ss[b];
    p.s1 = mesh.ss[b + 1];
    p.chart = assign.at(a, b);
    w.cell[a][b] = local_2_holonomy(bundle.conn(p.chart), p, spec, cm);
  };
  if (parallel && w.N * w.M > 1) {
    const int workers =
        std::max(1u, std::min(std::thread::hardware_concurrency(), 8u));
    std::atomic<int> next{0};
    auto drain = [&] {
      int k;
      while ((k = next.fetch_add(1)) < w.N * w.M) cell_job(k / w.M, k % w.M);
    };
    std::vector<std::thread> pool;
    for (int t = 0; t + 1 < workers; ++t) pool.emplace_back(drain);
    drain();
    for (auto& th : pool) th.join();
  } else {
    for (int a = 0; a < w.N; ++a)
      for (int b = 0; b < w.M; ++b) cell_job(a, b);
  }
  w.vtrans.assign(w.N, std::vector<EdgeTransition>(w.M));
  for (int a = 0; a < w.N; ++a)
    for (int b = 0; b < w.M; ++b) {
      int c1 = assign.at(a, b), c2 = assign.at((a + 1) % w.N, b);
      ParamPath edge = col_path(gamma.patch, mesh.ts[a + 1], mesh.ss[b], mesh.ss[b + 1]);
      w.vtrans[a][b] = make_transition(bundle, cm, c1, c2, edge,
                                       w.cell[a][b].F_right,
                                       w.cell[(a + 1) % w.N][b].F_left, spec);
    }
  w.htrans.assign(w.N, std::vector<EdgeTransition>(w.M - 1));
  for (int a = 0; a < w.N; ++a)
    for (int b = 0; b + 1 < w.M; ++b) {
      int c1 = assign.at(a, b), c2 = assign.at(a, b + 1);
      ParamPath edge = row_path(gamma.patch, mesh.ss[b + 1], mesh.ts[a], mesh.ts[a + 1]);
      w.htrans[a][b] = make_transition(bundle, cm, c1, c2, edge,
                                       w.cell[a][b].F_top,
                                       w.cell[a][b + 1].F_bot, spec);
    }
  return w;
}

// Filler 2-arrow H-element at a grid vertex where charts (i, j, l, k) =
// (below-left, below-right, above-left, above-right) meet: a 2-arrow from
// g_ij g_jk to g_il g_lk assembled from the cocycle pair at the vertex.
struct Filler {
  Mat h;
  double residual = 0.0;
};

inline Filler vertex_filler(const BundleData& bundle, const CrossedModule& cm,
                            int i, int j, int l, int k, const Vec& y) {
  Filler out;
  Mat f_lij = bundle.f_val(l, i, j, y, cm);
  Mat f_lkj = bundle.f_val(l, k, j, y, cm);
  out.h = cm.act_GH(bundle.g_val(i, l, y, cm), Mat(f_lij * f_lkj.inverse()));
  Mat src = bundle.g_val(i, j, y, cm) * bundle.g_val(j, k, y, cm);
  Mat dst = bundle.g_val(i, l, y, cm) * bundle.g_val(l, k, y, cm);
  out.residual = mat_dist(Mat(cm.alpha_group(out.h.inverse()) * src), dst);
  return out;
}

inline void note_residual(double r, double& worst, const GlueOptions& opts,
                          const std::string& where) {
  worst = std::max(worst, r);
  if (opts.check && r > opts.ctol)
    throw GlueError("composability check failed at " + where + " (residual " +
                    std::to_string(r) + ")");
}

}  // namespace detail

inline GlobalHolonomy glue(const SurfaceLoop& gamma, const BundleData& bundle,
                           const MeshGrid& mesh, const ChartAssignment& assign,
                           const StepSpec& spec, const CrossedModule& cm,
                           const GlueOptions& opts = {}) {
  using detail::note_residual;
  const int N = mesh.nt(), M = mesh.ns();
  for (int a = 0; a < N; ++a)
    if (assign.at(a, 0) != assign.at(a, M - 1))
      throw GlueError("first/last-row chart constraint violated in column " +
                      std::to_string(a));
  detail::GlueWork w =
      detail::prepare_glue(gamma, bundle, mesh, assign, spec, cm, opts.parallel);

  GlobalHolonomy out;
  out.mesh = mesh;
  out.assignment = assign;
  out.spec = spec;
  auto act = [&cm](const Mat& g, const Mat& h) { return cm.act_GH(g, h); };
  auto gv = [&](int c1, int c2, double t, double s) {
    return bundle.g_val(c1, c2, gamma.patch.map(t, s), cm);
  };

  for (int a = 0; a < N; ++a)
    for (int b = 0; b < M; ++b)
      note_residual(w.cell[a][b].target_residual, out.max_piece_residual, opts,
                    "cell (" + std::to_string(a) + "," + std::to_string(b) + ")");
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < M; ++b)
      note_residual(w.vtrans[a][b].residual, out.max_piece_residual, opts,
                    "vertical edge (" + std::to_string(a + 1) + "," +
                        std::to_string(b) + ")");
  for (int a = 0; a < N; ++a)
    for (int b = 0; b + 1 < M; ++b)
      note_residual(w.htrans[a][b].residual, out.max_piece_residual, opts,
                    "horizontal edge (" + std::to_string(a) + "," +
                        std::to_string(b + 1) + ")");

  Mat h_total = cm.id_H();
  if (opts.order == GlueOptions::Order::row_major) {
    Mat upsilon = cm.id_G();
    for (int b = 0; b < M; ++b) {
      // Row chain: closure transition, then cells right to left with the
      // vertical transitions between, everything whiskered by the
      // accumulated bottom-boundary word.
      std::vector<Mat> Wc(N + 1), Wp(N + 1);
      Wc[0] = upsilon;
      for (int a = 0; a < N; ++a) {
        Wp[a + 1] = Wc[a] * w.cell[a][b].F_bot;
        Wc[a + 1] = Wp[a + 1] * gv(assign.at(a, b), assign.at((a + 1) % N, b),
                                   mesh.ts[a + 1], mesh.ss[b]);
      }
      Mat h_row = act(Wp[N], w.vtrans[N - 1][b].psi.inverse());
      for (int a = N - 1; a >= 0; --a) {
        h_row = h_row * act(Wc[a], w.cell[a][b].H);
        if (a > 0) h_row = h_row * act(Wp[a], w.vtrans[a - 1][b].psi.inverse());
      }
      h_total = h_total * h_row;

      if (b + 1 < M) {
        // Transition layer to the next row: horizontal-edge transitions and
        // the cocycle fillers at the grid vertices, right to left.
        Mat V0 = upsilon * w.cell[0][b].F_left;
        std::vector<Mat> Vc(N + 1), Vp(N + 1);
        Vc[0] = V0;
        for (int a = 0; a < N; ++a) {
          Vp[a + 1] = Vc[a] * w.cell[a][b].F_top;
          Vc[a + 1] = Vp[a + 1] * gv(assign.at(a, b), assign.at((a + 1) % N, b),
                                     mesh.ts[a + 1], mesh.ss[b + 1]);
        }
        auto filler_at = [&](int av) {  // vertex t_{av}, av in 1..N
          int ar = av % N;
          Vec y = gamma.patch.map(mesh.ts[av], mesh.ss[b + 1]);
          return detail::vertex_filler(bundle, cm, assign.at(av - 1, b),
                                       assign.at(ar, b), assign.at(av - 1, b + 1),
                                       assign.at(ar, b + 1), y);
        };
        detail::Filler fN = filler_at(N);
        note_residual(fN.residual, out.max_piece_residual, opts,
                      "vertex (" + std::to_string(N) + "," + std::to_string(b + 1) + ")");
        Mat h_layer = act(Vp[N], fN.h);
        for (int a = N - 1; a >= 0; --a) {
          h_layer = h_layer * act(Vc[a], w.htrans[a][b].psi);
          if (a > 0) {
            detail::Filler f = filler_at(a);
            note_residual(f.residual, out.max_piece_residual, opts,
                          "vertex (" + std::to_string(a) + "," +
                              std::to_string(b + 1) + ")");
            h_layer = h_layer * act(Vp[a], f.h);
          }
        }
        h_total = h_total * h_layer;
        upsilon = V0 * gv(assign.at(0, b), assign.at(0, b + 1), 0.0, mesh.ss[b + 1]);
      }
    }
  } else {
    // Column-major alternate: strips bottom-to-top internally, strips
    // composed right to left with vertical-edge seam layers between.
    std::vector<Mat> Oc(N + 1), Op(N + 1);
    Oc[0] = cm.id_G();
    for (int a = 0; a < N; ++a) {
      Op[a + 1] = Oc[a] * w.cell[a][0].F_bot;
      Oc[a + 1] = Op[a + 1] * gv(assign.at(a, 0), assign.at((a + 1) % N, 0),
                                 mesh.ts[a + 1], 0.0);
    }
    for (int a = N - 1; a >= 0; --a) {
      // Seam layer at t_{a+1} between strip a and strip (a+1) mod N.
      int ar = (a + 1) % N;
      std::vector<Mat> Zc(M + 1), Zp(M + 1);
      Zc[0] = Op[a + 1];
      for (int b = 0; b < M; ++b) {
        Zp[b + 1] = Zc[b] * w.cell[a][b].F_right;
        Zc[b + 1] = Zp[b + 1] * gv(assign.at(a, b), assign.at(a, (b + 1) % M),
                                   mesh.ts[a + 1], mesh.ss[b + 1]);
      }
      Mat h_seam = act(Zc[0], w.vtrans[a][0].psi.inverse());
      for (int b = 1; b < M; ++b) {
        Vec y = gamma.patch.map(mesh.ts[a + 1], mesh.ss[b]);
        detail::Filler f = detail::vertex_filler(bundle, cm, assign.at(a, b - 1),
                                                 assign.at(ar, b - 1),
                                                 assign.at(a, b), assign.at(ar, b), y);
        note_residual(f.residual, out.max_piece_residual, opts,
                      "seam vertex (" + std::to_string(a + 1) + "," +
                          std::to_string(b) + ")");
        h_seam = h_seam * act(Zp[b], f.h);
        h_seam = h_seam * act(Zc[b], w.vtrans[a][b].psi.inverse());
      }
      h_total = h_total * h_seam;

      // Strip a, cells ascending with the horizontal transitions between.
      std::vector<Mat> Uc(M + 1), Up(M + 1);
      Uc[0] = Oc[a];
      for (int b = 0; b < M; ++b) {
        Up[b + 1] = Uc[b] * w.cell[a][b].F_left;
        Uc[b + 1] = Up[b + 1] * gv(assign.at(a, b), assign.at(a, (b + 1) % M),
                                   mesh.ts[a], mesh.ss[b + 1]);
      }
      Mat h_strip = act(Uc[0], w.cell[a][0].H);
      for (int b = 1; b < M; ++b) {
        h_strip = h_strip * act(Up[b], w.htrans[a][b - 1].psi);
        h_strip = h_strip * act(Uc[b], w.cell[a][b].H);
      }
      h_total = h_total * h_strip;
    }
  }

  // Source word: bottom boundary with its chart jumps, then the closed
  // left/right boundary column in the first-column charts.
  Mat bsrc = cm.id_G();
  for (int a = 0; a < N; ++a)
    bsrc = bsrc * w.cell[a][0].F_bot *
           gv(assign.at(a, 0), assign.at((a + 1) % N, 0), mesh.ts[a + 1], 0.0);
  Mat ecol = cm.id_G();
  for (int b = 0; b < M; ++b)
    ecol = ecol * w.cell[0][b].F_left *
           gv(assign.at(0, b), assign.at(0, (b + 1) % M), 0.0, mesh.ss[b + 1]);
  Mat tsrc = cm.id_G();
  for (int a = 0; a < N; ++a)
    tsrc = tsrc * w.cell[a][M - 1].F_top *
           gv(assign.at(a, M - 1), assign.at((a + 1) % N, M - 1), mesh.ts[a + 1], 1.0);

  out.arrow = {Mat(bsrc * ecol), h_total};
  out.closure_residual =
      mat_dist(Mat(cm.alpha_group(h_total.inverse()) * bsrc * ecol), Mat(ecol * tsrc));
  out.invariant = cm.equivalence_invariant(h_total);
  return out;
}

// ---------------------------------------------------------------------------
// Well-definedness tests

inline double class_distance(const Mat& h1, const Mat& h2, const CrossedModule& cm) {
  return vec_dist(cm.equivalence_invariant(h1), cm.equivalence_invariant(h2));
}

inline bool equivalent_mod_GH(const Mat& h1, const Mat& h2, const CrossedModule& cm,
                              double tolerance) {
  return class_distance(h1, h2, cm) <= tolerance;
}

inline ChartAssignment refine_assignment(const ChartAssignment& assign) {
  ChartAssignment r;
  const int N = static_cast<int>(assign.chart.size());
  const int M = N > 0 ? static_cast<int>(assign.chart[0].size()) : 0;
  r.chart.assign(2 * N, std::vector<int>(2 * M, -1));
  for (int a = 0; a < 2 * N; ++a)
    for (int b = 0; b < 2 * M; ++b) r.chart[a][b] = assign.at(a / 2, b / 2);
  return r;
}

// Class distance between the glued holonomy on a mesh and on its uniform 2x
// refinement with inherited charts.
inline double invariance_under_refinement(const SurfaceLoop& gamma,
                                          const BundleData& bundle,
                                          const MeshGrid& mesh,
                                          const ChartAssignment& assign,
                                          const StepSpec& spec,
                                          const CrossedModule& cm,
                                          const GlueOptions& opts = {}) {
  GlobalHolonomy coarse = glue(gamma, bundle, mesh, assign, spec, cm, opts);
  GlobalHolonomy fine = glue(gamma, bundle, refine_mesh(mesh),
                             refine_assignment(assign), spec, cm, opts);
  return class_distance(coarse.arrow.h, fine.arrow.h, cm);
}

struct ReassignmentResult {
  double class_dist = 0.0;
  double raw_dist = 0.0;  // plain matrix distance between the two H elements
};

// Reassigns one cell (and its boundary-row partner when the cell lies in the
// first or last row) to a different covering chart and reruns the gluing.
inline ReassignmentResult invariance_under_reassignment(
    const SurfaceLoop& gamma, const BundleData& bundle, const MeshGrid& mesh,
    const ChartAssignment& assign, int a, int b, int new_chart,
    const StepSpec& spec, const CrossedModule& cm, const GlueOptions& opts = {},
    int sub = 4) {
  const int M = mesh.ns();
  auto check_cell = [&](int bb) {
    for (int i = 0; i <= sub; ++i)
      for (int j = 0; j <= sub; ++j) {
        double t = mesh.ts[a] + (mesh.ts[a + 1] - mesh.ts[a]) * i / sub;
        double s = mesh.ss[bb] + (mesh.ss[bb + 1] - mesh.ss[bb]) * j / sub;
        if (!bundle.atlas.contains(new_chart, gamma.patch.map(t, s)))
          throw GlueError("new chart does not contain the cell image");
      }
  };
  ChartAssignment alt = assign;
  check_cell(b);
  alt.chart[a][b] = new_chart;
  if (b == 0 || b == M - 1) {
    int partner = (b == 0) ? M - 1 : 0;
    check_cell(partner);
    alt.chart[a][partner] = new_chart;
  }
  GlobalHolonomy base = glue(gamma, bundle, mesh, assign, spec, cm, opts);
  GlobalHolonomy moved = glue(gamma, bundle, mesh, alt, spec, cm, opts);
  ReassignmentResult r;
  r.class_dist = class_distance(base.arrow.h, moved.arrow.h, cm);
  r.raw_dist = mat_dist(base.arrow.h, moved.arrow.h);
  return r;
}

// Reparametrization (t', s') -> (alpha(t', s'), beta(s')) with the partial
// derivatives supplied for the chain rule.
struct Reparametrization {
  std::function<double(double, double)> alpha;
  std::function<double(double, double)> dalpha_dt;
  std::function<double(double, double)> dalpha_ds;
  std::function<double(double)> beta;
  std::function<double(double)> dbeta;
};

inline SurfaceLoop reparametrize(const SurfaceLoop& gamma,
                                 const Reparametrization& xi,
                                 int monotonicity_samples = 24) {
  for (int i = 1; i < monotonicity_samples; ++i)
    for (int j = 1; j < monotonicity_samples; ++j) {
      double t = static_cast<double>(i) / monotonicity_samples;
      double s = static_cast<double>(j) / monotonicity_samples;
      if (!(xi.dalpha_dt(t, s) > 0.0) || !(xi.dbeta(s) > 0.0))
        throw GlueError("reparametrization is not orientation-preserving");
    }
  SurfaceLoop out = gamma;
  auto base = gamma.patch;
  out.patch.map = [base, xi](double t, double s) {
    return base.map(xi.alpha(t, s), xi.beta(s));
  };
  out.patch.jacobian = [base, xi](double t, double s) -> std::pair<Vec, Vec> {
    auto [gt, gs] = patch_jacobian(base, xi.alpha(t, s), xi.beta(s));
    Vec dt = gt * xi.dalpha_dt(t, s);
    Vec ds = gt * xi.dalpha_ds(t, s) + gs * xi.dbeta(s);
    return {dt, ds};
  };
  return out;
}

// Class distance between the glued holonomies of gamma and gamma o Xi, each
// on its own mesh/assignment.
inline double reparametrization_residual(const SurfaceLoop& gamma,
                                         const Reparametrization& xi,
                                         const BundleData& bundle,
                                         const StepSpec& spec,
                                         const CrossedModule& cm, int mesh_n,
                                         int mesh_m, const GlueOptions& opts = {}) {
  auto [mesh1, assign1] = build_mesh(gamma, bundle.atlas, mesh_n, mesh_m);
  GlobalHolonomy base = glue(gamma, bundle, mesh1, assign1, spec, cm, opts);
  SurfaceLoop pulled = reparametrize(gamma, xi);
  auto [mesh2, assign2] = build_mesh(pulled, bundle.atlas, mesh_n, mesh_m);
  GlobalHolonomy other = glue(pulled, bundle, mesh2, assign2, spec, cm, opts);
  return class_distance(base.arrow.h, other.arrow.h, cm);
}

// || alpha(Hol) - 1 || for sphere-mode surfaces.
inline double sphere_kernel_check(const GlobalHolonomy& hol, const CrossedModule& cm) {
  return mat_dist(cm.alpha_group(hol.arrow.h), cm.id_G());
}

}  // namespace holo2
