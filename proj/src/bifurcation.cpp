#include "ihs/bifurcation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ihs/linalg.hpp"

namespace ihs {

Box Box::cube(std::size_t dimension, double half_width)
{
    const auto d = static_cast<Eigen::Index>(dimension);
    return Box{Eigen::VectorXd::Constant(d, -half_width), Eigen::VectorXd::Constant(d, half_width)};
}

bool Box::contains(const Eigen::VectorXd& x) const
{
    return x.size() == lower.size() && (x.array() >= lower.array()).all() && (x.array() <= upper.array()).all();
}

std::string to_string(ArcLabel label)
{
    switch (label) {
    case ArcLabel::elliptic_family: return "elliptic-family";
    case ArcLabel::hyperbolic_family: return "hyperbolic-family";
    case ArcLabel::unknown: return "mixed/unknown";
    }
    return "mixed/unknown";
}

namespace {

// Unknowns u = (p, M, V): p the point, M the n x m multipliers with
// orthonormal columns, V the c x m Casimir multipliers. Equations:
//   sum_i M_ik grad f_i - sum_c V_ck grad C_c = 0   (k < m)
//   C(p) = leaf values
//   M^T M = I (upper triangle)
class Augmented {
public:
    Augmented(const IntegrableModel& model, int multipliers)
        : model_(model), N_(static_cast<Eigen::Index>(model.dimension())), n_(static_cast<Eigen::Index>(model.n())),
          c_(static_cast<Eigen::Index>(model.leaf.size())), m_(multipliers)
    {
        const auto values = model.leaf_values();
        leaf_values_ = Eigen::Map<const Eigen::VectorXd>(values.data(), c_);
    }

    Eigen::Index unknowns() const { return N_ + n_ * m_ + c_ * m_; }
    Eigen::Index equations() const { return N_ * m_ + c_ + m_ * (m_ + 1) / 2; }
    Eigen::Index dimension() const { return N_; }

    double m_at(const Eigen::VectorXd& u, Eigen::Index i, Eigen::Index k) const { return u[N_ + k * n_ + i]; }
    Eigen::Index m_index(Eigen::Index i, Eigen::Index k) const { return N_ + k * n_ + i; }
    Eigen::Index v_index(Eigen::Index cc, Eigen::Index k) const { return N_ + n_ * m_ + k * c_ + cc; }

    /// Residual, its Jacobian (when requested) and a gradient scale.
    double eval(const Eigen::VectorXd& u, Eigen::VectorXd& r, Eigen::MatrixXd* jac) const
    {
        const Eigen::VectorXd p = u.head(N_);
        const auto pt = as_span(p);
        std::vector<Jet2> fj, cj;
        for (const auto& f : model_.momentum) fj.push_back(evaluate_jet2(f, pt, model_.params()));
        for (const auto& c : model_.leaf) cj.push_back(evaluate_jet2(c.casimir, pt, model_.params()));
        double scale = 1.0;
        for (const auto& j : fj) scale = std::max(scale, j.gradient.cwiseAbs().maxCoeff());

        r.setZero(equations());
        if (jac) jac->setZero(equations(), unknowns());
        for (Eigen::Index k = 0; k < m_; ++k) {
            auto block = r.segment(k * N_, N_);
            for (Eigen::Index i = 0; i < n_; ++i) {
                const double mik = m_at(u, i, k);
                block += mik * fj[static_cast<std::size_t>(i)].gradient;
                if (jac) {
                    jac->block(k * N_, 0, N_, N_) += mik * fj[static_cast<std::size_t>(i)].hessian;
                    jac->block(k * N_, m_index(i, k), N_, 1) = fj[static_cast<std::size_t>(i)].gradient;
                }
            }
            for (Eigen::Index cc = 0; cc < c_; ++cc) {
                const double vck = u[v_index(cc, k)];
                block -= vck * cj[static_cast<std::size_t>(cc)].gradient;
                if (jac) {
                    jac->block(k * N_, 0, N_, N_) -= vck * cj[static_cast<std::size_t>(cc)].hessian;
                    jac->block(k * N_, v_index(cc, k), N_, 1) = -cj[static_cast<std::size_t>(cc)].gradient;
                }
            }
        }
        Eigen::Index row = N_ * m_;
        for (Eigen::Index cc = 0; cc < c_; ++cc, ++row) {
            r[row] = cj[static_cast<std::size_t>(cc)].value - leaf_values_[cc];
            if (jac) jac->block(row, 0, 1, N_) = cj[static_cast<std::size_t>(cc)].gradient.transpose();
        }
        for (Eigen::Index a = 0; a < m_; ++a)
            for (Eigen::Index b = a; b < m_; ++b, ++row) {
                double dot = 0.0;
                for (Eigen::Index i = 0; i < n_; ++i) dot += m_at(u, i, a) * m_at(u, i, b);
                r[row] = dot - (a == b ? 1.0 : 0.0);
                if (jac)
                    for (Eigen::Index i = 0; i < n_; ++i) {
                        (*jac)(row, m_index(i, a)) += m_at(u, i, b);
                        (*jac)(row, m_index(i, b)) += m_at(u, i, a);
                    }
            }
        return scale;
    }

    /// Initial multipliers at a leaf point: left singular vectors of dF on
    /// the leaf for the m smallest singular values.
    Eigen::VectorXd initial(const Eigen::VectorXd& p) const
    {
        Eigen::VectorXd u = Eigen::VectorXd::Zero(unknowns());
        u.head(N_) = p;
        const PhasePoint pp(p);
        const Eigen::MatrixXd dc = model_.casimir_jacobian(pp);
        const Eigen::MatrixXd basis = null_space(dc, 1e-8);
        const Eigen::MatrixXd df = model_.momentum_jacobian(pp);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(df * basis, Eigen::ComputeFullU);
        const Eigen::MatrixXd um = svd.matrixU().rightCols(m_);
        for (Eigen::Index k = 0; k < m_; ++k) {
            for (Eigen::Index i = 0; i < n_; ++i) u[m_index(i, k)] = um(i, k);
            if (c_ > 0) {
                const Eigen::VectorXd v = solve_min_norm(dc.transpose(), df.transpose() * um.col(k));
                for (Eigen::Index cc = 0; cc < c_; ++cc) u[v_index(cc, k)] = v[cc];
            }
        }
        return u;
    }

private:
    const IntegrableModel& model_;
    Eigen::Index N_, n_, c_, m_;
    Eigen::VectorXd leaf_values_;
};

bool converged(const Eigen::VectorXd& r, double scale, double tol)
{
    return r.size() == 0 || r.cwiseAbs().maxCoeff() <= tol * scale;
}

// Gauss-Newton with min-norm steps. Returns false on failure.
bool gauss_newton(const Augmented& sys, Eigen::VectorXd& u, double tol, int max_iterations, double step_cap = 1.0)
{
    Eigen::VectorXd r;
    Eigen::MatrixXd j;
    for (int it = 0; it < max_iterations; ++it) {
        const double scale = sys.eval(u, r, &j);
        if (!r.allFinite()) return false;
        if (converged(r, scale, tol)) return true;
        Eigen::VectorXd delta = solve_min_norm(j, r, 1e-12);
        const double norm = delta.norm();
        if (!std::isfinite(norm)) return false;
        if (norm > step_cap) delta *= step_cap / norm;
        u -= delta;
    }
    const double scale = sys.eval(u, r, nullptr);
    return r.allFinite() && converged(r, scale, tol);
}

std::optional<Eigen::VectorXd> project_to_leaf(const IntegrableModel& model, Eigen::VectorXd x)
{
    if (model.leaf.empty()) return x;
    const auto values = model.leaf_values();
    const Eigen::Map<const Eigen::VectorXd> target(values.data(), static_cast<Eigen::Index>(values.size()));
    for (int it = 0; it < 50; ++it) {
        const PhasePoint p(x);
        Eigen::VectorXd r(target.size());
        for (std::size_t c = 0; c < model.leaf.size(); ++c)
            r[static_cast<Eigen::Index>(c)] = evaluate(model.leaf[c].casimir, p.span(), model.params());
        r -= target;
        if (r.cwiseAbs().maxCoeff() <= 1e-13) return x;
        const Eigen::MatrixXd dc = model.casimir_jacobian(p);
        if (singular_values(dc).minCoeff() < 1e-6) return std::nullopt;
        x -= solve_min_norm(dc, r);
        if (!x.allFinite()) return std::nullopt;
    }
    return std::nullopt;
}

Eigen::MatrixXd leaf_dF(const IntegrableModel& model, const PhasePoint& p)
{
    const Eigen::MatrixXd basis = null_space(model.casimir_jacobian(p), 1e-8);
    return model.momentum_jacobian(p) * basis;
}

double sigma_max(const Eigen::MatrixXd& a)
{
    const Eigen::VectorXd s = singular_values(a);
    return s.size() ? s[0] : 0.0;
}

}  // namespace

PhasePoint refine_singular_point(const IntegrableModel& model, const PhasePoint& seed, int target_rank, double tol,
                                 int max_iterations)
{
    const int n = static_cast<int>(model.n());
    if (target_rank < 0 || target_rank >= n) throw RefinementError("target rank must lie in [0, n)");
    auto start = project_to_leaf(model, seed.coords);
    if (!start) throw RefinementError("seed could not be projected onto the leaf");
    const Augmented sys(model, n - target_rank);
    Eigen::VectorXd u = sys.initial(*start);
    if (!gauss_newton(sys, u, 1e-11, max_iterations))
        throw RefinementError("Newton iteration diverged after " + std::to_string(max_iterations) + " iterations");
    PhasePoint p(u.head(sys.dimension()));
    const int r = rank_at(model, p, tol);
    if (r != target_rank)
        throw RefinementError("rank certification failed: rank " + std::to_string(r) + ", expected " +
                              std::to_string(target_rank));
    return p;
}

std::vector<SingularSeed> scan_singular_points(const IntegrableModel& model, const Box& box,
                                               const ScanOptions& options)
{
    const auto N = static_cast<Eigen::Index>(model.dimension());
    const int n = static_cast<int>(model.n());
    if (box.lower.size() != N || box.upper.size() != N) throw ModelError("box dimension does not match the model");
    const int res = std::max(1, options.resolution);

    std::vector<SingularSeed> seeds;
    auto add = [&](const Eigen::VectorXd& p) {
        if (!box.contains(p)) return;
        const PhasePoint pp(p);
        int r = 0;
        try {
            r = rank_at(model, pp, options.tol);
        } catch (const ModelError&) {
            return;
        }
        if (r >= n) return;
        const Eigen::VectorXd v = model.momentum_value(pp);
        for (const auto& s : seeds)
            if (s.rank == r && (s.value - v).norm() < options.dedupe_radius) return;
        seeds.push_back({pp, r, v});
    };

    std::vector<Augmented> systems;
    for (int target = 0; target < n; ++target) systems.emplace_back(model, n - target);

    std::vector<int> idx(static_cast<std::size_t>(N), 0);
    for (;;) {
        Eigen::VectorXd x(N);
        for (Eigen::Index i = 0; i < N; ++i)
            x[i] = box.lower[i] + (idx[static_cast<std::size_t>(i)] + 0.5) * (box.upper[i] - box.lower[i]) / res;
        if (auto on_leaf = project_to_leaf(model, x)) {
            // Rank 0 first: the overdetermined system only converges near
            // isolated rank-0 points. Then the rank n-1 locus.
            for (int target = 0; target < n; ++target) {
                if (target > 0 && target < n - 1) continue;
                const Augmented& sys = systems[static_cast<std::size_t>(target)];
                Eigen::VectorXd u = sys.initial(*on_leaf);
                if (gauss_newton(sys, u, options.newton_tol, options.max_iterations)) add(u.head(N));
            }
        }
        Eigen::Index i = 0;
        while (i < N && ++idx[static_cast<std::size_t>(i)] == res) idx[static_cast<std::size_t>(i++)] = 0;
        if (i == N) break;
    }
    std::stable_sort(seeds.begin(), seeds.end(), [](const auto& a, const auto& b) { return a.rank < b.rank; });
    return seeds;
}

// --------------------------------------------------------- continuation

namespace {

struct Tracer {
    const IntegrableModel& model;
    const Box& box;
    const ContinuationOptions& opt;
    Augmented sys;
    ClassifierOptions cls;

    Tracer(const IntegrableModel& m, const Box& b, const ContinuationOptions& o) : model(m), box(b), opt(o), sys(m, 1)
    {
        cls.tol = o.tol;
        cls.seed = o.seed;
    }

    Eigen::Index N() const { return sys.dimension(); }

    // Unit vector along the orbit through p, embedded in u-space.
    Eigen::VectorXd orbit_direction(const Eigen::VectorXd& u) const
    {
        const PhasePoint p(u.head(N()));
        const Eigen::MatrixXd df = model.momentum_jacobian(p);
        const Eigen::MatrixXd basis = null_space(model.casimir_jacobian(p), 1e-8);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(df * basis, Eigen::ComputeFullU);
        const Eigen::VectorXd w = svd.matrixU().col(0);
        const Eigen::MatrixXd pi = model.structure.matrix(p.span(), model.params());
        Eigen::VectorXd o = Eigen::VectorXd::Zero(sys.unknowns());
        o.head(N()) = pi * (df.transpose() * w);
        const double norm = o.norm();
        return norm > 0.0 ? Eigen::VectorXd(o / norm) : o;
    }

    // Tangent of the solution set transversal to the orbit.
    std::optional<Eigen::VectorXd> tangent(const Eigen::VectorXd& u, const Eigen::VectorXd* previous) const
    {
        Eigen::VectorXd r;
        Eigen::MatrixXd j;
        sys.eval(u, r, &j);
        const Eigen::MatrixXd kernel = null_space(j, 1e-7);
        if (kernel.cols() == 0) return std::nullopt;
        const Eigen::VectorXd o = orbit_direction(u);
        const Eigen::MatrixXd reduced = kernel - o * (o.transpose() * kernel);
        Eigen::VectorXd t;
        if (previous) {
            t = reduced * (kernel.transpose() * *previous);
        } else {
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(reduced, Eigen::ComputeThinU);
            t = svd.matrixU().col(0);
        }
        const double norm = t.norm();
        if (norm < 1e-8) return std::nullopt;
        t /= norm;
        if (previous && t.dot(*previous) < 0.0) t = -t;
        return t;
    }

    ArcLabel label_at(const Eigen::VectorXd& p) const
    {
        try {
            const Linearization lin = reduce_at(model, PhasePoint(p), cls);
            const TypeResult t = williamson_type(lin, cls.attempts, cls.tol, cls.seed, 1);
            if (const auto* w = std::get_if<WilliamsonType>(&t)) {
                if (w->elliptic == 1) return ArcLabel::elliptic_family;
                if (w->hyperbolic == 1) return ArcLabel::hyperbolic_family;
            }
        } catch (const std::exception&) {
        }
        return ArcLabel::unknown;
    }

    struct Branch {
        std::vector<Eigen::VectorXd> points;  // phase points
        std::string stop;
        std::optional<Eigen::VectorXd> vertex_start;  // point near a vertex
    };

    Branch run(const Eigen::VectorXd& u0, Eigen::VectorXd t, std::vector<std::string>& failures) const
    {
        Branch b;
        b.points.push_back(u0.head(N()));
        Eigen::VectorXd u = u0;
        double h = opt.initial_step;
        const Eigen::VectorXd v0 = model.momentum_value(PhasePoint(u0.head(N())));
        Eigen::VectorXd first_dir;
        Eigen::VectorXd r;
        Eigen::MatrixXd j;
        for (int step = 0; step < opt.max_steps; ++step) {
            bool accepted = false;
            Eigen::VectorXd next;
            while (!accepted) {
                if (h < opt.min_step) {
                    b.stop = "step failure";
                    failures.push_back("continuation step fell below the minimum near value (" +
                                       std::to_string(model.momentum_value(PhasePoint(u.head(N())))[0]) + ", " +
                                       std::to_string(model.momentum_value(PhasePoint(u.head(N())))[1]) + ")");
                    return b;
                }
                const Eigen::VectorXd pred = u + h * t;
                const Eigen::VectorXd o = orbit_direction(u);
                Eigen::VectorXd w = pred;
                bool ok = false;
                for (int it = 0; it < 10; ++it) {
                    const double scale = sys.eval(w, r, &j);
                    if (!r.allFinite()) break;
                    const double along = t.dot(w - pred), across = o.dot(w - pred);
                    if (converged(r, scale, opt.newton_tol) && std::abs(along) < 1e-12 && std::abs(across) < 1e-12) {
                        ok = true;
                        break;
                    }
                    Eigen::MatrixXd big(j.rows() + 2, j.cols());
                    big << j, t.transpose(), o.transpose();
                    Eigen::VectorXd rhs(r.size() + 2);
                    rhs << r, along, across;
                    w -= solve_min_norm(big, rhs, 1e-12);
                }
                if (ok && (w - u).norm() < 2.0 * h) {
                    accepted = true;
                    next = w;
                } else {
                    h *= 0.5;
                }
            }
            const Eigen::VectorXd p = next.head(N());
            if (!box.contains(p)) {
                b.stop = "left box";
                return b;
            }
            const PhasePoint pp(p);
            const Eigen::VectorXd v = model.momentum_value(pp);
            if (sigma_max(leaf_dF(model, pp)) < opt.vertex_threshold) {
                b.points.push_back(p);
                b.stop = "vertex";
                b.vertex_start = p;
                return b;
            }
            b.points.push_back(p);
            auto nt = tangent(next, &t);
            if (!nt) {
                b.stop = "tangent lost";
                return b;
            }
            const Eigen::VectorXd dv = v - model.momentum_value(PhasePoint(u.head(N())));
            if (first_dir.size() == 0 && dv.norm() > 0.0) first_dir = dv / dv.norm();
            if (step >= 10 && (v - v0).norm() < 1.5 * h && first_dir.size() && dv.norm() > 0.0 &&
                first_dir.dot(dv / dv.norm()) > 0.9) {
                b.points.push_back(u0.head(N()));
                b.stop = "closed loop";
                return b;
            }
            u = next;
            t = *nt;
            h = std::min(h * 1.5, opt.max_step);
        }
        b.stop = "max steps";
        return b;
    }
};

void add_vertex(BifurcationDiagram& d, const IntegrableModel& model, const PhasePoint& p, const ClassifierOptions& cls)
{
    for (const auto& v : d.vertices)
        if ((v.point.coords - p.coords).norm() < 1e-6) return;
    Vertex vx;
    vx.point = p;
    vx.value = model.momentum_value(p);
    vx.rank = rank_at(model, p, cls.tol);
    const NonDegeneracyVerdict verdict = is_nondegenerate(model, p, cls);
    vx.verdict = to_string(verdict.verdict);
    vx.type = verdict.type;
    d.vertices.push_back(std::move(vx));
}

double segment_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& x)
{
    const Eigen::VectorXd ab = b - a;
    const double len2 = ab.squaredNorm();
    const double s = len2 > 0.0 ? std::clamp((x - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    return (a + s * ab - x).norm();
}

}  // namespace

double distance_to_arcs(const BifurcationDiagram& d, const Eigen::VectorXd& v)
{
    double best = std::numeric_limits<double>::infinity();
    for (const auto& arc : d.arcs) {
        if (arc.values.size() == 1) best = std::min(best, (arc.values[0] - v).norm());
        for (std::size_t i = 1; i < arc.values.size(); ++i)
            best = std::min(best, segment_distance(arc.values[i - 1], arc.values[i], v));
    }
    return best;
}

BifurcationDiagram trace_diagram(const IntegrableModel& model, const std::vector<SingularSeed>& seeds, const Box& box,
                                 const ContinuationOptions& options)
{
    if (model.n() != 2) throw ModelError("diagram tracing needs a two-degree-of-freedom model");
    BifurcationDiagram d;
    d.axes = model.momentum_names;
    const Tracer tracer(model, box, options);

    for (const auto& s : seeds) {
        if (s.rank != 0) continue;
        try {
            add_vertex(d, model, refine_singular_point(model, s.point, 0, options.tol), tracer.cls);
        } catch (const RefinementError& e) {
            d.failures.push_back(std::string("vertex seed: ") + e.what());
        }
    }

    const double dedupe = 2.0 * options.max_step;
    for (const auto& s : seeds) {
        if (s.rank != 1) continue;
        if (distance_to_arcs(d, s.value) < dedupe) continue;
        Eigen::VectorXd u0;
        try {
            const PhasePoint p = refine_singular_point(model, s.point, 1, options.tol);
            u0 = tracer.sys.initial(p.coords);
            if (!gauss_newton(tracer.sys, u0, options.newton_tol, 20)) continue;
        } catch (const RefinementError& e) {
            d.failures.push_back(std::string("arc seed: ") + e.what());
            continue;
        }
        if (distance_to_arcs(d, tracer.model.momentum_value(PhasePoint(u0.head(tracer.N())))) < dedupe) continue;
        const auto t0 = tracer.tangent(u0, nullptr);
        if (!t0) {
            d.failures.push_back("arc seed: no transversal tangent");
            continue;
        }
        auto forward = tracer.run(u0, *t0, d.failures);
        auto backward = tracer.run(u0, -*t0, d.failures);
        for (const auto* b : {&forward, &backward})
            if (b->vertex_start) {
                try {
                    add_vertex(d, model, refine_singular_point(model, PhasePoint(*b->vertex_start), 0, options.tol),
                               tracer.cls);
                } catch (const RefinementError& e) {
                    d.failures.push_back(std::string("vertex near arc end: ") + e.what());
                }
            }

        // Join backward (reversed) and forward into one polyline.
        std::vector<Eigen::VectorXd> pts(backward.points.rbegin(), backward.points.rend());
        pts.insert(pts.end(), forward.points.begin() + 1, forward.points.end());
        std::vector<Eigen::VectorXd> vals;
        std::vector<ArcLabel> labels;
        for (const auto& p : pts) {
            vals.push_back(model.momentum_value(PhasePoint(p)));
            labels.push_back(tracer.label_at(p));
        }
        // Points at arc ends near vertices have collapsing spectra; they
        // inherit the neighbouring label.
        for (std::size_t i = 1; i < labels.size(); ++i)
            if (labels[i] == ArcLabel::unknown && labels[i - 1] != ArcLabel::unknown && i + 1 == labels.size())
                labels[i] = labels[i - 1];
        if (labels.size() > 1 && labels[0] == ArcLabel::unknown) labels[0] = labels[1];

        std::vector<bool> cusp(pts.size(), false);
        for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
            const Eigen::VectorXd a = vals[i] - vals[i - 1], b = vals[i + 1] - vals[i];
            const double phase = (pts[i + 1] - pts[i]).norm();
            const bool slow = phase > 0.0 && b.norm() / phase < options.cusp_ratio;
            const bool reversal = a.norm() > 0.0 && b.norm() > 0.0 && a.dot(b) < 0.0;
            cusp[i] = slow || reversal;
        }

        // Split at label changes and cusp candidates; neighbouring arcs
        // share their boundary point.
        auto emit = [&](std::size_t from, std::size_t to, const std::string& reason) {
            if (to <= from) return;
            Arc arc;
            arc.id = static_cast<int>(d.arcs.size());
            arc.label = labels[from];
            for (std::size_t k = from; k <= to; ++k) {
                arc.points.push_back(PhasePoint(pts[k]));
                arc.values.push_back(vals[k]);
            }
            arc.stop_reason = reason;
            d.arcs.push_back(std::move(arc));
        };
        std::size_t start = 0;
        for (std::size_t i = 1; i < pts.size(); ++i) {
            if (labels[i] != labels[start]) {
                emit(start, i, "label change");
                start = i;
            } else if (cusp[i]) {
                emit(start, i, "cusp candidate");
                d.cusps.push_back({static_cast<int>(d.arcs.size()) - 1, vals[i]});
                start = i;
            }
        }
        emit(start, pts.size() - 1, backward.stop + "/" + forward.stop);
    }
    return d;
}

}  // namespace ihs
