#pragma once

// Singular points of a momentum map and the bifurcation diagram of
// two-degree-of-freedom models: grid scan, Newton refinement, and
// pseudo-arclength continuation of rank n-1 families.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ihs/classifier.hpp"
#include "ihs/phase_space.hpp"

namespace ihs {

class RefinementError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Axis-aligned box in ambient coordinates.
struct Box {
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;

    static Box cube(std::size_t dimension, double half_width);
    bool contains(const Eigen::VectorXd& x) const;
};

struct SingularSeed {
    PhasePoint point;
    int rank = 0;
    Eigen::VectorXd value;  // F(point)
};

struct ScanOptions {
    int resolution = 5;        // grid points per axis
    double tol = 1e-8;         // rank cutoff
    double newton_tol = 1e-11;
    int max_iterations = 40;
    double dedupe_radius = 0.1;  // in value space
};

/// Grid points are projected onto the leaf and pulled onto the rank n-1
/// locus by Gauss-Newton; converged points are deduplicated in value space.
std::vector<SingularSeed> scan_singular_points(const IntegrableModel& model, const Box& box,
                                               const ScanOptions& options = {});

/// Gauss-Newton on the augmented system (leaf constraints, n - target_rank
/// orthonormal multiplier vectors annihilating dF on the leaf). Returns a
/// point with residual <= 1e-11 whose rank is certified at target_rank.
/// Throws RefinementError on divergence or failed certification.
PhasePoint refine_singular_point(const IntegrableModel& model, const PhasePoint& seed, int target_rank,
                                 double tol = 1e-8, int max_iterations = 60);

enum class ArcLabel { elliptic_family, hyperbolic_family, unknown };

std::string to_string(ArcLabel label);

struct Arc {
    int id = 0;
    ArcLabel label = ArcLabel::unknown;
    std::vector<Eigen::VectorXd> values;  // polyline in momentum-value space
    std::vector<PhasePoint> points;       // preimages, aligned with values
    std::string stop_reason;
};

struct Vertex {
    PhasePoint point;
    Eigen::VectorXd value;
    int rank = 0;
    std::optional<WilliamsonType> type;
    std::string verdict;
};

struct CuspCandidate {
    int arc = 0;
    Eigen::VectorXd value;
};

struct BifurcationDiagram {
    std::vector<std::string> axes;  // momentum component names
    std::vector<Arc> arcs;
    std::vector<Vertex> vertices;
    std::vector<CuspCandidate> cusps;
    std::vector<std::string> failures;  // per-arc step failures
};

struct ContinuationOptions {
    double initial_step = 0.01;
    double max_step = 0.05;
    double min_step = 1e-6;
    double newton_tol = 1e-11;
    int max_steps = 4000;
    double vertex_threshold = 1e-3;  // sigma_max of dF on the leaf
    double cusp_ratio = 1e-4;        // value speed / phase speed
    double tol = 1e-8;
    std::uint64_t seed = 0;
};

/// Traces every rank n-1 seed in both directions (n must be 2), splitting
/// arcs at label changes, cusp candidates and vertices. Seeds within twice
/// the step of an already traced arc (in value space) are skipped.
/// Rank-0 seeds are refined and added as vertices.
BifurcationDiagram trace_diagram(const IntegrableModel& model, const std::vector<SingularSeed>& seeds,
                                 const Box& box, const ContinuationOptions& options = {});

/// Distance in value space from v to the nearest arc point.
double distance_to_arcs(const BifurcationDiagram& d, const Eigen::VectorXd& v);

// ------------------------------------------------------------- export

enum class ExportFormat { svg, csv, json };

std::string export_svg(const BifurcationDiagram& d);
/// Columns: arc_id,h,k (one row per polyline point, arcs in order).
std::string export_csv(const BifurcationDiagram& d);
std::string export_json(const BifurcationDiagram& d);

/// Writes the chosen format to `path`; throws std::runtime_error on I/O failure.
void export_diagram(const BifurcationDiagram& d, ExportFormat format, const std::string& path);

}  // namespace ihs
