#pragma once

// The Kovalevskaya top on e(3)*: coordinates (R1, R2, R3, S1, S2, S3),
// integrals H and K, Casimirs f1 = |R|^2 and f2 = S.R on the leaf
// f1 = 1, f2 = g.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "ihs/bifurcation.hpp"
#include "ihs/classifier.hpp"
#include "ihs/phase_space.hpp"

namespace ihs {

IntegrableModel build_kovalevskaya(double g);

/// P+ = (1,0,0,g,0,0) and P- = (-1,0,0,-g,0,0), fixed by
/// (R1,R2,R3,S1,S2,S3) -> (R1,-R2,-R3,S1,-S2,-S3) on the leaf.
std::array<PhasePoint, 2> involution_fixed_points(double g);

/// Image of a point under the involution above.
PhasePoint involution(const PhasePoint& p);

/// Closed-form (h, k) at P+ and P-.
std::array<Eigen::Vector2d, 2> vertex_values(double g);

struct FixedPointReport {
    std::string name;  // "P+" or "P-"
    PhasePoint point;
    Eigen::Vector2d value;
    int rank = 0;
    NonDegeneracyVerdict verdict;
    std::string label;  // "IV" (non elliptic-elliptic) or "V" (elliptic-elliptic)
};

struct VertexReport {
    double g = 0.0;
    std::optional<char> regime;  // empty exactly at a threshold
    std::array<FixedPointReport, 2> points;
    /// Types as (k_e, k_h, k_f) strings, sorted; empty entries are non-typed.
    std::vector<std::string> type_multiset() const;
};

VertexReport classify_vertices(double g, const ClassifierOptions& options = {});

class RegimeError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// 8 / (3 sqrt 3).
double regime_threshold_cd();

/// 'a' for g = 0, then 'b' .. 'e' by the thresholds 1, 8/(3 sqrt 3), 2 on
/// g^2. Throws RegimeError exactly at a threshold.
char regime(double g);

/// Human-readable short name of a Williamson type with rank 0 and two
/// degrees of freedom: "elliptic-elliptic", "hyperbolic-elliptic", ...
std::string type_name(const WilliamsonType& t);

struct KovalevskayaDiagramOptions {
    double s_bound = 4.0;  // |S_i| <= s_bound
    int resolution = 4;
    ContinuationOptions continuation;
};

Box kovalevskaya_box(double s_bound);

/// Scan on the leaf plus the fixed points as vertex seeds, then trace.
BifurcationDiagram kovalevskaya_diagram(double g, const KovalevskayaDiagramOptions& options = {});

}  // namespace ihs
