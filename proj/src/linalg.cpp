#include "ihs/linalg.hpp"

#include <algorithm>

namespace ihs {

Eigen::VectorXd singular_values(const Eigen::MatrixXd& a)
{
    if (a.size() == 0) return Eigen::VectorXd();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    return svd.singularValues();
}

namespace {

double cutoff(const Eigen::VectorXd& s, double tol)
{
    const double smax = s.size() > 0 ? s[0] : 0.0;
    return tol * std::max(smax, 1.0);
}

}  // namespace

int numerical_rank(const Eigen::MatrixXd& a, double tol)
{
    const Eigen::VectorXd s = singular_values(a);
    const double c = cutoff(s, tol);
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s[i] > c) ++r;
    return r;
}

Eigen::MatrixXd null_space(const Eigen::MatrixXd& a, double tol)
{
    const Eigen::Index cols = a.cols();
    if (a.rows() == 0) return Eigen::MatrixXd::Identity(cols, cols);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
    const Eigen::VectorXd s = svd.singularValues();
    const double c = cutoff(s, tol);
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s[i] > c) ++r;
    return svd.matrixV().rightCols(cols - r);
}

Eigen::MatrixXd range_space(const Eigen::MatrixXd& a, double tol)
{
    if (a.cols() == 0) return Eigen::MatrixXd(a.rows(), 0);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU);
    const Eigen::VectorXd s = svd.singularValues();
    const double c = cutoff(s, tol);
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s[i] > c) ++r;
    return svd.matrixU().leftCols(r);
}

Eigen::VectorXd solve_min_norm(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double tol)
{
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd s = svd.singularValues();
    const double smax = s.size() > 0 ? s[0] : 0.0;
    Eigen::VectorXd utb = svd.matrixU().transpose() * b;
    for (Eigen::Index i = 0; i < s.size(); ++i) utb[i] = s[i] > tol * smax && s[i] > 0.0 ? utb[i] / s[i] : 0.0;
    return svd.matrixV() * utb;
}

}  // namespace ihs
