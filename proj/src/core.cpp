#include "helmix/core.hpp"

#include "helmix/numerics.hpp"

#include <cmath>
#include <functional>
#include <string>

namespace helmix {

MolarMasses::MolarMasses(Vec values) : m_(std::move(values)) {
    if (m_.size() < 1) throw ModelInvalidError("molar masses: at least one species required");
    for (Eigen::Index i = 0; i < m_.size(); ++i)
        if (!(m_[i] > 0.0) || !std::isfinite(m_[i]))
            throw ModelInvalidError("molar masses: M_" + std::to_string(i + 1) + " must be positive");
}

MolarMasses::MolarMasses(std::initializer_list<double> values)
    : MolarMasses(Eigen::Map<const Vec>(values.begin(), static_cast<Eigen::Index>(values.size()))) {}

Composition::Composition(Vec x) : x_(std::move(x)) {
    if (x_.size() < 1) throw DomainError("composition: empty vector");
    for (Eigen::Index i = 0; i < x_.size(); ++i)
        if (!(x_[i] >= 0.0) || !std::isfinite(x_[i]))
            throw DomainError("composition: x_" + std::to_string(i + 1) + " is negative or not finite");
    const double sum = x_.sum();
    if (std::abs(sum - 1.0) > simplex_tolerance)
        throw DomainError("composition: mole fractions sum to " + std::to_string(sum) + ", not 1");
    x_ /= sum;
    interior_ = x_.minCoeff() > x_floor;
}

Composition::Composition(std::initializer_list<double> x)
    : Composition(Eigen::Map<const Vec>(x.begin(), static_cast<Eigen::Index>(x.size()))) {}

ScalarJet ScalarJet::zero(std::size_t n) {
    const auto k = static_cast<Eigen::Index>(n);
    return ScalarJet{0.0, Vec::Zero(k), Mat::Zero(k, k)};
}

ScalarJet& ScalarJet::operator+=(const ScalarJet& o) {
    value += o.value;
    grad += o.grad;
    hess += o.hess;
    return *this;
}

ScalarJet& ScalarJet::operator-=(const ScalarJet& o) {
    value -= o.value;
    grad -= o.grad;
    hess -= o.hess;
    return *this;
}

ScalarJet& ScalarJet::operator*=(double s) {
    value *= s;
    grad *= s;
    hess *= s;
    return *this;
}

ScalarJet operator+(ScalarJet a, const ScalarJet& b) { return a += b; }
ScalarJet operator-(ScalarJet a, const ScalarJet& b) { return a -= b; }
ScalarJet operator*(double s, ScalarJet a) { return a *= s; }
ScalarJet operator*(ScalarJet a, double s) { return a *= s; }
double magnitude(const ScalarJet& a) {
    return std::abs(a.value) + a.grad.cwiseAbs().sum() + a.hess.cwiseAbs().sum();
}

ScalarJet simplex_fd_jet(const std::function<double(const Vec&)>& f, const Vec& x) {
    const Eigen::Index n = x.size();
    ScalarJet out = ScalarJet::zero(static_cast<std::size_t>(n));
    out.value = f(x);
    if (n < 2) return out;
    const double xmin = x.minCoeff();
    if (!(xmin > 0.0)) throw DomainError("finite-difference jet needs an interior composition");
    const double h1 = std::min(fd_step(0.0), 0.25 * xmin);
    const double h2 = std::min(fd_step_second(0.0), 0.2 * xmin);
    auto dir = [&](Eigen::Index i) {
        Vec d = -x;
        d[i] += 1.0;
        return d;
    };
    for (Eigen::Index i = 0; i < n; ++i) {
        const Vec d = dir(i);
        out.grad[i] = (f(x + h1 * d) - f(x - h1 * d)) / (2.0 * h1);
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        const Vec di = dir(i);
        for (Eigen::Index j = i; j < n; ++j) {
            const Vec dj = dir(j);
            const double v = (f(x + h2 * (di + dj)) - f(x + h2 * (di - dj)) - f(x - h2 * (di - dj)) +
                              f(x - h2 * (di + dj))) /
                             (4.0 * h2 * h2);
            out.hess(i, j) = v;
            out.hess(j, i) = v;
        }
    }
    return out;
}

MoleData mole_data_from_densities(const Vec& rho, const MolarMasses& M) {
    if (static_cast<std::size_t>(rho.size()) != M.size())
        throw DomainError("densities: expected " + std::to_string(M.size()) + " species");
    for (Eigen::Index i = 0; i < rho.size(); ++i)
        if (!(rho[i] >= 0.0) || !std::isfinite(rho[i]))
            throw DomainError("densities: rho_" + std::to_string(i + 1) + " is negative or not finite");
    if (!(rho.sum() > 0.0)) throw DegenerateStateError("densities: all partial densities vanish");

    Vec n_i = rho.cwiseQuotient(M.values());
    const double n = n_i.sum();
    Vec x = n_i / n;
    // Exact division can leave the sum a few ulps away from one; Composition renormalizes.
    Composition comp(x);
    return MoleData{std::move(n_i), n, comp, !comp.interior()};
}

double mean_molar_mass(const Vec& x, const MolarMasses& M) { return M.values().dot(x); }

double mean_molar_mass(const Composition& x, const MolarMasses& M) {
    return mean_molar_mass(x.values(), M);
}

Vec densities_from_molar_volume(const Composition& x, const MolarMasses& M, double v) {
    if (!(v > 0.0)) throw DomainError("molar volume must be positive to form densities");
    return M.values().cwiseProduct(x.values()) / v;
}

Vec tangential_gradient(const Vec& grad, const Vec& x) {
    return grad.array() - grad.dot(x);
}

Mat tangential_hessian(const Mat& hess, const Vec& x) {
    const Eigen::Index n = x.size();
    const Mat P = Mat::Identity(n, n) - x * Vec::Ones(n).transpose();
    Mat out = P.transpose() * hess * P;
    return 0.5 * (out + out.transpose());
}

Vec homogeneous_gradient(const ScalarJet& phi, const Vec& x, const MolarMasses& M) {
    Vec g = tangential_gradient(phi.grad, x);
    g.array() += phi.value;
    return g.cwiseQuotient(M.values());
}

Mat homogeneous_hessian(const ScalarJet& phi, const Vec& x, double n, const MolarMasses& M) {
    const Vec inv_m = M.values().cwiseInverse();
    return inv_m.asDiagonal() * tangential_hessian(phi.hess, x) * inv_m.asDiagonal() / n;
}

std::vector<Vec> simplex_lattice(std::size_t species, std::size_t per_edge) {
    std::vector<Vec> out;
    if (species == 0) return out;
    const std::size_t total = per_edge + 1;
    if (species == 1) {
        out.push_back(Vec::Ones(1));
        return out;
    }
    std::vector<std::size_t> k(species, 1);
    // Enumerate compositions of `total` into `species` positive parts in lexicographic order.
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t idx, std::size_t remaining) {
        if (idx + 1 == species) {
            if (remaining >= 1) {
                k[idx] = remaining;
                Vec x(static_cast<Eigen::Index>(species));
                for (std::size_t i = 0; i < species; ++i)
                    x[static_cast<Eigen::Index>(i)] = static_cast<double>(k[i]) / static_cast<double>(total);
                out.push_back(x);
            }
            return;
        }
        const std::size_t others = species - idx - 1;
        for (std::size_t v = 1; v + others <= remaining; ++v) {
            k[idx] = v;
            rec(idx + 1, remaining - v);
        }
    };
    rec(0, total);
    return out;
}

Mat orthogonal_complement(const Vec& v) {
    const Eigen::Index n = v.size();
    if (n < 2) return Mat(n, 0);
    const Mat column = v;
    Eigen::HouseholderQR<Mat> qr(column);
    Mat Q = qr.householderQ() * Mat::Identity(n, n);
    return Q.rightCols(n - 1);
}

Mat simplex_tangent_basis(std::size_t species) {
    return orthogonal_complement(Vec::Ones(static_cast<Eigen::Index>(species)));
}

}  // namespace helmix
