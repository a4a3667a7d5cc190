#include "helmix/conjugate.hpp"

#include <algorithm>
#include <cmath>

#include "helmix/eos.hpp"
#include "helmix/numerics.hpp"
#include "helmix/potentials.hpp"

namespace helmix {

namespace {

// Newton direction for maximizing mu . rho - f; falls back to a scaled gradient step
// when the Hessian is not positive definite.
Vec ascent_direction(const Mat& H, const Vec& r) {
    Eigen::LLT<Mat> llt(H);
    if (llt.info() == Eigen::Success) {
        Vec d = llt.solve(r);
        if (d.allFinite()) return d;
    }
    const double scale = std::max(H.diagonal().cwiseAbs().maxCoeff(), 1e-300);
    return r / scale;
}

bool near_face(const Vec& rho, const Box& box) {
    for (Eigen::Index i = 0; i < rho.size(); ++i) {
        const double w = box.upper[i] - box.lower[i];
        if (rho[i] - box.lower[i] <= 1e-12 * w || box.upper[i] - rho[i] <= 1e-12 * w) return true;
    }
    return false;
}

}  // namespace

ConvexConjugate::ConvexConjugate(Sampler f, Box box, std::size_t per_axis, int newton_steps)
    : f_(std::move(f)), box_(std::move(box)), newton_steps_(newton_steps) {
    const Eigen::Index N = box_.lower.size();
    if (N < 1 || box_.upper.size() != N) throw ConfigError("conjugate: box bounds have mismatched sizes");
    if (N > 3) throw ConfigError("conjugate: the tabulated search is limited to at most 3 species");
    if (per_axis < 2) throw ConfigError("conjugate: need at least 2 grid points per axis");
    for (Eigen::Index i = 0; i < N; ++i)
        if (!(box_.upper[i] > box_.lower[i])) throw ConfigError("conjugate: empty box");

    std::vector<std::size_t> idx(static_cast<std::size_t>(N), 0);
    while (true) {
        Vec rho(N);
        for (Eigen::Index i = 0; i < N; ++i)
            rho[i] = box_.lower[i] + (box_.upper[i] - box_.lower[i]) * static_cast<double>(idx[i]) /
                                         static_cast<double>(per_axis - 1);
        const SampleValue s = f_(rho);
        if (s.finite) {
            points_.push_back(rho);
            values_.push_back(s.f);
        }
        std::size_t k = 0;
        while (k < idx.size() && ++idx[k] == per_axis) idx[k++] = 0;
        if (k == idx.size()) break;
    }
    if (points_.empty()) throw DomainError("conjugate: the function is nowhere finite on the box");
}

ConjugateResult ConvexConjugate::operator()(const Vec& mu) const {
    std::size_t best = 0;
    double best_val = -infinity;
    for (std::size_t i = 0; i < points_.size(); ++i) {
        const double v = mu.dot(points_[i]) - values_[i];
        if (v > best_val) {
            best_val = v;
            best = i;
        }
    }
    ConjugateResult res;
    Vec rho = points_[best];
    SampleValue s = f_(rho);
    double phi = mu.dot(rho) - s.f;
    for (int it = 0; it < newton_steps_; ++it) {
        res.iterations = it + 1;
        const Vec r = mu - s.grad;
        const Vec d = ascent_direction(s.hess, r);
        const double decrement = r.dot(d);
        const double scale = std::abs(mu.dot(rho)) + std::abs(s.f) + 1.0;
        if (std::abs(decrement) <= 1e-20 * scale) {
            res.converged = true;
            break;
        }
        bool accepted = false;
        double t = 1.0;
        for (int bt = 0; bt < 60; ++bt, t *= 0.5) {
            Vec trial = (rho + t * d).cwiseMax(box_.lower).cwiseMin(box_.upper);
            const SampleValue st = f_(trial);
            if (!st.finite) continue;
            const double phit = mu.dot(trial) - st.f;
            if (phit >= phi - 1e-15 * scale) {
                const bool moved = (trial - rho).cwiseAbs().maxCoeff() > 0.0;
                rho = trial;
                s = st;
                phi = phit;
                accepted = moved;
                break;
            }
        }
        if (!accepted) {
            // No further ascent is representable; accept when the gradient residual is at rounding level.
            res.converged = r.norm() <= 1e-10 * (mu.norm() + s.grad.norm() + 1.0) || near_face(rho, box_);
            break;
        }
    }
    res.g = phi;
    res.argmax = rho;
    res.on_boundary = near_face(rho, box_);
    return res;
}

Sampler conjugate_sampler(const ConvexConjugate& conj) {
    return [&conj](const Vec& mu) {
        const ConjugateResult r = conj(mu);
        SampleValue out;
        const SampleValue at = conj.function()(r.argmax);
        out.finite = at.finite;
        out.f = r.g;
        out.grad = r.argmax;
        const Eigen::Index N = mu.size();
        Eigen::LLT<Mat> llt(at.hess);
        out.hess = llt.info() == Eigen::Success ? Mat(llt.solve(Mat::Identity(N, N))) : Mat(Mat::Identity(N, N));
        return out;
    };
}

ConjugateResult constrained_conjugate(const Sampler& f, const Vec& normal, const Vec& mu, int newton_steps) {
    const double nn = normal.squaredNorm();
    if (!(nn > 0.0)) throw DomainError("constrained conjugate: the plane normal vanishes");
    const Mat B = orthogonal_complement(normal);
    Vec rho = normal / nn;
    SampleValue s = f(rho);
    if (!s.finite) throw DomainError("constrained conjugate: the function is not finite at the plane anchor");
    ConjugateResult res;
    double phi = mu.dot(rho) - s.f;
    for (int it = 0; it < newton_steps && B.cols() > 0; ++it) {
        res.iterations = it + 1;
        const Vec r = B.transpose() * (mu - s.grad);
        const Mat Hz = B.transpose() * s.hess * B;
        const Vec dz = ascent_direction(0.5 * (Hz + Hz.transpose()), r);
        const double decrement = r.dot(dz);
        const double scale = std::abs(mu.dot(rho)) + std::abs(s.f) + 1.0;
        if (std::abs(decrement) <= 1e-20 * scale) {
            res.converged = true;
            break;
        }
        const Vec d = B * dz;
        bool accepted = false;
        double t = 1.0;
        for (int bt = 0; bt < 60; ++bt, t *= 0.5) {
            const Vec trial = rho + t * d;
            const SampleValue st = f(trial);
            if (!st.finite) continue;
            const double phit = mu.dot(trial) - st.f;
            if (phit >= phi - 1e-15 * scale) {
                accepted = (trial - rho).cwiseAbs().maxCoeff() > 0.0;
                rho = trial;
                s = st;
                phi = phit;
                break;
            }
        }
        if (!accepted) {
            res.converged = r.norm() <= 1e-10 * (mu.norm() + s.grad.norm() + 1.0);
            break;
        }
    }
    if (B.cols() == 0) res.converged = true;
    res.g = phi;
    res.argmax = rho;
    return res;
}

Sampler free_energy_sampler(const ConstitutiveModel& model, double T) {
    return [model, T](const Vec& rho) {
        SampleValue s;
        if ((rho.array() <= 0.0).any()) return s;
        try {
            const PotentialBundle b = evaluate_bundle(model, T, rho);
            s.finite = true;
            s.f = b.f;
            s.grad = b.mu;
            s.hess = b.hessian;
        } catch (const Error&) {
            s.finite = false;
        }
        return s;
    };
}

Sampler limit_k_sampler(const ModelFamily& family, double T) {
    ConstitutiveModel lim = family.limit();
    return [lim, T](const Vec& rho) {
        SampleValue s;
        if ((rho.array() <= 0.0).any()) return s;
        try {
            const MechanicallyNeutralPart k = mechanically_neutral_k(lim, T, rho);
            s.finite = true;
            s.f = k.k;
            s.grad = k.grad;
            s.hess = k.hess;
        } catch (const Error&) {
            s.finite = false;
        }
        return s;
    };
}

DualPdeStats dual_pde_residual(const ConstitutiveModel& model, double T, const std::function<double(const Vec&)>& g,
                               const std::vector<Vec>& mu_samples) {
    DualPdeStats st;
    double sum2 = 0.0;
    for (const Vec& mu : mu_samples) {
        const double pi = g(mu);
        Vec rho(mu.size());
        for (Eigen::Index i = 0; i < mu.size(); ++i) {
            const double h = fd_step(mu[i]);
            Vec up = mu, dn = mu;
            up[i] += h;
            dn[i] -= h;
            rho[i] = (g(up) - g(dn)) / (up[i] - dn[i]);
        }
        try {
            if ((rho.array() <= 0.0).any()) throw DomainError("negative density");
            const double r = eval_V(model, T, pi, rho).V - 1.0;
            st.residuals.push_back(r);
            st.max_abs = std::max(st.max_abs, std::abs(r));
            sum2 += r * r;
            ++st.used;
        } catch (const Error&) {
            ++st.skipped;
        }
    }
    if (st.used > 0) st.rms = std::sqrt(sum2 / static_cast<double>(st.used));
    return st;
}

}  // namespace helmix
