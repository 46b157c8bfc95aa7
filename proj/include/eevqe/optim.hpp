// Copyright 2026 The eevqe Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
/**
 * @file
 * BFGS with a dense inverse-Hessian approximation and a strong-Wolfe line
 * search (bracketing followed by cubic-interpolation zoom).
 */
#pragma once
#include "error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace eevqe {

/// Value at x; writes the gradient into the second argument.
using ObjectiveWithGradient =
    std::function<double(const std::vector<double> &, std::vector<double> &)>;

/// Called after every accepted iteration with (iteration, value, x).
using IterationObserver =
    std::function<void(int, double, const std::vector<double> &)>;

struct BfgsOptions {
    int max_iter = 100;
    double grad_tol = 1e-10;
    /// Sufficient-decrease constant.
    double c1 = 1e-4;
    /// Curvature constant.
    double c2 = 0.9;
    /// Function evaluations allowed per line search.
    int max_line_search = 60;
    /// The inverse-Hessian update is skipped when y.s is below this.
    double curvature_eps = 1e-10;
};

enum class Termination {
    GradientTolerance,
    MaxIterations,
    LineSearchFailure,
};

[[nodiscard]] inline std::string to_string(Termination t) {
    switch (t) {
    case Termination::GradientTolerance:
        return "gradient-tolerance";
    case Termination::MaxIterations:
        return "max-iterations";
    case Termination::LineSearchFailure:
        return "line-search-failure";
    }
    return "unknown";
}

struct OptimizeResult {
    std::vector<double> x;
    double value = 0.0;
    double grad_norm = 0.0;
    int iterations = 0;
    /// Value before the first iteration and after each one.
    std::vector<double> trace;
    Termination reason = Termination::MaxIterations;
    int evaluations = 0;
    int skipped_updates = 0;
};

namespace detail {

using VecD = Eigen::VectorXd;

struct LinePoint {
    double alpha = 0.0;
    double value = 0.0;
    double slope = 0.0;
    VecD grad;
};

/// Minimizer of the cubic through (a, fa, da) and (b, fb, db), or NaN.
[[nodiscard]] inline double cubic_min(double a, double fa, double da, double b,
                                      double fb, double db) {
    const double d1 = da + db - 3.0 * (fa - fb) / (a - b);
    const double disc = d1 * d1 - da * db;
    if (!(disc >= 0.0)) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    const double d2 = std::copysign(std::sqrt(disc), b - a);
    const double denom = db - da + 2.0 * d2;
    if (denom == 0.0) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return b - (b - a) * (db + d2 - d1) / denom;
}

class WolfeSearch {
  public:
    WolfeSearch(const ObjectiveWithGradient &f, const VecD &x, const VecD &p,
                double f0, double d0, const BfgsOptions &opt)
        : f_{f}, x_{x}, p_{p}, f0_{f0}, d0_{d0}, opt_{opt},
          gbuf_(static_cast<std::size_t>(x.size())) {}

    /// Returns true with `out` set on success.
    bool run(double alpha1, LinePoint &out) {
        LinePoint prev{0.0, f0_, d0_, {}};
        double alpha = alpha1;
        for (int i = 0; evals_ < opt_.max_line_search; ++i) {
            LinePoint cur = eval(alpha);
            if (!std::isfinite(cur.value) ||
                cur.value > f0_ + opt_.c1 * alpha * d0_ ||
                (i > 0 && cur.value >= prev.value)) {
                return zoom(prev, cur, out);
            }
            if (std::abs(cur.slope) <= -opt_.c2 * d0_) {
                out = std::move(cur);
                return true;
            }
            if (cur.slope >= 0.0) {
                return zoom(cur, prev, out);
            }
            prev = std::move(cur);
            alpha *= 2.0;
        }
        return false;
    }

    [[nodiscard]] int evaluations() const { return evals_; }
    /// Lowest-valued trial with sufficient decrease, if any.
    [[nodiscard]] const LinePoint *best() const {
        return best_.alpha > 0.0 ? &best_ : nullptr;
    }

  private:
    LinePoint eval(double alpha) {
        ++evals_;
        std::vector<double> xs(static_cast<std::size_t>(x_.size()));
        for (Eigen::Index k = 0; k < x_.size(); ++k) {
            xs[static_cast<std::size_t>(k)] = x_(k) + alpha * p_(k);
        }
        LinePoint pt;
        pt.alpha = alpha;
        pt.value = f_(xs, gbuf_);
        pt.grad = Eigen::Map<const VecD>(gbuf_.data(), x_.size());
        pt.slope = pt.grad.dot(p_);
        if (std::isfinite(pt.value) &&
            pt.value <= f0_ + opt_.c1 * alpha * d0_ &&
            (best_.alpha == 0.0 || pt.value < best_.value)) {
            best_ = pt;
        }
        return pt;
    }

    bool zoom(LinePoint lo, LinePoint hi, LinePoint &out) {
        while (evals_ < opt_.max_line_search) {
            const double a = std::min(lo.alpha, hi.alpha);
            const double b = std::max(lo.alpha, hi.alpha);
            const double width = b - a;
            if (width <= std::numeric_limits<double>::epsilon() *
                             std::max(1.0, b)) {
                return false;
            }
            double trial = std::numeric_limits<double>::quiet_NaN();
            if (std::isfinite(hi.value)) {
                trial = cubic_min(lo.alpha, lo.value, lo.slope, hi.alpha,
                                  hi.value, hi.slope);
            }
            if (!std::isfinite(trial) || trial < a + 0.1 * width ||
                trial > b - 0.1 * width) {
                trial = 0.5 * (a + b);
            }
            LinePoint cur = eval(trial);
            if (!std::isfinite(cur.value) ||
                cur.value > f0_ + opt_.c1 * trial * d0_ ||
                cur.value >= lo.value) {
                hi = std::move(cur);
                continue;
            }
            if (std::abs(cur.slope) <= -opt_.c2 * d0_) {
                out = std::move(cur);
                return true;
            }
            if (cur.slope * (hi.alpha - lo.alpha) >= 0.0) {
                hi = lo;
            }
            lo = std::move(cur);
        }
        return false;
    }

    const ObjectiveWithGradient &f_;
    const VecD &x_;
    const VecD &p_;
    double f0_;
    double d0_;
    const BfgsOptions &opt_;
    std::vector<double> gbuf_;
    int evals_ = 0;
    LinePoint best_;
};

} // namespace detail

/**
 * @brief Minimize with BFGS.
 *
 * The first step length follows the common heuristic
 * alpha = min(1, 1.01 * 2 * (f - f_prev) / (g . p)) with f_prev initialized to
 * f + |g| / 2. A line search that exhausts its evaluations ends the run with
 * the best sufficient-decrease point it found, if any.
 */
[[nodiscard]] inline OptimizeResult bfgs(const ObjectiveWithGradient &f,
                                         const std::vector<double> &x0,
                                         const BfgsOptions &opt = {},
                                         const IterationObserver &observer = {}) {
    using detail::VecD;
    require(opt.max_iter >= 0, ErrorKind::InvalidArgument,
            "max_iter must be non-negative");
    const auto n = static_cast<Eigen::Index>(x0.size());
    OptimizeResult res;
    res.x = x0;
    std::vector<double> gbuf(x0.size());
    double fx = f(res.x, gbuf);
    ++res.evaluations;
    VecD x = Eigen::Map<const VecD>(x0.data(), n);
    VecD g = Eigen::Map<const VecD>(gbuf.data(), n);
    res.trace.push_back(fx);
    Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(n, n);
    double f_prev = fx + g.norm() / 2.0;
    res.reason = Termination::MaxIterations;
    for (int it = 0; it < opt.max_iter; ++it) {
        if (g.norm() < opt.grad_tol) {
            res.reason = Termination::GradientTolerance;
            break;
        }
        VecD p = -(hinv * g);
        double d0 = g.dot(p);
        if (!(d0 < 0.0)) {
            hinv.setIdentity();
            p = -g;
            d0 = g.dot(p);
        }
        double alpha1 = 1.0;
        const double guess = 1.01 * 2.0 * (fx - f_prev) / d0;
        if (guess > 0.0 && std::isfinite(guess)) {
            alpha1 = std::min(1.0, guess);
        }
        detail::WolfeSearch search(f, x, p, fx, d0, opt);
        detail::LinePoint pt;
        const bool ok = search.run(alpha1, pt);
        res.evaluations += search.evaluations();
        if (!ok) {
            res.reason = Termination::LineSearchFailure;
            if (const auto *b = search.best()) {
                x += b->alpha * p;
                fx = b->value;
                g = b->grad;
                ++res.iterations;
                res.trace.push_back(fx);
                if (observer) {
                    std::vector<double> xs(x.data(), x.data() + n);
                    observer(res.iterations, fx, xs);
                }
            }
            break;
        }
        const VecD s = pt.alpha * p;
        const VecD y = pt.grad - g;
        x += s;
        f_prev = fx;
        fx = pt.value;
        g = pt.grad;
        const double ys = y.dot(s);
        if (ys > opt.curvature_eps) {
            const VecD hy = hinv * y;
            const double yhy = y.dot(hy);
            hinv += ((ys + yhy) / (ys * ys)) * (s * s.transpose()) -
                    (hy * s.transpose() + s * hy.transpose()) / ys;
        } else {
            ++res.skipped_updates;
        }
        ++res.iterations;
        res.trace.push_back(fx);
        if (observer) {
            std::vector<double> xs(x.data(), x.data() + n);
            observer(res.iterations, fx, xs);
        }
    }
    res.x.assign(x.data(), x.data() + n);
    res.value = fx;
    res.grad_norm = g.norm();
    if (res.reason == Termination::MaxIterations && res.grad_norm < opt.grad_tol) {
        res.reason = Termination::GradientTolerance;
    }
    return res;
}

/// Overload with separate value and gradient callables.
[[nodiscard]] inline OptimizeResult
bfgs(const std::function<double(const std::vector<double> &)> &value,
     const std::function<std::vector<double>(const std::vector<double> &)> &gradient,
     const std::vector<double> &x0, const BfgsOptions &opt = {},
     const IterationObserver &observer = {}) {
    return bfgs(
        [&](const std::vector<double> &x, std::vector<double> &g) {
            g = gradient(x);
            return value(x);
        },
        x0, opt, observer);
}

} // namespace eevqe
