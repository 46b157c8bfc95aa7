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
#include <catch_amalgamated.hpp>

#include <eevqe/optim.hpp>

#include <cmath>

using namespace eevqe;
using Catch::Approx;

namespace {

/// f = 1/2 x^T A x - b^T x with A = diag(1..n) + 0.1 (ones) and b = (1..n).
double quadratic(const std::vector<double> &x, std::vector<double> &g) {
    const std::size_t n = x.size();
    double sum = 0.0;
    for (double v : x) {
        sum += v;
    }
    double f = 0.0;
    g.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double ax = static_cast<double>(i + 1) * x[i] + 0.1 * sum;
        const double b = static_cast<double>(i + 1);
        f += 0.5 * x[i] * ax - b * x[i];
        g[i] = ax - b;
    }
    return f;
}

double rosenbrock(const std::vector<double> &x, std::vector<double> &g) {
    const double a = 1.0 - x[0];
    const double b = x[1] - x[0] * x[0];
    g = {-2.0 * a - 400.0 * x[0] * b, 200.0 * b};
    return a * a + 100.0 * b * b;
}

bool non_increasing(const std::vector<double> &trace) {
    for (std::size_t k = 1; k < trace.size(); ++k) {
        if (trace[k] > trace[k - 1]) {
            return false;
        }
    }
    return true;
}

} // namespace

TEST_CASE("squared distance converges in few iterations", "[optim]") {
    const std::vector<double> a{0.5, -1.0, 2.0, 3.0, -0.25};
    auto f = [&a](const std::vector<double> &x, std::vector<double> &g) {
        double v = 0.0;
        g.resize(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            g[i] = 2.0 * (x[i] - a[i]);
            v += (x[i] - a[i]) * (x[i] - a[i]);
        }
        return v;
    };
    const OptimizeResult r = bfgs(f, std::vector<double>(a.size(), 0.0));
    CHECK(r.value < 1e-16);
    CHECK(r.iterations <= static_cast<int>(a.size()) + 2);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(r.x[i] == Approx(a[i]).margin(1e-8));
    }
}

TEST_CASE("quadratic converges to the linear solve", "[optim]") {
    const std::size_t n = 6;
    const OptimizeResult r = bfgs(quadratic, std::vector<double>(n, 0.0));
    CHECK(r.reason == Termination::GradientTolerance);
    CHECK(r.grad_norm < 1e-10);
    // A x = b solved independently by Sherman-Morrison on diag + rank one.
    double num = 0.0;
    double den = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += 1.0;
        den += 0.1 / static_cast<double>(i + 1);
    }
    const double s = num / den;
    for (std::size_t i = 0; i < n; ++i) {
        const double expect = (static_cast<double>(i + 1) - 0.1 * s) /
                              static_cast<double>(i + 1);
        CHECK(r.x[i] == Approx(expect).margin(1e-9));
    }
    CHECK(r.iterations <= 20);
    CHECK(r.skipped_updates == 0);
}

TEST_CASE("Rosenbrock from the standard start", "[optim]") {
    BfgsOptions opt;
    opt.max_iter = 200;
    const OptimizeResult r = bfgs(rosenbrock, {-1.2, 1.0}, opt);
    CHECK(r.x[0] == Approx(1.0).margin(1e-8));
    CHECK(r.x[1] == Approx(1.0).margin(1e-8));
    CHECK(r.value < 1e-12);
    CHECK(r.iterations < 100);
    CHECK(non_increasing(r.trace));
}

TEST_CASE("trace bookkeeping", "[optim]") {
    BfgsOptions opt;
    opt.max_iter = 7;
    std::vector<int> seen;
    const OptimizeResult r =
        bfgs(rosenbrock, {-1.2, 1.0}, opt,
             [&](int it, double value, const std::vector<double> &x) {
                 seen.push_back(it);
                 std::vector<double> g;
                 CHECK(rosenbrock(x, g) == value);
             });
    CHECK(r.reason == Termination::MaxIterations);
    CHECK(r.iterations == 7);
    CHECK(r.trace.size() == 8);
    CHECK(seen == std::vector<int>{1, 2, 3, 4, 5, 6, 7});
    CHECK(r.trace.back() == r.value);
    CHECK(non_increasing(r.trace));
    CHECK(r.evaluations >= 8);
}

TEST_CASE("zero budget returns the start", "[optim]") {
    BfgsOptions opt;
    opt.max_iter = 0;
    const OptimizeResult r = bfgs(rosenbrock, {-1.2, 1.0}, opt);
    CHECK(r.x == std::vector<double>{-1.2, 1.0});
    CHECK(r.trace.size() == 1);
    CHECK(r.iterations == 0);
    CHECK(r.evaluations == 1);
    opt.max_iter = -1;
    CHECK_THROWS_AS(bfgs(rosenbrock, {0.0, 0.0}, opt), Error);
}

TEST_CASE("stationary start stops at once", "[optim]") {
    const OptimizeResult r = bfgs(rosenbrock, {1.0, 1.0});
    CHECK(r.reason == Termination::GradientTolerance);
    CHECK(r.iterations == 0);
}

TEST_CASE("runs are deterministic", "[optim]") {
    const OptimizeResult a = bfgs(rosenbrock, {-1.2, 1.0});
    const OptimizeResult b = bfgs(rosenbrock, {-1.2, 1.0});
    CHECK(a.x == b.x);
    CHECK(a.trace == b.trace);
}

TEST_CASE("inconsistent gradients end in a line-search failure", "[optim]") {
    // The reported gradient points uphill, so no step along -g decreases f.
    auto wrong = [](const std::vector<double> &x, std::vector<double> &g) {
        g = {-2.0 * x[0], -2.0 * x[1]};
        return x[0] * x[0] + x[1] * x[1];
    };
    const OptimizeResult r = bfgs(wrong, {1.0, -2.0});
    CHECK(r.reason == Termination::LineSearchFailure);
    CHECK(r.value <= 5.0);
    CHECK(r.iterations == 0);
    CHECK(r.x == std::vector<double>{1.0, -2.0});
}

TEST_CASE("non-smooth minima keep the best accepted point", "[optim]") {
    // |x| has no point satisfying the curvature condition around 0.
    auto absolute = [](const std::vector<double> &x, std::vector<double> &g) {
        g = {x[0] > 0.0 ? 1.0 : (x[0] < 0.0 ? -1.0 : 0.0)};
        return std::abs(x[0]);
    };
    BfgsOptions opt;
    opt.max_iter = 50;
    const OptimizeResult r = bfgs(absolute, {0.7}, opt);
    CHECK(r.value < 0.7);
    CHECK(non_increasing(r.trace));
    CHECK(r.trace.size() == static_cast<std::size_t>(r.iterations) + 1);
}

TEST_CASE("separate value and gradient callables", "[optim]") {
    const OptimizeResult r = bfgs(
        [](const std::vector<double> &x) {
            return (x[0] - 3.0) * (x[0] - 3.0) + 2.0 * x[1] * x[1];
        },
        [](const std::vector<double> &x) {
            return std::vector<double>{2.0 * (x[0] - 3.0), 4.0 * x[1]};
        },
        {0.0, 1.0});
    CHECK(r.x[0] == Approx(3.0).margin(1e-9));
    CHECK(r.x[1] == Approx(0.0).margin(1e-9));
}

TEST_CASE("cubic interpolation", "[optim]") {
    // f = (a - 2)^2 sampled at 0 and 3 has its minimum at 2.
    const double m = detail::cubic_min(0.0, 4.0, -4.0, 3.0, 1.0, 2.0);
    CHECK(m == Approx(2.0));
    CHECK(to_string(Termination::LineSearchFailure) == "line-search-failure");
}
