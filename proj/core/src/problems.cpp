#include "belief/problems.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

namespace belief {

namespace {

constexpr double kPi = std::numbers::pi;

// Continuous operator c_xx u_xx + c_yy u_yy + c_xy u_xy + c_x u_x + c_y u_y,
// with the manufactured solution and matching right-hand side g = L(phi).
struct ProblemDef {
    std::function<double(double, double)> cxx, cyy, cxy, cx, cy;
    std::function<double(double, double)> g;
    std::function<double(double, double)> phi;
    double sign = 1.0;  // row scaling making the diagonal positive
};

double get_param(const std::map<std::string, double>& params, const std::string& key,
                 double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

void check_keys(const std::string& name, const std::map<std::string, double>& params,
                std::initializer_list<const char*> allowed) {
    for (const auto& [k, v] : params) {
        bool ok = false;
        for (const char* a : allowed)
            if (k == a) ok = true;
        if (!ok) throw std::invalid_argument("problem '" + name + "': unknown parameter '" + k + "'");
    }
}

ProblemDef make_def(const std::string& name, const std::map<std::string, double>& params) {
    auto zero = [](double, double) { return 0.0; };
    ProblemDef d;
    d.cxy = zero;
    d.cx = zero;
    d.cy = zero;

    if (name == "general") {
        check_keys(name, params, {});
        auto a = [](double x, double y) { return std::exp(-x * (y + 2.0)) + 10.0; };
        auto bb = [](double x, double y) {
            double c = std::cos(2.0 * kPi * (2.0 * x + y / 2.0));
            return std::exp(-2.0 * x + 2.0 * y) * c * c + 3.0;
        };
        auto al = [](double x, double y) {
            return std::cos(kPi * (x + y / 2.0)) * std::cos(2.0 * kPi * x) + 4.0;
        };
        auto be = [](double x, double y) { return std::exp(2.0 * x - 2.0 * y); };
        d.cxx = a;
        d.cyy = bb;
        d.cx = al;
        d.cy = be;
        d.phi = [](double x, double y) { return std::cos(kPi * x) * std::cos(kPi * y); };
        d.g = [=](double x, double y) {
            return -kPi * kPi * (a(x, y) + bb(x, y)) * std::cos(kPi * x) * std::cos(kPi * y) -
                   al(x, y) * kPi * std::sin(kPi * x) * std::cos(kPi * y) -
                   be(x, y) * kPi * std::cos(kPi * x) * std::sin(kPi * y);
        };
        d.sign = -1.0;
    } else if (name == "mixed") {
        check_keys(name, params, {"eps"});
        double eps = get_param(params, "eps", 0.01);
        d.cxx = [](double, double) { return 1.0; };
        d.cyy = [](double, double) { return 1.0; };
        d.cxy = [eps](double, double) { return 2.0 - eps; };
        d.phi = [](double x, double y) { return 2.0 * x * x * x * y * y * y * y; };
        d.g = [eps](double x, double y) {
            return 12.0 * x * y * y * y * y + 24.0 * x * x * x * y * y +
                   (2.0 - eps) * 24.0 * x * x * y * y * y;
        };
        d.sign = -1.0;
    } else if (name == "boundary-layer") {
        check_keys(name, params, {"eps"});
        double eps = get_param(params, "eps", 0.01);
        d.cxx = [eps](double, double) { return -eps; };
        d.cyy = [eps](double, double) { return -eps; };
        d.cx = [](double, double) { return 1.0; };
        d.cy = [](double, double) { return 1.0; };
        d.phi = [eps](double x, double y) {
            return (2.0 * std::exp(-1.0 / eps) - std::exp((x - 1.0) / eps) -
                    std::exp((y - 1.0) / eps)) /
                   (std::exp(-1.0 / eps) - 1.0);
        };
        d.g = zero;
        d.sign = 1.0;
    } else if (name == "inner-layer") {
        check_keys(name, params, {"eps"});
        double eps = get_param(params, "eps", 0.01);
        d.cxx = [eps](double, double) { return eps; };
        d.cyy = [eps](double, double) { return eps; };
        d.cx = [](double x, double) { return x; };
        d.cy = [](double, double y) { return y; };
        d.phi = [eps](double x, double y) {
            double s = x + y - 1.0;
            return std::exp(-s * s / eps);
        };
        d.g = [eps, phi = d.phi](double x, double y) {
            double s = x + y - 1.0;
            return (-4.0 + (6.0 * s * s - 2.0 * s) / eps) * phi(x, y);
        };
        d.sign = -1.0;
    } else if (name == "stretched") {
        check_keys(name, params, {"eps", "p", "eta"});
        double eps = get_param(params, "eps", 1e-6);
        double p = get_param(params, "p", 20.0);
        double eta = get_param(params, "eta", 0.5);
        auto u = [eps, p, eta](double t) {
            return 1.0 + std::pow((t - 0.5) * (t - 0.5) + eta, p) / eps;
        };
        d.cxx = [u](double x, double) { return u(x); };
        d.cyy = [u](double, double y) { return u(y); };
        d.phi = [](double x, double y) {
            return std::cos(2.0 * kPi * (x + y)) * std::sin(2.0 * kPi * (x - y));
        };
        d.g = [u](double x, double y) {
            double uu = 2.0 * kPi * (x + y), vv = 2.0 * kPi * (x - y);
            double cs = std::cos(uu) * std::sin(vv), sc = std::sin(uu) * std::cos(vv);
            double pxx = -8.0 * kPi * kPi * (cs + sc);
            double pyy = -8.0 * kPi * kPi * (cs - sc);
            return u(x) * pxx + u(y) * pyy;
        };
        d.sign = -1.0;
    } else if (name == "anisotropic") {
        check_keys(name, params, {"eps"});
        double eps = get_param(params, "eps", 1e-3);
        d.cxx = [eps](double, double) { return -eps; };
        d.cyy = [](double, double) { return -1.0; };
        d.phi = [](double x, double y) { return std::sin(kPi * x) * std::sin(kPi * y); };
        d.g = [eps, phi = d.phi](double x, double y) {
            return kPi * kPi * (1.0 + eps) * phi(x, y);
        };
        d.sign = 1.0;
    } else if (name == "poisson") {
        check_keys(name, params, {});
        d.cxx = [](double, double) { return -1.0; };
        d.cyy = [](double, double) { return -1.0; };
        d.phi = [](double x, double y) { return std::sin(kPi * x) * std::sin(kPi * y); };
        d.g = [phi = d.phi](double x, double y) { return 2.0 * kPi * kPi * phi(x, y); };
        d.sign = 1.0;
    } else {
        throw std::invalid_argument("unknown problem '" + name + "'");
    }
    return d;
}

}  // namespace

double exact_solution(const std::string& name, const std::map<std::string, double>& params,
                      double x, double y) {
    return make_def(name, params).phi(x, y);
}

AssembledProblem assemble(const std::string& name, int J,
                          const std::map<std::string, double>& params) {
    if (J < 1) throw std::invalid_argument("assemble: J must be >= 1");
    ProblemDef d = make_def(name, params);

    const int m = (1 << J) - 1;  // interior points per axis
    const double h = 1.0 / (1 << J);
    const int n = m * m;

    AssembledProblem out;
    out.grid = {m, m};
    out.h = h;
    out.b.assign(n, 0.0);
    out.exact.assign(n, 0.0);

    std::vector<int> rows, cols;
    std::vector<double> vals;
    rows.reserve(static_cast<size_t>(n) * 9);
    cols.reserve(static_cast<size_t>(n) * 9);
    vals.reserve(static_cast<size_t>(n) * 9);

    const double inv_h2 = 1.0 / (h * h);
    const double inv_2h = 1.0 / (2.0 * h);
    const double inv_4h2 = 1.0 / (4.0 * h * h);

    for (int iy = 0; iy < m; ++iy) {
        for (int ix = 0; ix < m; ++ix) {
            const int row = iy * m + ix;
            const double x = (ix + 1) * h, y = (iy + 1) * h;
            out.exact[row] = d.phi(x, y);

            const double cxx = d.cxx(x, y), cyy = d.cyy(x, y), cxy = d.cxy(x, y);
            const double cx = d.cx(x, y), cy = d.cy(x, y);
            const double s = d.sign;
            double rhs = s * d.g(x, y);

            // coefficient per stencil offset (dx, dy)
            auto add = [&](int dx, int dy, double coeff) {
                if (coeff == 0.0) return;
                int jx = ix + dx, jy = iy + dy;
                if (jx >= 0 && jx < m && jy >= 0 && jy < m) {
                    rows.push_back(row);
                    cols.push_back(jy * m + jx);
                    vals.push_back(coeff);
                } else {
                    // Dirichlet neighbor: fold its known value into the RHS.
                    rhs -= coeff * d.phi((ix + 1 + dx) * h, (iy + 1 + dy) * h);
                }
            };

            add(0, 0, s * (-2.0 * cxx - 2.0 * cyy) * inv_h2);
            add(1, 0, s * (cxx * inv_h2 + cx * inv_2h));
            add(-1, 0, s * (cxx * inv_h2 - cx * inv_2h));
            add(0, 1, s * (cyy * inv_h2 + cy * inv_2h));
            add(0, -1, s * (cyy * inv_h2 - cy * inv_2h));
            add(1, 1, s * cxy * inv_4h2);
            add(-1, -1, s * cxy * inv_4h2);
            add(1, -1, -s * cxy * inv_4h2);
            add(-1, 1, -s * cxy * inv_4h2);

            out.b[row] = rhs;
        }
    }
    out.A = make_csr(n, rows, cols, vals);
    return out;
}

}  // namespace belief
