#include "crimereg/independence.hpp"

#include "crimereg/csv.hpp"
#include "crimereg/error.hpp"
#include "crimereg/parallel.hpp"
#include "crimereg/rankdyn.hpp"
#include "crimereg/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace crimereg {

namespace {

double below(double a, double b) { return a < b ? 1.0 : (a == b ? 0.5 : 0.0); }

bool constant(const Eigen::Ref<const Eigen::VectorXd>& v) { return (v.array() == v(0)).all(); }

} // namespace

double hoeffding_d(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y) {
    const Eigen::Index n = x.size();
    if (y.size() != n) throw Error("independence", "x and y differ in length");
    if (n < 5) throw Error("independence", "Hoeffding's D needs n >= 5");
    const Eigen::VectorXd r = midranks(x), s = midranks(y);
    double d1 = 0.0, d2 = 0.0, d3 = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        double q = 1.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j != i) q += below(x(j), x(i)) * below(y(j), y(i));
        }
        d1 += (q - 1.0) * (q - 2.0);
        d2 += (r(i) - 1.0) * (r(i) - 2.0) * (s(i) - 1.0) * (s(i) - 2.0);
        d3 += (r(i) - 2.0) * (s(i) - 2.0) * (q - 1.0);
    }
    const double nd = static_cast<double>(n);
    return 30.0 * ((nd - 2.0) * (nd - 3.0) * d1 + d2 - 2.0 * (nd - 2.0) * d3) /
           (nd * (nd - 1.0) * (nd - 2.0) * (nd - 3.0) * (nd - 4.0));
}

double hoeffding_d(const PairedSample& s) { return hoeffding_d(s.x, s.y); }

HoeffdingTest hoeffding_test(const PairedSample& s, int n_perm, std::uint64_t seed, double significance,
                             int workers) {
    if (n_perm < 999) throw Error("independence", "permutation test needs n_perm >= 999");
    HoeffdingTest out;
    out.n = s.size();
    out.n_perm = n_perm;
    out.d = hoeffding_d(s);
    if (constant(s.x) || constant(s.y)) {
        out.p_value = 1.0;
        return out;
    }
    const double tol = 1e-12 * std::max(1.0, std::abs(out.d));
    std::vector<char> at_least(static_cast<std::size_t>(n_perm), 0);
    parallel_for(at_least.size(), workers, [&](std::size_t k) {
        Rng rng(seed + k);
        std::vector<double> yp(s.y.data(), s.y.data() + s.y.size());
        rng.shuffle(std::span<double>(yp));
        const Eigen::Map<const Eigen::VectorXd> ym(yp.data(), static_cast<Eigen::Index>(yp.size()));
        at_least[k] = hoeffding_d(s.x, ym) >= out.d - tol ? 1 : 0;
    });
    const auto hits = std::count(at_least.begin(), at_least.end(), 1);
    out.p_value = static_cast<double>(1 + hits) / static_cast<double>(1 + n_perm);
    out.reject = out.p_value <= significance;
    return out;
}

PairedSample read_paired_sample(const std::filesystem::path& path) {
    const auto table = csv::read(path);
    const std::string src = path.string();
    const auto c_label = table.column("label");
    const std::size_t c_x = table.require("x", src), c_y = table.require("y", src);
    PairedSample s;
    const auto n = static_cast<Eigen::Index>(table.rows.size());
    s.x.resize(n);
    s.y.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& row = table.rows[static_cast<std::size_t>(i)];
        auto num = [&](std::size_t c) {
            auto v = c < row.fields.size() ? csv::to_double(row.fields[c]) : std::nullopt;
            if (!v) throw Error("independence", src + " line " + std::to_string(row.line) + ": bad number");
            return *v;
        };
        s.x(i) = num(c_x);
        s.y(i) = num(c_y);
        s.labels.push_back(c_label && *c_label < row.fields.size() ? row.fields[*c_label] : std::to_string(i));
    }
    return s;
}

} // namespace crimereg
