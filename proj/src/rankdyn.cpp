#include "crimereg/rankdyn.hpp"

#include "crimereg/csv.hpp"
#include "crimereg/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace crimereg {

RankMatrix weekly_ranks(const Eigen::Ref<const Eigen::MatrixXd>& counts) {
    const Eigen::Index weeks = counts.rows(), regions = counts.cols();
    if (regions < 2 || weeks < 2) throw Error("rankdyn", "ranking needs at least 2 regions and 2 weeks");
    RankMatrix ranks(weeks, regions);
    std::vector<int> order(static_cast<std::size_t>(regions));
    for (Eigen::Index t = 0; t < weeks; ++t) {
        std::iota(order.begin(), order.end(), 0);
        // Missing weeks rank as zero.
        auto value = [&](int i) {
            const double v = counts(t, i);
            return std::isnan(v) ? 0.0 : v;
        };
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return value(a) > value(b); });
        for (Eigen::Index i = 0; i < regions; ++i) ranks(t, i) = order[static_cast<std::size_t>(i)];
    }
    return ranks;
}

RankMatrix weekly_ranks(const RegionSeriesSet& set) { return weekly_ranks(set.counts); }

EntropyProfile position_entropy(const RankMatrix& ranks) {
    const Eigen::Index weeks = ranks.rows(), regions = ranks.cols();
    if (weeks < 2) throw Error("rankdyn", "entropy needs at least 2 weeks");
    if (regions < 2) throw Error("rankdyn", "entropy needs at least 2 regions");
    EntropyProfile out;
    out.h.resize(regions);
    const double log_r = std::log(static_cast<double>(regions));
    Eigen::VectorXi occupancy(regions);
    for (Eigen::Index pos = 0; pos < regions; ++pos) {
        occupancy.setZero();
        for (Eigen::Index t = 0; t < weeks; ++t) ++occupancy(ranks(t, pos));
        double h = 0.0;
        for (Eigen::Index j = 0; j < regions; ++j) {
            if (occupancy(j) == 0) continue;
            const double p = static_cast<double>(occupancy(j)) / static_cast<double>(weeks);
            h -= p * std::log(p);
        }
        out.h(pos) = std::clamp(h / log_r, 0.0, 1.0);
    }
    out.mean_h = out.h.mean();
    return out;
}

Eigen::VectorXd midranks(const Eigen::Ref<const Eigen::VectorXd>& values) {
    const auto n = values.size();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values(a) < values(b); });
    Eigen::VectorXd ranks(n);
    for (Eigen::Index i = 0; i < n;) {
        Eigen::Index j = i;
        while (j < n && values(order[static_cast<std::size_t>(j)]) == values(order[static_cast<std::size_t>(i)])) ++j;
        const double mid = 0.5 * static_cast<double>(i + 1 + j);
        for (Eigen::Index k = i; k < j; ++k) ranks(order[static_cast<std::size_t>(k)]) = mid;
        i = j;
    }
    return ranks;
}

double spearman(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y) {
    if (x.size() != y.size() || x.size() < 2) throw Error("rankdyn", "spearman needs two equal-length samples");
    const Eigen::VectorXd rx = midranks(x), ry = midranks(y);
    const Eigen::VectorXd dx = rx.array() - rx.mean();
    const Eigen::VectorXd dy = ry.array() - ry.mean();
    const double sxx = dx.squaredNorm(), syy = dy.squaredNorm();
    if (sxx <= 0.0 || syy <= 0.0) return 0.0;
    return dx.dot(dy) / std::sqrt(sxx * syy);
}

EntropyShape entropy_vs_rank_shape(const EntropyProfile& profile) {
    const auto r = profile.h.size();
    if (r < 10) throw Error("rankdyn", "entropy shape needs at least 10 rank positions");
    const Eigen::Index k = std::max<Eigen::Index>(2, r / 10);
    EntropyShape out;
    const Eigen::VectorXd positions = Eigen::VectorXd::LinSpaced(k, 1.0, static_cast<double>(k));
    out.spearman = spearman(profile.h.head(k), positions);
    out.top_entropies.assign(profile.h.data(), profile.h.data() + k);
    return out;
}

void write_entropy(const EntropyProfile& profile, std::ostream& out) {
    out << "position,entropy\n";
    for (Eigen::Index i = 0; i < profile.h.size(); ++i) out << i + 1 << ',' << csv::format(profile.h(i)) << '\n';
}

} // namespace crimereg
