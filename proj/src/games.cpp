#include "bmc/games.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "bmc/errors.hpp"
#include "bmc/mismatch.hpp"
#include "bmc/parallel.hpp"

namespace bmc {

namespace {

constexpr double kPosInf = std::numeric_limits<double>::infinity();

double grid_coord(int i, int n) { return static_cast<double>(i) / static_cast<double>(n - 1); }

bool excluded(double a, double b, double delta) { return std::fabs(a + b - 1.0) < delta; }

void check_grid(int channel_grid, double delta) {
    if (channel_grid < 128) throw InvalidGrid("channel_grid must be at least 128");
    if (!(delta > 0.0 && delta < 0.5)) throw InvalidGrid("exclusion_delta must lie in (0, 0.5)");
}

std::string grid_tag(int p_grid, int channel_grid, double delta, int refine_levels) {
    std::ostringstream os;
    if (p_grid > 0) os << "p_grid=" << p_grid << ",";
    os << "channel_grid=" << channel_grid << ",delta=" << delta;
    if (refine_levels > 0) os << ",refine=" << refine_levels << "x10";
    return os.str();
}

struct GridMin {
    double value = kPosInf;
    double a = 0.0, b = 0.0;
};

// Local refinement: 21x21 grid of step h/10 centered on the incumbent,
// clamped to the unit square and filtered by the exclusion band.
GridMin refine_once(const InputDistribution& p, const GridMin& incumbent, double h,
                    double delta) {
    GridMin best = incumbent;
    for (int i = -10; i <= 10; ++i) {
        const double a = std::clamp(incumbent.a + i * h / 10.0, 0.0, 1.0);
        for (int j = -10; j <= 10; ++j) {
            const double b = std::clamp(incumbent.b + j * h / 10.0, 0.0, 1.0);
            if (excluded(a, b, delta)) continue;
            const BinaryChannel w(a, b);
            const double ratio = mutual_information(p, w) / capacity(w).bits;
            if (ratio < best.value) best = GridMin{ratio, a, b};
        }
    }
    return best;
}

} // namespace

ChannelSet::ChannelSet(std::vector<BinaryChannel> chans,
                       std::optional<std::vector<std::vector<std::size_t>>> parts)
    : channels(std::move(chans)), partition(std::move(parts)) {
    if (channels.empty()) throw std::invalid_argument("channel set must be nonempty");
    if (partition) {
        std::vector<char> seen(channels.size(), 0);
        for (const auto& comp : *partition) {
            if (comp.empty()) throw std::invalid_argument("partition components must be nonempty");
            for (std::size_t idx : comp) {
                if (idx >= channels.size() || seen[idx]) {
                    throw std::invalid_argument("partition must cover the channel list exactly once");
                }
                seen[idx] = 1;
            }
        }
        for (char c : seen) {
            if (!c) throw std::invalid_argument("partition must cover the channel list exactly once");
        }
    }
}

GameResult alpha_game(int p_grid, int channel_grid, double exclusion_delta, unsigned workers) {
    if (p_grid < 101) throw InvalidGrid("p_grid must be at least 101");
    check_grid(channel_grid, exclusion_delta);
    const unsigned nw = resolve_workers(workers);
    const std::size_t cells = static_cast<std::size_t>(channel_grid) * channel_grid;

    // Capacities do not depend on p0; precompute the coarse grid once.
    std::vector<double> cap(cells, 0.0);
    parallel_for(cells, nw, [&](std::size_t idx) {
        const double a = grid_coord(static_cast<int>(idx) / channel_grid, channel_grid);
        const double b = grid_coord(static_cast<int>(idx) % channel_grid, channel_grid);
        if (excluded(a, b, exclusion_delta)) return;
        cap[idx] = capacity(BinaryChannel(a, b)).bits;
    });

    std::vector<GridMin> per_p0(p_grid);
    parallel_for(static_cast<std::size_t>(p_grid), nw, [&](std::size_t pi) {
        const InputDistribution p(grid_coord(static_cast<int>(pi), p_grid));
        GridMin best;
        for (std::size_t idx = 0; idx < cells; ++idx) {
            const double a = grid_coord(static_cast<int>(idx) / channel_grid, channel_grid);
            const double b = grid_coord(static_cast<int>(idx) % channel_grid, channel_grid);
            if (excluded(a, b, exclusion_delta)) continue;
            const double ratio = mutual_information(p, BinaryChannel(a, b)) / cap[idx];
            if (ratio < best.value) best = GridMin{ratio, a, b};
        }
        double h = 1.0 / static_cast<double>(channel_grid - 1);
        best = refine_once(p, best, h, exclusion_delta);
        best = refine_once(p, best, h / 10.0, exclusion_delta);
        per_p0[pi] = best;
    });

    int best_pi = 0;
    for (int pi = 1; pi < p_grid; ++pi) {
        if (per_p0[pi].value > per_p0[best_pi].value) best_pi = pi;
    }
    const GridMin& w = per_p0[best_pi];
    return GameResult{std::clamp(w.value, 0.0, 1.0), InputDistribution(grid_coord(best_pi, p_grid)),
                      BinaryChannel(w.a, w.b), grid_tag(p_grid, channel_grid, exclusion_delta, 2)};
}

GameResult beta_game(const MetricBank& bank, const InputDistribution& p, int channel_grid,
                     double exclusion_delta, unsigned workers) {
    check_grid(channel_grid, exclusion_delta);
    const unsigned nw = resolve_workers(workers);

    std::vector<GridMin> per_row(channel_grid);
    parallel_for(static_cast<std::size_t>(channel_grid), nw, [&](std::size_t ri) {
        const double a = grid_coord(static_cast<int>(ri), channel_grid);
        GridMin best;
        for (int j = 0; j < channel_grid; ++j) {
            const double b = grid_coord(j, channel_grid);
            if (excluded(a, b, exclusion_delta)) continue;
            const BinaryChannel w0(a, b);
            const double info = mutual_information(p, w0);
            if (info < 1e-15) continue; // degenerate ratio, same reason as the band
            const double ratio = mismatched_information(p, w0, bank).bits / info;
            if (ratio < best.value) best = GridMin{ratio, a, b};
        }
        per_row[ri] = best;
    });

    GridMin best;
    for (const GridMin& r : per_row) {
        if (r.value < best.value) best = r;
    }
    return GameResult{std::clamp(best.value, 0.0, 1.0), p, BinaryChannel(best.a, best.b),
                      grid_tag(0, channel_grid, exclusion_delta, 0)};
}

GameResult compound_capacity(const ChannelSet& s, double p_tolerance) {
    auto inner_min = [&](double p0) {
        double m = kPosInf;
        const InputDistribution p(p0);
        for (const BinaryChannel& w : s.channels) {
            m = std::min(m, mutual_information(p, w));
        }
        return m;
    };
    double lo = 0.0, hi = 1.0;
    while (hi - lo > p_tolerance) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        if (inner_min(m1) < inner_min(m2)) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    const InputDistribution p_star(0.5 * (lo + hi));
    double value = kPosInf;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < s.channels.size(); ++i) {
        const double v = mutual_information(p_star, s.channels[i]);
        if (v < value) {
            value = v;
            arg = i;
        }
    }
    std::ostringstream os;
    os << "p_tol=" << p_tolerance << ",set_size=" << s.channels.size();
    return GameResult{value, p_star, s.channels[arg], os.str()};
}

OneSidedResult one_sided_check(const ChannelSet& s, const InputDistribution& p,
                               std::size_t /*samples*/) {
    std::vector<double> info(s.channels.size());
    std::size_t arg = 0;
    for (std::size_t i = 0; i < s.channels.size(); ++i) {
        info[i] = mutual_information(p, s.channels[i]);
        if (info[i] < info[arg]) arg = i;
    }
    const BinaryChannel& ws = s.channels[arg];
    bool unique = true;
    for (std::size_t i = 0; i < s.channels.size(); ++i) {
        if (i == arg || info[i] > info[arg] + 1e-9) continue;
        if (std::fabs(s.channels[i].a - ws.a) > 1e-9 || std::fabs(s.channels[i].b - ws.b) > 1e-9) {
            unique = false;
        }
    }

    const JointDistribution mu_s = joint(p, ws);
    const JointDistribution mu_s_p = product_marginal(mu_s);
    const double d_s = kl_divergence(mu_s, mu_s_p);
    double worst = kPosInf;
    for (const BinaryChannel& w : s.channels) {
        const JointDistribution mu = joint(p, w);
        const double lhs = kl_divergence(mu, mu_s_p);
        const double rhs = kl_divergence(mu, mu_s);
        double slack;
        if (std::isinf(rhs)) {
            slack = std::isinf(lhs) ? 0.0 : -kPosInf;
        } else {
            slack = lhs - rhs - d_s;
        }
        worst = std::min(worst, slack);
    }
    return OneSidedResult{unique && worst >= -1e-12, worst, arg};
}

MetricBank compound_metric_bank(const ChannelSet& s, const InputDistribution& p_star) {
    if (!s.partition) {
        throw std::invalid_argument("compound_metric_bank requires a partitioned channel set");
    }
    std::vector<Metric> metrics;
    metrics.reserve(s.partition->size());
    for (const auto& comp : *s.partition) {
        std::size_t arg = comp[0];
        double best = mutual_information(p_star, s.channels[arg]);
        for (std::size_t idx : comp) {
            const double v = mutual_information(p_star, s.channels[idx]);
            if (v < best) {
                best = v;
                arg = idx;
            }
        }
        for (std::size_t idx : comp) {
            if (idx == arg) continue;
            if (mutual_information(p_star, s.channels[idx]) > best + 1e-9) continue;
            const BinaryChannel& w = s.channels[idx];
            const BinaryChannel& wm = s.channels[arg];
            if (std::fabs(w.a - wm.a) > 1e-9 || std::fabs(w.b - wm.b) > 1e-9) {
                throw NonUniqueMinimizer("component information minimum attained by two distinct channels");
            }
        }
        metrics.push_back(aposteriori_metric(p_star, s.channels[arg]));
    }
    return MetricBank(std::move(metrics));
}

GameResult uniform_efficiency_floor(int channel_grid, double exclusion_delta, unsigned workers) {
    check_grid(channel_grid, exclusion_delta);
    const unsigned nw = resolve_workers(workers);
    const InputDistribution u = InputDistribution::uniform();

    std::vector<GridMin> per_row(channel_grid);
    parallel_for(static_cast<std::size_t>(channel_grid), nw, [&](std::size_t ri) {
        const double a = grid_coord(static_cast<int>(ri), channel_grid);
        GridMin best;
        for (int j = 0; j < channel_grid; ++j) {
            const double b = grid_coord(j, channel_grid);
            if (excluded(a, b, exclusion_delta)) continue;
            const BinaryChannel w(a, b);
            const double ratio = mutual_information(u, w) / capacity(w).bits;
            if (ratio < best.value) best = GridMin{ratio, a, b};
        }
        per_row[ri] = best;
    });

    GridMin best;
    for (const GridMin& r : per_row) {
        if (r.value < best.value) best = r;
    }
    return GameResult{std::clamp(best.value, 0.0, 1.0), u, BinaryChannel(best.a, best.b),
                      grid_tag(0, channel_grid, exclusion_delta, 0)};
}

std::vector<std::array<double, 3>> efficiency_grid(const InputDistribution& p, int channel_grid,
                                                   double exclusion_delta, unsigned workers) {
    check_grid(channel_grid, exclusion_delta);
    const unsigned nw = resolve_workers(workers);
    std::vector<std::vector<std::array<double, 3>>> rows(channel_grid);
    parallel_for(static_cast<std::size_t>(channel_grid), nw, [&](std::size_t ri) {
        const double a = grid_coord(static_cast<int>(ri), channel_grid);
        auto& out = rows[ri];
        for (int j = 0; j < channel_grid; ++j) {
            const double b = grid_coord(j, channel_grid);
            if (excluded(a, b, exclusion_delta)) continue;
            const BinaryChannel w(a, b);
            out.push_back({a, b, mutual_information(p, w) / capacity(w).bits});
        }
    });
    std::vector<std::array<double, 3>> flat;
    for (auto& r : rows) {
        flat.insert(flat.end(), r.begin(), r.end());
    }
    return flat;
}

std::vector<std::array<double, 3>> mismatch_ratio_grid(const MetricBank& bank,
                                                       const InputDistribution& p,
                                                       int channel_grid, double exclusion_delta,
                                                       unsigned workers) {
    check_grid(channel_grid, exclusion_delta);
    const unsigned nw = resolve_workers(workers);
    std::vector<std::vector<std::array<double, 3>>> rows(channel_grid);
    parallel_for(static_cast<std::size_t>(channel_grid), nw, [&](std::size_t ri) {
        const double a = grid_coord(static_cast<int>(ri), channel_grid);
        auto& out = rows[ri];
        for (int j = 0; j < channel_grid; ++j) {
            const double b = grid_coord(j, channel_grid);
            if (excluded(a, b, exclusion_delta)) continue;
            const BinaryChannel w0(a, b);
            const double info = mutual_information(p, w0);
            if (info < 1e-15) continue;
            out.push_back({a, b, mismatched_information(p, w0, bank).bits / info});
        }
    });
    std::vector<std::array<double, 3>> flat;
    for (auto& r : rows) {
        flat.insert(flat.end(), r.begin(), r.end());
    }
    return flat;
}

} // namespace bmc
