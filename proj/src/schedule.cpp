#include "cda/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "cda/hash.hpp"

namespace cda {

Price OffsetSpec::at(double t) const {
    if (kind == Kind::none || amplitude == 0.0 || period == 0.0) return 0;
    const double w = 2.0 * std::numbers::pi * t / period + phase;
    return static_cast<Price>(std::lround(amplitude * std::sin(w)));
}

std::optional<Equilibrium> equilibrium(const SupplyDemandSchedule& s, double t) {
    if (s.demand.empty() || s.supply.empty()) return std::nullopt;
    const Price off = s.offset.at(t);
    std::vector<Price> d = s.demand;
    std::vector<Price> u = s.supply;
    std::sort(d.begin(), d.end(), std::greater<>());
    std::sort(u.begin(), u.end());
    const int n = static_cast<int>(std::min(d.size(), u.size()));
    int q0 = 0;
    for (int q = 1; q <= n; ++q) {
        if (d[q - 1] + off >= u[q - 1] + off)
            q0 = q;
        else
            break;
    }
    if (q0 == 0) return std::nullopt;
    // Intersection price range is [q0-th supply, q0-th demand]; both are
    // offset-shifted, and the floor midpoint translates exactly with them.
    const Price lo = u[q0 - 1] + off;
    const Price hi = d[q0 - 1] + off;
    Equilibrium e;
    e.q0 = q0;
    e.p0 = static_cast<Price>((static_cast<long long>(lo) + hi) / 2);
    return e;
}

SupplyDemandSchedule generate_symmetric_schedule(const ScheduleGenConfig& cfg,
                                                 std::uint64_t seed) {
    if (cfg.n_buyers < 1 || cfg.n_sellers < 1)
        throw ScheduleError("schedule generation needs at least one trader per side");
    if (cfg.band_hi < cfg.band_lo) throw ScheduleError("price band is inverted");
    const int width = cfg.band_hi - cfg.band_lo;
    const int n_max = std::max(cfg.n_buyers, cfg.n_sellers);
    if (width < n_max - 1 || width < 2 * cfg.jitter)
        throw ScheduleError("price band too narrow for requested rung count");

    std::mt19937_64 rng(splitmix64(seed));
    std::uniform_int_distribution<int> jit(-cfg.jitter, cfg.jitter);

    const auto rungs = [&](int n, bool descending) {
        std::vector<Price> out(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            const double frac = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
            double base = descending ? cfg.band_hi - frac * width : cfg.band_lo + frac * width;
            Price p = static_cast<Price>(std::lround(base)) + jit(rng);
            p = std::clamp(p, cfg.band_lo, cfg.band_hi);
            out[static_cast<std::size_t>(i)] = p;
        }
        return out;
    };

    SupplyDemandSchedule s;
    s.demand = rungs(cfg.n_buyers, true);
    s.supply = rungs(cfg.n_sellers, false);
    s.offset = cfg.offset;
    return s;
}

std::vector<std::pair<TraderId, Price>> allocate_base_limits(const std::vector<Price>& side_limits,
                                                             const std::vector<AllocSlot>& traders,
                                                             AllocationMode mode,
                                                             std::uint64_t seed) {
    if (side_limits.size() != traders.size())
        throw AllocationError("limit count does not match trader count");
    std::vector<std::pair<TraderId, Price>> out;
    out.reserve(traders.size());

    if (mode == AllocationMode::shuffled) {
        std::vector<Price> limits = side_limits;
        std::mt19937_64 rng(splitmix64(seed));
        std::shuffle(limits.begin(), limits.end(), rng);
        for (std::size_t i = 0; i < traders.size(); ++i)
            out.emplace_back(traders[i].trader, limits[i]);
        return out;
    }

    // balanced_group
    if (traders.size() % 2 != 0)
        throw AllocationError("balanced_group needs an even trader count per side");
    Strategy first = traders.front().strategy;
    std::vector<TraderId> group_a, group_b;
    std::optional<Strategy> second;
    for (const AllocSlot& t : traders) {
        if (t.strategy == first) {
            group_a.push_back(t.trader);
        } else {
            if (!second)
                second = t.strategy;
            else if (t.strategy != *second)
                throw AllocationError("balanced_group needs exactly two strategies per side");
            group_b.push_back(t.trader);
        }
    }
    if (group_a.size() != group_b.size())
        throw AllocationError("balanced_group needs a 50:50 strategy split per side");

    std::vector<Price> limits = side_limits;
    std::sort(limits.begin(), limits.end(), std::greater<>());
    for (std::size_t k = 0; k < group_a.size(); ++k) {
        const Price v = limits[2 * k];
        out.emplace_back(group_a[k], v);
        out.emplace_back(group_b[k], v);
    }
    return out;
}

std::vector<IssueEvent> build_issuance_timeline(const ReplenishSpec& spec, double duration,
                                                int n_traders, std::uint64_t seed) {
    if (n_traders < 1) throw ScheduleError("issuance timeline needs at least one trader");
    if (spec.assignments_per_trader < 1)
        throw ScheduleError("assignments_per_trader must be >= 1");
    const int rounds = spec.assignments_per_trader;
    std::vector<IssueEvent> out;
    out.reserve(static_cast<std::size_t>(rounds) * static_cast<std::size_t>(n_traders));

    using Mode = ReplenishSpec::Mode;
    if (spec.mode == Mode::synchronous_all) {
        for (int r = 0; r < rounds; ++r) {
            const double t = duration * r / rounds;
            for (int s = 0; s < n_traders; ++s) out.push_back({t, r, s});
        }
        return out;
    }

    const double mean = duration / (static_cast<double>(rounds) * n_traders);
    if (spec.mode == Mode::drip_regular) {
        const double step = spec.interval > 0.0 ? spec.interval : mean;
        int k = 0;
        for (int r = 0; r < rounds; ++r)
            for (int s = 0; s < n_traders; ++s) out.push_back({step * k++, r, s});
        return out;
    }

    // drip_stochastic: exponential inter-arrival times; the tail may spill
    // past `duration`, in which case those issuances simply never happen.
    std::mt19937_64 rng(splitmix64(seed));
    std::exponential_distribution<double> exp(1.0 / mean);
    double t = 0.0;
    for (int r = 0; r < rounds; ++r) {
        for (int s = 0; s < n_traders; ++s) {
            out.push_back({t, r, s});
            t += exp(rng);
        }
    }
    return out;
}

std::string schedule_dump(const SupplyDemandSchedule& s, std::uint64_t seed) {
    std::ostringstream out;
    out << "side,base_limit\n";
    for (Price p : s.demand) out << "bid," << p << '\n';
    for (Price p : s.supply) out << "ask," << p << '\n';
    const char* kind = s.offset.kind == OffsetSpec::Kind::none ? "none" : "sinusoid";
    out << "# config: {\"offset\":{\"kind\":\"" << kind << "\",\"amplitude\":" << s.offset.amplitude
        << ",\"period\":" << s.offset.period << ",\"phase\":" << s.offset.phase
        << "},\"seed\":" << seed << "}\n";
    return out.str();
}

}  // namespace cda
