#include "cda/session.hpp"

#include <algorithm>
#include <cstdio>
#include <random>
#include <sstream>

#include "cda/csv.hpp"
#include "cda/hash.hpp"

namespace cda {

namespace {

int count_side(const std::vector<TraderSpec>& pop, Side s) {
    return static_cast<int>(
        std::count_if(pop.begin(), pop.end(), [s](const TraderSpec& t) { return t.side == s; }));
}

}  // namespace

void validate(const SessionConfig& cfg) {
    if (cfg.population.empty()) throw ConfigError("population is empty");
    if (count_side(cfg.population, Side::bid) < 1 || count_side(cfg.population, Side::ask) < 1)
        throw ConfigError("population needs at least one buyer and one seller");
    if (cfg.duration <= 0.0) throw ConfigError("duration must be positive");
    if (cfg.slice_length < 0.0) throw ConfigError("slice_length must be >= 0");
    if (cfg.wall_clock_duration <= 0.0) throw ConfigError("wall_clock_duration must be positive");
    if (cfg.bounds.min < 1 || cfg.bounds.max <= cfg.bounds.min)
        throw ConfigError("price bounds are inverted or degenerate");
    if (cfg.band_lo < cfg.bounds.min || cfg.band_hi > cfg.bounds.max)
        throw ConfigError("limit band must sit inside the price bounds");
    if (cfg.jitter < 0) throw ConfigError("jitter must be >= 0");
    if (cfg.replenish.assignments_per_trader < 1)
        throw ConfigError("assignments_per_trader must be >= 1");
    if (cfg.allocation == AllocationMode::balanced_group &&
        cfg.replenish.mode != ReplenishSpec::Mode::synchronous_all)
        throw ConfigError("balanced_group allocation requires synchronous_all replenishment");
    for (const TraderSpec& t : cfg.population)
        if (t.injected_delay_s < 0.0) throw ConfigError("injected delay must be >= 0");
    cfg.params.validate();
}

std::uint64_t config_hash(const SessionConfig& cfg) {
    std::ostringstream s;
    char buf[64];
    const auto num = [&buf](double v) {
        std::snprintf(buf, sizeof buf, "%.10g", v);
        return std::string(buf);
    };
    s << "band " << cfg.band_lo << ' ' << cfg.band_hi << '\n'
      << "jitter " << cfg.jitter << '\n'
      << "offset " << static_cast<int>(cfg.offset.kind) << ' ' << num(cfg.offset.amplitude) << ' '
      << num(cfg.offset.period) << ' ' << num(cfg.offset.phase) << '\n'
      << "allocation " << static_cast<int>(cfg.allocation) << '\n'
      << "replenish " << static_cast<int>(cfg.replenish.mode) << ' '
      << cfg.replenish.assignments_per_trader << ' ' << num(cfg.replenish.interval) << '\n'
      << "bounds " << cfg.bounds.min << ' ' << cfg.bounds.max << '\n'
      << "duration " << num(cfg.duration) << '\n'
      << "slice " << num(cfg.slice_length) << '\n'
      << "wall " << num(cfg.wall_clock_duration) << '\n';
    for (const TraderSpec& t : cfg.population)
        s << "trader " << to_cstr(t.strategy) << ' ' << to_cstr(t.side) << ' ' << t.group << ' '
          << num(t.injected_delay_s) << '\n';
    s << cfg.params.serialize();
    const std::string body = s.str();
    return fnv1a64(body.data(), body.size());
}

std::vector<std::string> trader_names(const std::vector<TraderSpec>& population) {
    std::vector<std::string> names;
    names.reserve(population.size());
    int buyers = 0, sellers = 0;
    char buf[16];
    for (const TraderSpec& t : population) {
        const int n = t.side == Side::bid ? buyers++ : sellers++;
        std::snprintf(buf, sizeof buf, "%c%02d", t.side == Side::bid ? 'B' : 'S', n);
        names.emplace_back(buf);
    }
    return names;
}

long long SessionResult::group_profit(int group) const {
    long long total = 0;
    for (std::size_t i = 0; i < population.size(); ++i)
        if (population[i].group == group) total += profit[i];
    return total;
}

int SessionResult::group_size(int group) const {
    return static_cast<int>(std::count_if(population.begin(), population.end(),
                                          [group](const TraderSpec& t) { return t.group == group; }));
}

double SessionResult::appt(int group) const {
    const int n = group_size(group);
    return n == 0 ? 0.0 : static_cast<double>(group_profit(group)) / n;
}

SessionPlan build_session_plan(const SessionConfig& cfg) {
    validate(cfg);
    SessionPlan plan;

    ScheduleGenConfig gc;
    gc.n_buyers = count_side(cfg.population, Side::bid);
    gc.n_sellers = count_side(cfg.population, Side::ask);
    gc.band_lo = cfg.band_lo;
    gc.band_hi = cfg.band_hi;
    gc.jitter = cfg.jitter;
    gc.offset = cfg.offset;
    plan.schedule = generate_symmetric_schedule(gc, seed_combine(cfg.seed, 3000));

    const int n = static_cast<int>(cfg.population.size());
    plan.rounds = cfg.replenish.assignments_per_trader;
    plan.timeline = build_issuance_timeline(cfg.replenish, cfg.duration, n, seed_combine(cfg.seed, 5000));
    std::stable_sort(plan.timeline.begin(), plan.timeline.end(),
                     [](const IssueEvent& a, const IssueEvent& b) { return a.time < b.time; });

    std::vector<AllocSlot> buy_slots, sell_slots;
    for (int i = 0; i < n; ++i) {
        const TraderSpec& t = cfg.population[static_cast<std::size_t>(i)];
        (t.side == Side::bid ? buy_slots : sell_slots).push_back({i, t.strategy});
    }

    plan.round_alloc.reserve(static_cast<std::size_t>(plan.rounds));
    for (int r = 0; r < plan.rounds; ++r) {
        auto merged = allocate_base_limits(plan.schedule.demand, buy_slots, cfg.allocation,
                                           seed_combine(cfg.seed, 2000 + r));
        auto asks = allocate_base_limits(plan.schedule.supply, sell_slots, cfg.allocation,
                                         seed_combine(cfg.seed, 2500 + r));
        merged.insert(merged.end(), asks.begin(), asks.end());
        std::mt19937_64 rng(splitmix64(seed_combine(cfg.seed, 4000 + r)));
        std::shuffle(merged.begin(), merged.end(), rng);
        plan.round_alloc.push_back(std::move(merged));
    }
    return plan;
}

std::vector<std::unique_ptr<Trader>> build_traders(const SessionConfig& cfg) {
    std::vector<std::unique_ptr<Trader>> out;
    out.reserve(cfg.population.size());
    for (std::size_t i = 0; i < cfg.population.size(); ++i) {
        const TraderSpec& t = cfg.population[i];
        out.push_back(make_trader(t.strategy, static_cast<TraderId>(i), t.side, cfg.bounds,
                                  cfg.params, seed_combine(cfg.seed, 1000 + i), cfg.duration));
    }
    return out;
}

Price issued_limit(Price base, const OffsetSpec& offset, double t, PriceBounds bounds) {
    return std::clamp(base + offset.at(t), bounds.min, bounds.max);
}

std::string profits_csv(const SessionResult& r) {
    std::ostringstream out;
    out << "trader_id,strategy,side,group,profit,fills\n";
    for (std::size_t i = 0; i < r.population.size(); ++i) {
        const TraderSpec& t = r.population[i];
        out << r.trader_names[i] << ',' << to_cstr(t.strategy) << ',' << to_cstr(t.side) << ','
            << t.group << ',' << r.profit[i] << ',' << r.fills[i] << '\n';
    }
    return out.str();
}

std::string latency_csv(const SessionResult& r) {
    std::ostringstream out;
    out << "trader_id,strategy,snapshot_time,order_arrival_time\n";
    for (const LatencyRow& row : r.latency) {
        const std::size_t i = static_cast<std::size_t>(row.trader);
        out << r.trader_names[i] << ',' << to_cstr(r.population[i].strategy) << ','
            << format_time(row.event_time) << ',' << format_time(row.submit_time) << '\n';
    }
    return out.str();
}

std::string submissions_csv(const SessionResult& r) {
    std::ostringstream out;
    out << "trader_id,reacted_seq,arrival_seq,improved_best\n";
    for (const SubmissionRow& row : r.submissions)
        out << r.trader_names[static_cast<std::size_t>(row.trader)] << ',' << row.reacted_seq
            << ',' << row.arrival_seq << ',' << (row.improved_best ? 1 : 0) << '\n';
    return out.str();
}

}  // namespace cda
