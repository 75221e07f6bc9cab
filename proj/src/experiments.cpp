#include "cda/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <mutex>
#include <sstream>
#include <thread>

#include "cda/csv.hpp"
#include "cda/hash.hpp"

namespace cda {

std::vector<Ratio> all_ratios(int n_per_side) {
    if (n_per_side < 2) throw ExperimentError("ratios need at least two traders per side");
    std::vector<Ratio> out;
    out.reserve(static_cast<std::size_t>(n_per_side) - 1);
    for (int k = 1; k < n_per_side; ++k) out.push_back({k, n_per_side - k});
    return out;
}

std::uint64_t derive_session_seed(std::uint64_t base_seed, Strategy a, Strategy b, bool use_async,
                                  bool dynamic_p0, const Ratio& r, int session_index) {
    const bool swapped = static_cast<int>(b) < static_cast<int>(a);
    const Strategy lo = swapped ? b : a;
    const Strategy hi = swapped ? a : b;
    const int count_lo = swapped ? r.count_b : r.count_a;
    char buf[96];
    std::snprintf(buf, sizeof buf, "%d|%d|%d|%d|%d|%d", static_cast<int>(lo),
                  static_cast<int>(hi), use_async ? 1 : 0, dynamic_p0 ? 1 : 0, count_lo,
                  session_index);
    return seed_combine(base_seed, fnv1a64(buf, std::strlen(buf)));
}

std::vector<TraderSpec> contest_population(Strategy a, Strategy b, const Ratio& r,
                                           int n_per_side) {
    if (r.count_a < 1 || r.count_b < 1 || r.count_a + r.count_b != n_per_side)
        throw ExperimentError("ratio must split n_per_side with both strategies present");
    const bool swapped = static_cast<int>(b) < static_cast<int>(a);
    const Strategy lo = swapped ? b : a;
    const Strategy hi = swapped ? a : b;
    const int count_lo = swapped ? r.count_b : r.count_a;
    const int count_hi = n_per_side - count_lo;
    const int group_lo = swapped ? 1 : 0;
    const int group_hi = swapped ? 0 : 1;

    std::vector<TraderSpec> pop;
    pop.reserve(static_cast<std::size_t>(2 * n_per_side));
    for (const Side side : {Side::bid, Side::ask}) {
        for (int i = 0; i < count_lo; ++i) pop.push_back({lo, side, group_lo, 0.0});
        for (int i = 0; i < count_hi; ++i) pop.push_back({hi, side, group_hi, 0.0});
    }
    return pop;
}

OffsetSpec dynamic_offset(const SessionConfig& session) {
    OffsetSpec o;
    o.kind = OffsetSpec::Kind::sinusoid;
    o.amplitude = 0.2 * (static_cast<double>(session.band_lo) + session.band_hi) / 2.0;
    o.period = session.duration / 3.0;
    o.phase = 0.0;
    return o;
}

Winner session_winner(long long total_a, int count_a, long long total_b, int count_b) {
    // APPT comparison without division: total_a/count_a vs total_b/count_b.
    const long long lhs = total_a * count_b;
    const long long rhs = total_b * count_a;
    if (lhs > rhs) return Winner::a;
    if (rhs > lhs) return Winner::b;
    return Winner::draw;
}

namespace {

SessionRecord run_one(const ContestSpec& s, const Ratio& r, int idx, const SessionHook& hook,
                      std::mutex* hook_mu) {
    SessionConfig cfg = s.session;
    cfg.population = contest_population(s.strategy_a, s.strategy_b, r, s.n_per_side);
    cfg.offset = s.dynamic_p0 ? dynamic_offset(cfg) : OffsetSpec{};
    cfg.seed = derive_session_seed(s.base_seed, s.strategy_a, s.strategy_b, s.use_async,
                                   s.dynamic_p0, r, idx);
    const SessionResult res = s.use_async ? run_async_session(cfg) : run_sync_session(cfg);
    const long long total_a = res.group_profit(0);
    const long long total_b = res.group_profit(1);
    const int count_a = res.group_size(0);
    const int count_b = res.group_size(1);
    SessionRecord rec;
    rec.ratio = r;
    rec.session_index = idx;
    rec.seed = cfg.seed;
    rec.appt_a = count_a ? static_cast<double>(total_a) / count_a : 0.0;
    rec.appt_b = count_b ? static_cast<double>(total_b) / count_b : 0.0;
    rec.winner = session_winner(total_a, count_a, total_b, count_b);
    if (hook) {
        if (hook_mu) {
            const std::lock_guard<std::mutex> lk(*hook_mu);
            hook(rec, res);
        } else {
            hook(rec, res);
        }
    }
    return rec;
}

}  // namespace

ContestResult run_contest(const ContestSpec& spec, const SessionHook& on_session) {
    ContestSpec s = spec;
    if (s.ratios.empty()) s.ratios = all_ratios(s.n_per_side);
    if (s.sessions_per_ratio < 1) throw ExperimentError("sessions_per_ratio must be >= 1");

    ContestResult res;
    res.spec = s;
    res.params_hash = s.session.params.hash();
    const std::size_t total =
        s.ratios.size() * static_cast<std::size_t>(s.sessions_per_ratio);
    res.records.resize(total);

    const auto slot = [&](std::size_t ri, int idx) {
        return ri * static_cast<std::size_t>(s.sessions_per_ratio) + static_cast<std::size_t>(idx);
    };

    // Async sessions own the machine's timing; running them side by side
    // would distort it, so only sync contests fan out.
    const int workers = s.use_async ? 1 : std::max(1, s.workers);
    if (workers == 1) {
        for (std::size_t ri = 0; ri < s.ratios.size(); ++ri)
            for (int i = 0; i < s.sessions_per_ratio; ++i)
                res.records[slot(ri, i)] = run_one(s, s.ratios[ri], i, on_session, nullptr);
    } else {
        std::atomic<std::size_t> next{0};
        std::mutex hook_mu;
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t j = next.fetch_add(1); j < total; j = next.fetch_add(1)) {
                    const std::size_t ri = j / static_cast<std::size_t>(s.sessions_per_ratio);
                    const int idx = static_cast<int>(j % static_cast<std::size_t>(s.sessions_per_ratio));
                    res.records[j] = run_one(s, s.ratios[ri], idx, on_session, &hook_mu);
                }
            });
        for (std::thread& t : pool) t.join();
    }

    res.per_ratio.reserve(s.ratios.size());
    for (std::size_t ri = 0; ri < s.ratios.size(); ++ri) {
        RatioTally tally;
        tally.ratio = s.ratios[ri];
        for (int i = 0; i < s.sessions_per_ratio; ++i) {
            switch (res.records[slot(ri, i)].winner) {
                case Winner::a: ++tally.wins_a; break;
                case Winner::b: ++tally.wins_b; break;
                case Winner::draw: ++tally.draws; break;
            }
        }
        res.wins_a += tally.wins_a;
        res.wins_b += tally.wins_b;
        res.draws += tally.draws;
        res.per_ratio.push_back(tally);
    }
    return res;
}

PairTotals contest_totals(const ContestResult& r) {
    PairTotals t;
    t.a = r.spec.strategy_a;
    t.b = r.spec.strategy_b;
    t.engine = r.spec.use_async ? "async" : "sync";
    t.treatment = r.spec.dynamic_p0 ? "dynamic" : "static";
    t.wins_a = r.wins_a;
    t.wins_b = r.wins_b;
    t.draws = r.draws;
    return t;
}

DominanceGraph build_dominance_graph(const std::vector<PairTotals>& totals) {
    DominanceGraph g;
    std::map<std::pair<int, int>, PairTotals> by_pair;
    for (const PairTotals& t : totals) {
        if (t.a == t.b) throw ExperimentError("dominance graph rejects self-pairs");
        PairTotals c = t;
        if (static_cast<int>(c.a) > static_cast<int>(c.b)) {
            std::swap(c.a, c.b);
            std::swap(c.wins_a, c.wins_b);
        }
        const auto key = std::make_pair(static_cast<int>(c.a), static_cast<int>(c.b));
        if (by_pair.count(key))
            throw ExperimentError(std::string("duplicate pair ") + to_cstr(c.a) + ":" +
                                  to_cstr(c.b));
        if (!g.engine.empty() && (g.engine != t.engine || g.treatment != t.treatment))
            throw ExperimentError("dominance graph inputs mix engines or treatments");
        g.engine = t.engine;
        g.treatment = t.treatment;
        by_pair.emplace(key, c);
    }

    std::string missing;
    for (std::size_t i = 0; i < std::size(all_strategies); ++i)
        for (std::size_t j = i + 1; j < std::size(all_strategies); ++j)
            if (!by_pair.count({static_cast<int>(all_strategies[i]),
                                static_cast<int>(all_strategies[j])})) {
                if (!missing.empty()) missing += ", ";
                missing += std::string(to_cstr(all_strategies[i])) + ":" +
                           to_cstr(all_strategies[j]);
            }
    if (!missing.empty()) throw ExperimentError("dominance graph missing pairs: " + missing);

    for (const Strategy s : all_strategies) {
        g.indegree[s] = 0;
        g.outdegree[s] = 0;
    }
    for (const auto& [key, t] : by_pair) {
        if (t.wins_a == t.wins_b) {
            g.ties.emplace_back(t.a, t.b);
            continue;
        }
        DominanceGraph::Edge e;
        e.from = t.wins_a > t.wins_b ? t.a : t.b;
        e.to = t.wins_a > t.wins_b ? t.b : t.a;
        e.wins_from = std::max(t.wins_a, t.wins_b);
        e.wins_to = std::min(t.wins_a, t.wins_b);
        ++g.outdegree[e.from];
        ++g.indegree[e.to];
        g.edges.push_back(e);
    }
    return g;
}

std::string dominance_dot(const DominanceGraph& g) {
    std::ostringstream out;
    out << "digraph dominance {\n";
    if (!g.engine.empty())
        out << "  label=\"engine=" << g.engine << " treatment=" << g.treatment << "\";\n"
            << "  labelloc=\"t\";\n";
    for (const Strategy s : all_strategies)
        out << "  " << to_cstr(s) << " [label=\"" << to_cstr(s) << "\\n"
            << g.indegree.at(s) << "/" << g.outdegree.at(s) << "\"];\n";
    for (const DominanceGraph::Edge& e : g.edges)
        out << "  " << to_cstr(e.from) << " -> " << to_cstr(e.to) << " [label=\"" << e.wins_from
            << ":" << e.wins_to << "\"];\n";
    for (const auto& [a, b] : g.ties)
        out << "  // tie, no edge: " << to_cstr(a) << " vs " << to_cstr(b) << "\n";
    out << "}\n";
    return out.str();
}

std::optional<double> alpha_convergence(const std::vector<Trade>& tape,
                                        const std::function<double(double)>& p0_at) {
    if (tape.empty()) return std::nullopt;
    double sum_sq = 0.0;
    for (const Trade& t : tape) {
        const double p0 = p0_at(t.time);
        if (p0 <= 0.0) throw ExperimentError("equilibrium path must stay positive");
        const double rel = (static_cast<double>(t.price) - p0) / p0;
        sum_sq += rel * rel;
    }
    return std::sqrt(sum_sq / static_cast<double>(tape.size())) * 100.0;
}

namespace {

std::string pair_name(Strategy a, Strategy b) {
    return std::string(to_cstr(a)) + ":" + to_cstr(b);
}

const char* winner_name(Winner w) {
    switch (w) {
        case Winner::a: return "A";
        case Winner::b: return "B";
        case Winner::draw: return "draw";
    }
    return "?";
}

std::string hash_comment(std::uint64_t params_hash) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "# params_hash=%016llx\n",
                  static_cast<unsigned long long>(params_hash));
    return buf;
}

}  // namespace

std::string sessions_csv(const ContestResult& r) {
    std::ostringstream out;
    out << hash_comment(r.params_hash)
        << "pair,engine,treatment,ratio_a,ratio_b,session_index,seed,appt_a,appt_b,winner\n";
    const std::string pair = pair_name(r.spec.strategy_a, r.spec.strategy_b);
    const char* engine = r.spec.use_async ? "async" : "sync";
    const char* treatment = r.spec.dynamic_p0 ? "dynamic" : "static";
    char appt[64];
    for (const SessionRecord& rec : r.records) {
        out << pair << ',' << engine << ',' << treatment << ',' << rec.ratio.count_a << ','
            << rec.ratio.count_b << ',' << rec.session_index << ',' << rec.seed << ',';
        std::snprintf(appt, sizeof appt, "%.6f,%.6f", rec.appt_a, rec.appt_b);
        out << appt << ',' << winner_name(rec.winner) << '\n';
    }
    return out.str();
}

std::string totals_csv(const std::vector<PairTotals>& totals, std::uint64_t params_hash) {
    std::ostringstream out;
    out << hash_comment(params_hash) << "algo_a,algo_b,engine,treatment,wins_a,wins_b,draws\n";
    for (const PairTotals& t : totals)
        out << to_cstr(t.a) << ',' << to_cstr(t.b) << ',' << t.engine << ',' << t.treatment << ','
            << t.wins_a << ',' << t.wins_b << ',' << t.draws << '\n';
    return out.str();
}

std::vector<PairTotals> parse_totals_csv(const std::string& body) {
    const auto rows = parse_csv(body, "algo_a,algo_b,engine,treatment,wins_a,wins_b,draws");
    std::vector<PairTotals> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
        if (row.size() != 7) throw ExperimentError("totals row needs 7 fields");
        PairTotals t;
        const auto a = parse_strategy(row[0]);
        const auto b = parse_strategy(row[1]);
        if (!a || !b) throw ExperimentError("unknown strategy in totals row: " + row[0] + "/" + row[1]);
        t.a = *a;
        t.b = *b;
        t.engine = row[2];
        t.treatment = row[3];
        try {
            t.wins_a = std::stoll(row[4]);
            t.wins_b = std::stoll(row[5]);
            t.draws = std::stoll(row[6]);
        } catch (const std::exception&) {
            throw ExperimentError("malformed win count in totals row");
        }
        out.push_back(t);
    }
    return out;
}

}  // namespace cda
