#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include "cda/hash.hpp"
#include "cda/order_book.hpp"
#include "cda/session.hpp"

namespace cda {

// Discrete-time sequential engine. One trader is polled per slice and its
// response occupies exactly that slice; learning events (book changes) are
// delivered to every trader at zero simulated cost. Given equal (config,
// seed), two runs produce bitwise identical results.
SessionResult run_sync_session(const SessionConfig& cfg) {
    const auto wall_start = std::chrono::steady_clock::now();
    const SessionPlan plan = build_session_plan(cfg);
    auto traders = build_traders(cfg);
    const int n = static_cast<int>(traders.size());

    SessionResult res;
    res.population = cfg.population;
    res.trader_names = trader_names(cfg.population);
    res.profit.assign(static_cast<std::size_t>(n), 0);
    res.fills.assign(static_cast<std::size_t>(n), 0);
    res.assignments_issued.assign(static_cast<std::size_t>(n), 0);
    res.config_hash = config_hash(cfg);
    res.seed = cfg.seed;
    res.duration = cfg.duration;

    OrderBook book(cfg.bounds);
    const double slice = cfg.slice_length > 0.0 ? cfg.slice_length : 1.0 / (10.0 * n);
    const auto n_slices = static_cast<long long>(std::ceil(cfg.duration / slice - 1e-9));

    std::uint64_t snap_seq = 0;
    LobSnapshot snap = book.snapshot(0.0);

    const auto publish = [&](double t, MarketEvent::Kind kind, std::optional<TradeMark> mark) {
        snap = book.snapshot(t);
        snap.seq = ++snap_seq;
        MarketEvent ev;
        ev.kind = kind;
        ev.snapshot = &snap;
        ev.trade = std::move(mark);
        for (auto& tr : traders) tr->observe(ev);
    };

    const auto apply_trade = [&](const Trade& tr) {
        Trader& buyer = *traders[static_cast<std::size_t>(tr.buyer)];
        Trader& seller = *traders[static_cast<std::size_t>(tr.seller)];
        TradeAudit audit;
        audit.trade = tr;
        audit.buyer_limit = buyer.assignment()->limit;
        audit.seller_limit = seller.assignment()->limit;
        res.audit.push_back(audit);
        res.profit[static_cast<std::size_t>(tr.buyer)] += audit.buyer_limit - tr.price;
        res.profit[static_cast<std::size_t>(tr.seller)] += tr.price - audit.seller_limit;
        ++res.fills[static_cast<std::size_t>(tr.buyer)];
        ++res.fills[static_cast<std::size_t>(tr.seller)];
        buyer.record_fill(tr);
        seller.record_fill(tr);
    };

    std::uint64_t next_assign_id = 1;
    std::size_t next_issue = 0;
    const auto issue_due = [&](double t) {
        while (next_issue < plan.timeline.size() && plan.timeline[next_issue].time <= t) {
            const IssueEvent& ev = plan.timeline[next_issue++];
            const auto [tid, base] =
                plan.round_alloc[static_cast<std::size_t>(ev.round)][static_cast<std::size_t>(ev.slot)];
            Trader& tr = *traders[static_cast<std::size_t>(tid)];
            // An unfilled prior assignment is cancelled: its order leaves the
            // book (a visible event) before the replacement arrives.
            if (book.withdraw(tid)) publish(t, MarketEvent::Kind::lob_update, std::nullopt);
            Assignment a;
            a.side = tr.side();
            a.limit = issued_limit(base, plan.schedule.offset, ev.time, cfg.bounds);
            a.issue_time = ev.time;
            a.id = next_assign_id++;
            tr.assign(a);
            ++res.assignments_issued[static_cast<std::size_t>(tid)];
        }
    };

    std::mt19937_64 poll_rng(splitmix64(seed_combine(cfg.seed, 6000)));
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    int pos = n;  // forces a fresh permutation on the first slice

    for (long long k = 0; k < n_slices; ++k) {
        const double t = static_cast<double>(k) * slice;
        issue_due(t);
        if (pos == n) {
            std::shuffle(order.begin(), order.end(), poll_rng);
            pos = 0;
        }
        Trader& tr = *traders[static_cast<std::size_t>(order[static_cast<std::size_t>(pos++)])];
        if (!tr.assignment()) continue;
        const QuoteContext ctx{t, cfg.duration - t};
        const auto price = tr.quote(snap, ctx);
        if (!price) continue;
        const auto sub = book.submit(tr.id(), tr.side(), *price, t);
        if (sub.status == OrderBook::SubmitStatus::executed) {
            apply_trade(*sub.trade);
            publish(t, MarketEvent::Kind::trade,
                    TradeMark{sub.trade->time, sub.trade->price, sub.trade->initiating_side});
        } else if (sub.book_changed()) {
            publish(t, MarketEvent::Kind::lob_update, std::nullopt);
        }
    }

    for (int i = 0; i < n; ++i) {
        if (traders[static_cast<std::size_t>(i)]->balance() != res.profit[static_cast<std::size_t>(i)])
            throw AccountingFault("trader ledger disagrees with exchange ledger for " +
                                  res.trader_names[static_cast<std::size_t>(i)]);
    }

    res.tape = book.tape();
    res.wall_clock_elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
    return res;
}

}  // namespace cda
