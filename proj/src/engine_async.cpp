#include <chrono>
#include <condition_variable>
#include <deque>
#include <memory>
#include <mutex>
#include <thread>
#include <vector>

#include "cda/order_book.hpp"
#include "cda/session.hpp"

namespace cda {
namespace {

using Clock = std::chrono::steady_clock;

struct Submission {
    TraderId trader = -1;
    Side side = Side::bid;
    Price price = 0;
    std::uint64_t version = 0;      // assignment version the quote was computed under
    std::uint64_t reacted_seq = 0;  // snapshot the trader reacted to
};

struct SubmissionQueue {
    std::mutex m;
    std::condition_variable cv;
    std::deque<Submission> q;

    void push(Submission s) {
        {
            const std::lock_guard<std::mutex> lk(m);
            q.push_back(s);
        }
        cv.notify_one();
    }
};

// Single-producer (exchange) single-consumer (trader) channel. The snapshot
// and the assignment coalesce to the newest value; fills are queued and never
// dropped.
struct Mailbox {
    std::mutex m;
    std::condition_variable cv;
    std::shared_ptr<const LobSnapshot> snap;
    std::optional<Assignment> assignment;
    std::uint64_t assign_version = 0;
    std::vector<Trade> fills;
    bool stop = false;
};

struct TraderThreadCtx {
    Trader* trader = nullptr;
    Mailbox* mb = nullptr;
    SubmissionQueue* queue = nullptr;
    double injected_delay_s = 0.0;
    double duration = 0.0;  // simulated-time scale for QuoteContext
};

void trader_loop(TraderThreadCtx ctx) {
    Trader& tr = *ctx.trader;
    Mailbox& mb = *ctx.mb;
    std::shared_ptr<const LobSnapshot> cur;
    std::uint64_t seen_trades = 0;
    std::uint64_t my_version = 0;

    while (true) {
        std::shared_ptr<const LobSnapshot> ns;
        std::optional<Assignment> na;
        std::uint64_t na_version = 0;
        std::vector<Trade> fills;
        {
            std::unique_lock<std::mutex> lk(mb.m);
            mb.cv.wait(lk, [&] {
                return mb.stop || mb.snap || mb.assignment || !mb.fills.empty();
            });
            if (mb.stop) break;  // unprocessed fills are drained by the engine after join
            ns = std::move(mb.snap);
            mb.snap = nullptr;
            if (mb.assignment) {
                na = *mb.assignment;
                na_version = mb.assign_version;
                mb.assignment.reset();
            }
            fills.swap(mb.fills);
        }
        // Causal order: a fill always precedes the assignment that replaces it.
        for (const Trade& f : fills) tr.record_fill(f);
        if (na) {
            tr.assign(*na);
            my_version = na_version;
        }
        if (ns) {
            cur = std::move(ns);
            MarketEvent ev;
            ev.snapshot = cur.get();
            if (cur->trade_count > seen_trades && cur->last_trade) {
                ev.kind = MarketEvent::Kind::trade;
                ev.trade = *cur->last_trade;
            }
            seen_trades = cur->trade_count;
            tr.observe(ev);
        }
        if (tr.assignment() && cur) {
            const QuoteContext qc{cur->time, ctx.duration - cur->time};
            const auto price = tr.quote(*cur, qc);
            if (price) {
                if (ctx.injected_delay_s > 0.0)
                    std::this_thread::sleep_for(std::chrono::duration<double>(ctx.injected_delay_s));
                ctx.queue->push({tr.id(), tr.side(), *price, my_version, cur->seq});
            }
        }
    }
}

}  // namespace

SessionResult run_async_session(const SessionConfig& cfg) {
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
    SubmissionQueue queue;
    std::vector<Mailbox> mailboxes(static_cast<std::size_t>(n));

    // Exchange-side authoritative assignment state. Versions increment on
    // every replace or consume; a submission carrying an older version is
    // dropped before it can touch the book.
    std::vector<std::optional<Assignment>> live(static_cast<std::size_t>(n));
    std::vector<std::uint64_t> version(static_cast<std::size_t>(n), 0);

    const Clock::time_point start = Clock::now();
    const Clock::time_point deadline =
        start + std::chrono::duration_cast<Clock::duration>(
                    std::chrono::duration<double>(cfg.wall_clock_duration));
    const double time_scale = cfg.duration / cfg.wall_clock_duration;  // sim seconds per wall second
    const auto elapsed = [&start] {
        return std::chrono::duration<double>(Clock::now() - start).count();
    };

    std::uint64_t snap_seq = 0;
    std::vector<double> publish_wall;      // index = seq - 1
    std::vector<TraderId> publish_causer;  // index = seq - 1

    const auto publish = [&](TraderId causer) {
        const double wall = elapsed();
        auto s = std::make_shared<LobSnapshot>(book.snapshot(wall * time_scale));
        s->seq = ++snap_seq;
        publish_wall.push_back(wall);
        publish_causer.push_back(causer);
        const std::shared_ptr<const LobSnapshot> cs = std::move(s);
        for (Mailbox& mb : mailboxes) {
            {
                const std::lock_guard<std::mutex> lk(mb.m);
                mb.snap = cs;
            }
            mb.cv.notify_one();
        }
    };

    std::uint64_t next_assign_id = 1;
    std::size_t next_issue = 0;
    const auto wall_of = [&](double sim_t) { return sim_t / time_scale; };

    const auto issue_due = [&](double now_wall) {
        while (next_issue < plan.timeline.size() &&
               wall_of(plan.timeline[next_issue].time) <= now_wall) {
            const IssueEvent& ev = plan.timeline[next_issue++];
            const auto [tid, base] = plan.round_alloc[static_cast<std::size_t>(
                ev.round)][static_cast<std::size_t>(ev.slot)];
            const std::size_t ti = static_cast<std::size_t>(tid);
            if (book.withdraw(tid)) publish(tid);
            Assignment a;
            a.side = cfg.population[ti].side;
            a.limit = issued_limit(base, plan.schedule.offset, ev.time, cfg.bounds);
            a.issue_time = ev.time;
            a.id = next_assign_id++;
            live[ti] = a;
            ++version[ti];
            ++res.assignments_issued[ti];
            Mailbox& mb = mailboxes[ti];
            {
                const std::lock_guard<std::mutex> lk(mb.m);
                mb.assignment = a;
                mb.assign_version = version[ti];
            }
            mb.cv.notify_one();
        }
    };

    const auto process = [&](const Submission& s, std::uint64_t arrival_seq) {
        const std::size_t ti = static_cast<std::size_t>(s.trader);
        const double now_wall = elapsed();
        if (cfg.collect_latency && s.reacted_seq >= 1 && s.reacted_seq <= publish_wall.size())
            res.latency.push_back({s.trader, s.reacted_seq, publish_wall[s.reacted_seq - 1],
                                   now_wall, publish_causer[s.reacted_seq - 1]});
        if (cfg.collect_submissions) {
            const auto touch = book.best(s.side);
            const bool improves =
                s.side == Side::bid ? (!touch || s.price > *touch) : (!touch || s.price < *touch);
            res.submissions.push_back({s.trader, s.reacted_seq, arrival_seq, improves});
        }
        if (s.version != version[ti] || !live[ti]) return;  // stale: assignment replaced or gone

        const auto sub = book.submit(s.trader, s.side, s.price, now_wall * time_scale);
        if (sub.status == OrderBook::SubmitStatus::executed) {
            const Trade& tr = *sub.trade;
            const std::size_t bi = static_cast<std::size_t>(tr.buyer);
            const std::size_t si = static_cast<std::size_t>(tr.seller);
            TradeAudit audit;
            audit.trade = tr;
            audit.buyer_limit = live[bi]->limit;
            audit.seller_limit = live[si]->limit;
            res.audit.push_back(audit);
            res.profit[bi] += audit.buyer_limit - tr.price;
            res.profit[si] += tr.price - audit.seller_limit;
            ++res.fills[bi];
            ++res.fills[si];
            for (const std::size_t i : {bi, si}) {
                live[i].reset();
                ++version[i];
                Mailbox& mb = mailboxes[i];
                {
                    const std::lock_guard<std::mutex> lk(mb.m);
                    mb.fills.push_back(tr);
                }
                mb.cv.notify_one();
            }
            publish(s.trader);
        } else if (sub.book_changed()) {
            publish(s.trader);
        }
    };

    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        TraderThreadCtx ctx;
        ctx.trader = traders[static_cast<std::size_t>(i)].get();
        ctx.mb = &mailboxes[static_cast<std::size_t>(i)];
        ctx.queue = &queue;
        ctx.injected_delay_s = cfg.population[static_cast<std::size_t>(i)].injected_delay_s;
        ctx.duration = cfg.duration;
        threads.emplace_back(trader_loop, ctx);
    }

    publish(-1);  // seed every mailbox with the empty book
    std::uint64_t arrival_seq = 0;
    while (Clock::now() < deadline) {
        issue_due(elapsed());
        Clock::time_point wake = deadline;
        if (next_issue < plan.timeline.size()) {
            const auto next_wall =
                start + std::chrono::duration_cast<Clock::duration>(
                            std::chrono::duration<double>(wall_of(plan.timeline[next_issue].time)));
            if (next_wall < wake) wake = next_wall;
        }
        std::deque<Submission> batch;
        {
            std::unique_lock<std::mutex> lk(queue.m);
            if (queue.q.empty()) queue.cv.wait_until(lk, wake, [&] { return !queue.q.empty(); });
            batch.swap(queue.q);
        }
        for (const Submission& s : batch) process(s, ++arrival_seq);
    }

    for (Mailbox& mb : mailboxes) {
        {
            const std::lock_guard<std::mutex> lk(mb.m);
            mb.stop = true;
        }
        mb.cv.notify_one();
    }
    for (std::thread& th : threads) th.join();

    // Fills still sitting in mailboxes post-join are applied here so trader
    // ledgers close out; then they must agree with the exchange ledger.
    for (int i = 0; i < n; ++i) {
        for (const Trade& f : mailboxes[static_cast<std::size_t>(i)].fills)
            traders[static_cast<std::size_t>(i)]->record_fill(f);
        if (traders[static_cast<std::size_t>(i)]->balance() != res.profit[static_cast<std::size_t>(i)])
            throw AccountingFault("trader ledger disagrees with exchange ledger for " +
                                  res.trader_names[static_cast<std::size_t>(i)]);
    }

    res.tape = book.tape();
    res.wall_clock_elapsed = elapsed();
    return res;
}

}  // namespace cda
