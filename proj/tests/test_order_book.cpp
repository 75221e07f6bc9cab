#include <doctest.h>

#include <random>

#include "cda/order_book.hpp"
#include "naive_book.hpp"

using namespace cda;
using testing::NaiveBook;

namespace {

bool same_trade(const Trade& a, const Trade& b) {
    return a.time == b.time && a.price == b.price && a.quantity == b.quantity &&
           a.buyer == b.buyer && a.seller == b.seller && a.initiating_side == b.initiating_side;
}

int status_code(OrderBook::SubmitStatus s) { return static_cast<int>(s); }
int outcome_code(NaiveBook::Outcome o) { return static_cast<int>(o); }

}  // namespace

TEST_CASE("crossing order executes at the resting price") {
    OrderBook book;
    REQUIRE(book.submit(0, Side::ask, 95, 1.0).status == OrderBook::SubmitStatus::rested);
    const auto res = book.submit(1, Side::bid, 100, 2.0);
    REQUIRE(res.status == OrderBook::SubmitStatus::executed);
    REQUIRE(res.trade.has_value());
    CHECK(res.trade->price == 95);
    CHECK(res.trade->buyer == 1);
    CHECK(res.trade->seller == 0);
    CHECK(res.trade->initiating_side == Side::bid);
    CHECK(book.order_count() == 0);
}

TEST_CASE("equal-price resting orders fill first come first served") {
    OrderBook book;
    book.submit(0, Side::bid, 100, 1.0);
    book.submit(1, Side::bid, 100, 2.0);
    const auto res = book.submit(2, Side::ask, 100, 3.0);
    REQUIRE(res.status == OrderBook::SubmitStatus::executed);
    CHECK(res.trade->buyer == 0);
    CHECK(book.resting_order(1).has_value());
}

TEST_CASE("resubmitting forfeits time priority") {
    OrderBook book;
    book.submit(0, Side::bid, 100, 1.0);
    book.submit(1, Side::bid, 100, 2.0);
    const auto replaced = book.submit(0, Side::bid, 100, 3.0);
    CHECK(replaced.status == OrderBook::SubmitStatus::replaced_and_rested);
    const auto res = book.submit(2, Side::ask, 100, 4.0);
    REQUIRE(res.trade.has_value());
    CHECK(res.trade->buyer == 1);
}

TEST_CASE("out-of-bounds price is rejected and the prior order survives") {
    OrderBook book;  // bounds [1, 500]
    book.submit(0, Side::bid, 100, 1.0);
    for (const Price bad : {0, -3, 501, 10000}) {
        const auto res = book.submit(0, Side::bid, bad, 2.0);
        CHECK(res.status == OrderBook::SubmitStatus::rejected);
        CHECK_FALSE(res.book_changed());
    }
    const auto still = book.resting_order(0);
    REQUIRE(still.has_value());
    CHECK(still->price == 100);
}

TEST_CASE("one resting order per trader, across both sides") {
    OrderBook book;
    book.submit(0, Side::bid, 100, 1.0);
    const auto res = book.submit(0, Side::ask, 120, 2.0);
    CHECK(res.status == OrderBook::SubmitStatus::replaced_and_rested);
    CHECK(book.order_count() == 1);
    const auto rest = book.resting_order(0);
    REQUIRE(rest.has_value());
    CHECK(rest->side == Side::ask);
    CHECK(book.best(Side::bid) == std::nullopt);
}

TEST_CASE("a trader never trades with itself") {
    OrderBook book;
    book.submit(0, Side::ask, 100, 1.0);
    // The prior ask is withdrawn before matching, so this bid rests.
    const auto res = book.submit(0, Side::bid, 100, 2.0);
    CHECK(res.status == OrderBook::SubmitStatus::replaced_and_rested);
    CHECK(book.tape().empty());
    CHECK(book.best(Side::bid) == Price{100});
}

TEST_CASE("withdraw removes the resting order and reports whether one existed") {
    OrderBook book;
    CHECK_FALSE(book.withdraw(0));
    book.submit(0, Side::bid, 100, 1.0);
    CHECK(book.withdraw(0));
    CHECK(book.order_count() == 0);
    CHECK_FALSE(book.withdraw(0));
}

TEST_CASE("snapshot aggregates levels best-first and floors the mid") {
    OrderBook book;
    book.submit(0, Side::bid, 10, 1.0);
    book.submit(1, Side::bid, 12, 1.5);
    book.submit(2, Side::bid, 12, 2.0);
    book.submit(3, Side::ask, 15, 2.5);
    book.submit(4, Side::ask, 17, 3.0);
    const LobSnapshot s = book.snapshot(3.5);
    REQUIRE(s.bids.size() == 2);
    CHECK(s.bids[0].price == 12);
    CHECK(s.bids[0].quantity == 2);
    CHECK(s.bids[1].price == 10);
    REQUIRE(s.asks.size() == 2);
    CHECK(s.asks[0].price == 15);
    CHECK(s.best_bid == Price{12});
    CHECK(s.best_ask == Price{15});
    CHECK(s.mid == Price{13});  // (12+15)/2 rounded down
    CHECK(s.spread == Price{3});
    CHECK(s.trade_count == 0);
    CHECK_FALSE(s.last_trade.has_value());
}

TEST_CASE("snapshot reports the latest trade and the cumulative count") {
    OrderBook book;
    book.submit(0, Side::ask, 90, 1.0);
    book.submit(1, Side::bid, 95, 2.0);
    book.submit(2, Side::ask, 99, 3.0);
    book.submit(3, Side::bid, 99, 4.0);
    const LobSnapshot s = book.snapshot(5.0);
    CHECK(s.trade_count == 2);
    REQUIRE(s.last_trade.has_value());
    CHECK(s.last_trade->price == 99);
    CHECK(s.last_trade->time == 4.0);
    CHECK(s.last_trade->initiating_side == Side::bid);
}

TEST_CASE("seq increases across rests and a replacement draws a fresh seq") {
    OrderBook book;
    book.submit(0, Side::bid, 100, 1.0);
    book.submit(1, Side::bid, 101, 2.0);
    const auto first = book.resting_order(0);
    const auto second = book.resting_order(1);
    REQUIRE((first && second));
    CHECK(first->seq < second->seq);
    book.submit(0, Side::bid, 100, 3.0);
    const auto reposted = book.resting_order(0);
    REQUIRE(reposted.has_value());
    CHECK(reposted->seq > second->seq);
}

TEST_CASE("random streams replay identically on the brute-force book") {
    // Small trader pool, prices straddling the bounds so rejects and crossings
    // both occur, occasional withdrawals. After every operation the status,
    // trade, bests and order count must agree; tapes must match at the end.
    std::mt19937_64 rng(20240817);
    const PriceBounds bounds{1, 60};
    std::uniform_int_distribution<int> trader_d(0, 9);
    std::uniform_int_distribution<int> price_d(bounds.min - 5, bounds.max + 5);
    std::uniform_int_distribution<int> side_d(0, 1);
    std::uniform_int_distribution<int> op_d(0, 19);
    std::uniform_int_distribution<int> len_d(1, 200);

    for (int stream = 0; stream < 2000; ++stream) {
        OrderBook book(bounds);
        NaiveBook naive(bounds);
        double t = 0.0;
        const int ops = len_d(rng);
        for (int i = 0; i < ops; ++i) {
            t += 0.25;
            const TraderId who = trader_d(rng);
            if (op_d(rng) == 0) {
                CHECK(book.withdraw(who) == naive.withdraw(who));
            } else {
                const Side side = side_d(rng) == 0 ? Side::bid : Side::ask;
                const Price px = price_d(rng);
                const auto got = book.submit(who, side, px, t);
                const auto want = naive.submit(who, side, px, t);
                REQUIRE(status_code(got.status) == outcome_code(want.outcome));
                REQUIRE(got.trade.has_value() == want.trade.has_value());
                if (got.trade) REQUIRE(same_trade(*got.trade, *want.trade));
            }
            REQUIRE(book.best(Side::bid) == naive.best(Side::bid));
            REQUIRE(book.best(Side::ask) == naive.best(Side::ask));
            REQUIRE(book.order_count() == naive.order_count());
            const auto bb = book.best(Side::bid);
            const auto ba = book.best(Side::ask);
            if (bb && ba) REQUIRE(*bb < *ba);  // a crossed book never persists
        }
        REQUIRE(book.tape().size() == naive.tape().size());
        for (std::size_t i = 0; i < book.tape().size(); ++i)
            REQUIRE(same_trade(book.tape()[i], naive.tape()[i]));
    }
}

TEST_CASE("snapshot level quantities account for every resting order") {
    std::mt19937_64 rng(7);
    OrderBook book;
    std::uniform_int_distribution<int> trader_d(0, 19);
    std::uniform_int_distribution<int> price_d(90, 110);
    std::uniform_int_distribution<int> side_d(0, 1);
    for (int i = 0; i < 500; ++i) {
        book.submit(trader_d(rng), side_d(rng) == 0 ? Side::bid : Side::ask, price_d(rng),
                    static_cast<double>(i));
        const LobSnapshot s = book.snapshot(static_cast<double>(i));
        int total = 0;
        for (const Level& l : s.bids) total += l.quantity;
        for (const Level& l : s.asks) total += l.quantity;
        REQUIRE(static_cast<std::size_t>(total) == book.order_count());
    }
}
