#pragma once

#include <cstdio>
#include <string>

#include "cda/session.hpp"

namespace cda::testing {

// Canonical byte image of a SessionResult for replay comparison. Doubles are
// rendered as hexfloats so equality means bitwise equality. wall_clock_elapsed
// is deliberately excluded: it measures the host, not the session.
inline std::string serialize_result(const SessionResult& r) {
    std::string out;
    out.reserve(4096);
    char buf[64];
    const auto hex = [&](double v) {
        std::snprintf(buf, sizeof buf, "%a", v);
        out += buf;
        out += ' ';
    };
    const auto num = [&](long long v) {
        out += std::to_string(v);
        out += ' ';
    };

    out += "names:";
    for (const auto& n : r.trader_names) {
        out += n;
        out += ' ';
    }
    out += "\npop:";
    for (const auto& t : r.population) {
        num(static_cast<int>(t.strategy));
        num(static_cast<int>(t.side));
        num(t.group);
        hex(t.injected_delay_s);
    }
    out += "\ntape:";
    for (const auto& t : r.tape) {
        hex(t.time);
        num(t.price);
        num(t.quantity);
        num(t.buyer);
        num(t.seller);
        num(static_cast<int>(t.initiating_side));
    }
    out += "\naudit:";
    for (const auto& a : r.audit) {
        hex(a.trade.time);
        num(a.trade.price);
        num(a.trade.buyer);
        num(a.trade.seller);
        num(static_cast<int>(a.trade.initiating_side));
        num(a.buyer_limit);
        num(a.seller_limit);
    }
    out += "\nprofit:";
    for (long long p : r.profit) num(p);
    out += "\nfills:";
    for (int f : r.fills) num(f);
    out += "\nissued:";
    for (int a : r.assignments_issued) num(a);
    out += "\nmeta:";
    num(static_cast<long long>(r.config_hash));
    num(static_cast<long long>(r.seed));
    hex(r.duration);
    out += "\nlatency:";
    for (const auto& row : r.latency) {
        num(row.trader);
        num(static_cast<long long>(row.event_seq));
        hex(row.event_time);
        hex(row.submit_time);
        num(row.caused_by);
    }
    out += "\nsubmissions:";
    for (const auto& row : r.submissions) {
        num(row.trader);
        num(static_cast<long long>(row.reacted_seq));
        num(static_cast<long long>(row.arrival_seq));
        num(row.improved_best ? 1 : 0);
    }
    out += '\n';
    return out;
}

}  // namespace cda::testing
