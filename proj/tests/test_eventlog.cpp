#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "memepop/eventlog.hpp"
#include "memepop/simulator.hpp"

using namespace memepop;

namespace {

EventLog parse(const std::string& text, bool rebase = true) {
    std::istringstream in(text);
    return parse_log(in, rebase);
}

std::string write(const EventLog& log) {
    std::ostringstream out;
    write_log(log, out);
    return out.str();
}

} // namespace

TEST(EventLog, FixtureCounts) {
    const auto log = fig1_fixture();
    EXPECT_EQ(log.size(), 11u);
    EXPECT_EQ(log.user_count(), 7u);
    EXPECT_EQ(log.meme_count(), 4u);
    EXPECT_EQ(log.span(), 7);
}

TEST(EventLog, FixtureM1TouchedByFourUsers) {
    std::set<std::string> users;
    const auto log = fig1_fixture();
    for (const auto& r : log.records())
        if (r.meme_id == "M1") users.insert(r.user_id);
    EXPECT_EQ(users, (std::set<std::string>{"U1", "U2", "U3", "U4"}));
}

TEST(EventLog, FixtureU5HasFourEvents) {
    const auto log = fig1_fixture();
    const auto& recs = log.records();
    EXPECT_EQ(std::count_if(recs.begin(), recs.end(), [](const auto& r) { return r.user_id == "U5"; }), 4);
}

TEST(EventLog, ParsesFixtureFile) {
    const auto text = write(fig1_fixture());
    const auto log = parse(text);
    EXPECT_EQ(log.user_count(), 7u);
    EXPECT_EQ(log.meme_count(), 4u);
    EXPECT_EQ(log.span(), 7);
    EXPECT_EQ(log, fig1_fixture());
}

TEST(EventLog, WriteHasHeaderAndElevenRows) {
    const auto text = write(fig1_fixture());
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 12);
    EXPECT_EQ(text.substr(0, text.find('\n')), "user_id,meme_id,timestamp");
}

TEST(EventLog, SingleRow) {
    const auto log = parse("user_id,meme_id,timestamp\nu1,m1,0\n");
    EXPECT_EQ(log.size(), 1u);
    EXPECT_EQ(log.span(), 1);
}

TEST(EventLog, NegativeTimestampNamesLine) {
    try {
        parse("user_id,meme_id,timestamp\nu1,m1,2\nu1,m1,-3\n");
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
}

TEST(EventLog, MalformedRowsNameLine) {
    const char* bad[] = {
        "user_id,meme_id,timestamp\nu1,m1\n",
        "user_id,meme_id,timestamp\nu1,m1,3,4\n",
        "user_id,meme_id,timestamp\nu1,m1,x\n",
        "user_id,meme_id,timestamp\nu1,m1,1.5\n",
        "user_id,meme_id,timestamp\n,m1,1\n",
        "user_id,meme_id,timestamp\nu1,,1\n",
        "user_id,meme_id,timestamp\nu1,m1,\n",
    };
    for (const char* text : bad) {
        try {
            parse(text);
            ADD_FAILURE() << "accepted: " << text;
        } catch (const ParseError& e) {
            EXPECT_EQ(e.line(), 2u) << text;
        }
    }
}

TEST(EventLog, EmptyFileIsEmptyLog) {
    for (const char* text : {"", "user_id,meme_id,timestamp\n"}) {
        try {
            parse(text);
            ADD_FAILURE() << "accepted empty input";
        } catch (const ParseError&) {
            ADD_FAILURE() << "wrong error kind";
        } catch (const Error& e) {
            EXPECT_STREQ(e.what(), "empty log");
        }
    }
}

TEST(EventLog, BadHeaderRejected) { EXPECT_THROW(parse("a,b,c\nu1,m1,0\n"), ParseError); }

TEST(EventLog, WritingEmptyLogRejected) {
    std::ostringstream out;
    EXPECT_THROW(write_log(EventLog{}, out), DomainError);
}

TEST(EventLog, StableSortKeepsInputOrderForTies) {
    const auto log = parse("user_id,meme_id,timestamp\nb,m1,5\na,m2,3\nc,m3,5\nd,m4,3\n");
    std::vector<std::string> users;
    for (const auto& r : log.records()) users.push_back(r.user_id);
    EXPECT_EQ(users, (std::vector<std::string>{"a", "d", "b", "c"}));
}

TEST(EventLog, RebaseShiftsMinimumToZero) {
    const auto log = parse("user_id,meme_id,timestamp\nu1,m1,10\nu2,m1,14\n");
    EXPECT_EQ(log.records().front().timestamp, 0);
    EXPECT_EQ(log.records().back().timestamp, 4);
    EXPECT_EQ(log.span(), 5);
    const auto kept = parse("user_id,meme_id,timestamp\nu1,m1,10\nu2,m1,14\n", false);
    EXPECT_EQ(kept.records().front().timestamp, 10);
    EXPECT_EQ(kept.span(), 5);
}

TEST(EventLog, CountsMatchDistinctTokens) {
    ModelParams p;
    p.N_f = 200;
    p.T = 300;
    p.seed = 11;
    const auto log = run(p);
    std::set<std::string> users, memes;
    for (const auto& r : log.records()) {
        users.insert(r.user_id);
        memes.insert(r.meme_id);
    }
    EXPECT_EQ(log.user_count(), users.size());
    EXPECT_EQ(log.meme_count(), memes.size());
}

TEST(EventLog, SimulatorOutputRoundTrips) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        ModelParams p;
        p.N_f = 300;
        p.T = 400;
        p.seed = seed;
        const auto log = run(p);
        const auto text = write(log);
        const auto back = parse(text, false);
        EXPECT_EQ(back, log);
        EXPECT_EQ(write(back), text);
    }
}
