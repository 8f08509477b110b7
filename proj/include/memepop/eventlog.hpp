#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "memepop/error.hpp"

namespace memepop {

struct EventRecord {
    std::string user_id;
    std::string meme_id;
    std::int64_t timestamp = 0;

    bool operator==(const EventRecord&) const = default;
};

// Immutable once built; records are stably sorted by timestamp.
class EventLog {
public:
    EventLog() = default;

    // Validates, sorts and counts. With rebase the minimum timestamp is shifted to 0.
    static EventLog from_records(std::vector<EventRecord> records, bool rebase = true) {
        for (std::size_t i = 0; i < records.size(); ++i) {
            const auto& r = records[i];
            if (r.user_id.empty() || r.meme_id.empty())
                throw DomainError("record " + std::to_string(i) + ": empty user_id or meme_id");
            if (r.timestamp < 0)
                throw DomainError("record " + std::to_string(i) + ": negative timestamp");
        }
        std::stable_sort(records.begin(), records.end(),
                         [](const EventRecord& a, const EventRecord& b) { return a.timestamp < b.timestamp; });
        if (rebase && !records.empty()) {
            const auto t0 = records.front().timestamp;
            for (auto& r : records) r.timestamp -= t0;
        }
        EventLog log;
        log.records_ = std::move(records);
        log.recount();
        return log;
    }

    const std::vector<EventRecord>& records() const noexcept { return records_; }
    std::size_t size() const noexcept { return records_.size(); }
    bool empty() const noexcept { return records_.empty(); }

    // max - min + 1; 0 for an empty log.
    std::int64_t span() const noexcept { return span_; }
    std::int64_t min_timestamp() const noexcept { return empty() ? 0 : records_.front().timestamp; }
    std::int64_t max_timestamp() const noexcept { return empty() ? 0 : records_.back().timestamp; }
    std::size_t user_count() const noexcept { return user_count_; }
    std::size_t meme_count() const noexcept { return meme_count_; }

    bool operator==(const EventLog& o) const { return records_ == o.records_; }

private:
    void recount() {
        std::unordered_set<std::string_view> users, memes;
        for (const auto& r : records_) {
            users.insert(r.user_id);
            memes.insert(r.meme_id);
        }
        user_count_ = users.size();
        meme_count_ = memes.size();
        span_ = empty() ? 0 : max_timestamp() - min_timestamp() + 1;
    }

    std::vector<EventRecord> records_;
    std::int64_t span_ = 0;
    std::size_t user_count_ = 0;
    std::size_t meme_count_ = 0;
};

inline constexpr std::string_view kLogHeader = "user_id,meme_id,timestamp";

namespace detail {

inline std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

} // namespace detail

// Reads the CSV log format. Line numbers in errors are 1-based and count the header.
inline EventLog parse_log(std::istream& in, bool rebase = true) {
    std::string line;
    std::size_t lineno = 0;
    bool saw_header = false;
    std::vector<EventRecord> records;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!saw_header) {
            if (line != kLogHeader) throw ParseError(lineno, "expected header '" + std::string(kLogHeader) + "'");
            saw_header = true;
            continue;
        }
        if (line.empty()) {
            // Tolerate a single trailing blank line only.
            if (in.peek() == std::char_traits<char>::eof()) break;
            throw ParseError(lineno, "blank line");
        }
        auto fields = detail::split_commas(line);
        if (fields.size() != 3)
            throw ParseError(lineno, "expected 3 fields, got " + std::to_string(fields.size()));
        if (fields[0].empty()) throw ParseError(lineno, "empty user_id");
        if (fields[1].empty()) throw ParseError(lineno, "empty meme_id");
        auto ts = fields[2];
        std::int64_t value = 0;
        auto [ptr, ec] = std::from_chars(ts.data(), ts.data() + ts.size(), value);
        if (ts.empty() || ec != std::errc{} || ptr != ts.data() + ts.size())
            throw ParseError(lineno, "timestamp is not an integer: '" + std::string(ts) + "'");
        if (value < 0) throw ParseError(lineno, "negative timestamp " + std::string(ts));
        records.push_back({std::string(fields[0]), std::string(fields[1]), value});
    }
    if (records.empty()) throw Error("empty log");
    return EventLog::from_records(std::move(records), rebase);
}

inline void write_log(const EventLog& log, std::ostream& out) {
    if (log.empty()) throw DomainError("refusing to write an empty log");
    out << kLogHeader << '\n';
    for (const auto& r : log.records()) out << r.user_id << ',' << r.meme_id << ',' << r.timestamp << '\n';
    if (!out) throw Error("write failed");
}

// The seven-user, four-meme toy history.
inline EventLog fig1_fixture() {
    return EventLog::from_records({
        {"U1", "M1", 0}, {"U4", "M2", 1}, {"U5", "M3", 2}, {"U7", "M4", 2},
        {"U2", "M1", 3}, {"U5", "M4", 3}, {"U3", "M1", 4}, {"U5", "M3", 4},
        {"U4", "M1", 5}, {"U5", "M2", 5}, {"U6", "M4", 6},
    });
}

} // namespace memepop
