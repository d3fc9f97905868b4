#include "aoisched/trace_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace aoisched {

namespace {

bool contains(const std::vector<int>& v, int x) { return std::find(v.begin(), v.end(), x) != v.end(); }

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ','))
        out.push_back(cell);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

int parse_int(const std::string& s, int line_no)
{
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw std::runtime_error("trace csv line " + std::to_string(line_no) + ": bad integer '" + s + "'");
    return v;
}

Mode parse_mode(const std::string& s, int line_no)
{
    for (Mode m : {Mode::Inactive, Mode::Active, Mode::Hibernating})
        if (to_string(m) == s)
            return m;
    throw std::runtime_error("trace csv line " + std::to_string(line_no) + ": bad mode '" + s + "'");
}

}  // namespace

void write_trace_csv(std::ostream& out, const Trace& trace)
{
    out << kTraceCsvHeader << '\n';
    char buf[256];
    for (const SlotRecord& rec : trace.records) {
        for (std::size_t i = 0; i < rec.sensors.size(); ++i) {
            const SensorSnapshot& s = rec.sensors[i];
            const int idx = static_cast<int>(i) + 1;
            const bool active = s.mode == Mode::Active;
            const std::string lax = active ? std::to_string(s.laxity) : std::string();
            std::snprintf(buf, sizeof(buf), "%d,%d,%s,%d,%d,%d,%d,%.17g,%s,%d,%d,%d\n", rec.slot_t, idx,
                          std::string(to_string(s.mode)).c_str(), s.age_h, s.attempt_xi, s.attempt_latency_L,
                          active ? s.total_latency : 0, s.utility, lax.c_str(), rec.chosen == idx ? 1 : 0,
                          contains(rec.dropped, idx) ? 1 : 0, contains(rec.graced, idx) ? 1 : 0);
            out << buf;
        }
    }
}

std::string trace_csv(const Trace& trace)
{
    std::ostringstream ss;
    write_trace_csv(ss, trace);
    return ss.str();
}

Trace trace_from_csv(std::istream& in, const EngineConfig& base)
{
    std::string line;
    if (!std::getline(in, line) || line != kTraceCsvHeader)
        throw std::runtime_error("trace csv: missing or unexpected header");

    std::map<int, SlotRecord> slots;
    int max_sensor = 0;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        const auto cells = split(line);
        if (cells.size() != 12)
            throw std::runtime_error("trace csv line " + std::to_string(line_no) + ": expected 12 columns");
        const int slot = parse_int(cells[0], line_no);
        const int sensor = parse_int(cells[1], line_no);
        if (slot < 1 || sensor < 1)
            throw std::runtime_error("trace csv line " + std::to_string(line_no) + ": bad slot/sensor");
        SlotRecord& rec = slots[slot];
        rec.slot_t = slot;
        if (static_cast<int>(rec.sensors.size()) < sensor)
            rec.sensors.resize(static_cast<std::size_t>(sensor));
        SensorSnapshot& s = rec.sensors[static_cast<std::size_t>(sensor - 1)];
        s.mode = parse_mode(cells[2], line_no);
        s.age_h = parse_int(cells[3], line_no);
        s.attempt_xi = parse_int(cells[4], line_no);
        s.attempt_latency_L = parse_int(cells[5], line_no);
        s.total_latency = parse_int(cells[6], line_no);
        try {
            s.utility = std::stod(cells[7]);
        } catch (const std::exception&) {
            throw std::runtime_error("trace csv line " + std::to_string(line_no) + ": bad utility");
        }
        if (s.mode == Mode::Active) {
            s.laxity = parse_int(cells[8], line_no);
            s.priority_class = s.laxity == 0 ? PriorityClass::Critical : PriorityClass::Normal;
            s.window_W = s.laxity + s.attempt_latency_L + 1;
        }
        if (parse_int(cells[9], line_no) != 0) {
            if (rec.chosen)
                throw std::runtime_error("trace csv: two services in slot " + std::to_string(slot));
            rec.chosen = sensor;
            rec.channel = ChannelState::On;
        }
        if (parse_int(cells[10], line_no) != 0) {
            rec.dropped.push_back(sensor);
            rec.hard = sensor;
        }
        if (parse_int(cells[11], line_no) != 0)
            rec.graced.push_back(sensor);
        max_sensor = std::max(max_sensor, sensor);
    }

    Trace trace;
    trace.config = base;
    trace.config.num_sensors = max_sensor;
    trace.config.horizon_T = static_cast<int>(slots.size());
    int expected = 1;
    for (auto& [slot, rec] : slots) {
        if (slot != expected++)
            throw std::runtime_error("trace csv: slots are not contiguous from 1");
        if (static_cast<int>(rec.sensors.size()) != max_sensor)
            throw std::runtime_error("trace csv: slot " + std::to_string(slot) + " misses sensors");
        trace.records.push_back(std::move(rec));
    }
    for (std::size_t t = 1; t < trace.records.size(); ++t) {
        const SlotRecord& prev = trace.records[t - 1];
        SlotRecord& cur = trace.records[t];
        for (int i = 1; i <= max_sensor; ++i) {
            const Mode before = prev.sensors[static_cast<std::size_t>(i - 1)].mode;
            if (cur.sensors[static_cast<std::size_t>(i - 1)].mode != Mode::Active)
                continue;
            if (before == Mode::Hibernating)
                cur.regenerated.push_back(i);
            else if (before == Mode::Inactive || prev.chosen == i)
                cur.newly_active.push_back(i);
        }
    }
    for (const SlotRecord& rec : trace.records)
        for (std::size_t i = 0; i < rec.sensors.size(); ++i)
            if (rec.sensors[i].mode == Mode::Active)
                trace.utility_accumulator += trace.config.weight(static_cast<int>(i) + 1) * rec.sensors[i].utility;
    return trace;
}

}  // namespace aoisched
