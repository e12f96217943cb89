#include "fedsac/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace fedsac {

double EpisodeMetrics::violations_per_worker(int workers) const {
    return static_cast<double>(p1 + p2) / std::max(workers, 1);
}

void EpisodeAccumulator::add(const StepOutcome& step) {
    const double comp = step.comp_j();
    const double tx = step.tx_j();
    m_.comp_j += comp;
    m_.tx_j += tx;
    m_.total_j += comp + tx;
    m_.wasted_j += step.wasted_j();
    m_.reward += step.reward;
    m_.p1 += step.p1;
    m_.p2 += step.p2;
    m_.rounds += 1;
    round_time_sum_ += step.round_time_s;
    m_.accesses += step.channel.accesses;
    m_.occupation_s += step.channel.occupation_s;
    m_.unnecessary_accesses += step.channel.unnecessary_accesses;
    m_.unnecessary_s += step.channel.unnecessary_s;
}

EpisodeMetrics EpisodeAccumulator::finish() const {
    EpisodeMetrics m = m_;
    m.mean_round_s = m.rounds > 0 ? round_time_sum_ / m.rounds : 0.0;
    return m;
}

std::array<double, 14> as_row(const EpisodeMetrics& m) {
    return {static_cast<double>(m.episode),
            m.total_j,
            m.comp_j,
            m.tx_j,
            m.wasted_j,
            m.reward,
            static_cast<double>(m.p1),
            static_cast<double>(m.p2),
            static_cast<double>(m.rounds),
            m.mean_round_s,
            static_cast<double>(m.accesses),
            m.occupation_s,
            static_cast<double>(m.unnecessary_accesses),
            m.unnecessary_s};
}

EpisodeMetrics from_row(const std::array<double, 14>& r) {
    EpisodeMetrics m;
    m.episode = std::lround(r[0]);
    m.total_j = r[1];
    m.comp_j = r[2];
    m.tx_j = r[3];
    m.wasted_j = r[4];
    m.reward = r[5];
    m.p1 = std::lround(r[6]);
    m.p2 = std::lround(r[7]);
    m.rounds = std::lround(r[8]);
    m.mean_round_s = r[9];
    m.accesses = std::lround(r[10]);
    m.occupation_s = r[11];
    m.unnecessary_accesses = std::lround(r[12]);
    m.unnecessary_s = r[13];
    return m;
}

std::string format_number(double x) {
    if (!std::isfinite(x)) throw std::runtime_error("refusing to write a non-finite metric");
    return fmt::format("{}", x);
}

void write_csv_header(std::ostream& out) {
    out << kCsvVersionLine << '\n';
    for (std::size_t i = 0; i < kCsvColumns.size(); ++i) out << (i ? "," : "") << kCsvColumns[i];
    out << '\n';
}

void write_csv_row(std::ostream& out, const EpisodeMetrics& m) {
    const auto row = as_row(m);
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_number(row[i]);
    out << '\n';
}

void write_csv(std::ostream& out, const std::vector<EpisodeMetrics>& rows) {
    write_csv_header(out);
    for (const auto& r : rows) write_csv_row(out, r);
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

double parse_double(const std::string& s, long line_no) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
        throw std::runtime_error(fmt::format("csv line {}: bad number '{}'", line_no, s));
    return v;
}

}  // namespace

std::vector<EpisodeMetrics> read_csv(std::istream& in) {
    std::string line;
    long line_no = 0;
    bool header_seen = false;
    std::vector<EpisodeMetrics> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        const auto cells = split(line);
        if (!header_seen) {
            if (cells.size() != kCsvColumns.size() || !std::equal(cells.begin(), cells.end(), kCsvColumns.begin()))
                throw std::runtime_error("csv: unexpected header '" + line + "'");
            header_seen = true;
            continue;
        }
        if (cells.size() != kCsvColumns.size())
            throw std::runtime_error(fmt::format("csv line {}: expected {} fields, got {}", line_no,
                                                 kCsvColumns.size(), cells.size()));
        std::array<double, 14> r{};
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = parse_double(cells[i], line_no);
        rows.push_back(from_row(r));
    }
    if (!header_seen) throw std::runtime_error("csv: missing header row");
    return rows;
}

Stat mean_std(const std::vector<double>& xs) {
    Stat s;
    if (xs.empty()) return s;
    double sum = 0.0;
    for (double x : xs) sum += x;
    s.mean = sum / xs.size();
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - s.mean) * (x - s.mean);
        s.std = std::sqrt(ss / (xs.size() - 1));
    }
    return s;
}

const Stat& Summary::operator[](std::string_view column) const {
    for (std::size_t i = 0; i < kCsvColumns.size(); ++i)
        if (kCsvColumns[i] == column) return columns[i];
    throw std::out_of_range("no summary column named " + std::string(column));
}

Summary summarize(const std::string& label, const std::vector<EpisodeMetrics>& rows) {
    Summary s;
    s.label = label;
    s.episodes = static_cast<long>(rows.size());
    for (std::size_t c = 1; c < kCsvColumns.size(); ++c) {
        std::vector<double> xs;
        xs.reserve(rows.size());
        for (const auto& r : rows) xs.push_back(as_row(r)[c]);
        s.columns[c] = mean_std(xs);
    }
    return s;
}

void write_summary_csv(std::ostream& out, const std::vector<Summary>& summaries) {
    out << "label,metric,mean,std,n\n";
    for (const auto& s : summaries)
        for (std::size_t c = 1; c < kCsvColumns.size(); ++c)
            out << s.label << ',' << kCsvColumns[c] << ',' << format_number(s.columns[c].mean) << ','
                << format_number(s.columns[c].std) << ',' << s.episodes << '\n';
}

std::vector<MetricRow> window_means(const std::vector<EpisodeMetrics>& rows, long window) {
    if (window < 1) throw std::invalid_argument("window must be positive");
    std::vector<MetricRow> out;
    for (std::size_t start = 0; start < rows.size(); start += window) {
        const std::size_t end = std::min(rows.size(), start + static_cast<std::size_t>(window));
        MetricRow acc{};
        for (std::size_t i = start; i < end; ++i) {
            const auto r = as_row(rows[i]);
            for (std::size_t c = 1; c < r.size(); ++c) acc[c] += r[c];
        }
        for (std::size_t c = 1; c < acc.size(); ++c) acc[c] /= static_cast<double>(end - start);
        acc[0] = static_cast<double>(rows[start].episode);
        out.push_back(acc);
    }
    return out;
}

void write_window_csv(std::ostream& out, const std::vector<MetricRow>& rows) {
    out << "# fedsac windowed means v1\nwindow_start";
    for (std::size_t i = 1; i < kCsvColumns.size(); ++i) out << ',' << kCsvColumns[i];
    out << '\n';
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << format_number(r[i]);
        out << '\n';
    }
}

}  // namespace fedsac
