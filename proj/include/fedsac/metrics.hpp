#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "fedsac/environment.hpp"

namespace fedsac {

struct EpisodeMetrics {
    long episode = 0;
    double total_j = 0.0;  // computation + transmission; wasted is a subset, reported apart
    double comp_j = 0.0;
    double tx_j = 0.0;
    double wasted_j = 0.0;
    double reward = 0.0;
    long p1 = 0;
    long p2 = 0;
    long rounds = 0;
    double mean_round_s = 0.0;
    long accesses = 0;
    double occupation_s = 0.0;
    long unnecessary_accesses = 0;
    double unnecessary_s = 0.0;

    /// (P1 + P2) / K, the per-worker violation count of one FL process.
    double violations_per_worker(int workers) const;
};

/// Folds step outcomes into one EpisodeMetrics record.
class EpisodeAccumulator {
public:
    explicit EpisodeAccumulator(long episode = 0) { m_.episode = episode; }
    void add(const StepOutcome& step);
    EpisodeMetrics finish() const;

private:
    EpisodeMetrics m_;
    double round_time_sum_ = 0.0;
};

inline constexpr std::string_view kCsvVersionLine = "# fedsac episode metrics v1";
inline constexpr std::array<std::string_view, 14> kCsvColumns = {
    "episode", "total_J", "comp_J", "tx_J", "wasted_J", "reward", "p1", "p2",
    "rounds", "mean_round_s", "accesses", "occ_s", "unnec_accesses", "unnec_occ_s"};

/// Numeric view of a record in CSV column order.
std::array<double, 14> as_row(const EpisodeMetrics& m);
EpisodeMetrics from_row(const std::array<double, 14>& row);

void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const EpisodeMetrics& m);
void write_csv(std::ostream& out, const std::vector<EpisodeMetrics>& rows);

/// Parses a CSV produced by write_csv. Throws std::runtime_error on schema
/// mismatch or malformed rows.
std::vector<EpisodeMetrics> read_csv(std::istream& in);

struct Stat {
    double mean = 0.0;
    double std = 0.0;  // sample standard deviation (n - 1)
};

Stat mean_std(const std::vector<double>& xs);

/// Mean and STD of every non-index column.
struct Summary {
    std::string label;
    long episodes = 0;
    std::array<Stat, 14> columns{};

    const Stat& operator[](std::string_view column) const;
};

Summary summarize(const std::string& label, const std::vector<EpisodeMetrics>& rows);

/// Long-format summary table: label,metric,mean,std,n.
void write_summary_csv(std::ostream& out, const std::vector<Summary>& summaries);

/// Averages consecutive windows of `window` episodes (the last window may be
/// short). Column 0 holds the first episode index of the window.
using MetricRow = std::array<double, 14>;
std::vector<MetricRow> window_means(const std::vector<EpisodeMetrics>& rows, long window);
void write_window_csv(std::ostream& out, const std::vector<MetricRow>& rows);

/// Shortest round-trip text for a double.
std::string format_number(double x);

}  // namespace fedsac
