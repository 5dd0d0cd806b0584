#include "hibo/trace.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hibo {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

double mean_of(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double sample_std(const std::vector<double>& xs, double mean) {
    if (xs.size() < 2) return 0.0;
    double s = 0.0;
    for (double x : xs) s += (x - mean) * (x - mean);
    return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

}  // namespace

void write_trace_csv(const std::string& path,
                     const std::vector<TraceRecord>& records,
                     const std::vector<std::string>& dim_names) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write trace file '" + path + "'");
    }
    out << "iteration";
    for (const auto& name : dim_names) out << ',' << name;
    out << ",value,failed,best_so_far,regret,tree_depth,n_leaves,tr_length,"
           "optim_seconds,eval_seconds\n";
    for (const auto& r : records) {
        if (r.point_raw.size() != dim_names.size()) {
            throw std::invalid_argument("trace record dimensionality mismatch");
        }
        out << r.iteration;
        for (double x : r.point_raw) out << ',' << format_double(x);
        out << ',' << format_double(r.value);
        out << ',' << (r.failed ? 1 : 0);
        out << ',' << format_double(r.best_so_far);
        out << ',' << (r.regret ? format_double(*r.regret) : std::string{});
        out << ',' << r.tree_depth;
        out << ',' << r.n_leaves;
        out << ',' << format_double(r.tr_length);
        out << ',' << format_double(r.optim_seconds);
        out << ',' << format_double(r.eval_seconds);
        out << '\n';
    }
}

std::vector<TraceRecord> read_trace_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot read trace file '" + path + "'");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("trace file '" + path + "' is empty");
    }
    auto header = split_csv(line);
    constexpr int kFixedTail = 9;  // value..eval_seconds
    if (header.size() < 1 + kFixedTail || header.front() != "iteration") {
        throw std::runtime_error("trace file '" + path +
                                 "': unrecognized header");
    }
    const std::size_t d = header.size() - 1 - kFixedTail;

    std::vector<TraceRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = split_csv(line);
        if (f.size() != header.size()) {
            throw std::runtime_error("trace file '" + path +
                                     "': ragged row " +
                                     std::to_string(records.size() + 1));
        }
        TraceRecord r;
        std::size_t k = 0;
        r.iteration = std::stoi(f[k++]);
        r.point_raw.resize(d);
        for (std::size_t j = 0; j < d; ++j) r.point_raw[j] = std::stod(f[k++]);
        r.value = std::stod(f[k++]);
        r.failed = f[k++] == "1";
        r.best_so_far = std::stod(f[k++]);
        if (!f[k].empty()) r.regret = std::stod(f[k]);
        ++k;
        r.tree_depth = std::stoi(f[k++]);
        r.n_leaves = std::stoi(f[k++]);
        r.tr_length = std::stod(f[k++]);
        r.optim_seconds = std::stod(f[k++]);
        r.eval_seconds = std::stod(f[k++]);
        records.push_back(std::move(r));
    }
    return records;
}

SeedAggregate summarize_seeds(
    const std::vector<std::vector<TraceRecord>>& traces) {
    if (traces.empty()) {
        throw std::invalid_argument("summarize_seeds: no traces");
    }
    const std::size_t len = traces.front().size();
    for (const auto& t : traces) {
        if (t.size() != len) {
            throw std::invalid_argument(
                "summarize_seeds: traces have mismatched budgets");
        }
    }
    if (len == 0) {
        throw std::invalid_argument("summarize_seeds: empty traces");
    }

    SeedAggregate agg;
    agg.rows.resize(len);
    std::vector<double> best(traces.size());
    std::vector<double> regret(traces.size());
    for (std::size_t i = 0; i < len; ++i) {
        bool have_regret = true;
        for (std::size_t s = 0; s < traces.size(); ++s) {
            best[s] = traces[s][i].best_so_far;
            if (traces[s][i].regret) {
                regret[s] = *traces[s][i].regret;
            } else {
                have_regret = false;
            }
        }
        SeedAggregateRow& row = agg.rows[i];
        row.iteration = traces.front()[i].iteration;
        row.mean_best = mean_of(best);
        row.std_best = sample_std(best, row.mean_best);
        if (have_regret) {
            row.mean_regret = mean_of(regret);
            row.std_regret = sample_std(regret, *row.mean_regret);
        }
    }
    const SeedAggregateRow& last = agg.rows.back();
    agg.final_mean_best = last.mean_best;
    agg.final_std_best = last.std_best;
    agg.final_mean_regret = last.mean_regret;
    agg.final_std_regret = last.std_regret;
    return agg;
}

void write_aggregate_csv(const std::string& path, const SeedAggregate& agg) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write aggregate file '" + path + "'");
    }
    out << "iteration,mean_best,std_best,mean_regret,std_regret\n";
    auto emit = [&](const std::string& label, const SeedAggregateRow& row) {
        out << label << ',' << format_double(row.mean_best) << ','
            << format_double(row.std_best) << ','
            << (row.mean_regret ? format_double(*row.mean_regret)
                                : std::string{})
            << ','
            << (row.std_regret ? format_double(*row.std_regret)
                               : std::string{})
            << '\n';
    };
    for (const auto& row : agg.rows) {
        emit(std::to_string(row.iteration), row);
    }
    SeedAggregateRow final_row;
    final_row.mean_best = agg.final_mean_best;
    final_row.std_best = agg.final_std_best;
    final_row.mean_regret = agg.final_mean_regret;
    final_row.std_regret = agg.final_std_regret;
    emit("final", final_row);
}

}  // namespace hibo
