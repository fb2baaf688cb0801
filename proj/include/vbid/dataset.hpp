// Dataset assembly from tracking trajectories, plus the VBDS binary matrix
// format and CSV import/export.
//
// Column layout (N devices): [T_1..T_N | T_set,1..T_set,N | eta | C | aggregate kW]
// for 2N+3 columns; rows are steps-until-failure concatenated across signals.
#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "vbid/common.hpp"
#include "vbid/ensemble.hpp"
#include "vbid/tensor.hpp"

namespace vbid {

struct DatasetSegment {
    std::string signal_id;
    std::size_t row_start = 0;
    std::size_t rows = 0;
    bool failed = false;
    std::size_t failure_step = 0;  // meaningful only when failed
};

struct Dataset {
    Matrix m;
    std::size_t n_devices = 0;
    std::vector<DatasetSegment> segments;  // row ranges per source signal

    std::size_t temperature_col(std::size_t device) const { return device; }
    std::size_t setpoint_col(std::size_t device) const { return n_devices + device; }
    std::size_t eta_col() const { return 2 * n_devices; }
    std::size_t capacitance_col() const { return 2 * n_devices + 1; }
    std::size_t aggregate_col() const { return 2 * n_devices + 2; }
};

inline Dataset build_dataset(const std::vector<Trajectory>& trajectories, const Ensemble& ensemble,
                             const std::vector<std::string>& signal_ids = {}) {
    const std::size_t n = ensemble.size();
    std::size_t rows = 0;
    for (const Trajectory& tr : trajectories) {
        if (tr.n_devices != n)
            throw DataError("build_dataset: trajectory device count " +
                            std::to_string(tr.n_devices) + " != ensemble size " + std::to_string(n));
        rows += tr.steps();
    }
    Dataset ds;
    ds.n_devices = n;
    ds.m = Matrix(rows, 2 * n + 3);
    const double eta = shared_efficiency(ensemble);
    const double cap = shared_capacitance(ensemble);

    std::size_t r = 0;
    for (std::size_t t = 0; t < trajectories.size(); ++t) {
        const Trajectory& tr = trajectories[t];
        DatasetSegment seg;
        seg.signal_id = t < signal_ids.size() ? signal_ids[t] : "signal_" + std::to_string(t);
        seg.row_start = r;
        seg.rows = tr.steps();
        seg.failed = tr.failure_step.has_value();
        seg.failure_step = tr.failure_step.value_or(0);
        ds.segments.push_back(seg);
        for (std::size_t s = 0; s < tr.steps(); ++s, ++r) {
            auto row = ds.m.row(r);
            for (std::size_t i = 0; i < n; ++i) row[i] = tr.temperatures(s, i);
            for (std::size_t i = 0; i < n; ++i) row[n + i] = setpoint(ensemble, i);
            row[2 * n] = eta;
            row[2 * n + 1] = cap;
            row[2 * n + 2] = tr.aggregate[s];
        }
    }
    return ds;
}

// ---------------------------------------------------------------------------
// VBDS: magic "VBDS", u16 version, u64 rows, u64 cols, row-major f64, all
// little-endian.

namespace detail {

template <class T>
void write_raw(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
void read_raw(std::ifstream& in, T& v, const std::string& path) {
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) throw DataError("truncated file: " + path);
}

}  // namespace detail

inline void save_vbds(const std::string& path, const Matrix& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    out.write("VBDS", 4);
    detail::write_raw(out, std::uint16_t{1});
    detail::write_raw(out, std::uint64_t{m.rows});
    detail::write_raw(out, std::uint64_t{m.cols});
    out.write(reinterpret_cast<const char*>(m.v.data()),
              std::streamsize(m.v.size() * sizeof(double)));
    if (!out) throw DataError("short write: " + path);
}

inline Matrix load_vbds(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    char magic[4] = {};
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "VBDS", 4) != 0)
        throw DataError("not a VBDS file: " + path);
    std::uint16_t version = 0;
    detail::read_raw(in, version, path);
    if (version != 1) throw DataError("unsupported VBDS version in " + path);
    std::uint64_t rows = 0, cols = 0;
    detail::read_raw(in, rows, path);
    detail::read_raw(in, cols, path);
    Matrix m{std::size_t(rows), std::size_t(cols)};
    in.read(reinterpret_cast<char*>(m.v.data()), std::streamsize(m.v.size() * sizeof(double)));
    if (!in) throw DataError("truncated VBDS payload: " + path);
    return m;
}

inline void save_csv(const std::string& path, const Matrix& m,
                     const std::vector<std::string>& header = {}) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out.precision(17);
    if (!header.empty()) {
        for (std::size_t c = 0; c < header.size(); ++c)
            out << (c ? "," : "") << header[c];
        out << "\n";
    }
    for (std::size_t r = 0; r < m.rows; ++r) {
        for (std::size_t c = 0; c < m.cols; ++c) out << (c ? "," : "") << m(r, c);
        out << "\n";
    }
}

inline Matrix load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    bool header_allowed = true;
    while (std::getline(in, line)) {
        ++lineno;
        while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> row;
        std::size_t pos = 0;
        bool bad = false;
        while (pos <= line.size()) {
            std::size_t comma = line.find(',', pos);
            if (comma == std::string::npos) comma = line.size();
            const std::string cell = line.substr(pos, comma - pos);
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str()) {
                bad = true;
                break;
            }
            row.push_back(v);
            pos = comma + 1;
        }
        if (bad) {
            if (header_allowed && rows.empty()) {
                header_allowed = false;
                continue;
            }
            throw DataError("csv parse error at line " + std::to_string(lineno) + " of " + path);
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw DataError("ragged csv row at line " + std::to_string(lineno) + " of " + path);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw DataError("no rows in " + path);
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        std::copy(rows[r].begin(), rows[r].end(), m.row(r).begin());
    return m;
}

}  // namespace vbid
