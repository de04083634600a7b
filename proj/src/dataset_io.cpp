#include "kresid/dataset_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace kresid {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

double parse_double(const std::string& text) {
    std::size_t start = 0, end = text.size();
    while (start < end && (text[start] == ' ' || text[start] == '\t')) ++start;
    while (end > start && (text[end - 1] == ' ' || text[end - 1] == '\t' || text[end - 1] == '\r')) --end;
    if (start < end && text[start] == '+') ++start;
    double v = 0.0;
    const auto res = std::from_chars(text.data() + start, text.data() + end, v);
    if (res.ec != std::errc() || res.ptr != text.data() + end || start == end)
        throw Error("not a number: '" + text + "'");
    return v;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string trim(std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
    std::size_t i = 0;
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    return s.substr(i);
}

}  // namespace

void write_dataset(std::ostream& os, const Dataset& data) {
    data.validate();
    std::string line;
    auto header = [&](char prefix, Index count) {
        for (Index c = 0; c < count; ++c) {
            if (!line.empty()) line += ',';
            line += prefix;
            line += '_';
            line += std::to_string(c + 1);
        }
    };
    header('x', data.x.cols());
    header('w', data.w.cols());
    header('y', data.y.cols());
    os << line << '\n';
    for (Index i = 0; i < data.n(); ++i) {
        line.clear();
        for (const Matrix* m : {&data.x, &data.w, &data.y})
            for (Index c = 0; c < m->cols(); ++c) {
                if (!line.empty()) line += ',';
                line += format_double((*m)(i, c));
            }
        os << line << '\n';
    }
}

Dataset read_dataset(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw Error("empty dataset file");
    const auto names = split_csv(trim(line));
    // column -> (block, index)
    std::vector<std::pair<char, int>> layout;
    int counts[3] = {0, 0, 0};
    const std::string blocks = "xwy";
    for (std::size_t c = 0; c < names.size(); ++c) {
        const std::string name = trim(names[c]);
        const auto b = name.empty() ? std::string::npos : blocks.find(name[0]);
        if (b == std::string::npos || name.size() < 3 || name[1] != '_')
            throw Error("header column " + std::to_string(c + 1) + ": unrecognized name '" + name + "'");
        int idx = 0;
        const auto res = std::from_chars(name.data() + 2, name.data() + name.size(), idx);
        if (res.ec != std::errc() || res.ptr != name.data() + name.size() || idx < 1)
            throw Error("header column " + std::to_string(c + 1) + ": bad index in '" + name + "'");
        layout.emplace_back(name[0], idx - 1);
        counts[b] = std::max(counts[b], idx);
    }
    for (std::size_t b = 0; b < 3; ++b) {
        if (b == 1) continue;
        if (counts[b] == 0) throw Error(std::string("missing column ") + blocks[b] + "_1");
    }
    for (std::size_t b = 0; b < 3; ++b)
        for (int idx = 0; idx < counts[b]; ++idx) {
            int seen = 0;
            for (const auto& [blk, j] : layout) seen += (blk == blocks[b] && j == idx);
            if (seen != 1)
                throw Error(std::string("column ") + blocks[b] + "_" + std::to_string(idx + 1) +
                            (seen == 0 ? " is missing" : " appears more than once"));
        }

    std::vector<std::vector<double>> rows;
    std::size_t row_no = 1;
    while (std::getline(is, line)) {
        ++row_no;
        line = trim(line);
        if (line.empty()) continue;
        const auto cells = split_csv(line);
        if (cells.size() != names.size())
            throw Error("row " + std::to_string(row_no) + ": expected " + std::to_string(names.size()) + " fields, found " +
                        std::to_string(cells.size()));
        std::vector<double> vals(cells.size());
        for (std::size_t c = 0; c < cells.size(); ++c) {
            try {
                vals[c] = parse_double(cells[c]);
            } catch (const Error&) {
                throw Error("row " + std::to_string(row_no) + ", column " + trim(names[c]) + ": not a number '" +
                            cells[c] + "'");
            }
        }
        rows.push_back(std::move(vals));
    }
    const auto n = static_cast<Index>(rows.size());
    Dataset d;
    d.x.resize(n, counts[0]);
    d.w.resize(n, counts[1]);
    d.y.resize(n, counts[2]);
    for (Index i = 0; i < n; ++i)
        for (std::size_t c = 0; c < layout.size(); ++c) {
            const auto [blk, j] = layout[c];
            Matrix& m = blk == 'x' ? d.x : blk == 'w' ? d.w : d.y;
            m(i, j) = rows[static_cast<std::size_t>(i)][c];
        }
    if (counts[1] == 0) {
        d.w = d.x;
        for (int c = 0; c < counts[0]; ++c) d.projection.push_back(c);
    }
    d.validate();
    return d;
}

void write_dataset_file(const std::string& path, const Dataset& data) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open '" + path + "' for writing");
    write_dataset(os, data);
}

Dataset read_dataset_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open '" + path + "'");
    return read_dataset(is);
}

}  // namespace kresid
