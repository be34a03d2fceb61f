#include "abcage/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "abcage/errors.hpp"

namespace abcage {

std::string format_double(double v) {
    char buffer[64];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), v);
    return std::string(buffer, ptr);
}

void write_csv(std::ostream& out, const ResultTable& table) {
    for (const auto& comment : table.comments) out << "# " << comment << "\n";
    const bool labelled = !table.row_labels.empty();
    if (labelled) out << "label,";
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c) out << ",";
        out << table.columns[c];
    }
    out << "\n";
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        if (labelled) out << table.row_labels.at(r) << ",";
        for (std::size_t c = 0; c < table.rows[r].size(); ++c) {
            if (c) out << ",";
            out << format_double(table.rows[r][c]);
        }
        out << "\n";
    }
}

void write_csv(const std::string& path, const ResultTable& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    write_csv(out, table);
}

std::string csv_text(const ResultTable& table) {
    std::ostringstream out;
    write_csv(out, table);
    return out.str();
}

ResultTable dataset_table(const SidebandDataset& data) {
    ResultTable table;
    table.columns = {"time_ms", "bright_probability", "shots"};
    for (std::size_t i = 0; i < data.times.size(); ++i)
        table.rows.push_back({data.times[i], data.bright_probability[i], double(data.shots)});
    return table;
}

ResultTable fit_table(const PhononFit& fit) {
    ResultTable table;
    table.comments.push_back("residual_norm: " + format_double(fit.residual_norm));
    table.comments.push_back("condition_number: " + format_double(fit.condition_number));
    table.comments.push_back(std::string("conditioning_warning: ") +
                             (fit.conditioning_warning ? "1" : "0"));
    table.columns = {"n", "p", "uncertainty", "one_sided"};
    for (std::size_t n = 0; n < fit.distribution.p.size(); ++n) {
        table.rows.push_back({double(n), fit.distribution.p[n], fit.uncertainty[n],
                              fit.one_sided[n] ? 1.0 : 0.0});
    }
    return table;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    return fields;
}

double parse_double(const std::string& s, const std::string& path, std::size_t line_no) {
    try {
        return std::stod(s);
    } catch (const std::exception&) {
        throw ConfigError(path + ":" + std::to_string(line_no) + ": not a number: '" + s + "'");
    }
}

} // namespace

SidebandDataset read_sideband_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open dataset '" + path + "'");

    SidebandDataset data;
    std::string line;
    std::size_t line_no = 0;
    int time_col = -1, prob_col = -1, shots_col = -1;
    bool have_shots = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const auto fields = split_csv_line(line);
        if (time_col < 0) {
            for (std::size_t c = 0; c < fields.size(); ++c) {
                if (fields[c] == "time_ms") time_col = static_cast<int>(c);
                if (fields[c] == "bright_probability") prob_col = static_cast<int>(c);
                if (fields[c] == "shots") shots_col = static_cast<int>(c);
            }
            if (time_col < 0 || prob_col < 0 || shots_col < 0)
                throw ConfigError(path + ":" + std::to_string(line_no) +
                                  ": header must contain time_ms, bright_probability, shots");
            continue;
        }
        const std::size_t needed = static_cast<std::size_t>(std::max({time_col, prob_col, shots_col})) + 1;
        if (fields.size() < needed)
            throw ConfigError(path + ":" + std::to_string(line_no) + ": too few columns");
        data.times.push_back(parse_double(fields[time_col], path, line_no));
        data.bright_probability.push_back(parse_double(fields[prob_col], path, line_no));
        const int shots = static_cast<int>(std::lround(parse_double(fields[shots_col], path, line_no)));
        if (!have_shots) {
            data.shots = shots;
            have_shots = true;
        } else if (shots != data.shots) {
            throw ConfigError(path + ":" + std::to_string(line_no) + ": shot count must be constant");
        }
    }
    if (data.times.empty()) throw ConfigError(path + ": dataset has no rows");
    data.validate();
    return data;
}

} // namespace abcage
