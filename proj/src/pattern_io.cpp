#include "ppspec/pattern_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ppspec {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<double> parse_numbers(const std::string& text, char sep) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, sep)) {
        if (tok.empty()) continue;
        std::size_t pos = 0;
        const double v = std::stod(tok, &pos);
        out.push_back(v);
    }
    return out;
}

bool header_value(const std::string& line, const char* key, std::string& out) {
    const std::string prefix = std::string("# ") + key + ":";
    if (line.rfind(prefix, 0) != 0) return false;
    out = line.substr(prefix.size());
    return true;
}

Window window_from_bounds(int dim, const std::vector<double>& bounds) {
    if (bounds.size() != static_cast<std::size_t>(2 * dim))
        throw std::invalid_argument("window header needs 2*dim bounds");
    std::vector<double> sides;
    for (int i = 0; i < dim; ++i) {
        const double lo = bounds[static_cast<std::size_t>(2 * i)];
        const double hi = bounds[static_cast<std::size_t>(2 * i + 1)];
        if (lo != -hi || !(hi > 0.0))
            throw std::invalid_argument("window must be origin-centered with positive sides");
        sides.push_back(hi - lo);
    }
    return Window(dim, std::move(sides));
}

void write_window_header(std::ofstream& out, const Window& w) {
    out << "# dim: " << w.dim() << "\n# window:";
    for (int i = 0; i < w.dim(); ++i) {
        out << ' ' << fmt17(-0.5 * w.side(i)) << ' ' << fmt17(0.5 * w.side(i));
    }
    out << "\n";
}

}  // namespace

PointPattern read_pattern(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open pattern file: " + path);
    int dim = 0;
    std::vector<double> bounds;
    std::vector<double> coords;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        if (line.back() == '\r') line.pop_back();
        std::string val;
        if (header_value(line, "dim", val)) {
            dim = std::stoi(val);
            continue;
        }
        if (header_value(line, "window", val)) {
            bounds = parse_numbers(val, ' ');
            continue;
        }
        if (line[0] == '#') continue;
        const auto nums = parse_numbers(line, ',');
        if (dim == 0) throw std::invalid_argument("pattern file missing '# dim:' header");
        if (nums.size() != static_cast<std::size_t>(dim))
            throw std::invalid_argument("row " + std::to_string(row) + ": expected " +
                                        std::to_string(dim) + " coordinates");
        coords.insert(coords.end(), nums.begin(), nums.end());
        ++row;
    }
    if (dim == 0) throw std::invalid_argument("pattern file missing '# dim:' header");
    Window window = window_from_bounds(dim, bounds);
    return PointPattern(std::move(window), std::move(coords));
}

void write_pattern(const PointPattern& pattern, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write pattern file: " + path);
    write_window_header(out, pattern.window());
    const int d = pattern.dim();
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        const double* p = pattern.point(i);
        for (int j = 0; j < d; ++j) out << (j ? "," : "") << fmt17(p[j]);
        out << "\n";
    }
}

PeriodogramField read_field(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open field file: " + path);
    int dim = 0;
    double omega = 0.0, lambda_hat = 0.0;
    std::vector<double> bounds, domain_vals;
    std::string taper_id;
    std::vector<int> flat_index;
    std::vector<double> values;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        if (line.back() == '\r') line.pop_back();
        std::string val;
        if (header_value(line, "dim", val)) {
            dim = std::stoi(val);
            continue;
        }
        if (header_value(line, "omega", val)) {
            omega = std::stod(val);
            continue;
        }
        if (header_value(line, "domain", val)) {
            domain_vals = parse_numbers(val, ' ');
            continue;
        }
        if (header_value(line, "window", val)) {
            bounds = parse_numbers(val, ' ');
            continue;
        }
        if (header_value(line, "taper", val)) {
            taper_id = val.substr(val.find_first_not_of(' '));
            continue;
        }
        if (header_value(line, "lambda_hat", val)) {
            lambda_hat = std::stod(val);
            continue;
        }
        if (line[0] == '#' || std::isalpha(static_cast<unsigned char>(line[0]))) continue;
        const auto nums = parse_numbers(line, ',');
        if (dim == 0) throw std::invalid_argument("field file missing '# dim:' header");
        if (nums.size() != static_cast<std::size_t>(2 * dim + 1))
            throw std::invalid_argument("field row needs k1..kd, omega1..omegad, value");
        for (int j = 0; j < dim; ++j)
            flat_index.push_back(static_cast<int>(std::lround(nums[static_cast<std::size_t>(j)])));
        values.push_back(nums.back());
    }
    if (dim == 0 || omega <= 0.0 || domain_vals.size() != 2)
        throw std::invalid_argument("field file missing required headers");
    FrequencyGrid grid(dim, omega, DomainSpec(domain_vals[0], domain_vals[1]),
                       std::move(flat_index));
    Window window = window_from_bounds(dim, bounds);
    return PeriodogramField{std::move(grid), std::move(values), taper_id, std::move(window),
                            lambda_hat};
}

void write_field(const PeriodogramField& field, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write field file: " + path);
    const int d = field.grid.dim();
    write_window_header(out, field.window);
    out << "# omega: " << fmt17(field.grid.spacing()) << "\n";
    out << "# domain: " << fmt17(field.grid.domain().d0) << ' ' << fmt17(field.grid.domain().d1)
        << "\n";
    out << "# taper: " << field.taper_id << "\n";
    out << "# lambda_hat: " << fmt17(field.lambda_hat) << "\n";
    for (int j = 0; j < d; ++j) out << "k" << (j + 1) << ",";
    for (int j = 0; j < d; ++j) out << "omega" << (j + 1) << ",";
    out << "value\n";
    for (std::size_t i = 0; i < field.grid.size(); ++i) {
        const int* k = field.grid.index(i);
        const double* w = field.grid.frequency(i);
        for (int j = 0; j < d; ++j) out << k[j] << ",";
        for (int j = 0; j < d; ++j) out << fmt17(w[j]) << ",";
        out << fmt17(field.values[i]) << "\n";
    }
}

}  // namespace ppspec
