#include "ghsnet/io.hpp"

#include "ghsnet/model.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace ghs {

namespace {

std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (std::size_t k = 0; k < line.size(); ++k) {
        const char c = line[k];
        if (quoted) {
            if (c == '"' && k + 1 < line.size() && line[k + 1] == '"') {
                cell += '"';
                ++k;
            } else if (c == '"') {
                quoted = false;
            } else {
                cell += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            cells.push_back(std::move(cell));
            cell.clear();
        } else {
            cell += c;
        }
    }
    if (quoted) throw FormatError("line " + std::to_string(line_no) + ": unterminated quote");
    cells.push_back(std::move(cell));
    return cells;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

std::string quote_if_needed(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

} // namespace

Dataset read_csv(std::istream& in, DatasetOptions options) {
    std::string line;
    std::size_t line_no = 0;
    auto next_line = [&] {
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!trim(line).empty()) return true;
        }
        return false;
    };
    if (!next_line()) throw FormatError("CSV input is empty");
    std::vector<std::string> names = split_csv_line(line, line_no);
    for (auto& n : names) n = trim(n);

    std::vector<std::vector<double>> rows;
    while (next_line()) {
        const auto cells = split_csv_line(line, line_no);
        if (cells.size() != names.size()) {
            throw FormatError("line " + std::to_string(line_no) + ": expected " + std::to_string(names.size()) +
                              " fields, found " + std::to_string(cells.size()));
        }
        std::vector<double> row(cells.size());
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const std::string cell = trim(cells[c]);
            const char* first = cell.data();
            const char* last = cell.data() + cell.size();
            auto [ptr, ec] = std::from_chars(first, last, row[c]);
            if (cell.empty() || ec != std::errc() || ptr != last || !std::isfinite(row[c])) {
                throw FormatError("line " + std::to_string(line_no) + ", column '" + names[c] +
                                  "': non-numeric value '" + cell + "'");
            }
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw FormatError("CSV input has a header but no data rows");

    Matrix x(static_cast<Index>(rows.size()), static_cast<Index>(names.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < names.size(); ++c) x(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
    options.names = std::move(names);
    return Dataset(std::move(x), std::move(options));
}

Dataset read_csv(const std::filesystem::path& path, DatasetOptions options) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open '" + path.string() + "'");
    try {
        return read_csv(in, std::move(options));
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void write_csv(std::ostream& out, const Matrix& x, const std::vector<std::string>& names) {
    if (static_cast<Index>(names.size()) != x.cols()) throw ContractError("write_csv: one name per column needed");
    for (std::size_t c = 0; c < names.size(); ++c) out << (c ? "," : "") << quote_if_needed(names[c]);
    out << '\n';
    char buf[32];
    for (Index r = 0; r < x.rows(); ++r) {
        for (Index c = 0; c < x.cols(); ++c) {
            auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x(r, c));
            out << (c ? "," : "") << std::string_view(buf, static_cast<std::size_t>(ptr - buf));
        }
        out << '\n';
    }
}

void write_csv(const std::filesystem::path& path, const Matrix& x, const std::vector<std::string>& names) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write '" + path.string() + "'");
    write_csv(out, x, names);
    if (!out) throw FormatError("write failed for '" + path.string() + "'");
}

Json matrix_to_json(const Matrix& m) {
    Json data = Json::array();
    for (Index r = 0; r < m.rows(); ++r)
        for (Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
    return Json{{"p", m.rows()}, {"data", std::move(data)}};
}

Matrix matrix_from_json(const Json& j) {
    const Index p = j.at("p").get<Index>();
    const auto& data = j.at("data");
    if (p < 1 || static_cast<Index>(data.size()) != p * p) throw FormatError("matrix JSON: data must hold p*p values");
    Matrix m(p, p);
    for (Index r = 0; r < p; ++r)
        for (Index c = 0; c < p; ++c) m(r, c) = data[static_cast<std::size_t>(r * p + c)].get<double>();
    return m;
}

Json true_model_to_json(const TrueModel& model) {
    Json edges = Json::array();
    for (const Edge& e : edge_list(model.adjacency)) edges.push_back({e.i, e.j});
    return Json{{"p", model.p()},
                {"edges", std::move(edges)},
                {"precision", matrix_to_json(model.precision.matrix())},
                {"partial_range", {model.partial_range.low, model.partial_range.high}},
                {"seed", model.seed}};
}

TrueModel true_model_from_json(const Json& j) {
    try {
        const Index p = j.at("p").get<Index>();
        BoolMatrix adj = BoolMatrix::Constant(p, p, false);
        for (const auto& e : j.at("edges")) {
            const Index a = e.at(0).get<Index>();
            const Index b = e.at(1).get<Index>();
            if (a < 0 || b < 0 || a >= p || b >= p || a == b) throw FormatError("truth JSON: invalid edge");
            adj(a, b) = adj(b, a) = true;
        }
        Matrix theta = matrix_from_json(j.at("precision"));
        if (theta.rows() != p) throw FormatError("truth JSON: precision has the wrong size");
        const auto& range = j.at("partial_range");
        return TrueModel{std::move(adj), PrecisionMatrix(std::move(theta)),
                         PartialRange{range.at(0).get<double>(), range.at(1).get<double>()},
                         j.value("seed", std::uint64_t{0})};
    } catch (const Json::exception& e) {
        throw FormatError(std::string("truth JSON: ") + e.what());
    }
}

Json edges_to_json(const std::vector<Edge>& edges, const std::vector<std::string>& names) {
    Json out = Json::array();
    for (const Edge& e : edges) {
        Json item{{"i", e.i}, {"j", e.j}};
        if (!names.empty()) item["names"] = {names[static_cast<std::size_t>(e.i)], names[static_cast<std::size_t>(e.j)]};
        out.push_back(std::move(item));
    }
    return out;
}

Json fit_to_json(const EcmFit& fit, double edge_threshold, const std::vector<std::string>& names) {
    const GraphEstimate g = extract_graph(fit.theta, edge_threshold);
    return Json{{"theta", matrix_to_json(fit.theta.matrix())},
                {"lambda_sq", matrix_to_json(fit.lambda_sq.matrix())},
                {"tau_sq", fit.tau_sq.value()},
                {"partial_correlations", matrix_to_json(g.partial_correlations)},
                {"edges", edges_to_json(g.edges(), names)},
                {"edge_threshold", edge_threshold},
                {"sparsity", g.sparsity},
                {"iterations", fit.iterations},
                {"converged", fit.converged},
                {"objective_trace", fit.objective_trace},
                {"tau_trace", fit.tau_trace},
                {"variables", names}};
}

Json bootstrap_report_to_json(const BootstrapReport& report, const std::vector<std::string>& names) {
    Json edges = Json::array();
    for (const EdgeCheck& e : report.per_edge) {
        Json item{{"i", e.i},
                  {"j", e.j},
                  {"joint_scaled_estimate", e.joint_scaled},
                  {"percentile", e.percentile},
                  {"exceeds", e.exceeds}};
        if (!names.empty()) item["names"] = {names[static_cast<std::size_t>(e.i)], names[static_cast<std::size_t>(e.j)]};
        edges.push_back(std::move(item));
    }
    return Json{{"per_edge", std::move(edges)},
                {"exceed_fraction", report.exceed_fraction},
                {"samples", report.samples},
                {"failed", report.failed},
                {"level", report.level}};
}

Json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open '" + path.string() + "'");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void write_json(const std::filesystem::path& path, const Json& j) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write '" + path.string() + "'");
    out << j.dump(2) << '\n';
    if (!out) throw FormatError("write failed for '" + path.string() + "'");
}

} // namespace ghs
