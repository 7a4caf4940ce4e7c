#pragma once

#include "ghsnet/bootstrap.hpp"
#include "ghsnet/ecm.hpp"
#include "ghsnet/simulate.hpp"
#include "ghsnet/types.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace ghs {

using Json = nlohmann::json;

/// Raised for unreadable or malformed input files.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// CSV with a header row of variable names and one sample per row.
Dataset read_csv(std::istream& in, DatasetOptions options = {});
Dataset read_csv(const std::filesystem::path& path, DatasetOptions options = {});
void write_csv(std::ostream& out, const Matrix& x, const std::vector<std::string>& names);
void write_csv(const std::filesystem::path& path, const Matrix& x, const std::vector<std::string>& names);

/// {"p": p, "data": [row-major values]}
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

Json true_model_to_json(const TrueModel& model);
TrueModel true_model_from_json(const Json& j);

Json edges_to_json(const std::vector<Edge>& edges, const std::vector<std::string>& names);
Json fit_to_json(const EcmFit& fit, double edge_threshold, const std::vector<std::string>& names);
Json bootstrap_report_to_json(const BootstrapReport& report, const std::vector<std::string>& names);

Json read_json(const std::filesystem::path& path);
/// Pretty-printed with a trailing newline; creates parent directories.
void write_json(const std::filesystem::path& path, const Json& j);

} // namespace ghs
