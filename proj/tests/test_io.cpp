#include "oracles.hpp"

#include "ghsnet/io.hpp"
#include "ghsnet/simulate.hpp"

#include <doctest.h>

#include <filesystem>
#include <random>
#include <sstream>

using namespace ghs;

TEST_CASE("CSV round trip keeps the scatter") {
    std::mt19937_64 rng(4);
    const Matrix x = oracle::random_normal(25, 4, rng) * 3.7;
    std::stringstream buf;
    write_csv(buf, x, {"a", "b,c", "d\"e", "f"});
    const Dataset d = read_csv(buf);
    CHECK(d.names() == std::vector<std::string>{"a", "b,c", "d\"e", "f"});
    const Dataset direct(x);
    CHECK((d.scatter() - direct.scatter()).cwiseAbs().maxCoeff() < 1e-12 * direct.scatter().cwiseAbs().maxCoeff());
    CHECK((d.column_means() - direct.column_means()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("CSV reader reports malformed input") {
    auto read = [](const std::string& text) {
        std::istringstream in(text);
        return read_csv(in);
    };
    CHECK_THROWS_WITH_AS(read("a,b\n1,2\n3\n"), "line 3: expected 2 fields, found 1", FormatError);
    CHECK_THROWS_WITH_AS(read("a,b\n1,2\n3,x\n"), "line 3, column 'b': non-numeric value 'x'", FormatError);
    CHECK_THROWS_WITH_AS(read(""), "CSV input is empty", FormatError);
    CHECK_THROWS_WITH_AS(read("a,b\n"), "CSV input has a header but no data rows", FormatError);
    CHECK_THROWS_WITH_AS(read("a,b\n1,2\n1,3\n"), "column 'a' has zero variance", DomainError);
    CHECK_THROWS_AS(read("\"a,b\n1,2\n"), FormatError);

    const Dataset quoted = read("\"x, 1\",y\r\n1,2\r\n2,5\r\n4,1\r\n");
    CHECK(quoted.names() == std::vector<std::string>{"x, 1", "y"});
    CHECK(quoted.n() == 3);

    CHECK_THROWS_AS(read_csv(std::filesystem::path("/nonexistent/file.csv")), FormatError);
}

TEST_CASE("truth JSON round trip") {
    const TrueModel model = make_true_model(12, {0.1, 0.2}, 9);
    const Json j = true_model_to_json(model);
    const TrueModel back = true_model_from_json(Json::parse(j.dump()));
    CHECK(back.adjacency == model.adjacency);
    CHECK(back.precision.matrix() == model.precision.matrix());
    CHECK(back.partial_range.low == 0.1);
    CHECK(back.partial_range.high == 0.2);
    CHECK(back.seed == 9);
    CHECK(j.at("edges").size() == 12);

    Json bad = j;
    bad["edges"].push_back({3, 3});
    CHECK_THROWS_AS(true_model_from_json(bad), FormatError);
    Json missing = j;
    missing.erase("precision");
    CHECK_THROWS_AS(true_model_from_json(missing), FormatError);
    CHECK_THROWS_AS(matrix_from_json(Json{{"p", 2}, {"data", {1.0, 2.0}}}), FormatError);
}

TEST_CASE("fit JSON has the documented keys in a stable order") {
    const TrueModel model = make_true_model(6, {0.3, 0.4}, 2);
    const Dataset data = sample_gaussian(model, 80, 3);
    const EcmFit fit = fit_single(data, EcmConfig::fixed(1.0));
    const Json j = fit_to_json(fit, 1e-5, data.names());
    for (const char* key : {"theta", "lambda_sq", "tau_sq", "partial_correlations", "edges", "edge_threshold",
                            "sparsity", "iterations", "converged", "objective_trace", "tau_trace", "variables"}) {
        CHECK_MESSAGE(j.contains(key), key);
    }
    CHECK(j.at("iterations").get<int>() == fit.iterations);
    CHECK(j.at("objective_trace").size() == fit.objective_trace.size());
    CHECK(matrix_from_json(j.at("theta")) == fit.theta.matrix());
    CHECK(j.dump() == fit_to_json(fit, 1e-5, data.names()).dump());
    if (!j.at("edges").empty()) CHECK(j.at("edges")[0].contains("names"));
}

TEST_CASE("JSON and CSV files are written with parent directories") {
    const auto dir = std::filesystem::temp_directory_path() / "ghsnet_io_test" / "nested";
    std::filesystem::remove_all(dir.parent_path());
    write_json(dir / "a.json", Json{{"b", 1}, {"a", 2}});
    const Json back = read_json(dir / "a.json");
    CHECK(back.at("b") == 1);
    CHECK(back.dump() == R"({"a":2,"b":1})");
    write_csv(dir / "x.csv", Matrix::Identity(3, 2), {"u", "v"});
    CHECK(read_csv(dir / "x.csv").n() == 3);
    std::filesystem::remove_all(dir.parent_path());
}
