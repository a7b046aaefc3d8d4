// config.hpp — run configuration: JSON schema and the g0/H0 expression grammar
#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qhahn/multiboson.hpp"
#include "qhahn/pearson.hpp"

namespace qhahn::cli {

// Schema or grammar violations; CLI maps these to exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Arithmetic over variables n0..nN: +, -, *, /, integer powers (^),
// numeric literals, parentheses. No transcendental functions: the model
// class only needs rational data and this keeps reduce() analyzable.
class Expression {
public:
    static Expression parse(const std::string& text, int nvars);

    double operator()(std::span<const double> vars) const;
    const std::string& text() const { return text_; }

    struct Node;

private:
    std::string text_;
    std::shared_ptr<const Node> root_;
};

enum class Command { classify, weight, poly, moments, reduce, spectrum, amplitude, verify };
enum class OutputFormat { csv, json, table };

Command command_from_string(const std::string& s);
std::string_view to_string(Command c);
OutputFormat format_from_string(const std::string& s);

struct ModelConfig {
    std::vector<long> k;
    std::vector<std::vector<double>> alpha;
    Expression g0, h0;
    std::vector<double> lambdas;
    long l = 0;

    multiboson::MultibosonModel build() const;
};

struct Options {
    int n_max = 10;       // polynomial / moment index bound
    int M = 40;           // Jacobi truncation size
    int depth = 50;       // Jackson grid depth for weight output
    double tol = 1e-12;   // series / integration tail tolerance
    double t_max = 5.0;   // amplitude time grid
    double t_step = 0.5;
    std::string output;   // empty = stdout
    OutputFormat format = OutputFormat::csv;
    bool quiet = false;
};

struct RunConfig {
    Command command = Command::verify;
    qcalc::QParam q;
    std::optional<pearson::PearsonData> pearson_data;
    std::optional<ModelConfig> model;
    Options options;
};

// Parses and validates the JSON config document; throws ConfigError with
// field diagnostics on schema violations.
RunConfig parse_config(const std::string& text);

} // namespace qhahn::cli
