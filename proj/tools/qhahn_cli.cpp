// qhahn_cli.cpp — command-line front end
//
// Usage: qhahn <config.json> [--output PATH] [--format csv|json|table] [--quiet]
// Exit codes: 0 success, 2 config error, 3 math-domain error, 4 non-convergence.
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "qhahn/cli/run.hpp"

int main(int argc, char** argv) {
    CLI::App app{"q-Hahn multiboson integrator"};
    std::string config_path;
    std::string output;
    std::string format;
    bool quiet = false;
    app.add_option("config", config_path, "path to the JSON run configuration")->required();
    app.add_option("--output", output, "write the artifact to this path instead of stdout");
    app.add_option("--format", format, "output format: csv, json, or table");
    app.add_flag("--quiet", quiet, "suppress secondary output");
    CLI11_PARSE(app, argc, argv);

    std::ifstream in(config_path);
    if (!in) {
        std::cerr << R"({"error":{"type":"config","message":"cannot open config file )"
                  << config_path << R"("}})" << "\n";
        return qhahn::cli::kExitConfig;
    }
    std::stringstream buf;
    buf << in.rdbuf();

    try {
        qhahn::cli::RunConfig cfg = qhahn::cli::parse_config(buf.str());
        if (!output.empty()) cfg.options.output = output;
        if (!format.empty()) cfg.options.format = qhahn::cli::format_from_string(format);
        cfg.options.quiet = cfg.options.quiet || quiet;
        return qhahn::cli::run(cfg, std::cout, std::cerr);
    } catch (const qhahn::cli::ConfigError& e) {
        std::cerr << R"({"error":{"type":"config","message":")" << e.what() << R"("}})" << "\n";
        return qhahn::cli::kExitConfig;
    }
}
