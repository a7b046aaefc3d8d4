#include "qhahn/cli/config.hpp"

#include <cctype>
#include <cmath>

#include <json.hpp>

namespace qhahn::cli {

using nlohmann::json;

// ----------------------------- expression grammar ---------------------------

struct Expression::Node {
    enum class Kind { number, variable, add, sub, mul, div, pow, neg } kind;
    double value = 0.0;
    int var = 0;
    long exponent = 0;
    std::shared_ptr<const Node> lhs, rhs;
};

namespace {

class ExprParser {
public:
    ExprParser(const std::string& text, int nvars) : text_(text), nvars_(nvars) {}

    std::shared_ptr<const Expression::Node> parse() {
        auto node = expr();
        skip_ws();
        if (pos_ != text_.size())
            throw ConfigError("expression: unexpected trailing input at position " +
                              std::to_string(pos_) + " in '" + text_ + "'");
        return node;
    }

private:
    using NodePtr = std::shared_ptr<const Expression::Node>;
    using Kind = Expression::Node::Kind;

    NodePtr make(Kind k, NodePtr l = nullptr, NodePtr r = nullptr) {
        auto n = std::make_shared<Expression::Node>();
        n->kind = k;
        n->lhs = std::move(l);
        n->rhs = std::move(r);
        return n;
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool consume(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            if (consume('+')) lhs = make(Kind::add, lhs, term());
            else if (consume('-')) lhs = make(Kind::sub, lhs, term());
            else return lhs;
        }
    }

    NodePtr term() {
        NodePtr lhs = factor();
        for (;;) {
            if (consume('*')) lhs = make(Kind::mul, lhs, factor());
            else if (consume('/')) lhs = make(Kind::div, lhs, factor());
            else return lhs;
        }
    }

    NodePtr factor() {
        if (consume('-')) {
            auto n = make(Kind::neg, factor());
            return n;
        }
        if (consume('+')) return factor();
        NodePtr base = primary();
        if (consume('^')) {
            skip_ws();
            bool negexp = consume('-');
            skip_ws();
            if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
                throw ConfigError("expression: '^' requires an integer exponent in '" + text_ + "'");
            long e = 0;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                e = e * 10 + (text_[pos_++] - '0');
            auto n = make(Kind::pow, base);
            const_cast<Expression::Node*>(n.get())->exponent = negexp ? -e : e;
            return n;
        }
        return base;
    }

    NodePtr primary() {
        skip_ws();
        if (consume('(')) {
            NodePtr inner = expr();
            if (!consume(')'))
                throw ConfigError("expression: missing ')' in '" + text_ + "'");
            return inner;
        }
        if (pos_ < text_.size() && text_[pos_] == 'n') {
            std::size_t p = pos_ + 1;
            if (p >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[p])))
                throw ConfigError("expression: variable must be n<digit> in '" + text_ + "'");
            long idx = 0;
            while (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p])))
                idx = idx * 10 + (text_[p++] - '0');
            if (idx >= nvars_)
                throw ConfigError("expression: variable n" + std::to_string(idx) +
                                  " out of range (model has " + std::to_string(nvars_) + " modes)");
            pos_ = p;
            auto n = make(Kind::variable);
            const_cast<Expression::Node*>(n.get())->var = static_cast<int>(idx);
            return n;
        }
        if (pos_ < text_.size() &&
            (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
            std::size_t end = pos_;
            while (end < text_.size() &&
                   (std::isdigit(static_cast<unsigned char>(text_[end])) || text_[end] == '.' ||
                    text_[end] == 'e' || text_[end] == 'E' ||
                    ((text_[end] == '+' || text_[end] == '-') && end > pos_ &&
                     (text_[end - 1] == 'e' || text_[end - 1] == 'E'))))
                ++end;
            try {
                auto n = make(Kind::number);
                const_cast<Expression::Node*>(n.get())->value =
                    std::stod(text_.substr(pos_, end - pos_));
                pos_ = end;
                return n;
            } catch (const std::exception&) {
                throw ConfigError("expression: bad numeric literal in '" + text_ + "'");
            }
        }
        throw ConfigError("expression: unexpected character at position " + std::to_string(pos_) +
                          " in '" + text_ + "'");
    }

    const std::string& text_;
    int nvars_;
    std::size_t pos_ = 0;
};

double eval_node(const Expression::Node& n, std::span<const double> vars) {
    using Kind = Expression::Node::Kind;
    switch (n.kind) {
        case Kind::number: return n.value;
        case Kind::variable: return vars[static_cast<std::size_t>(n.var)];
        case Kind::add: return eval_node(*n.lhs, vars) + eval_node(*n.rhs, vars);
        case Kind::sub: return eval_node(*n.lhs, vars) - eval_node(*n.rhs, vars);
        case Kind::mul: return eval_node(*n.lhs, vars) * eval_node(*n.rhs, vars);
        case Kind::div: return eval_node(*n.lhs, vars) / eval_node(*n.rhs, vars);
        case Kind::neg: return -eval_node(*n.lhs, vars);
        case Kind::pow: {
            const double base = eval_node(*n.lhs, vars);
            return std::pow(base, static_cast<double>(n.exponent));
        }
    }
    return 0.0;
}

} // namespace

Expression Expression::parse(const std::string& text, int nvars) {
    Expression e;
    e.text_ = text;
    e.root_ = ExprParser(text, nvars).parse();
    return e;
}

double Expression::operator()(std::span<const double> vars) const {
    if (!root_) throw ConfigError("expression: evaluating an empty expression");
    return eval_node(*root_, vars);
}

// --------------------------------- schema -----------------------------------

Command command_from_string(const std::string& s) {
    if (s == "classify") return Command::classify;
    if (s == "weight") return Command::weight;
    if (s == "poly") return Command::poly;
    if (s == "moments") return Command::moments;
    if (s == "reduce") return Command::reduce;
    if (s == "spectrum") return Command::spectrum;
    if (s == "amplitude") return Command::amplitude;
    if (s == "verify") return Command::verify;
    throw ConfigError("unknown command '" + s + "'");
}

std::string_view to_string(Command c) {
    switch (c) {
        case Command::classify: return "classify";
        case Command::weight: return "weight";
        case Command::poly: return "poly";
        case Command::moments: return "moments";
        case Command::reduce: return "reduce";
        case Command::spectrum: return "spectrum";
        case Command::amplitude: return "amplitude";
        case Command::verify: return "verify";
    }
    return "?";
}

OutputFormat format_from_string(const std::string& s) {
    if (s == "csv") return OutputFormat::csv;
    if (s == "json") return OutputFormat::json;
    if (s == "table") return OutputFormat::table;
    throw ConfigError("unknown format '" + s + "' (expected csv, json, or table)");
}

multiboson::MultibosonModel multiboson_from(const ModelConfig& mc) {
    multiboson::MultibosonModel m;
    m.k = mc.k;
    const int n = static_cast<int>(mc.k.size());
    m.alpha.resize(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            m.alpha(i, j) = mc.alpha[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    const Expression g0 = mc.g0;
    const Expression h0 = mc.h0;
    m.g0 = [g0](std::span<const double> occ) { return g0(occ); };
    m.h0 = [h0](std::span<const double> lam) { return h0(lam); };
    return m;
}

multiboson::MultibosonModel ModelConfig::build() const { return multiboson_from(*this); }

namespace {

const json& require(const json& j, const char* field, const char* ctx) {
    auto it = j.find(field);
    if (it == j.end())
        throw ConfigError(std::string(ctx) + ": missing required field '" + field + "'");
    return *it;
}

double require_number(const json& j, const char* field, const char* ctx) {
    const json& v = require(j, field, ctx);
    if (!v.is_number())
        throw ConfigError(std::string(ctx) + ": field '" + field + "' must be a number");
    return v.get<double>();
}

} // namespace

RunConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config: top level must be a JSON object");

    const std::string cmd = require(doc, "command", "config").get<std::string>();
    const double qv = require_number(doc, "q", "config");
    if (!(qv > 0.0 && qv < 1.0))
        throw ConfigError("config: q must satisfy 0 < q < 1, got " + std::to_string(qv));

    RunConfig cfg{command_from_string(cmd), qcalc::QParam(qv), std::nullopt, std::nullopt, {}};

    const bool has_pearson = doc.contains("pearson");
    const bool has_model = doc.contains("model");
    if (has_pearson && has_model)
        throw ConfigError("config: give exactly one of 'pearson' or 'model'");
    if (!has_pearson && !has_model)
        throw ConfigError("config: one of 'pearson' or 'model' is required");

    if (has_pearson) {
        const json& p = doc["pearson"];
        if (!p.is_object()) throw ConfigError("config.pearson: must be an object");
        cfg.pearson_data = pearson::PearsonData{
            require_number(p, "a1", "config.pearson"), require_number(p, "a0", "config.pearson"),
            require_number(p, "b2", "config.pearson"), require_number(p, "b1", "config.pearson"),
            require_number(p, "b0", "config.pearson"), cfg.q};
    }
    if (has_model) {
        const json& mj = doc["model"];
        if (!mj.is_object()) throw ConfigError("config.model: must be an object");
        ModelConfig mc;
        const json& kj = require(mj, "k", "config.model");
        if (!kj.is_array() || kj.empty())
            throw ConfigError("config.model: 'k' must be a nonempty integer array");
        for (const auto& v : kj) {
            if (!v.is_number_integer())
                throw ConfigError("config.model: entries of 'k' must be integers");
            mc.k.push_back(v.get<long>());
        }
        const int nmodes = static_cast<int>(mc.k.size());
        const json& aj = require(mj, "alpha", "config.model");
        if (!aj.is_array() || static_cast<int>(aj.size()) != nmodes)
            throw ConfigError("config.model: 'alpha' must be an (N+1)x(N+1) array");
        for (const auto& row : aj) {
            if (!row.is_array() || static_cast<int>(row.size()) != nmodes)
                throw ConfigError("config.model: 'alpha' must be an (N+1)x(N+1) array");
            std::vector<double> r;
            for (const auto& v : row) {
                if (!v.is_number()) throw ConfigError("config.model: alpha entries must be numbers");
                r.push_back(v.get<double>());
            }
            mc.alpha.push_back(std::move(r));
        }
        mc.g0 = Expression::parse(require(mj, "g0", "config.model").get<std::string>(), nmodes);
        mc.h0 = Expression::parse(require(mj, "H0", "config.model").get<std::string>(), nmodes);
        if (mj.contains("lambdas")) {
            for (const auto& v : mj["lambdas"]) mc.lambdas.push_back(v.get<double>());
        }
        if (static_cast<int>(mc.lambdas.size()) != nmodes - 1)
            throw ConfigError("config.model: 'lambdas' must list lambda_1..lambda_N (" +
                              std::to_string(nmodes - 1) + " values)");
        mc.l = mj.value("l", 0L);
        cfg.model = std::move(mc);
    }

    if (doc.contains("options")) {
        const json& oj = doc["options"];
        if (!oj.is_object()) throw ConfigError("config.options: must be an object");
        Options& o = cfg.options;
        o.n_max = oj.value("N_max", o.n_max);
        o.M = oj.value("M", o.M);
        o.depth = oj.value("depth", o.depth);
        o.tol = oj.value("tol", o.tol);
        o.t_max = oj.value("t_max", o.t_max);
        o.t_step = oj.value("t_step", o.t_step);
        o.output = oj.value("output", o.output);
        if (oj.contains("format")) o.format = format_from_string(oj["format"].get<std::string>());
        if (!(o.tol > 0.0)) throw ConfigError("config.options: tol must be positive");
        if (o.n_max < 0 || o.M < 1 || o.depth < 1)
            throw ConfigError("config.options: N_max >= 0, M >= 1, depth >= 1 required");
        if (!(o.t_step > 0.0) || o.t_max < 0.0)
            throw ConfigError("config.options: need t_step > 0 and t_max >= 0");
    }

    switch (cfg.command) {
        case Command::classify:
        case Command::weight:
        case Command::poly:
        case Command::moments:
            if (!cfg.pearson_data)
                throw ConfigError("config: command '" + cmd + "' needs a 'pearson' block");
            break;
        case Command::reduce:
            if (!cfg.model)
                throw ConfigError("config: command 'reduce' needs a 'model' block");
            break;
        case Command::spectrum:
        case Command::amplitude:
        case Command::verify:
            break; // either block works
    }
    return cfg;
}

} // namespace qhahn::cli
