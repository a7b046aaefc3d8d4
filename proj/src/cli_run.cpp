#include "qhahn/cli/run.hpp"

#include <charconv>
#include <cmath>
#include <complex>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "qhahn/moments.hpp"
#include "qhahn/ops.hpp"
#include "qhahn/spectral.hpp"

namespace qhahn::cli {

using nlohmann::json;

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

void emit_table(const Table& t, OutputFormat fmt, std::ostream& os) {
    switch (fmt) {
        case OutputFormat::csv: {
            for (std::size_t i = 0; i < t.header.size(); ++i)
                os << t.header[i] << (i + 1 < t.header.size() ? "," : "\n");
            for (const auto& row : t.rows)
                for (std::size_t i = 0; i < row.size(); ++i)
                    os << row[i] << (i + 1 < row.size() ? "," : "\n");
            break;
        }
        case OutputFormat::json: {
            json arr = json::array();
            for (const auto& row : t.rows) {
                json obj;
                for (std::size_t i = 0; i < t.header.size() && i < row.size(); ++i) {
                    if (row[i].empty()) {
                        obj[t.header[i]] = nullptr;
                    } else {
                        double v{};
                        const auto r = std::from_chars(row[i].data(), row[i].data() + row[i].size(), v);
                        if (r.ec == std::errc() && r.ptr == row[i].data() + row[i].size())
                            obj[t.header[i]] = v;
                        else
                            obj[t.header[i]] = row[i];
                    }
                }
                arr.push_back(std::move(obj));
            }
            os << arr.dump(2) << "\n";
            break;
        }
        case OutputFormat::table: {
            std::vector<std::size_t> width(t.header.size(), 0);
            for (std::size_t i = 0; i < t.header.size(); ++i) width[i] = t.header[i].size();
            for (const auto& row : t.rows)
                for (std::size_t i = 0; i < row.size() && i < width.size(); ++i)
                    width[i] = std::max(width[i], row[i].size());
            auto line = [&](const std::vector<std::string>& cells) {
                for (std::size_t i = 0; i < cells.size(); ++i)
                    os << std::left << std::setw(static_cast<int>(width[i]) + 2) << cells[i];
                os << "\n";
            };
            line(t.header);
            for (const auto& row : t.rows) line(row);
            break;
        }
    }
}

json weight_spec_json(const pearson::WeightSpec& spec) {
    json j;
    j["case"] = std::string(pearson::to_string(spec.tag));
    json roots = json::array();
    roots.push_back(spec.root_a);
    if (spec.root_b) roots.push_back(*spec.root_b);
    j["roots_B"] = roots;
    if (spec.shifted.count > 0) {
        if (spec.shifted.complex_pair) {
            j["roots_shift"] = {{"re", spec.shifted.re}, {"im", spec.shifted.im}};
        } else if (spec.shifted.count == 1) {
            j["roots_shift"] = {spec.shifted.c};
        } else {
            j["roots_shift"] = {spec.shifted.c, spec.shifted.d};
        }
    }
    if (spec.r) j["r"] = *spec.r;
    j["support"] = {spec.support_lo, spec.support_hi};
    return j;
}

StructuralSeq structural_seq_for(const RunConfig& cfg) {
    if (cfg.pearson_data) return ops::structural_functions(*cfg.pearson_data);
    const auto model = cfg.model->build();
    return multiboson::reduce(model, cfg.model->lambdas, cfg.model->l, cfg.q).seq;
}

// ------------------------------ verify suite --------------------------------

struct CheckResult {
    std::string name;
    double max_dev = 0.0;
    double tol = 0.0;
    bool pass = false;
};

std::vector<CheckResult> verify_pearson(const pearson::PearsonData& data, const Options& opt) {
    std::vector<CheckResult> out;
    auto push = [&out](const std::string& name, double dev, double tol) {
        out.push_back({name, dev, tol, dev <= tol});
    };

    const pearson::WeightSpec spec = pearson::classify(data);

    {
        double worst = 0.0;
        for (const auto& node : pearson::support_grid(spec, data.q, 50)) {
            const double q = data.q.q;
            const double rw = pearson::weight_eval(spec, data, node.omega, 1e-15);
            const double rq = pearson::weight_eval(spec, data, q * node.omega, 1e-15);
            const double scale = (std::abs(rw * data.B(node.omega)) + std::abs(rq * data.B(q * node.omega))) /
                                     ((1.0 - q) * std::abs(node.omega)) +
                                 std::abs(rw * data.A(node.omega));
            const double res = pearson::pearson_residual(data, spec, node.omega);
            worst = std::max(worst, std::abs(res) / std::max(scale, 1e-300));
        }
        push("pearson residual, 50 nodes", worst, 1e-10);
    }

    const int N = std::min(opt.n_max, 8);
    const ops::MonicOps rec = ops::ops_by_recurrence(data, N);
    {
        const ops::MonicOps rod = ops::ops_by_rodrigues(data, N);
        const ops::MonicOps fwd = ops::ops_by_forward(data, N);
        double worst = 0.0;
        for (int n = 0; n <= N; ++n) {
            const double scale = rec.polys[static_cast<std::size_t>(n)].max_abs_coeff();
            for (int c = 0; c <= n; ++c) {
                worst = std::max(worst, std::abs(rod.polys[static_cast<std::size_t>(n)][c] -
                                                 rec.polys[static_cast<std::size_t>(n)][c]) / scale);
                worst = std::max(worst, std::abs(fwd.polys[static_cast<std::size_t>(n)][c] -
                                                 rec.polys[static_cast<std::size_t>(n)][c]) / scale);
            }
        }
        push("route agreement (recurrence/Rodrigues/forward)", worst, 1e-9);
    }
    {
        double worst = 0.0;
        for (int n = 1; n <= N; ++n) {
            const qcalc::Polynomial lhs = ops::hahn_apply(data, rec.polys[static_cast<std::size_t>(n)]);
            const qcalc::Polynomial rhs =
                ops::hahn_eigenvalue(data, n) * rec.polys[static_cast<std::size_t>(n)];
            worst = std::max(worst, (lhs - rhs).max_abs_coeff() /
                                        rec.polys[static_cast<std::size_t>(n)].max_abs_coeff());
        }
        push("Hahn equation residual", worst, 1e-9);
    }
    {
        const auto onb = ops::orthonormalize(rec, spec, 1e-12);
        double worst = 0.0;
        for (int n = 0; n <= N; ++n) {
            for (int m = 0; m <= n; ++m) {
                auto f = [&](double w) {
                    return onb[static_cast<std::size_t>(n)].poly(w) *
                           onb[static_cast<std::size_t>(m)].poly(w) *
                           pearson::weight_eval(spec, data, w, 1e-15);
                };
                const double ip =
                    qcalc::jackson_integral(f, spec.support_lo, spec.support_hi, data.q, 1e-12);
                worst = std::max(worst, std::abs(ip - (n == m ? 1.0 : 0.0)));
            }
        }
        push("orthonormality", worst, 1e-8);
    }
    {
        const double mu0 = moments::moments_direct(spec, data, 0, 1e-13);
        const moments::MomentSeq rec_mu = moments::moments_by_recurrence(data, mu0, 12);
        double worst = 0.0;
        for (int n = 0; n <= 12; ++n) {
            const double direct = moments::moments_direct(spec, data, n, 1e-13);
            worst = std::max(worst, std::abs(direct - rec_mu.mu[static_cast<std::size_t>(n)]) /
                                        std::max(std::abs(mu0), std::abs(direct)));
        }
        push("moment routes (recurrence vs direct)", worst, 1e-8);
    }
    {
        const int M = 16;
        const StructuralSeq seq = ops::structural_functions(data);
        const spectral::DiscreteMeasure meas = spectral::spectrum(spectral::jacobi_matrix(seq, M));
        const double mu0 = moments::moments_direct(spec, data, 0, 1e-13);
        const moments::MomentSeq mus = moments::moments_by_recurrence(data, mu0, 11);
        double worst = 0.0;
        for (int k = 0; k <= 11; ++k) {
            const double want = mus.mu[static_cast<std::size_t>(k)] / mu0;
            worst = std::max(worst, std::abs(meas.moment(k) - want) / std::max(1.0, std::abs(want)));
        }
        push("Gauss quadrature exactness", worst, 1e-8);
    }
    {
        const StructuralSeq seq = ops::structural_functions(data);
        const spectral::DiscreteMeasure meas =
            spectral::spectrum(spectral::jacobi_matrix(seq, std::max(opt.M, 20)));
        const double mu0 = moments::moments_direct(spec, data, 0, 1e-13);
        const moments::MomentSeq mus = moments::moments_by_recurrence(data, mu0, 40);
        double worst = 0.0;
        for (double t = 0.0; t <= 3.0; t += 0.5) {
            std::complex<double> series{0.0, 0.0};
            double fact = 1.0;
            for (int n = 0; n <= 40; ++n) {
                if (n > 0) fact *= n;
                series += std::pow(std::complex<double>(0.0, t), n) *
                          (mus.mu[static_cast<std::size_t>(n)] / mu0) / fact;
            }
            worst = std::max(worst, std::abs(spectral::vacuum_amplitude(meas, t) - series));
        }
        push("amplitude route equivalence", worst, 1e-6);
    }
    return out;
}

std::vector<CheckResult> verify_model(const ModelConfig& mc, const RunConfig& cfg) {
    std::vector<CheckResult> out;
    auto push = [&out](const std::string& name, double dev, double tol) {
        out.push_back({name, dev, tol, dev <= tol});
    };
    const auto model = mc.build();
    multiboson::validate_model(model);

    long maxk = 0;
    for (long ki : model.k) maxk = std::max(maxk, std::abs(ki));
    int cutoff = static_cast<int>(std::max(3L, 2 * maxk + 2));
    while (std::pow(cutoff, model.modes()) > multiboson::kMaxOracleDim && cutoff > 3) --cutoff;
    const multiboson::FockTruncation oracle = multiboson::fock_oracle(model, cutoff);

    {
        const Eigen::MatrixXd comm =
            oracle.Ai(0) * oracle.A() - oracle.A() * oracle.Ai(0) + oracle.A();
        double worst = 0.0;
        for (long n = 0; n < oracle.dim(); ++n)
            if (oracle.interior(n)) worst = std::max(worst, comm.col(n).cwiseAbs().maxCoeff());
        push("[A0,A]+A on interior states", worst, 1e-10);
    }
    {
        double worst = 0.0;
        for (int i = 1; i < model.modes(); ++i) {
            const Eigen::MatrixXd comm = oracle.A() * oracle.Ai(i) - oracle.Ai(i) * oracle.A();
            for (long n = 0; n < oracle.dim(); ++n)
                if (oracle.interior(n)) worst = std::max(worst, comm.col(n).cwiseAbs().maxCoeff());
        }
        push("[A,A_i] on interior states", worst, 1e-10);
    }
    {
        const Eigen::MatrixXd AdA = oracle.Adag() * oracle.A();
        double worst = 0.0;
        for (long n = 0; n < oracle.dim(); ++n) {
            if (!oracle.interior(n)) continue;
            std::vector<long> occ = oracle.occupations(n);
            for (std::size_t i = 0; i < occ.size(); ++i) occ[i] -= model.k[i];
            const double want = multiboson::structural_G(model, occ);
            worst = std::max(worst, std::abs(AdA(n, n) - want));
        }
        push("A*A diagonal vs structural G", worst, 1e-10);
    }
    if (multiboson::dimension_class(model) == multiboson::DimensionClass::infinite) {
        const auto red = multiboson::reduce(model, mc.lambdas, mc.l, cfg.q);
        const Eigen::MatrixXd AdA = oracle.Adag() * oracle.A();
        const Eigen::MatrixXd beta = model.alpha.inverse();
        double worst = 0.0;
        int checked = 0;
        for (int n = 0; n < cutoff; ++n) {
            Eigen::VectorXd lam(model.modes());
            lam[0] = red.lambda0l + n;
            for (int j = 1; j < model.modes(); ++j) lam[j] = mc.lambdas[static_cast<std::size_t>(j) - 1];
            const Eigen::VectorXd occd = beta * lam;
            std::vector<long> occ(static_cast<std::size_t>(model.modes()));
            bool ok = true;
            for (int j = 0; j < model.modes(); ++j) {
                occ[static_cast<std::size_t>(j)] = std::lround(occd[j]);
                ok = ok && std::abs(occd[j] - std::round(occd[j])) < 1e-9;
            }
            const long idx = ok ? oracle.index(occ) : -1;
            if (idx < 0 || !oracle.interior(idx)) continue;
            worst = std::max(worst, std::abs(AdA(idx, idx) - red.seq.R(n)));
            ++checked;
        }
        push("reduce R(q^n) vs oracle diagonal (" + std::to_string(checked) + " states)", worst,
             1e-10);
    }
    return out;
}

int emit(const Table& t, const Options& opt, std::ostream& fallback) {
    if (opt.output.empty()) {
        emit_table(t, opt.format, fallback);
        return kExitOk;
    }
    std::ofstream f(opt.output);
    if (!f) throw ConfigError("cannot open output path '" + opt.output + "'");
    emit_table(t, opt.format, f);
    return kExitOk;
}

int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const Options& opt = cfg.options;
    switch (cfg.command) {
        case Command::classify: {
            const auto spec = pearson::classify(*cfg.pearson_data);
            const std::string text = weight_spec_json(spec).dump(2) + "\n";
            if (opt.output.empty()) {
                out << text;
            } else {
                std::ofstream f(opt.output);
                if (!f) throw ConfigError("cannot open output path '" + opt.output + "'");
                f << text;
            }
            return kExitOk;
        }
        case Command::weight: {
            const auto& data = *cfg.pearson_data;
            const auto spec = pearson::classify(data);
            Table t{{"omega", "rho"}, {}};
            for (const auto& node : pearson::support_grid(spec, data.q, opt.depth))
                t.rows.push_back({format_double(node.omega),
                                  format_double(pearson::weight_eval(spec, data, node.omega, opt.tol))});
            return emit(t, opt, out);
        }
        case Command::poly: {
            const auto& data = *cfg.pearson_data;
            const auto spec = pearson::classify(data);
            const auto ops_ = ops::ops_by_recurrence(data, opt.n_max);
            const auto onb = ops::orthonormalize(ops_, spec, opt.tol);
            Table t;
            t.header = {"n", "norm"};
            for (int c = 0; c <= opt.n_max; ++c) t.header.push_back("c" + std::to_string(c));
            for (int n = 0; n <= opt.n_max; ++n) {
                std::vector<std::string> row{std::to_string(n),
                                             format_double(onb[static_cast<std::size_t>(n)].norm)};
                for (int c = 0; c <= opt.n_max; ++c)
                    row.push_back(c <= n ? format_double(ops_.polys[static_cast<std::size_t>(n)][c])
                                         : std::string());
                t.rows.push_back(std::move(row));
            }
            return emit(t, opt, out);
        }
        case Command::moments: {
            const auto& data = *cfg.pearson_data;
            const auto spec = pearson::classify(data);
            const double mu0 = moments::moments_direct(spec, data, 0, opt.tol);
            const auto rec = moments::moments_by_recurrence(data, mu0, opt.n_max);
            const bool exp_branch = std::abs(data.B(1.0)) <= 1e-12 * std::max(1.0, data.magnitude());
            Table t{{"n", "mu_recurrence", "mu_direct", "mu_hypergeometric"}, {}};
            for (int n = 0; n <= opt.n_max; ++n) {
                std::vector<std::string> row{std::to_string(n),
                                             format_double(rec.mu[static_cast<std::size_t>(n)]),
                                             format_double(moments::moments_direct(spec, data, n, opt.tol))};
                row.push_back(exp_branch ? format_double(moments::moment_function(data, n, mu0))
                                         : std::string());
                t.rows.push_back(std::move(row));
            }
            return emit(t, opt, out);
        }
        case Command::reduce: {
            if (!cfg.model) throw ConfigError("reduce: requires a 'model' block");
            const auto model = cfg.model->build();
            const auto red = multiboson::reduce(model, cfg.model->lambdas, cfg.model->l, cfg.q);
            json j;
            j["kappa"] = red.kappa;
            const auto dec = multiboson::vacuum_lambdas(model, cfg.model->lambdas);
            j["L"] = dec.labels;
            j["lambda0"] = dec.lambda0;
            j["l"] = red.l;
            j["lambda0l"] = red.lambda0l;
            if (!opt.quiet) out << j.dump(2) << "\n";
            Table t{{"n", "R", "D"}, {}};
            for (int n = 0; n <= opt.n_max; ++n)
                t.rows.push_back({std::to_string(n), format_double(red.seq.R(n)),
                                  format_double(red.seq.D(n))});
            return emit(t, opt, out);
        }
        case Command::spectrum: {
            const StructuralSeq seq = structural_seq_for(cfg);
            const auto meas = spectral::spectrum(spectral::jacobi_matrix(seq, opt.M));
            Table t{{"omega", "mu"}, {}};
            for (std::size_t i = 0; i < meas.nodes.size(); ++i)
                t.rows.push_back({format_double(meas.nodes[i]), format_double(meas.weights[i])});
            return emit(t, opt, out);
        }
        case Command::amplitude: {
            const StructuralSeq seq = structural_seq_for(cfg);
            const auto meas = spectral::spectrum(spectral::jacobi_matrix(seq, opt.M));
            Table t{{"t", "re", "im", "abs"}, {}};
            for (double tt = 0.0; tt <= opt.t_max + 1e-12; tt += opt.t_step) {
                const std::complex<double> a = spectral::vacuum_amplitude(meas, tt);
                t.rows.push_back({format_double(tt), format_double(a.real()),
                                  format_double(a.imag()), format_double(std::abs(a))});
            }
            return emit(t, opt, out);
        }
        case Command::verify: {
            std::vector<CheckResult> results = cfg.pearson_data
                                                   ? verify_pearson(*cfg.pearson_data, opt)
                                                   : verify_model(*cfg.model, cfg);
            Table t{{"status", "check", "max_dev", "tol"}, {}};
            bool all = true;
            for (const auto& r : results) {
                all = all && r.pass;
                t.rows.push_back({r.pass ? "PASS" : "FAIL", r.name, format_double(r.max_dev),
                                  format_double(r.tol)});
            }
            Options topt = opt;
            if (topt.format == OutputFormat::csv && topt.output.empty())
                topt.format = OutputFormat::table;
            emit(t, topt, out);
            if (!all) err << "verify: some checks failed\n";
            return all ? kExitOk : 1;
        }
    }
    throw ConfigError("unhandled command");
}

} // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        return dispatch(config, out, err);
    } catch (const ConfigError& e) {
        err << json{{"error", {{"type", "config"}, {"message", e.what()}}}}.dump() << "\n";
        return kExitConfig;
    } catch (const NonConvergenceError& e) {
        err << json{{"error", {{"type", "non-convergence"}, {"message", e.what()}}}}.dump() << "\n";
        return kExitNonConvergence;
    } catch (const DomainError& e) {
        err << json{{"error", {{"type", "math-domain"}, {"message", e.what()}}}}.dump() << "\n";
        return kExitMathDomain;
    }
}

} // namespace qhahn::cli
