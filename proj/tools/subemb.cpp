// Command-line front end: sample matrices, estimate widths, run isometry
// cells and named experiments, and evaluate the exact oracles.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "subemb/subemb.hpp"

namespace {

using nlohmann::json;
using namespace subemb;

enum Exit : int { Ok = 0, Config = 2, Budget = 3, Io = 4 };

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !(out << text)) {
        throw IoError("cannot write '" + path + "'");
    }
}

struct EnsembleArgs {
    std::string variant = "approx_sparse";
    std::size_t m = 0;
    std::size_t n = 0;
    std::size_t s = 1;
    std::string base = "approx_sparse";
    double target = 0.0;  // 0: default lambda of the base ensemble
    double theta = 0.5;

    void attach(CLI::App* app) {
        app->add_option("--variant", variant, "dense_gaussian | dense_rademacher | approx_sparse | exact_sparse | "
                                              "column_normalized")
            ->capture_default_str();
        app->add_option("-m,--rows", m, "Number of rows")->required();
        app->add_option("-s,--sparsity", s, "Nonzeros per column (sparse variants)")->capture_default_str();
        app->add_option("--base", base, "Base ensemble for column_normalized")->capture_default_str();
        app->add_option("--target", target, "Target column norm for column_normalized (default: base lambda)");
        app->add_option("--theta", theta, "Threshold fraction for column_normalized")->capture_default_str();
    }

    [[nodiscard]] EnsembleSpec spec_for(std::size_t cols) const {
        const auto make = [&](Variant v) {
            switch (v) {
                case Variant::DenseGaussian: return EnsembleSpec::dense_gaussian(m, cols);
                case Variant::DenseRademacherScaled: return EnsembleSpec::dense_rademacher(m, cols);
                case Variant::ApproxSparse: return EnsembleSpec::approx_sparse(m, cols, s);
                case Variant::ExactSparse: return EnsembleSpec::exact_sparse(m, cols, s);
                case Variant::ColumnNormalized: break;
            }
            throw ParameterError("column_normalized cannot be its own base");
        };
        const Variant v = variant_from_string(variant);
        if (v != Variant::ColumnNormalized) {
            return make(v);
        }
        const EnsembleSpec inner = make(variant_from_string(base));
        return EnsembleSpec::column_normalized(inner, target > 0.0 ? target : default_lambda(inner), theta);
    }
};

struct SetArgs {
    std::string kind = "pair_differences";
    std::string csv;
    SetParams params;

    void attach(CLI::App* app) {
        app->add_option("--set", kind, "singleton | basis | difference | pair_differences | k_sparse | subspace | "
                                       "sphere_sample")
            ->capture_default_str();
        app->add_option("--set-csv", csv, "Load a finite set from CSV instead");
        app->add_option("-n,--dim", params.n, "Ambient dimension");
        app->add_option("-k", params.k, "Sparsity for k_sparse")->capture_default_str();
        app->add_option("-d", params.d, "Dimension for subspace")->capture_default_str();
        app->add_option("--count", params.count, "Points for sphere_sample")->capture_default_str();
        app->add_option("--set-seed", params.seed, "Seed for random sets")->capture_default_str();
    }

    [[nodiscard]] TestSet build() const {
        if (!csv.empty()) {
            return load_csv(read_file(csv), csv);
        }
        return build_set(set_kind_from_string(kind), params);
    }
};

int cmd_generate(const EnsembleArgs& e, std::size_t n, std::uint64_t seed, std::uint64_t trial, const std::string& out) {
    const auto spec = e.spec_for(n);
    write_output(out, dump_matrix(sample_matrix(spec, {seed, trial, 0})));
    return Ok;
}

int cmd_width(const SetArgs& s, std::size_t samples, std::uint64_t seed, bool complexity) {
    const auto t = s.build();
    const auto est = complexity ? estimate_complexity(t, samples, seed) : estimate_width(t, samples, seed);
    json j{{"set", t.id()}, {"kind", to_string(est.kind)}, {"value", est.value}, {"std_error", est.std_error},
           {"samples", est.samples}};
    if (complexity) {
        if (const auto exact = closed_form_complexity(t)) {
            j["closed_form"] = exact->value;
        }
    }
    std::cout << j.dump(2) << "\n";
    return Ok;
}

int cmd_isometry(const EnsembleArgs& e, const SetArgs& s, double lambda, std::size_t trials, std::uint64_t seed,
                 bool retain) {
    const auto t = s.build();
    const auto spec = e.spec_for(t.dim());
    const double lam = lambda > 0.0 ? lambda : default_lambda(spec);
    const auto r = isometry_trials(spec, t, lam, trials, seed, retain);
    const json j = experiments::to_json(r);
    std::cout << j.dump(2) << "\n";
    return Ok;
}

int cmd_experiment(const std::string& config_path, const std::string& output_override) {
    auto config = experiments::config_from_text(read_file(config_path));
    if (!output_override.empty()) {
        config.output = output_override;
    }
    const auto report = experiments::run_experiment(config);
    if (config.output.empty() || config.output == "-") {
        std::cout << experiments::to_csv(report);
    } else {
        experiments::emit_report(report, experiments::format_for_path(config.output), config.output);
        std::cerr << "wrote " << report.rows.size() << " rows to " << config.output << "\n";
    }
    return Ok;
}

std::size_t as_size(const std::vector<std::string>& params, std::size_t i, const std::string& name) {
    if (i >= params.size()) {
        throw ParameterError("oracle " + name + " expects more parameters");
    }
    return detail::parse_number<std::size_t>(params[i], "oracle parameter");
}

int cmd_oracle(const std::string& name, const std::vector<std::string>& params) {
    json j{{"oracle", name}};
    const auto put = [&](const oracles::ExactValue& v) {
        j["value"] = v.value;
        j["method"] = oracles::to_string(v.method);
        j["work"] = v.work;
    };
    if (name == "binom_sqrt_deviation") {
        put(oracles::binom_sqrt_deviation(as_size(params, 0, name), as_size(params, 1, name)));
    } else if (name == "collision_probability") {
        put(oracles::collision_probability(as_size(params, 0, name), as_size(params, 1, name)));
    } else if (name == "exact_sparse_count") {
        j["value"] = oracles::exact_sparse_count(as_size(params, 0, name), as_size(params, 1, name));
    } else if (name == "choose_n_for_lower_bound") {
        j["value"] = oracles::choose_n_for_lower_bound(as_size(params, 0, name), as_size(params, 1, name));
    } else if (name == "binom_central_moments") {
        const auto c = oracles::binom_central_moments(as_size(params, 0, name), as_size(params, 1, name));
        j["second"] = c.second;
        j["fourth"] = c.fourth;
    } else if (name == "scalar_psi2") {
        if (params.empty()) {
            throw ParameterError("scalar_psi2 expects a law, e.g. sparse_sign(1024,4)");
        }
        put(oracles::scalar_psi2_closed_form(oracles::ScalarLaw::parse(params[0])));
    } else if (name == "quadrature") {
        if (params.empty()) {
            throw ParameterError("quadrature expects an integral name");
        }
        put(oracles::quadrature(oracles::integral_from_string(params[0]), params.size() > 1 ? as_size(params, 1, name)
                                                                                            : 1));
    } else {
        throw ParameterError("unknown oracle '" + name + "'");
    }
    std::cout << j.dump(2) << "\n";
    return Ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse random embeddings: sampling, distortion, widths, experiments"};
    app.set_version_flag("--version", std::string(subemb::kVersion));
    app.require_subcommand(1);

    EnsembleArgs gen_ensemble;
    std::size_t gen_n = 0;
    std::uint64_t gen_seed = 0;
    std::uint64_t gen_trial = 0;
    std::string gen_out;
    auto* generate = app.add_subcommand("generate", "Sample one matrix and dump it in text form");
    gen_ensemble.attach(generate);
    generate->add_option("-n,--cols", gen_n, "Number of columns")->required();
    generate->add_option("--seed", gen_seed, "Master seed")->capture_default_str();
    generate->add_option("--trial", gen_trial, "Trial index")->capture_default_str();
    generate->add_option("-o,--output", gen_out, "Output file (default stdout)");

    SetArgs width_set;
    std::size_t width_samples = 2000;
    std::uint64_t width_seed = 0;
    bool width_complexity = false;
    auto* width = app.add_subcommand("width", "Monte Carlo Gaussian width or complexity of a test set");
    width_set.attach(width);
    width->add_option("--samples", width_samples, "Gaussian samples")->capture_default_str();
    width->add_option("--seed", width_seed, "Seed")->capture_default_str();
    width->add_flag("--complexity", width_complexity, "Estimate E sup |<g,x>| instead of E sup <g,x>");

    EnsembleArgs iso_ensemble;
    SetArgs iso_set;
    double iso_lambda = 0.0;
    std::size_t iso_trials = 100;
    std::uint64_t iso_seed = 0;
    bool iso_retain = false;
    auto* isometry = app.add_subcommand("isometry", "Distortion report for one ensemble and test set");
    iso_ensemble.attach(isometry);
    iso_set.attach(isometry);
    isometry->add_option("--lambda", iso_lambda, "Scaling (default: the ensemble's column norm)");
    isometry->add_option("--trials", iso_trials, "Independent matrices")->capture_default_str();
    isometry->add_option("--seed", iso_seed, "Master seed")->capture_default_str();
    isometry->add_flag("--retain", iso_retain, "Include per-trial distortions");

    std::string config_path;
    std::string experiment_output;
    auto* experiment = app.add_subcommand("experiment", "Named experiments");
    experiment->require_subcommand(1);
    auto* run = experiment->add_subcommand("run", "Run an experiment from a JSON config");
    run->add_option("--config", config_path, "Config file")->required();
    run->add_option("-o,--output", experiment_output, "Override the config's output path (.csv or .json)");

    std::string oracle_name;
    std::vector<std::string> oracle_params;
    auto* oracle = app.add_subcommand("oracle", "Evaluate an exact oracle");
    oracle->add_option("name", oracle_name,
                       "binom_sqrt_deviation | binom_central_moments | collision_probability | exact_sparse_count | "
                       "choose_n_for_lower_bound | scalar_psi2 | quadrature")
        ->required();
    oracle->add_option("params", oracle_params, "Oracle parameters");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? Ok : Config;
    }

    try {
        if (*generate) {
            return cmd_generate(gen_ensemble, gen_n, gen_seed, gen_trial, gen_out);
        }
        if (*width) {
            return cmd_width(width_set, width_samples, width_seed, width_complexity);
        }
        if (*isometry) {
            return cmd_isometry(iso_ensemble, iso_set, iso_lambda, iso_trials, iso_seed, iso_retain);
        }
        if (*run) {
            return cmd_experiment(config_path, experiment_output);
        }
        if (*oracle) {
            return cmd_oracle(oracle_name, oracle_params);
        }
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return Io;
    } catch (const BudgetExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return Budget;
    } catch (const OverflowError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return Budget;
    } catch (const ResampleExhausted& e) {
        std::cerr << "error: " << e.what() << "\n";
        return Budget;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return Config;
    }
    return Ok;
}
